//! Membership in the between-sheets region of a multivalued graph: points
//! over the annulus at angle `theta` in `[-2 pi, 0)` whose height lies
//! strictly between the bottom sheet `u(rho, theta - pi N)` and the top sheet
//! `u(rho, theta + (N + 2) pi)`.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::multigraph::MultiGraph;
use crate::geometry::polar::PolarRect;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionEVerdict {
    Inside,
    /// Radius outside the annulus of the graph.
    OutsideRadial,
    /// Height not strictly between the bounding sheets.
    OutsideHeight,
}

impl RegionEVerdict {
    pub fn is_inside(&self) -> bool {
        matches!(self, RegionEVerdict::Inside)
    }
}

/// Test whether `p` (world coordinates) lies between the top and bottom
/// sheets of `u1`.  Needs `u1` to span `N + 2` full turns.
pub fn region_e_membership(u1: &MultiGraph, n_turns: u32, p: Vector3<f64>) -> Result<RegionEVerdict> {
    let need = PolarRect::sheet(
        u1.grid.rect.r1,
        u1.grid.rect.r2,
        n_turns + 2,
    )?;
    if !u1.grid.rect.contains_rect(&need) {
        return Err(Error::InsufficientDomain {
            r1: need.r1,
            r2: need.r2,
            theta1: need.theta1,
            theta2: need.theta2,
        });
    }
    let q = p - u1.center;
    let rho = q.x.hypot(q.y);
    let rect = &u1.grid.rect;
    if rho < rect.r1 * (1.0 - 1e-12) || rho > rect.r2 * (1.0 + 1e-12) {
        return Ok(RegionEVerdict::OutsideRadial);
    }
    let rho = rho.clamp(rect.r1, rect.r2);
    // principal angle mapped into [-2 pi, 0)
    let mut theta = q.y.atan2(q.x);
    if theta >= 0.0 {
        theta -= 2.0 * std::f64::consts::PI;
    }
    let n = f64::from(n_turns);
    let lo = u1
        .interp(rho, theta - n * std::f64::consts::PI)
        .ok_or_else(|| Error::invalid("bottom sheet sample escaped the domain"))?;
    let hi = u1
        .interp(rho, theta + (n + 2.0) * std::f64::consts::PI)
        .ok_or_else(|| Error::invalid("top sheet sample escaped the domain"))?;
    if lo < q.z && q.z < hi {
        Ok(RegionEVerdict::Inside)
    } else {
        Ok(RegionEVerdict::OutsideHeight)
    }
}
