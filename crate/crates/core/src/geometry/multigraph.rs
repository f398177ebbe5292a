//! Sampled multivalued graphs over polar rectangles.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::field::{ScalarField, Unit};
use crate::geometry::polar::{PolarGrid, PolarRect};
use crate::surfaces::analytic::GraphFormula;

/// A multivalued graph: nodal heights `u(rho_i, theta_j)` over a polar grid,
/// embedded at `Phi_u(rho, theta) + center`.
///
/// The angular span may exceed `2*pi`; sheets over the same annulus point are
/// distinct samples and are never identified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiGraph {
    pub grid: PolarGrid,
    /// Heights, row-major (`i * n_theta + j`).
    pub values: Vec<f64>,
    /// Translation applied to the embedded graph.
    pub center: Vector3<f64>,
    /// Number of full turns covered by the angular span.
    pub winding: u32,
    /// Closed form, when this graph was sampled from one.
    pub analytic: Option<GraphFormula>,
}

/// Sign pattern of a separation field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparationSign {
    Positive,
    Negative,
    Mixed,
    /// Vanishes somewhere: the graph is not embedded as a multivalued graph.
    Vanishing,
}

/// Separation `w(rho, theta) = u(rho, theta + 2*pi) - u(rho, theta)` on the
/// overlap subdomain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    pub grid: PolarGrid,
    pub w: ScalarField,
    pub sign: SeparationSign,
    pub min_abs: f64,
}

impl MultiGraph {
    pub fn from_values(grid: PolarGrid, values: Vec<f64>, center: Vector3<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        for (node, v) in values.iter().enumerate() {
            if !v.is_finite() {
                let (i, j) = grid.ij(node);
                return Err(Error::NonFinite { node, i, j });
            }
        }
        let winding = winding_of(&grid.rect);
        Ok(MultiGraph {
            grid,
            values,
            center,
            winding,
            analytic: None,
        })
    }

    pub fn from_fn(
        grid: PolarGrid,
        center: Vector3<f64>,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.n_rho {
            for j in 0..grid.n_theta {
                values.push(f(grid.rho(i), grid.theta(j)));
            }
        }
        Self::from_values(grid, values, center)
    }

    /// Sample a closed form and keep it attached for exact evaluation.
    pub fn from_formula(grid: PolarGrid, center: Vector3<f64>, formula: GraphFormula) -> Result<Self> {
        let mut g = Self::from_fn(grid, center, |r, t| formula.eval(r, t))?;
        g.analytic = Some(formula);
        Ok(g)
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    /// World-space position of node `(i, j)`.
    pub fn vertex(&self, i: usize, j: usize) -> Vector3<f64> {
        let rho = self.grid.rho(i);
        let theta = self.grid.theta(j);
        Vector3::new(rho * theta.cos(), rho * theta.sin(), self.at(i, j)) + self.center
    }

    /// Bilinear interpolation of `u` at an interior point of the rectangle.
    pub fn interp(&self, rho: f64, theta: f64) -> Option<f64> {
        let i = self.grid.radial_cell(rho)?;
        let i = i.min(self.grid.n_rho - 2);
        let j = self.grid.angular_cell(theta)?;
        let (r0, r1) = (self.grid.rho(i), self.grid.rho(i + 1));
        let (t0, t1) = (self.grid.theta(j), self.grid.theta(j + 1));
        let s = ((rho - r0) / (r1 - r0)).clamp(0.0, 1.0);
        let t = ((theta - t0) / (t1 - t0)).clamp(0.0, 1.0);
        let f00 = self.at(i, j);
        let f01 = self.at(i, j + 1);
        let f10 = self.at(i + 1, j);
        let f11 = self.at(i + 1, j + 1);
        Some((1.0 - s) * ((1.0 - t) * f00 + t * f01) + s * ((1.0 - t) * f10 + t * f11))
    }

    /// Separation on the overlap subdomain, or `None` when the angular span
    /// is below a full turn (empty-domain marker).
    pub fn separation(&self) -> Result<Option<Separation>> {
        let span = self.grid.rect.theta_span();
        let two_pi = 2.0 * std::f64::consts::PI;
        if span < two_pi * (1.0 - 1e-12) {
            return Ok(None);
        }
        let shift = self.grid.full_turn_shift().ok_or(Error::SeparationNotAligned)?;
        let n_theta_w = self.grid.n_theta - shift;
        if n_theta_w < 1 {
            return Ok(None);
        }
        let mut data = Vec::with_capacity(self.grid.n_rho * n_theta_w);
        for i in 0..self.grid.n_rho {
            for j in 0..n_theta_w {
                data.push(self.at(i, j + shift) - self.at(i, j));
            }
        }
        let mut pos = false;
        let mut neg = false;
        let mut min_abs = f64::INFINITY;
        for &v in &data {
            if v > 0.0 {
                pos = true;
            } else if v < 0.0 {
                neg = true;
            }
            min_abs = min_abs.min(v.abs());
        }
        let sign = if min_abs == 0.0 {
            SeparationSign::Vanishing
        } else if pos && neg {
            SeparationSign::Mixed
        } else if pos {
            SeparationSign::Positive
        } else {
            SeparationSign::Negative
        };
        // The overlap can be a single angular line (exactly one full turn);
        // represent it on a degenerate 1-column grid only when wider.
        let grid = if n_theta_w >= 2 {
            let rect = PolarRect::new(
                self.grid.rect.r1,
                self.grid.rect.r2,
                self.grid.theta(0),
                self.grid.theta(n_theta_w - 1),
            )?;
            PolarGrid::raw(
                rect,
                self.grid.radial,
                self.grid.truncated_from,
                self.grid.rhos().to_vec(),
                self.grid.thetas()[..n_theta_w].to_vec(),
            )
        } else {
            // single-column overlap: the span is exactly one full turn
            let rect = PolarRect::new(
                self.grid.rect.r1,
                self.grid.rect.r2,
                self.grid.theta(0),
                self.grid.theta(0) + 1e-12,
            )?;
            PolarGrid::raw(
                rect,
                self.grid.radial,
                self.grid.truncated_from,
                self.grid.rhos().to_vec(),
                vec![self.grid.theta(0)],
            )
        };
        Ok(Some(Separation {
            grid,
            w: ScalarField::new(Unit::Length, data),
            sign,
            min_abs,
        }))
    }

    /// Restrict to the node-aligned subgraph whose rectangle covers `target`
    /// as tightly as possible.
    pub fn restrict(&self, target: &PolarRect) -> Result<MultiGraph> {
        if !self.grid.rect.contains_rect(target) {
            return Err(Error::InsufficientDomain {
                r1: target.r1,
                r2: target.r2,
                theta1: target.theta1,
                theta2: target.theta2,
            });
        }
        let rhos = self.grid.rhos();
        let thetas = self.grid.thetas();
        let i0 = rhos.iter().rposition(|&r| r <= target.r1 * (1.0 + 1e-12)).unwrap_or(0);
        let i1 = rhos
            .iter()
            .position(|&r| r >= target.r2 * (1.0 - 1e-12))
            .unwrap_or(self.grid.n_rho - 1);
        let j0 = thetas
            .iter()
            .rposition(|&t| t <= target.theta1 + 1e-12)
            .unwrap_or(0);
        let j1 = thetas
            .iter()
            .position(|&t| t >= target.theta2 - 1e-12)
            .unwrap_or(self.grid.n_theta - 1);
        let grid = self.grid.subgrid(i0, i1, j0, j1)?;
        let mut values = Vec::with_capacity(grid.len());
        for i in i0..=i1 {
            for j in j0..=j1 {
                values.push(self.at(i, j));
            }
        }
        let mut out = MultiGraph::from_values(grid, values, self.center)?;
        out.analytic = self.analytic;
        Ok(out)
    }

    /// Nodal values along the four Dirichlet edges, in grid order.
    pub fn boundary_values(&self) -> Vec<f64> {
        let g = &self.grid;
        let mut out = Vec::new();
        for j in 0..g.n_theta {
            out.push(self.at(0, j));
        }
        for j in 0..g.n_theta {
            out.push(self.at(g.n_rho - 1, j));
        }
        for i in 0..g.n_rho {
            out.push(self.at(i, 0));
        }
        for i in 0..g.n_rho {
            out.push(self.at(i, g.n_theta - 1));
        }
        out
    }
}

fn winding_of(rect: &PolarRect) -> u32 {
    let turns = rect.theta_span() / (2.0 * std::f64::consts::PI);
    (turns + 1e-9).floor().max(0.0) as u32
}
