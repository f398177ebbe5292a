//! The flatness expression of a multivalued graph:
//! `|grad u| + rho |Hess u| + 4 rho |grad w| / |w| + rho^2 |Hess w| / |w|`,
//! with Frobenius norms on the Hessians, evaluated where the separation is
//! defined.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::derive::derivatives;
use crate::geometry::field::{ScalarField, Unit};
use crate::geometry::multigraph::MultiGraph;
use crate::geometry::polar::PolarGrid;
use crate::surfaces::analytic::GraphFormula;

/// Nodes with `|w|` below this multiple of the outer radius are singular.
pub const SEPARATION_SINGULAR_FACTOR: f64 = 1e-14;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlatnessTerms {
    /// Overlap subgrid the expression lives on.
    pub grid: PolarGrid,
    /// Pointwise value of the full expression.
    pub total: ScalarField,
    /// The four summands, in display order.
    pub term_grad: ScalarField,
    pub term_rho_hess: ScalarField,
    pub term_w_grad: ScalarField,
    pub term_w_hess: ScalarField,
    pub sup_total: f64,
    pub sup_grad: f64,
    pub sup_rho_hess: f64,
    pub sup_w_grad: f64,
    pub sup_w_hess: f64,
}

/// Evaluate the flatness expression.  Errors when the angular span is below a
/// full turn or the separation vanishes somewhere (graph not embedded).
pub fn flatness_terms(u: &MultiGraph) -> Result<FlatnessTerms> {
    let sep = u
        .separation()?
        .ok_or_else(|| Error::invalid("flatness needs at least one full angular turn"))?;
    let w_tol = SEPARATION_SINGULAR_FACTOR * u.grid.rect.r2;
    let singular: Vec<usize> = sep
        .w
        .data
        .iter()
        .enumerate()
        .filter(|(_, w)| w.abs() < w_tol)
        .map(|(k, _)| k)
        .collect();
    if !singular.is_empty() {
        let count = singular.len();
        return Err(Error::SeparationVanishes {
            count,
            first: singular.into_iter().take(8).collect(),
        });
    }

    let du = derivatives(u)?;
    // the separation inherits a closed form: every attached family has a
    // 2*pi-periodic angular part, so w is the constant 2*pi*pitch
    let mut wg = MultiGraph::from_values(
        sep.grid.clone(),
        sep.w.data.clone(),
        nalgebra::Vector3::zeros(),
    )?;
    wg.analytic = u.analytic.map(|f| {
        let pitch = match f {
            GraphFormula::Helicoid { pitch } => pitch,
            GraphFormula::RadialPower { pitch, .. } => pitch,
            GraphFormula::AngularRipple { pitch, .. } => pitch,
            GraphFormula::Plane { .. } | GraphFormula::Catenoid { .. } => 0.0,
        };
        GraphFormula::Plane {
            gx: 0.0,
            gy: 0.0,
            offset: 2.0 * std::f64::consts::PI * pitch,
        }
    });
    let dw = derivatives(&wg)?;

    let g = &sep.grid;
    let mut total = Vec::with_capacity(g.len());
    let mut f1 = Vec::with_capacity(g.len());
    let mut f2 = Vec::with_capacity(g.len());
    let mut f3 = Vec::with_capacity(g.len());
    let mut f4 = Vec::with_capacity(g.len());
    let (mut s_tot, mut s_grad, mut s_rh, mut s_wg, mut s_wh) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..g.n_rho {
        let rho = g.rho(i);
        for j in 0..g.n_theta {
            let k = g.idx(i, j);
            let ku = u.grid.idx(i, j); // overlap shares the leading columns
            let w = sep.w.data[k].abs();
            let t1 = du.grad_norm(ku);
            let t2 = rho * du.hess_frobenius(ku);
            let t3 = 4.0 * rho * dw.grad_norm(k) / w;
            let t4 = rho * rho * dw.hess_frobenius(k) / w;
            let v = t1 + t2 + t3 + t4;
            total.push(v);
            f1.push(t1);
            f2.push(t2);
            f3.push(t3);
            f4.push(t4);
            s_tot = s_tot.max(v);
            s_grad = s_grad.max(t1);
            s_rh = s_rh.max(t2);
            s_wg = s_wg.max(t3);
            s_wh = s_wh.max(t4);
        }
    }
    Ok(FlatnessTerms {
        grid: sep.grid,
        total: ScalarField::new(Unit::Dimensionless, total),
        term_grad: ScalarField::new(Unit::Dimensionless, f1),
        term_rho_hess: ScalarField::new(Unit::Dimensionless, f2),
        term_w_grad: ScalarField::new(Unit::Dimensionless, f3),
        term_w_hess: ScalarField::new(Unit::Dimensionless, f4),
        sup_total: s_tot,
        sup_grad: s_grad,
        sup_rho_hess: s_rh,
        sup_w_grad: s_wg,
        sup_w_hess: s_wh,
    })
}
