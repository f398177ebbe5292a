//! Stereographic Gauss map of a graph, its logarithm along paths, level-set
//! tracing on meshes, and the axis/sheets decomposition.

pub mod decompose;
pub mod levels;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::derive::derivatives;
use crate::geometry::multigraph::MultiGraph;
use crate::geometry::polar::PolarGrid;

pub use decompose::{decompose, DecompositionLabeling, RegionLabel, Violation};
pub use levels::{trace_level_set, LevelSetTrace};

/// Nodes with `|grad u|` below this are masked (the map is singular there).
pub const GAUSS_MASK_TOL: f64 = 1e-10;

/// Stereographic Gauss map samples of a graph, with the tangential vertical
/// gradient computed independently of the map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussField {
    pub grid: PolarGrid,
    pub g_re: Vec<f64>,
    pub g_im: Vec<f64>,
    pub mask: Vec<bool>,
    pub grad_x3: Vec<f64>,
}

impl GaussField {
    #[inline]
    pub fn g(&self, k: usize) -> Complex64 {
        Complex64::new(self.g_re[k], self.g_im[k])
    }

    pub fn unmasked(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.mask.len()).filter(|&k| self.mask[k])
    }
}

/// Evaluate `g = -(u_rho + i u_theta / rho) e^{i theta} / (W - 1)` per node,
/// masking near-critical points, with `|grad_S x3|` from the tangent-plane
/// projection of the vertical direction.
pub fn gauss_from_graph(u: &MultiGraph) -> Result<GaussField> {
    let d = derivatives(u)?;
    let g = &u.grid;
    let n = g.len();
    let mut g_re = vec![0.0; n];
    let mut g_im = vec![0.0; n];
    let mut mask = vec![false; n];
    let mut grad_x3 = vec![0.0; n];
    let mut any = false;
    for i in 0..g.n_rho {
        let rho = g.rho(i);
        for j in 0..g.n_theta {
            let k = g.idx(i, j);
            let (ux, uy) = (d.grad.x[k], d.grad.y[k]);
            let norm = ux.hypot(uy);
            // independent route: project e3 onto the tangent plane via the
            // graph normal
            let w = (1.0 + ux * ux + uy * uy).sqrt();
            let nvec = nalgebra::Vector3::new(-ux, -uy, 1.0) / w;
            let proj = nalgebra::Vector3::z() - nvec.z * nvec;
            grad_x3[k] = proj.norm();
            if norm < GAUSS_MASK_TOL {
                continue;
            }
            let phase = Complex64::from_polar(1.0, g.theta(j));
            let val = -Complex64::new(d.u_rho[k], d.u_theta[k] / rho) * phase / (w - 1.0);
            g_re[k] = val.re;
            g_im[k] = val.im;
            mask[k] = true;
            any = true;
        }
    }
    if !any {
        return Err(Error::FlatPatch);
    }
    Ok(GaussField {
        grid: g.clone(),
        g_re,
        g_im,
        mask,
        grad_x3,
    })
}

/// Sup over unmasked nodes of the defect of `|grad_S x3| = 2|g|/(1+|g|^2)`.
pub fn check_gauss_identity(field: &GaussField) -> f64 {
    let mut sup = 0.0f64;
    for k in field.unmasked() {
        let m = field.g(k).norm();
        sup = sup.max((field.grad_x3[k] - 2.0 * m / (1.0 + m * m)).abs());
    }
    sup
}

/// Log of the Gauss map along a node path: `h1 = ln|g|`, `h2` the argument
/// continued from its principal value at the path start.  Jumps beyond pi/2
/// between consecutive nodes fail the continuation.
pub fn log_gauss_branch(field: &GaussField, path: &[usize]) -> Result<Vec<Complex64>> {
    if path.is_empty() {
        return Err(Error::invalid("empty path"));
    }
    for &k in path {
        if k >= field.mask.len() || !field.mask[k] {
            return Err(Error::invalid(format!("path node {k} is masked or out of range")));
        }
    }
    let mut out = Vec::with_capacity(path.len());
    let g0 = field.g(path[0]);
    let mut h2 = g0.arg();
    out.push(Complex64::new(g0.norm().ln(), h2));
    for w in path.windows(2) {
        let (a, b) = (field.g(w[0]), field.g(w[1]));
        let jump = (b / a).arg();
        if jump.abs() > std::f64::consts::FRAC_PI_2 {
            return Err(Error::PathTooCoarse { from: w[0], to: w[1] });
        }
        h2 += jump;
        out.push(Complex64::new(b.norm().ln(), h2));
    }
    Ok(out)
}
