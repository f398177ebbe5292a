//! Differential of the normal-graph map `phi(x) = x + nu(x) n(x)` and its
//! singular values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::normal_graph::NormalGraph;
use crate::geometry::curvature::quadric_fit_curvature;
use crate::surfaces::generate::HelicoidModel;

/// Per-vertex singular values of `d phi` on the tangent plane and the global
/// Lipschitz interval, with the fitted comparison model when one was used.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistortionReport {
    pub sigma_min: Vec<f64>,
    pub sigma_max: Vec<f64>,
    pub interval: (f64, f64),
    /// Homothety applied so the base satisfies `|A| <= 1`.
    pub rescale_factor: f64,
    /// `sup(|nu| + |grad nu|)` in the rescaled gauge.
    pub sup_norm_rescaled: f64,
    pub fitted: Option<HelicoidModel>,
    /// Root-mean-square distance of the compared patch from the model.
    pub fit_residual: Option<f64>,
}

/// Assemble `d phi (e_i) = e_i + <grad nu, e_i> n + nu Dn(e_i)` at each vertex
/// on an orthonormal tangent basis and take singular values of the 3x2 map.
///
/// The base is rescaled so `|A| <= 1` (the factor is recorded); the singular
/// values themselves are scale invariant.
pub fn phi_distortion(g: &NormalGraph) -> Result<DistortionReport> {
    let a2 = g.base.a2.as_ref().ok_or(Error::MissingCurvature)?;
    let frames = match &g.base.frames {
        Some(f) => f.clone(),
        None => quadric_fit_curvature(&g.base)?.1,
    };
    let max_a = a2.iter().fold(0.0f64, |m, v| m.max(*v)).sqrt();
    let rescale = max_a.max(1.0);
    let mut sigma_min = Vec::with_capacity(g.nu.len());
    let mut sigma_max = Vec::with_capacity(g.nu.len());
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut sup_rescaled = 0.0f64;
    for v in 0..g.nu.len() {
        let nu = g.nu[v];
        let dn = frames[v].dn;
        let gn = g.grad_nu[v];
        // columns of d phi in the (e1, e2, n) basis
        let c1 = [1.0 + nu * dn[(0, 0)], nu * dn[(0, 1)], gn[0]];
        let c2 = [nu * dn[(1, 0)], 1.0 + nu * dn[(1, 1)], gn[1]];
        let (smin, smax) = singular_values(c1, c2);
        sigma_min.push(smin);
        sigma_max.push(smax);
        lo = lo.min(smin);
        hi = hi.max(smax);
        sup_rescaled = sup_rescaled.max(rescale * nu.abs() + gn.norm());
    }
    Ok(DistortionReport {
        sigma_min,
        sigma_max,
        interval: (lo, hi),
        rescale_factor: rescale,
        sup_norm_rescaled: sup_rescaled,
        fitted: None,
        fit_residual: None,
    })
}

/// Singular values of the 3x2 matrix with the given columns.
fn singular_values(c1: [f64; 3], c2: [f64; 3]) -> (f64, f64) {
    let a = c1.iter().map(|x| x * x).sum::<f64>();
    let b = c1.iter().zip(&c2).map(|(x, y)| x * y).sum::<f64>();
    let d = c2.iter().map(|x| x * x).sum::<f64>();
    // eigenvalues of [[a, b], [b, d]]
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b * b).sqrt();
    let l1 = 0.5 * (tr - disc);
    let l2 = 0.5 * (tr + disc);
    (l1.max(0.0).sqrt(), l2.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::normal_graph::from_offsets;
    use crate::geometry::mesh::MeshPatch;
    use crate::surfaces::generate::{helicoid_mesh, HelicoidModel};
    use approx::assert_relative_eq;
    use nalgebra::Vector3;

    fn flat_grid(n: usize) -> MeshPatch {
        let mut vertices = Vec::new();
        for i in 0..n {
            for j in 0..n {
                vertices.push(Vector3::new(
                    i as f64 / (n - 1) as f64,
                    j as f64 / (n - 1) as f64,
                    0.0,
                ));
            }
        }
        let mut triangles = Vec::new();
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                let v = |a: usize, b: usize| a * n + b;
                triangles.push([v(i, j), v(i + 1, j), v(i + 1, j + 1)]);
                triangles.push([v(i, j), v(i + 1, j + 1), v(i, j + 1)]);
            }
        }
        let mut m = MeshPatch::new(vertices, triangles).unwrap();
        m.a2 = Some(vec![0.0; n * n]);
        m
    }

    #[test]
    fn zero_offset_gives_the_unit_interval_exactly() {
        let model = HelicoidModel::axis_aligned(1.0);
        let base = helicoid_mesh(&model, (0.5, 2.0), (-1.0, 1.0), 17, 17).unwrap();
        let nv = base.n_vertices();
        let g = from_offsets(base, vec![0.0; nv]).unwrap();
        let rep = phi_distortion(&g).unwrap();
        assert_eq!(rep.interval, (1.0, 1.0));
        assert!(rep.sigma_min.iter().all(|&s| s == 1.0));
        assert!(rep.sigma_max.iter().all(|&s| s == 1.0));
    }

    #[test]
    fn linear_offset_on_a_plane_has_the_closed_form_singular_values() {
        // nu = 0.01 x: d phi stretches e1 into e1 + 0.01 n
        let base = flat_grid(17);
        let nu: Vec<f64> = base.vertices.iter().map(|v| 0.01 * v.x).collect();
        let g = from_offsets(base, nu).unwrap();
        let rep = phi_distortion(&g).unwrap();
        let expect = (1.0f64 + 1e-4).sqrt();
        assert_relative_eq!(rep.interval.1, expect, epsilon = 1e-9);
        assert_relative_eq!(rep.interval.0, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn interval_width_grows_monotonically_with_the_offset_scale() {
        let base = flat_grid(17);
        let mut widths = Vec::new();
        for k in 1..=4 {
            let t = 0.25 * k as f64;
            let nu: Vec<f64> = base.vertices.iter().map(|v| 0.01 * t * v.x).collect();
            let g = from_offsets(base.clone(), nu).unwrap();
            let rep = phi_distortion(&g).unwrap();
            widths.push(rep.interval.1 - rep.interval.0);
        }
        for w in widths.windows(2) {
            assert!(w[1] > w[0], "widths {widths:?}");
        }
    }

    #[test]
    fn helicoid_base_rescales_to_unit_curvature() {
        let model = HelicoidModel::axis_aligned(1.0);
        let base = helicoid_mesh(&model, (-1.0, 1.0), (-1.0, 1.0), 17, 17).unwrap();
        let nv = base.n_vertices();
        let g = from_offsets(base, vec![0.0; nv]).unwrap();
        let rep = phi_distortion(&g).unwrap();
        // max |A| = sqrt(2) on the axis
        assert_relative_eq!(rep.rescale_factor, 2.0f64.sqrt(), epsilon = 1e-12);
    }
}
