//! First and second derivatives of a multivalued graph.
//!
//! Interior nodes use centered second-order stencils, domain edges one-sided
//! second-order ones; radial stencils handle the geometric node placement.
//! When a closed form is attached the stencils are bypassed entirely.

use crate::error::{Error, Result};
use crate::geometry::field::{ScalarField, Unit, VectorField};
use crate::geometry::multigraph::MultiGraph;
use crate::geometry::polar::{MIN_N_RHO, MIN_N_THETA};

/// Finite-difference weights for the `m`-th derivative at `x0` from the nodes
/// `xs` (Fornberg's recursion).
pub fn fd_weights(m: usize, x0: f64, xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    assert!(n > m);
    let mut c = vec![vec![0.0f64; m + 1]; n];
    let mut c1 = 1.0f64;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0f64;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Per-axis stencil table: for each node, the participating node indices and
/// weights for the first and second derivative.
struct AxisStencils {
    first: Vec<(Vec<usize>, Vec<f64>)>,
    second: Vec<(Vec<usize>, Vec<f64>)>,
}

fn axis_stencils(xs: &[f64]) -> AxisStencils {
    let n = xs.len();
    let mut first = Vec::with_capacity(n);
    let mut second = Vec::with_capacity(n);
    for i in 0..n {
        // first derivative: 3 nodes, centered where possible
        let f_lo = if i == 0 {
            0
        } else if i == n - 1 {
            n - 3
        } else {
            i - 1
        };
        let f_idx: Vec<usize> = (f_lo..f_lo + 3).collect();
        let f_x: Vec<f64> = f_idx.iter().map(|&k| xs[k]).collect();
        first.push((f_idx, fd_weights(1, xs[i], &f_x)));
        // second derivative: 3 centered nodes inside, 4 one-sided at edges
        let (s_lo, s_len) = if i == 0 {
            (0, 4)
        } else if i == n - 1 {
            (n - 4, 4)
        } else {
            (i - 1, 3)
        };
        let s_idx: Vec<usize> = (s_lo..s_lo + s_len).collect();
        let s_x: Vec<f64> = s_idx.iter().map(|&k| xs[k]).collect();
        second.push((s_idx, fd_weights(2, xs[i], &s_x)));
    }
    AxisStencils { first, second }
}

/// Gradient and Hessian of a graph in the Cartesian frame, one entry per node.
#[derive(Debug, Clone)]
pub struct GraphDerivatives {
    /// Raw parameter derivatives.
    pub u_rho: Vec<f64>,
    pub u_theta: Vec<f64>,
    /// Cartesian gradient components.
    pub grad: VectorField,
    /// Cartesian Hessian entries.
    pub hess_xx: Vec<f64>,
    pub hess_xy: Vec<f64>,
    pub hess_yy: Vec<f64>,
}

impl GraphDerivatives {
    #[inline]
    pub fn grad_norm(&self, idx: usize) -> f64 {
        self.grad.norm_at(idx)
    }

    /// Frobenius norm of the Hessian (frame invariant).
    #[inline]
    pub fn hess_frobenius(&self, idx: usize) -> f64 {
        (self.hess_xx[idx].powi(2) + 2.0 * self.hess_xy[idx].powi(2) + self.hess_yy[idx].powi(2))
            .sqrt()
    }

    pub fn len(&self) -> usize {
        self.u_rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u_rho.is_empty()
    }

    pub fn grad_norm_field(&self) -> ScalarField {
        ScalarField::new(
            Unit::Dimensionless,
            (0..self.len()).map(|i| self.grad_norm(i)).collect(),
        )
    }
}

/// Convert polar parameter derivatives at `(rho, theta)` into Cartesian
/// gradient and Hessian entries.
#[allow(clippy::too_many_arguments)]
pub fn polar_jet_to_cartesian(
    rho: f64,
    theta: f64,
    u_r: f64,
    u_t: f64,
    u_rr: f64,
    u_rt: f64,
    u_tt: f64,
) -> (f64, f64, f64, f64, f64) {
    let (s, c) = theta.sin_cos();
    let gx = c * u_r - s * u_t / rho;
    let gy = s * u_r + c * u_t / rho;
    // orthonormal polar-frame Hessian entries
    let h_rr = u_rr;
    let h_rt = (u_rt - u_t / rho) / rho;
    let h_tt = u_tt / (rho * rho) + u_r / rho;
    // rotate into the Cartesian frame
    let hxx = c * c * h_rr - 2.0 * s * c * h_rt + s * s * h_tt;
    let hxy = s * c * (h_rr - h_tt) + (c * c - s * s) * h_rt;
    let hyy = s * s * h_rr + 2.0 * s * c * h_rt + c * c * h_tt;
    (gx, gy, hxx, hxy, hyy)
}

/// Compute derivatives of `u`, exactly if a closed form is attached, by
/// finite differences otherwise.
pub fn derivatives(u: &MultiGraph) -> Result<GraphDerivatives> {
    let g = &u.grid;
    if g.n_rho < MIN_N_RHO || g.n_theta < MIN_N_THETA {
        return Err(Error::GridTooCoarse {
            min_rho: MIN_N_RHO,
            min_theta: MIN_N_THETA,
        });
    }
    let n = g.len();
    let mut u_rho = vec![0.0; n];
    let mut u_theta = vec![0.0; n];
    let mut u_rr = vec![0.0; n];
    let mut u_rt = vec![0.0; n];
    let mut u_tt = vec![0.0; n];

    if let Some(f) = u.analytic {
        for i in 0..g.n_rho {
            for j in 0..g.n_theta {
                let jet = f.jet(g.rho(i), g.theta(j));
                let k = g.idx(i, j);
                u_rho[k] = jet.u_rho;
                u_theta[k] = jet.u_theta;
                u_rr[k] = jet.u_rho_rho;
                u_rt[k] = jet.u_rho_theta;
                u_tt[k] = jet.u_theta_theta;
            }
        }
    } else {
        let sr = axis_stencils(g.rhos());
        let st = axis_stencils(g.thetas());
        for i in 0..g.n_rho {
            for j in 0..g.n_theta {
                let k = g.idx(i, j);
                let (ri, rw) = &sr.first[i];
                u_rho[k] = ri.iter().zip(rw).map(|(&ii, &w)| w * u.at(ii, j)).sum();
                let (ri2, rw2) = &sr.second[i];
                u_rr[k] = ri2.iter().zip(rw2).map(|(&ii, &w)| w * u.at(ii, j)).sum();
                let (tj, tw) = &st.first[j];
                u_theta[k] = tj.iter().zip(tw).map(|(&jj, &w)| w * u.at(i, jj)).sum();
                let (tj2, tw2) = &st.second[j];
                u_tt[k] = tj2.iter().zip(tw2).map(|(&jj, &w)| w * u.at(i, jj)).sum();
                // mixed derivative: tensor product of the first-derivative stencils
                let mut mixed = 0.0;
                for (&ii, &wr) in ri.iter().zip(rw) {
                    let mut row = 0.0;
                    for (&jj, &wt) in tj.iter().zip(tw) {
                        row += wt * u.at(ii, jj);
                    }
                    mixed += wr * row;
                }
                u_rt[k] = mixed;
            }
        }
    }

    let mut gx = vec![0.0; n];
    let mut gy = vec![0.0; n];
    let mut hxx = vec![0.0; n];
    let mut hxy = vec![0.0; n];
    let mut hyy = vec![0.0; n];
    for i in 0..g.n_rho {
        for j in 0..g.n_theta {
            let k = g.idx(i, j);
            let (a, b, c, d, e) = polar_jet_to_cartesian(
                g.rho(i),
                g.theta(j),
                u_rho[k],
                u_theta[k],
                u_rr[k],
                u_rt[k],
                u_tt[k],
            );
            gx[k] = a;
            gy[k] = b;
            hxx[k] = c;
            hxy[k] = d;
            hyy[k] = e;
        }
    }
    Ok(GraphDerivatives {
        u_rho,
        u_theta,
        grad: VectorField::new(Unit::Dimensionless, gx, gy),
        hess_xx: hxx,
        hess_xy: hxy,
        hess_yy: hyy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polar::{PolarGrid, PolarRect, RadialSpacing};
    use crate::surfaces::analytic::GraphFormula;
    use approx::assert_relative_eq;
    use nalgebra::Vector3;
    use std::f64::consts::PI;

    fn grid(n_rho: usize, n_theta: usize) -> PolarGrid {
        let rect = PolarRect::new(1.0, 4.0, -PI, PI).unwrap();
        PolarGrid::new(rect, n_rho, n_theta, RadialSpacing::Geometric).unwrap()
    }

    #[test]
    fn fornberg_recovers_classic_weights() {
        let w = fd_weights(1, 0.0, &[-1.0, 0.0, 1.0]);
        assert_relative_eq!(w[0], -0.5, epsilon = 1e-14);
        assert_relative_eq!(w[1], 0.0, epsilon = 1e-14);
        assert_relative_eq!(w[2], 0.5, epsilon = 1e-14);
        let w2 = fd_weights(2, 0.0, &[-1.0, 0.0, 1.0]);
        assert_relative_eq!(w2[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(w2[1], -2.0, epsilon = 1e-14);
        assert_relative_eq!(w2[2], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn constant_graph_has_zero_derivatives() {
        let mg = MultiGraph::from_fn(grid(8, 17), Vector3::zeros(), |_, _| 2.75).unwrap();
        let d = derivatives(&mg).unwrap();
        for k in 0..d.len() {
            assert!(d.grad_norm(k) < 1e-13);
            assert!(d.hess_frobenius(k) < 1e-12);
        }
    }

    #[test]
    fn helicoid_gradient_is_exact_even_by_stencil() {
        // u = a*theta is linear along both grid axes, so the finite
        // differences reproduce it to rounding; |grad u| = a / rho.
        let a = 1.0;
        let mg = MultiGraph::from_fn(grid(9, 17), Vector3::zeros(), |_, t| a * t).unwrap();
        let d = derivatives(&mg).unwrap();
        let g = &mg.grid;
        for i in 0..g.n_rho {
            for j in 0..g.n_theta {
                let k = g.idx(i, j);
                assert_relative_eq!(d.grad_norm(k), a / g.rho(i), epsilon = 1e-12);
            }
        }
        // at rho = 2 the norm is 0.5
        let i = g.rhos().iter().position(|&r| (r - 2.0).abs() < 1e-9);
        if let Some(i) = i {
            assert_relative_eq!(d.grad_norm(g.idx(i, 3)), 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn tilted_plane_has_unit_constant_gradient() {
        let f = GraphFormula::Plane { gx: 1.0, gy: 0.0, offset: 0.0 };
        // exact path: the closed-form jet gives grad = (1, 0) everywhere
        let mg = MultiGraph::from_formula(grid(8, 17), Vector3::zeros(), f).unwrap();
        let d = derivatives(&mg).unwrap();
        for k in 0..d.len() {
            assert_relative_eq!(d.grad.x[k], 1.0, epsilon = 1e-12);
            assert!(d.grad.y[k].abs() < 1e-12);
            assert!(d.hess_frobenius(k) < 1e-12);
        }
        // stencil path on a fine grid: second-order accurate
        let mg = MultiGraph::from_fn(grid(65, 129), Vector3::zeros(), |r, t| f.eval(r, t)).unwrap();
        let d = derivatives(&mg).unwrap();
        for k in 0..d.len() {
            assert_relative_eq!(d.grad.x[k], 1.0, epsilon = 5e-3);
            assert!(d.grad.y[k].abs() < 5e-3);
        }
    }

    #[test]
    fn analytic_path_matches_stencils_on_smooth_data() {
        let f = GraphFormula::AngularRipple { pitch: 1.0, amp: 0.3, power: -0.25 };
        let rect = PolarRect::new(1.0, 4.0, -PI, PI).unwrap();
        let g = PolarGrid::new(rect, 65, 129, RadialSpacing::Geometric).unwrap();
        let exact = MultiGraph::from_formula(g.clone(), Vector3::zeros(), f).unwrap();
        let sampled = MultiGraph::from_fn(g, Vector3::zeros(), |r, t| f.eval(r, t)).unwrap();
        let de = derivatives(&exact).unwrap();
        let dn = derivatives(&sampled).unwrap();
        let mut worst = 0.0f64;
        for k in 0..de.len() {
            worst = worst.max((de.grad_norm(k) - dn.grad_norm(k)).abs());
        }
        assert!(worst < 5e-4, "stencil gradient error {worst}");
    }

    #[test]
    fn stencil_convergence_is_second_order() {
        // helicoid graphs are differentiated exactly (see above), so the
        // order is measured on a sheet with genuine curvature in both axes
        let f = GraphFormula::AngularRipple { pitch: 1.0, amp: 0.3, power: -0.25 };
        let mut errs = Vec::new();
        for n in [17usize, 33, 65] {
            let rect = PolarRect::new(1.0, 4.0, -PI, PI).unwrap();
            let g = PolarGrid::new(rect, n, 2 * n - 1, RadialSpacing::Geometric).unwrap();
            let sampled = MultiGraph::from_fn(g.clone(), Vector3::zeros(), |r, t| f.eval(r, t)).unwrap();
            let d = derivatives(&sampled).unwrap();
            let mut sup = 0.0f64;
            for i in 0..g.n_rho {
                for j in 0..g.n_theta {
                    let k = g.idx(i, j);
                    let jet = f.jet(g.rho(i), g.theta(j));
                    let exact = (jet.u_rho.powi(2) + (jet.u_theta / g.rho(i)).powi(2)).sqrt();
                    sup = sup.max((d.grad_norm(k) - exact).abs());
                }
            }
            errs.push(sup);
        }
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!(
                (3.5..=4.5).contains(&ratio),
                "expected second-order decay, got ratio {ratio} from errors {errs:?}"
            );
        }
    }
}
