//! Piecewise-linear area discretization on a triangulated polar grid.
//!
//! The Dirichlet problem is solved by minimizing the area of the PL graph
//! over the triangulated annulus chart.  The area integrand is strictly
//! convex in the gradient, so the assembled Hessian is positive definite
//! once boundary nodes are pinned.

use crate::geometry::polar::PolarGrid;
use crate::solver::band::BandMatrix;

/// Per-triangle chart data: node ids, 2D area, hat-function gradients.
pub struct Triangle {
    pub nodes: [usize; 3],
    pub area: f64,
    pub grads: [[f64; 2]; 3],
}

pub struct GridFem {
    pub n_rho: usize,
    pub n_theta: usize,
    pub triangles: Vec<Triangle>,
    /// Lumped chart area per node (one third of incident triangle area).
    pub lumped_area: Vec<f64>,
}

impl GridFem {
    pub fn new(grid: &PolarGrid) -> Self {
        let (n_rho, n_theta) = (grid.n_rho, grid.n_theta);
        let pos = |i: usize, j: usize| -> [f64; 2] {
            let r = grid.rho(i);
            let t = grid.theta(j);
            [r * t.cos(), r * t.sin()]
        };
        let mut triangles = Vec::with_capacity(2 * (n_rho - 1) * (n_theta - 1));
        let mut lumped = vec![0.0; grid.len()];
        let mut push = |nodes: [usize; 3], p: [[f64; 2]; 3]| {
            let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
                - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
            let area = 0.5 * det.abs();
            let inv = 1.0 / det;
            // gradient of hat k is perpendicular to the opposite edge
            let grads = [
                [
                    (p[1][1] - p[2][1]) * inv,
                    (p[2][0] - p[1][0]) * inv,
                ],
                [
                    (p[2][1] - p[0][1]) * inv,
                    (p[0][0] - p[2][0]) * inv,
                ],
                [
                    (p[0][1] - p[1][1]) * inv,
                    (p[1][0] - p[0][0]) * inv,
                ],
            ];
            for &k in &nodes {
                lumped[k] += area / 3.0;
            }
            triangles.push(Triangle { nodes, area, grads });
        };
        for i in 0..n_rho - 1 {
            for j in 0..n_theta - 1 {
                let v00 = i * n_theta + j;
                let v10 = (i + 1) * n_theta + j;
                let v11 = (i + 1) * n_theta + j + 1;
                let v01 = i * n_theta + j + 1;
                let p00 = pos(i, j);
                let p10 = pos(i + 1, j);
                let p11 = pos(i + 1, j + 1);
                let p01 = pos(i, j + 1);
                push([v00, v10, v11], [p00, p10, p11]);
                push([v00, v11, v01], [p00, p11, p01]);
            }
        }
        GridFem {
            n_rho,
            n_theta,
            triangles,
            lumped_area: lumped,
        }
    }

    pub fn n_interior(&self) -> usize {
        (self.n_rho - 2) * (self.n_theta - 2)
    }

    /// Interior unknown index of node `(i, j)`, if interior.
    #[inline]
    pub fn interior_index(&self, node: usize) -> Option<usize> {
        let i = node / self.n_theta;
        let j = node % self.n_theta;
        if i == 0 || i == self.n_rho - 1 || j == 0 || j == self.n_theta - 1 {
            None
        } else {
            Some((i - 1) * (self.n_theta - 2) + (j - 1))
        }
    }

    /// PL graph area.
    pub fn energy(&self, u: &[f64]) -> f64 {
        let mut e = 0.0;
        for t in &self.triangles {
            let (px, py) = triangle_gradient(t, u);
            e += t.area * (1.0 + px * px + py * py).sqrt();
        }
        e
    }

    /// Gradient of the area with respect to every nodal value.
    pub fn gradient(&self, u: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for t in &self.triangles {
            let (px, py) = triangle_gradient(t, u);
            let w = (1.0 + px * px + py * py).sqrt();
            for k in 0..3 {
                out[t.nodes[k]] += t.area * (px * t.grads[k][0] + py * t.grads[k][1]) / w;
            }
        }
    }

    /// Scaled interior residual `-grad E / lumped area`, the discrete analogue
    /// of the pointwise divergence-form operator.
    pub fn scaled_residual(&self, grad: &[f64]) -> Vec<f64> {
        let mut r = Vec::with_capacity(self.n_interior());
        for node in 0..grad.len() {
            if self.interior_index(node).is_some() {
                r.push(-grad[node] / self.lumped_area[node]);
            }
        }
        r
    }

    /// Assemble the interior Hessian as a banded SPD matrix.
    pub fn hessian(&self, u: &[f64]) -> BandMatrix {
        let n = self.n_interior();
        let kd = self.n_theta - 1; // neighbors differ by at most one row
        let mut h = BandMatrix::zeros(n, kd);
        for t in &self.triangles {
            let (px, py) = triangle_gradient(t, u);
            let w2 = 1.0 + px * px + py * py;
            let w = w2.sqrt();
            // d(p/W)/dp = I/W - p p^T / W^3
            let m11 = 1.0 / w - px * px / (w * w2);
            let m12 = -px * py / (w * w2);
            let m22 = 1.0 / w - py * py / (w * w2);
            for k in 0..3 {
                let ik = match self.interior_index(t.nodes[k]) {
                    Some(v) => v,
                    None => continue,
                };
                for l in 0..3 {
                    let il = match self.interior_index(t.nodes[l]) {
                        Some(v) => v,
                        None => continue,
                    };
                    if il > ik {
                        continue; // lower triangle only
                    }
                    let gk = t.grads[k];
                    let gl = t.grads[l];
                    let v = t.area
                        * (gk[0] * (m11 * gl[0] + m12 * gl[1])
                            + gk[1] * (m12 * gl[0] + m22 * gl[1]));
                    h.add(ik, il, v);
                }
            }
        }
        h
    }

    /// Assemble the interior Dirichlet-energy (Laplace) system and right-hand
    /// side for the harmonic extension of the boundary values in `u`.
    pub fn laplace_system(&self, u: &[f64]) -> (BandMatrix, Vec<f64>) {
        let n = self.n_interior();
        let kd = self.n_theta - 1;
        let mut h = BandMatrix::zeros(n, kd);
        let mut rhs = vec![0.0; n];
        for t in &self.triangles {
            for k in 0..3 {
                let ik = match self.interior_index(t.nodes[k]) {
                    Some(v) => v,
                    None => continue,
                };
                for l in 0..3 {
                    let gk = t.grads[k];
                    let gl = t.grads[l];
                    let v = t.area * (gk[0] * gl[0] + gk[1] * gl[1]);
                    match self.interior_index(t.nodes[l]) {
                        Some(il) => {
                            if il <= ik {
                                h.add(ik, il, v);
                            }
                        }
                        None => rhs[ik] -= v * u[t.nodes[l]],
                    }
                }
            }
        }
        (h, rhs)
    }
}

#[inline]
fn triangle_gradient(t: &Triangle, u: &[f64]) -> (f64, f64) {
    let mut px = 0.0;
    let mut py = 0.0;
    for k in 0..3 {
        px += u[t.nodes[k]] * t.grads[k][0];
        py += u[t.nodes[k]] * t.grads[k][1];
    }
    (px, py)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polar::{PolarRect, RadialSpacing};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn flat_annulus_energy_is_its_chart_area() {
        let rect = PolarRect::new(1.0, 2.0, 0.0, 2.0 * PI).unwrap();
        let grid = PolarGrid::new(rect, 33, 129, RadialSpacing::Uniform).unwrap();
        let fem = GridFem::new(&grid);
        let u = vec![0.0; grid.len()];
        // chart area of the triangulated annulus approaches 3*pi from below
        let e = fem.energy(&u);
        assert_relative_eq!(e, 3.0 * PI, max_relative = 2e-3);
        let mut g = vec![0.0; grid.len()];
        fem.gradient(&u, &mut g);
        assert!(g.iter().all(|&v| v.abs() < 1e-14));
    }

    #[test]
    fn gradient_matches_finite_differences_of_energy() {
        let rect = PolarRect::new(1.0, 2.0, 0.0, PI).unwrap();
        let grid = PolarGrid::new(rect, 4, 8, RadialSpacing::Geometric).unwrap();
        let fem = GridFem::new(&grid);
        let u: Vec<f64> = (0..grid.len()).map(|k| ((k * 7 % 13) as f64) * 0.05).collect();
        let mut g = vec![0.0; grid.len()];
        fem.gradient(&u, &mut g);
        let h = 1e-6;
        for k in [5usize, 9, 17, 23] {
            let mut up = u.clone();
            up[k] += h;
            let mut dn = u.clone();
            dn[k] -= h;
            let fd = (fem.energy(&up) - fem.energy(&dn)) / (2.0 * h);
            assert_relative_eq!(g[k], fd, epsilon = 1e-8, max_relative = 1e-6);
        }
    }

    #[test]
    fn hessian_matches_finite_differences_of_gradient() {
        let rect = PolarRect::new(1.0, 2.0, 0.0, PI).unwrap();
        let grid = PolarGrid::new(rect, 4, 8, RadialSpacing::Geometric).unwrap();
        let fem = GridFem::new(&grid);
        let u: Vec<f64> = (0..grid.len()).map(|k| ((k * 5 % 11) as f64) * 0.04).collect();
        let hess = fem.hessian(&u);
        let h = 1e-6;
        // probe a couple of interior pairs
        let interior: Vec<usize> = (0..grid.len())
            .filter(|&k| fem.interior_index(k).is_some())
            .collect();
        for &ka in &interior[..4.min(interior.len())] {
            let ia = fem.interior_index(ka).unwrap();
            let mut up = u.clone();
            up[ka] += h;
            let mut dn = u.clone();
            dn[ka] -= h;
            let mut gp = vec![0.0; grid.len()];
            let mut gm = vec![0.0; grid.len()];
            fem.gradient(&up, &mut gp);
            fem.gradient(&dn, &mut gm);
            for &kb in &interior {
                let ib = fem.interior_index(kb).unwrap();
                let (r, c) = if ia >= ib { (ia, ib) } else { (ib, ia) };
                if r - c > hess.kd {
                    continue;
                }
                let fd = (gp[kb] - gm[kb]) / (2.0 * h);
                let v = hess.band[(r - c) * hess.n + c];
                assert_relative_eq!(v, fd, epsilon = 1e-7, max_relative = 1e-5);
            }
        }
    }
}
