//! Smooth sampling of graph rows: cubic splines in the angle, linear blending
//! in the radius.  Broken-circle quantities are evaluated through this layer
//! so that the circle integral of `u_theta` telescopes exactly to the
//! separation.

use crate::error::{Error, Result};
use crate::geometry::derive::fd_weights;
use crate::geometry::multigraph::MultiGraph;

/// Natural cubic spline on strictly increasing knots.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn natural(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let n = xs.len();
        assert!(n >= 3 && ys.len() == n);
        // tridiagonal system for interior second derivatives
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        diag[0] = 1.0;
        diag[n - 1] = 1.0;
        for i in 1..n - 1 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            sub[i] = h0 / 6.0;
            diag[i] = (h0 + h1) / 3.0;
            sup[i] = h1 / 6.0;
            rhs[i] = (ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0;
        }
        // Thomas algorithm
        let mut m = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        c[0] = sup[0] / diag[0];
        d[0] = rhs[0] / diag[0];
        for i in 1..n {
            let denom = diag[i] - sub[i] * c[i - 1];
            c[i] = sup[i] / denom;
            d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
        }
        m[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = d[i] - c[i] * m[i + 1];
        }
        CubicSpline { xs, ys, m }
    }

    fn segment(&self, x: f64) -> usize {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return 0;
        }
        if x >= self.xs[n - 1] {
            return n - 2;
        }
        let mut lo = 0;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.xs[mid] <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        (self.ys[i + 1] - self.ys[i]) / h
            + ((3.0 * b * b - 1.0) * self.m[i + 1] - (3.0 * a * a - 1.0) * self.m[i]) * h / 6.0
    }
}

/// Point samples of `u`, `u_rho`, `u_theta` anywhere on a sheet's rectangle.
///
/// Uses the attached closed form when present; otherwise angular cubic
/// splines per radial row with linear radial blending (`u_rho` rows come from
/// radial stencils).
pub struct SheetSampler<'a> {
    graph: &'a MultiGraph,
    rows_u: Option<Vec<CubicSpline>>,
    rows_ur: Option<Vec<CubicSpline>>,
}

impl<'a> SheetSampler<'a> {
    pub fn new(graph: &'a MultiGraph) -> Result<Self> {
        if graph.analytic.is_some() {
            return Ok(SheetSampler {
                graph,
                rows_u: None,
                rows_ur: None,
            });
        }
        let g = &graph.grid;
        if g.n_theta < 3 || g.n_rho < 3 {
            return Err(Error::GridTooCoarse { min_rho: 3, min_theta: 3 });
        }
        let thetas = g.thetas().to_vec();
        let mut rows_u = Vec::with_capacity(g.n_rho);
        for i in 0..g.n_rho {
            let ys: Vec<f64> = (0..g.n_theta).map(|j| graph.at(i, j)).collect();
            rows_u.push(CubicSpline::natural(thetas.clone(), ys));
        }
        // nodal radial derivative by 3-point stencils, then splined per row
        let rhos = g.rhos();
        let mut rows_ur = Vec::with_capacity(g.n_rho);
        for i in 0..g.n_rho {
            let lo = if i == 0 {
                0
            } else if i == g.n_rho - 1 {
                g.n_rho - 3
            } else {
                i - 1
            };
            let nodes: Vec<f64> = (lo..lo + 3).map(|k| rhos[k]).collect();
            let w = fd_weights(1, rhos[i], &nodes);
            let ys: Vec<f64> = (0..g.n_theta)
                .map(|j| (0..3).map(|k| w[k] * graph.at(lo + k, j)).sum())
                .collect();
            rows_ur.push(CubicSpline::natural(thetas.clone(), ys));
        }
        Ok(SheetSampler {
            graph,
            rows_u: Some(rows_u),
            rows_ur: Some(rows_ur),
        })
    }

    fn bracket(&self, rho: f64) -> Result<(usize, f64)> {
        let g = &self.graph.grid;
        let i = g
            .radial_cell(rho)
            .ok_or(Error::RadiusOutsideDomain {
                rho,
                r1: g.rect.r1,
                r2: g.rect.r2,
            })?
            .min(g.n_rho - 2);
        let t = ((rho - g.rho(i)) / (g.rho(i + 1) - g.rho(i))).clamp(0.0, 1.0);
        Ok((i, t))
    }

    pub fn u(&self, rho: f64, theta: f64) -> Result<f64> {
        if let Some(f) = self.graph.analytic {
            return Ok(f.eval(rho, theta));
        }
        let (i, t) = self.bracket(rho)?;
        let rows = self.rows_u.as_ref().unwrap();
        Ok((1.0 - t) * rows[i].eval(theta) + t * rows[i + 1].eval(theta))
    }

    pub fn u_theta(&self, rho: f64, theta: f64) -> Result<f64> {
        if let Some(f) = self.graph.analytic {
            return Ok(f.jet(rho, theta).u_theta);
        }
        let (i, t) = self.bracket(rho)?;
        let rows = self.rows_u.as_ref().unwrap();
        Ok((1.0 - t) * rows[i].deriv(theta) + t * rows[i + 1].deriv(theta))
    }

    pub fn u_rho(&self, rho: f64, theta: f64) -> Result<f64> {
        if let Some(f) = self.graph.analytic {
            return Ok(f.jet(rho, theta).u_rho);
        }
        let (i, t) = self.bracket(rho)?;
        let rows = self.rows_ur.as_ref().unwrap();
        Ok((1.0 - t) * rows[i].eval(theta) + t * rows[i + 1].eval(theta))
    }
}

/// Composite Simpson quadrature of `f` over `[a, b]` with `2n` panels.
pub fn simpson(a: f64, b: f64, n: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    let m = 2 * n.max(1);
    let h = (b - a) / m as f64;
    let mut acc = f(a) + f(b);
    for k in 1..m {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * k as f64);
    }
    acc * h / 3.0
}
