//! Asymptotics of a sheet through its complex gradient `f = u_x - i u_y`:
//! contour extraction of the `1/zeta` coefficient, oscillation of `u_theta`
//! on broken circles, and the strict-spiraling threshold radius.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::derive::derivatives;
use crate::geometry::interp::SheetSampler;
use crate::geometry::multigraph::MultiGraph;
use crate::geometry::polar::PolarRect;

/// Nodal complex gradient `f = u_x - i u_y`.
pub fn complex_gradient(u: &MultiGraph) -> Result<Vec<Complex64>> {
    let d = derivatives(u)?;
    Ok((0..d.len())
        .map(|k| Complex64::new(d.grad.x[k], -d.grad.y[k]))
        .collect())
}

fn f_at(sampler: &SheetSampler, rho: f64, theta: f64) -> Result<Complex64> {
    let ur = sampler.u_rho(rho, theta)?;
    let ut = sampler.u_theta(rho, theta)?;
    let (s, c) = theta.sin_cos();
    let ux = c * ur - s * ut / rho;
    let uy = s * ur + c * ut / rho;
    Ok(Complex64::new(ux, -uy))
}

/// Remainder magnitude table entry at one broken-circle radius.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RemainderRow {
    pub rho: f64,
    pub remainder_sup: f64,
    /// `c0 * r1^(-1/4) / rho + c0 * eps * |w(r1, -pi)| / r1`.
    pub bound_rhs: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LaurentFit {
    pub r1: f64,
    pub extraction_radius: f64,
    pub c_re: f64,
    pub c_im: f64,
    /// Mismatch `|f(pi) - f(-pi)|` on the extraction circle; the integrand of
    /// an exactly holomorphic function would close up.
    pub closure_defect: f64,
    pub w_at_r1: f64,
    pub c0: f64,
    pub epsilon: f64,
    pub rows: Vec<RemainderRow>,
    /// Smallest constant making the remainder bound hold over the table.
    pub fitted_c0: f64,
}

impl LaurentFit {
    pub fn c(&self) -> Complex64 {
        Complex64::new(self.c_re, self.c_im)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LaurentConfig {
    /// Constant in the reported remainder bound.
    pub c0: f64,
    /// Sheet epsilon entering the bound.
    pub epsilon: f64,
    /// Samples per broken circle.
    pub samples: usize,
    /// Extraction radius as a multiple of `r1`.
    pub extraction_factor: f64,
}

impl Default for LaurentConfig {
    fn default() -> Self {
        LaurentConfig {
            c0: 1.0,
            epsilon: 0.1,
            samples: 512,
            extraction_factor: 2.0,
        }
    }
}

/// Extract the `1/zeta` contour coefficient of `f` at `extraction_factor*r1`
/// by trapezoid quadrature over the broken circle, and tabulate the remainder
/// `f - c/zeta` at the given radii.
pub fn laurent_fit(u: &MultiGraph, r1: f64, radii: &[f64], cfg: &LaurentConfig) -> Result<LaurentFit> {
    if !(r1 > 0.0) {
        return Err(Error::invalid("r1 must be positive"));
    }
    if radii.is_empty() {
        return Err(Error::invalid("need at least one table radius"));
    }
    // the remainder table is kept on increasing radii
    let mut radii: Vec<f64> = radii.to_vec();
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
    radii.dedup();
    let rho0 = cfg.extraction_factor * r1;
    let rmax = radii.iter().cloned().fold(rho0, f64::max);
    let need = PolarRect::new(r1, rmax, -std::f64::consts::PI, std::f64::consts::PI)?;
    if !u.grid.rect.contains_rect(&need) {
        return Err(Error::InsufficientDomain {
            r1: need.r1,
            r2: need.r2,
            theta1: need.theta1,
            theta2: need.theta2,
        });
    }
    let sampler = SheetSampler::new(u)?;
    let n = cfg.samples.max(64);
    let pi = std::f64::consts::PI;

    // c = (1 / 2 pi i) * integral of f dzeta over the broken circle
    let h = 2.0 * pi / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut first = Complex64::new(0.0, 0.0);
    let mut last = Complex64::new(0.0, 0.0);
    for k in 0..=n {
        let theta = -pi + h * k as f64;
        let f = f_at(&sampler, rho0, theta)?;
        if k == 0 {
            first = f;
        }
        if k == n {
            last = f;
        }
        let dzeta = Complex64::new(0.0, rho0) * Complex64::from_polar(1.0, theta);
        let w = if k == 0 || k == n { 0.5 } else { 1.0 };
        acc += w * f * dzeta;
    }
    let c = acc * h / Complex64::new(0.0, 2.0 * pi);
    let closure_defect = (last - first).norm();
    let w_at_r1 = sampler.u(r1, pi)? - sampler.u(r1, -pi)?;

    let mut rows = Vec::with_capacity(radii.len());
    let mut fitted_c0 = 0.0f64;
    for &rho in &radii {
        let mut sup = 0.0f64;
        for k in 0..=n {
            let theta = -pi + h * k as f64;
            let f = f_at(&sampler, rho, theta)?;
            let zeta = Complex64::from_polar(rho, theta);
            sup = sup.max((f - c / zeta).norm());
        }
        let unit = r1.powf(-0.25) / rho + cfg.epsilon * w_at_r1.abs() / r1;
        rows.push(RemainderRow {
            rho,
            remainder_sup: sup,
            bound_rhs: cfg.c0 * unit,
        });
        if unit > 0.0 {
            fitted_c0 = fitted_c0.max(sup / unit);
        }
    }
    Ok(LaurentFit {
        r1,
        extraction_radius: rho0,
        c_re: c.re,
        c_im: c.im,
        closure_defect,
        w_at_r1,
        c0: cfg.c0,
        epsilon: cfg.epsilon,
        rows,
        fitted_c0,
    })
}

/// Oscillation of `u_theta` over the broken circle at `rho`, together with
/// the ingredients of its bound.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OscSample {
    pub rho: f64,
    pub osc: f64,
    pub min_utheta: f64,
    pub max_utheta: f64,
    /// `rho^(-1/4)`.
    pub rho_pow: f64,
    /// `|w(rho, -pi)|`.
    pub w_abs: f64,
}

/// Sample `u_theta` on the broken circle `[-pi, pi]` at `rho`.
pub fn broken_circle_osc(u: &MultiGraph, rho: f64, samples: usize) -> Result<OscSample> {
    let pi = std::f64::consts::PI;
    let need = PolarRect::new(rho * (1.0 - 1e-12), rho * (1.0 + 1e-12), -pi, pi);
    match need {
        Ok(r) if u.grid.rect.contains_rect(&r) => {}
        _ => {
            return Err(Error::RadiusOutsideDomain {
                rho,
                r1: u.grid.rect.r1,
                r2: u.grid.rect.r2,
            })
        }
    }
    let sampler = SheetSampler::new(u)?;
    let n = samples.max(256);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 0..=n {
        let theta = -pi + 2.0 * pi * k as f64 / n as f64;
        let v = sampler.u_theta(rho, theta)?;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let w = sampler.u(rho, pi)? - sampler.u(rho, -pi)?;
    Ok(OscSample {
        rho,
        osc: hi - lo,
        min_utheta: lo,
        max_utheta: hi,
        rho_pow: rho.powf(-0.25),
        w_abs: w.abs(),
    })
}

/// Integral of `u_theta` around the broken circle by per-piece Gauss-Legendre
/// quadrature, and the separation it should telescope to.
pub fn circle_utheta_integral(u: &MultiGraph, rho: f64) -> Result<(f64, f64)> {
    let pi = std::f64::consts::PI;
    let sampler = SheetSampler::new(u)?;
    // break at spline knots so the quadrature sees polynomial pieces
    let mut cuts: Vec<f64> = vec![-pi];
    if u.analytic.is_none() {
        for &t in u.grid.thetas() {
            if t > -pi && t < pi {
                cuts.push(t);
            }
        }
    } else {
        for k in 1..512 {
            cuts.push(-pi + 2.0 * pi * k as f64 / 512.0);
        }
    }
    cuts.push(pi);
    const GL_X: [f64; 4] = [
        -0.861_136_311_594_052_6,
        -0.339_981_043_584_856_3,
        0.339_981_043_584_856_3,
        0.861_136_311_594_052_6,
    ];
    const GL_W: [f64; 4] = [
        0.347_854_845_137_453_85,
        0.652_145_154_862_546_1,
        0.652_145_154_862_546_1,
        0.347_854_845_137_453_85,
    ];
    let mut acc = 0.0;
    for seg in cuts.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        for (x, w) in GL_X.iter().zip(GL_W.iter()) {
            acc += w * half * sampler.u_theta(rho, mid + half * x)?;
        }
    }
    let w = sampler.u(rho, pi)? - sampler.u(rho, -pi)?;
    Ok((acc, w))
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpiralRow {
    pub rho: f64,
    pub min_utheta: f64,
    /// `(c2 / 8 pi) * rho^(-eps)`.
    pub rhs: f64,
}

/// Strict-spiraling threshold report: the smallest tabulated radius beyond
/// which `u_theta` clears `(C2 / 8 pi) rho^(-eps)` on every broken circle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpiralReport {
    pub c2: f64,
    pub epsilon: f64,
    /// `None` is the never-holds sentinel.
    pub c3: Option<f64>,
    pub table: Vec<SpiralRow>,
}

/// Tabulate `min u_theta` over broken circles at every grid radius whose
/// circle fits the domain, and locate the threshold radius.
pub fn spiral_threshold(u: &MultiGraph, c2: f64, epsilon: f64, samples: usize) -> Result<SpiralReport> {
    if !(c2 > 0.0) {
        return Err(Error::invalid("C2 must be positive"));
    }
    let pi = std::f64::consts::PI;
    if u.grid.rect.theta1 > -pi || u.grid.rect.theta2 < pi {
        return Err(Error::InsufficientDomain {
            r1: u.grid.rect.r1,
            r2: u.grid.rect.r2,
            theta1: -pi,
            theta2: pi,
        });
    }
    let mut table = Vec::with_capacity(u.grid.n_rho);
    for i in 0..u.grid.n_rho {
        let rho = u.grid.rho(i);
        let s = broken_circle_osc(u, rho, samples)?;
        table.push(SpiralRow {
            rho,
            min_utheta: s.min_utheta,
            rhs: c2 / (8.0 * pi) * rho.powf(-epsilon),
        });
    }
    // smallest tabulated radius after which the bound holds at all larger radii
    let mut c3 = None;
    for k in 0..table.len() {
        if table[k..].iter().all(|r| r.min_utheta >= r.rhs) {
            c3 = Some(table[k].rho);
            break;
        }
    }
    Ok(SpiralReport { c2, epsilon, c3, table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polar::{PolarGrid, RadialSpacing};
    use crate::surfaces::analytic::GraphFormula;
    use approx::assert_relative_eq;
    use nalgebra::Vector3;
    use std::f64::consts::PI;

    fn sheet(formula: GraphFormula, r1: f64, r2: f64) -> MultiGraph {
        let rect = PolarRect::sheet(r1, r2, 3).unwrap();
        let grid = PolarGrid::new(rect, 33, 193, RadialSpacing::Geometric).unwrap();
        MultiGraph::from_formula(grid, Vector3::zeros(), formula).unwrap()
    }

    #[test]
    fn helicoid_complex_gradient_is_minus_i_pitch_over_zeta() {
        let u = sheet(GraphFormula::Helicoid { pitch: 1.0 }, 1.0, 8.0);
        let f = complex_gradient(&u).unwrap();
        let g = &u.grid;
        for i in 0..g.n_rho {
            for j in 0..g.n_theta {
                let zeta = Complex64::from_polar(g.rho(i), g.theta(j));
                let expect = Complex64::new(0.0, -1.0) / zeta;
                assert!((f[g.idx(i, j)] - expect).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn plane_tilt_complex_gradient_is_constant_one() {
        let u = sheet(GraphFormula::Plane { gx: 1.0, gy: 0.0, offset: 0.0 }, 1.0, 8.0);
        let f = complex_gradient(&u).unwrap();
        for v in f {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn laurent_coefficient_of_the_helicoid_family() {
        for &pitch in &[0.5, 1.0, 2.0] {
            let u = sheet(GraphFormula::Helicoid { pitch }, 1.0, 16.0);
            let fit = laurent_fit(&u, 1.0, &[4.0, 8.0, 16.0], &LaurentConfig::default()).unwrap();
            assert!((fit.c() - Complex64::new(0.0, -pitch)).norm() < 1e-6, "c = {:?}", fit.c());
            for row in &fit.rows {
                assert!(row.remainder_sup < 1e-8, "remainder {row:?}");
            }
            assert!(fit.closure_defect < 1e-12);
        }
    }

    #[test]
    fn laurent_extraction_radius_independence() {
        let u = sheet(GraphFormula::Helicoid { pitch: 1.0 }, 1.0, 16.0);
        let a = laurent_fit(&u, 1.0, &[8.0], &LaurentConfig { extraction_factor: 2.0, ..Default::default() })
            .unwrap();
        let b = laurent_fit(&u, 1.0, &[8.0], &LaurentConfig { extraction_factor: 4.0, ..Default::default() })
            .unwrap();
        assert!((a.c() - b.c()).norm() < 1e-6);
    }

    #[test]
    fn laurent_of_a_tilted_plane_has_zero_coefficient_order_one_remainder() {
        let u = sheet(GraphFormula::Plane { gx: 1.0, gy: 0.0, offset: 0.0 }, 1.0, 16.0);
        let fit = laurent_fit(&u, 1.0, &[4.0, 8.0], &LaurentConfig::default()).unwrap();
        assert!(fit.c().norm() < 1e-10);
        for row in &fit.rows {
            assert_relative_eq!(row.remainder_sup, 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn laurent_of_zero_graph_is_zero() {
        let rect = PolarRect::sheet(1.0, 16.0, 3).unwrap();
        let grid = PolarGrid::new(rect, 33, 193, RadialSpacing::Geometric).unwrap();
        let u = MultiGraph::from_fn(grid, Vector3::zeros(), |_, _| 0.0).unwrap();
        let fit = laurent_fit(&u, 1.0, &[4.0], &LaurentConfig::default()).unwrap();
        assert!(fit.c().norm() < 1e-12);
        assert!(fit.rows[0].remainder_sup < 1e-10);
    }

    #[test]
    fn helicoid_oscillation_vanishes() {
        let u = sheet(GraphFormula::Helicoid { pitch: 1.0 }, 1.0, 16.0);
        let s = broken_circle_osc(&u, 4.0, 512).unwrap();
        assert!(s.osc < 1e-13);
        assert_relative_eq!(s.w_abs, 2.0 * PI, epsilon = 1e-12);
    }

    #[test]
    fn synthetic_ripple_oscillation_matches_closed_form() {
        // u_theta = 1 + rho^(-1/4) cos(theta): oscillation 2 rho^(-1/4)
        let u = sheet(
            GraphFormula::AngularRipple { pitch: 1.0, amp: 1.0, power: -0.25 },
            1.0,
            128.0,
        );
        for &rho in &[4.0, 16.0, 64.0] {
            let s = broken_circle_osc(&u, rho, 512).unwrap();
            let expect = 2.0 * rho.powf(-0.25);
            assert_relative_eq!(s.osc, expect, max_relative = 1e-3);
            // Richardson refinement does not move the value
            let s2 = broken_circle_osc(&u, rho, 1024).unwrap();
            assert!((s.osc - s2.osc).abs() < 1e-4 * expect);
        }
    }

    #[test]
    fn circle_integral_telescopes_to_the_separation() {
        // analytic path
        let u = sheet(
            GraphFormula::AngularRipple { pitch: 1.0, amp: 0.3, power: -0.25 },
            1.0,
            16.0,
        );
        let (int, w) = circle_utheta_integral(&u, 4.0).unwrap();
        assert!((int - w).abs() < 1e-8, "analytic: {int} vs {w}");
        // stencil/spline path
        let sampled = MultiGraph::from_values(u.grid.clone(), u.values.clone(), u.center).unwrap();
        let (int, w) = circle_utheta_integral(&sampled, 4.0).unwrap();
        assert!((int - w).abs() < 1e-8, "spline: {int} vs {w}");
    }

    #[test]
    fn helicoid_spiral_threshold_is_the_first_radius() {
        // u_theta = 1 >= (2 pi / 8 pi) rho^(-0.01) = 0.25 rho^(-0.01) always
        let u = sheet(GraphFormula::Helicoid { pitch: 1.0 }, 1.0, 16.0);
        let rep = spiral_threshold(&u, 2.0 * PI, 0.01, 512).unwrap();
        assert_eq!(rep.c3, Some(u.grid.rho(0)));
        for row in &rep.table {
            assert!(row.min_utheta >= row.rhs);
        }
    }

    #[test]
    fn downward_spiral_never_clears_the_bound() {
        let u = sheet(GraphFormula::Helicoid { pitch: -1.0 }, 1.0, 16.0);
        let rep = spiral_threshold(&u, 2.0 * PI, 0.01, 512).unwrap();
        assert_eq!(rep.c3, None);
    }

    #[test]
    fn radius_outside_domain_is_an_error() {
        let u = sheet(GraphFormula::Helicoid { pitch: 1.0 }, 1.0, 16.0);
        assert!(broken_circle_osc(&u, 32.0, 512).is_err());
    }
}
