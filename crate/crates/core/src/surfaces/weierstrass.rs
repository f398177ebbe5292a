//! Axis curves of the exponential-Gauss-map representation and their
//! embeddedness test.
//!
//! For `h(p) = alpha * z(p)` the image of the imaginary axis `z = i t` is the
//! planar curve
//!
//! ```text
//! x1(it) = |alpha|^-2 (a2 sinh(a2 t) sin(a1 t) - a1 cosh(a2 t) cos(a1 t))
//! x2(it) = |alpha|^-2 (a2 sinh(a2 t) cos(a1 t) + a1 cosh(a2 t) sin(a1 t))
//! ```
//!
//! which is embedded exactly when `a1 = 0`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex coefficient `alpha = alpha1 + i alpha2`, `|alpha| > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeierstrassAlpha {
    pub alpha1: f64,
    pub alpha2: f64,
}

impl WeierstrassAlpha {
    pub fn new(alpha1: f64, alpha2: f64) -> Result<Self> {
        let norm = alpha1.hypot(alpha2);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::invalid("alpha must be nonzero and finite"));
        }
        Ok(WeierstrassAlpha { alpha1, alpha2 })
    }

    pub fn norm_sq(&self) -> f64 {
        self.alpha1 * self.alpha1 + self.alpha2 * self.alpha2
    }

    /// Planar point `(x1, x2)` at parameter `t`.
    pub fn point(&self, t: f64) -> (f64, f64) {
        let (a1, a2) = (self.alpha1, self.alpha2);
        let inv = 1.0 / self.norm_sq();
        let sh = (a2 * t).sinh();
        let ch = (a2 * t).cosh();
        let (s1, c1) = (a1 * t).sin_cos();
        (
            inv * (a2 * sh * s1 - a1 * ch * c1),
            inv * (a2 * sh * c1 + a1 * ch * s1),
        )
    }
}

/// Sampled planar curve with strictly increasing parameter values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSamples {
    pub t: Vec<f64>,
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
}

impl CurveSamples {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

/// Sample the axis curve on `n` uniform parameters over `t_range`.
pub fn weierstrass_curve(
    alpha: WeierstrassAlpha,
    t_range: (f64, f64),
    n: usize,
) -> Result<CurveSamples> {
    if n < 2 {
        return Err(Error::invalid("need at least 2 samples"));
    }
    if !(t_range.1 > t_range.0) {
        return Err(Error::invalid("t range must be increasing"));
    }
    let mut t = Vec::with_capacity(n);
    let mut x1 = Vec::with_capacity(n);
    let mut x2 = Vec::with_capacity(n);
    for k in 0..n {
        let tk = t_range.0 + (t_range.1 - t_range.0) * k as f64 / (n - 1) as f64;
        let (a, b) = alpha.point(tk);
        t.push(tk);
        x1.push(a);
        x2.push(b);
    }
    Ok(CurveSamples { t, x1, x2 })
}

/// Verdict of the pairwise segment check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Embeddedness {
    /// All non-adjacent segment pairs are at least `tol` apart.
    Embedded,
    /// Witness parameters whose curve points come within `tol`.
    SelfIntersecting { t_a: f64, t_b: f64, distance: f64 },
}

/// Brute-force segment-pair separation test of a sampled curve.
///
/// Verification scope is the sampled window only: a curve that self-intersects
/// outside `t_range` or between samples finer than the polyline can resolve
/// will not be caught.
pub fn embeddedness_verdict(curve: &CurveSamples, tol: f64) -> Result<Embeddedness> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let n = curve.len();
    if n < 16 {
        return Err(Error::invalid("need at least 16 samples"));
    }
    let seg = |k: usize| {
        (
            [curve.x1[k], curve.x2[k]],
            [curve.x1[k + 1], curve.x2[k + 1]],
        )
    };
    let hits: Vec<(usize, usize, f64)> = (0..n - 1)
        .into_par_iter()
        .flat_map_iter(|i| {
            let (p1, p2) = seg(i);
            // skip the adjacent segment: consecutive polyline pieces touch
            ((i + 2)..n - 1).filter_map(move |j| {
                let (q1, q2) = seg(j);
                let d = segment_distance(p1, p2, q1, q2);
                (d < tol).then_some((i, j, d))
            })
        })
        .collect();
    if let Some(&(i, j, d)) = hits
        .iter()
        .min_by(|a, b| a.2.partial_cmp(&b.2).unwrap().then(a.0.cmp(&b.0)))
    {
        return Ok(Embeddedness::SelfIntersecting {
            t_a: 0.5 * (curve.t[i] + curve.t[i + 1]),
            t_b: 0.5 * (curve.t[j] + curve.t[j + 1]),
            distance: d,
        });
    }
    Ok(Embeddedness::Embedded)
}

/// Euclidean distance between two planar segments.
fn segment_distance(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> f64 {
    if segments_intersect(p1, p2, q1, q2) {
        return 0.0;
    }
    point_segment(p1, q1, q2)
        .min(point_segment(p2, q1, q2))
        .min(point_segment(q1, p1, p2))
        .min(point_segment(q2, p1, p2))
}

fn point_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 == 0.0 {
        0.0
    } else {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    };
    let dx = p[0] - (a[0] + t * ab[0]);
    let dy = p[1] - (a[1] + t * ab[1]);
    dx.hypot(dy)
}

fn segments_intersect(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}
