//! Polar rectangles and their discretizations.
//!
//! A polar rectangle `[r1, r2] x [theta1, theta2]` is the parameter domain of a
//! (possibly multivalued) graph over an annulus.  The angular span may exceed
//! `2*pi`; no periodic identification is ever made.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed polar rectangle `r1 <= rho <= r2`, `theta1 <= theta <= theta2`.
///
/// `r2` may be `f64::INFINITY`; such rectangles must be truncated before
/// gridding (see [`PolarGrid::truncated`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarRect {
    pub r1: f64,
    pub r2: f64,
    pub theta1: f64,
    pub theta2: f64,
}

impl PolarRect {
    pub fn new(r1: f64, r2: f64, theta1: f64, theta2: f64) -> Result<Self> {
        if !(r1 > 0.0) || r1.is_infinite() {
            return Err(Error::invalid(format!("r1 must be positive and finite, got {r1}")));
        }
        if !(r2 > r1) {
            return Err(Error::invalid(format!("r2 must exceed r1, got r1={r1}, r2={r2}")));
        }
        if !(theta2 > theta1) || !theta1.is_finite() || !theta2.is_finite() {
            return Err(Error::invalid(format!(
                "need finite theta2 > theta1, got [{theta1}, {theta2}]"
            )));
        }
        Ok(PolarRect { r1, r2, theta1, theta2 })
    }

    /// Symmetric angular span `[-pi*n, pi*n]` as used for n-valued sheets.
    pub fn sheet(r1: f64, r2: f64, half_turns: u32) -> Result<Self> {
        let half = std::f64::consts::PI * f64::from(half_turns);
        Self::new(r1, r2, -half, half)
    }

    pub fn theta_span(&self) -> f64 {
        self.theta2 - self.theta1
    }

    pub fn is_unbounded(&self) -> bool {
        self.r2.is_infinite()
    }

    /// Whether `other` is contained in `self` up to a small slack.
    pub fn contains_rect(&self, other: &PolarRect) -> bool {
        let tol = 1e-12 * (1.0 + self.r2.abs().min(1e30) + self.theta_span().abs());
        other.r1 >= self.r1 - tol
            && other.r2 <= self.r2 + tol
            && other.theta1 >= self.theta1 - tol
            && other.theta2 <= self.theta2 + tol
    }
}

/// Radial node placement.
///
/// Geometric spacing keeps `h_rho / rho` constant, matching estimates that are
/// scale-relative in the radius; it is the default everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialSpacing {
    Geometric,
    Uniform,
}

/// Tensor-product grid on a polar rectangle.
///
/// Angular nodes are always uniform; radial nodes are geometric or uniform.
/// Node `(i, j)` has coordinates `(rho[i], theta[j])` and flat index
/// `i * n_theta + j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid {
    pub rect: PolarRect,
    pub n_rho: usize,
    pub n_theta: usize,
    pub radial: RadialSpacing,
    /// Original (infinite) outer radius when the rectangle was truncated.
    pub truncated_from: Option<f64>,
    rho: Vec<f64>,
    theta: Vec<f64>,
}

pub const MIN_N_RHO: usize = 4;
pub const MIN_N_THETA: usize = 8;

impl PolarGrid {
    pub fn new(rect: PolarRect, n_rho: usize, n_theta: usize, radial: RadialSpacing) -> Result<Self> {
        if rect.is_unbounded() {
            return Err(Error::invalid(
                "cannot grid an unbounded rectangle; use PolarGrid::truncated with an explicit R_max",
            ));
        }
        Self::build(rect, n_rho, n_theta, radial, None)
    }

    /// Grid a rectangle whose outer radius may be infinite, truncating at `r_max`.
    /// The truncation is recorded so downstream reports can mention it.
    pub fn truncated(
        rect: PolarRect,
        r_max: f64,
        n_rho: usize,
        n_theta: usize,
        radial: RadialSpacing,
    ) -> Result<Self> {
        if !rect.is_unbounded() {
            return Self::build(rect, n_rho, n_theta, radial, None);
        }
        if !(r_max > rect.r1) || !r_max.is_finite() {
            return Err(Error::invalid(format!(
                "truncation radius must be finite and exceed r1={}, got {r_max}",
                rect.r1
            )));
        }
        let finite = PolarRect { r2: r_max, ..rect };
        Self::build(finite, n_rho, n_theta, radial, Some(f64::INFINITY))
    }

    fn build(
        rect: PolarRect,
        n_rho: usize,
        n_theta: usize,
        radial: RadialSpacing,
        truncated_from: Option<f64>,
    ) -> Result<Self> {
        if n_rho < MIN_N_RHO || n_theta < MIN_N_THETA {
            return Err(Error::GridTooCoarse {
                min_rho: MIN_N_RHO,
                min_theta: MIN_N_THETA,
            });
        }
        let rho = match radial {
            RadialSpacing::Uniform => {
                let h = (rect.r2 - rect.r1) / (n_rho - 1) as f64;
                (0..n_rho).map(|i| rect.r1 + h * i as f64).collect::<Vec<_>>()
            }
            RadialSpacing::Geometric => {
                let q = (rect.r2 / rect.r1).powf(1.0 / (n_rho - 1) as f64);
                let mut v: Vec<f64> = (0..n_rho).map(|i| rect.r1 * q.powi(i as i32)).collect();
                // pin the endpoints exactly
                v[0] = rect.r1;
                v[n_rho - 1] = rect.r2;
                v
            }
        };
        let h_theta = rect.theta_span() / (n_theta - 1) as f64;
        let theta: Vec<f64> = (0..n_theta)
            .map(|j| rect.theta1 + h_theta * j as f64)
            .collect();
        debug_assert!(rho.windows(2).all(|w| w[1] > w[0]));
        Ok(PolarGrid {
            rect,
            n_rho,
            n_theta,
            radial,
            truncated_from,
            rho,
            theta,
        })
    }

    /// Constructor for node arrays already in hand (separation overlaps can be
    /// narrower than the usual floor on `n_theta`).
    pub(crate) fn raw(
        rect: PolarRect,
        radial: RadialSpacing,
        truncated_from: Option<f64>,
        rho: Vec<f64>,
        theta: Vec<f64>,
    ) -> PolarGrid {
        PolarGrid {
            rect,
            n_rho: rho.len(),
            n_theta: theta.len(),
            radial,
            truncated_from,
            rho,
            theta,
        }
    }

    pub fn len(&self) -> usize {
        self.n_rho * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n_rho && j < self.n_theta);
        i * self.n_theta + j
    }

    #[inline]
    pub fn ij(&self, idx: usize) -> (usize, usize) {
        (idx / self.n_theta, idx % self.n_theta)
    }

    #[inline]
    pub fn rho(&self, i: usize) -> f64 {
        self.rho[i]
    }

    #[inline]
    pub fn theta(&self, j: usize) -> f64 {
        self.theta[j]
    }

    pub fn rhos(&self) -> &[f64] {
        &self.rho
    }

    pub fn thetas(&self) -> &[f64] {
        &self.theta
    }

    pub fn h_theta(&self) -> f64 {
        self.theta[1] - self.theta[0]
    }

    /// Angular index shift corresponding to a `2*pi` rotation, when the grid
    /// spacing divides `2*pi` to 1e-9 relative accuracy.
    pub fn full_turn_shift(&self) -> Option<usize> {
        let steps = 2.0 * std::f64::consts::PI / self.h_theta();
        let rounded = steps.round();
        if rounded >= 1.0 && (steps - rounded).abs() < 1e-9 * steps.max(1.0) {
            let k = rounded as usize;
            if k < self.n_theta {
                return Some(k);
            }
        }
        None
    }

    /// Largest radial index with `rho[i] <= r` (nodes are strictly increasing).
    pub fn radial_cell(&self, r: f64) -> Option<usize> {
        if r < self.rho[0] - 1e-12 * self.rho[0] || r > *self.rho.last().unwrap() * (1.0 + 1e-12) {
            return None;
        }
        let mut lo = 0usize;
        let mut hi = self.n_rho - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.rho[mid] <= r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(lo)
    }

    /// Angular cell index for `theta` (uniform spacing).
    pub fn angular_cell(&self, theta: f64) -> Option<usize> {
        let h = self.h_theta();
        let t = (theta - self.rect.theta1) / h;
        if t < -1e-9 || t > (self.n_theta - 1) as f64 + 1e-9 {
            return None;
        }
        Some((t.floor() as isize).clamp(0, self.n_theta as isize - 2) as usize)
    }

    /// Extract the node-aligned subgrid `[i0..=i1] x [j0..=j1]`.
    pub fn subgrid(&self, i0: usize, i1: usize, j0: usize, j1: usize) -> Result<PolarGrid> {
        if i1 >= self.n_rho || j1 >= self.n_theta || i0 >= i1 || j0 >= j1 {
            return Err(Error::invalid("subgrid indices out of range"));
        }
        let rect = PolarRect::new(self.rho[i0], self.rho[i1], self.theta[j0], self.theta[j1])?;
        let n_rho = i1 - i0 + 1;
        let n_theta = j1 - j0 + 1;
        if n_rho < MIN_N_RHO || n_theta < MIN_N_THETA {
            return Err(Error::GridTooCoarse {
                min_rho: MIN_N_RHO,
                min_theta: MIN_N_THETA,
            });
        }
        Ok(PolarGrid {
            rect,
            n_rho,
            n_theta,
            radial: self.radial,
            truncated_from: self.truncated_from,
            rho: self.rho[i0..=i1].to_vec(),
            theta: self.theta[j0..=j1].to_vec(),
        })
    }
}
