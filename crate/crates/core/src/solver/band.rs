//! Symmetric positive-definite banded linear solves (direct Cholesky).

use crate::error::{Error, Result};

/// Lower-band storage of a symmetric matrix: `band[k * n + j] = A[j + k][j]`
/// for `0 <= k <= kd`.
pub struct BandMatrix {
    pub n: usize,
    pub kd: usize,
    pub band: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kd: usize) -> Self {
        BandMatrix {
            n,
            kd,
            band: vec![0.0; (kd + 1) * n],
        }
    }

    /// Accumulate into `A[r][c]` (lower triangle only; callers pass `r >= c`).
    #[inline]
    pub fn add(&mut self, r: usize, c: usize, v: f64) {
        debug_assert!(r >= c && r - c <= self.kd);
        self.band[(r - c) * self.n + c] += v;
    }

    /// In-place Cholesky factorization `A = L L^T`.
    pub fn cholesky(&mut self) -> Result<()> {
        let n = self.n;
        let kd = self.kd;
        for j in 0..n {
            let start = j.saturating_sub(kd);
            for c in start..j {
                let ljc = self.band[(j - c) * n + c];
                if ljc == 0.0 {
                    continue;
                }
                let rmax = (c + kd).min(n - 1);
                for r in j..=rmax {
                    self.band[(r - j) * n + j] -= self.band[(r - c) * n + c] * ljc;
                }
            }
            let d = self.band[j];
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::LinearSolveBreakdown(format!(
                    "non-positive pivot {d} at column {j}"
                )));
            }
            let d = d.sqrt();
            self.band[j] = d;
            let rmax = (j + kd).min(n - 1);
            for r in j + 1..=rmax {
                self.band[(r - j) * n + j] /= d;
            }
        }
        Ok(())
    }

    /// Solve `L L^T x = b` in place after [`Self::cholesky`].
    pub fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        let kd = self.kd;
        // forward: L y = b
        for j in 0..n {
            let yj = b[j] / self.band[j];
            b[j] = yj;
            let rmax = (j + kd).min(n - 1);
            for r in j + 1..=rmax {
                b[r] -= self.band[(r - j) * n + j] * yj;
            }
        }
        // backward: L^T x = y
        for j in (0..n).rev() {
            let mut acc = b[j];
            let rmax = (j + kd).min(n - 1);
            for r in j + 1..=rmax {
                acc -= self.band[(r - j) * n + j] * b[r];
            }
            b[j] = acc / self.band[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn solves_a_banded_spd_system() {
        // 1-d Laplacian plus identity, kd = 1
        let n = 50;
        let mut m = BandMatrix::zeros(n, 1);
        for j in 0..n {
            m.add(j, j, 3.0);
            if j + 1 < n {
                m.add(j + 1, j, -1.0);
            }
        }
        let x_true: Vec<f64> = (0..n).map(|k| (k as f64 * 0.37).sin()).collect();
        // b = A x
        let mut b = vec![0.0; n];
        for j in 0..n {
            b[j] += 3.0 * x_true[j];
            if j > 0 {
                b[j] -= x_true[j - 1];
            }
            if j + 1 < n {
                b[j] -= x_true[j + 1];
            }
        }
        m.cholesky().unwrap();
        m.solve(&mut b);
        for k in 0..n {
            assert_relative_eq!(b[k], x_true[k], epsilon = 1e-12);
        }
    }

    #[test]
    fn breakdown_is_reported() {
        let mut m = BandMatrix::zeros(3, 1);
        m.add(0, 0, 1.0);
        m.add(1, 1, -1.0);
        m.add(2, 2, 1.0);
        assert!(m.cholesky().is_err());
    }
}
