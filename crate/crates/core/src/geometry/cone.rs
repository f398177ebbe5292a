//! Shallow-cone regions around a horizontal plane.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The set `(x3 - y3)^2 <= delta^2 ((x1 - y1)^2 + (x2 - y2)^2)` — the
/// complement of the open vertical cone of slope `1/delta` at `vertex`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cone {
    pub vertex: Vector3<f64>,
    pub delta: f64,
}

impl Cone {
    pub fn new(vertex: Vector3<f64>, delta: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::invalid(format!("cone slope must be positive, got {delta}")));
        }
        Ok(Cone { vertex, delta })
    }

    /// Membership test; the vertex itself is inside (0 <= 0).
    pub fn contains(&self, p: Vector3<f64>) -> bool {
        let d = p - self.vertex;
        d.z * d.z <= self.delta * self.delta * (d.x * d.x + d.y * d.y)
    }

    /// Signed margin `delta^2 * horizontal^2 - vertical^2`; non-negative
    /// inside.
    pub fn margin(&self, p: Vector3<f64>) -> f64 {
        let d = p - self.vertex;
        self.delta * self.delta * (d.x * d.x + d.y * d.y) - d.z * d.z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_is_inside() {
        let c = Cone::new(Vector3::new(1.0, 2.0, 3.0), 0.5).unwrap();
        assert!(c.contains(c.vertex));
    }

    #[test]
    fn example_points() {
        let c = Cone::new(Vector3::zeros(), 1.0).unwrap();
        assert!(!c.contains(Vector3::new(1.0, 0.0, 2.0))); // 4 > 1
        assert!(c.contains(Vector3::new(3.0, 4.0, 5.0))); // 25 <= 25
    }

    #[test]
    fn slope_must_be_positive() {
        assert!(Cone::new(Vector3::zeros(), 0.0).is_err());
        assert!(Cone::new(Vector3::zeros(), -1.0).is_err());
    }
}
