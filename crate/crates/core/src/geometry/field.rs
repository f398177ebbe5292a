//! Grid-aligned value arrays with a units tag.

use serde::{Deserialize, Serialize};

/// Physical dimension carried by a field.  All lengths share one unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    Length,
    Dimensionless,
    PerLength,
    PerLengthSq,
}

/// Scalar samples aligned with a grid (one value per node, row-major).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    pub unit: Unit,
    pub data: Vec<f64>,
}

impl ScalarField {
    pub fn new(unit: Unit, data: Vec<f64>) -> Self {
        ScalarField { unit, data }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn sup_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Two-component (planar) vector samples aligned with a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorField {
    pub unit: Unit,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl VectorField {
    pub fn new(unit: Unit, x: Vec<f64>, y: Vec<f64>) -> Self {
        assert_eq!(x.len(), y.len());
        VectorField { unit, x, y }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn norm_at(&self, idx: usize) -> f64 {
        self.x[idx].hypot(self.y[idx])
    }

    pub fn sup_norm(&self) -> f64 {
        (0..self.len()).fold(0.0f64, |m, i| m.max(self.norm_at(i)))
    }
}
