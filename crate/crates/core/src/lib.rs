// negated comparisons like `!(x > 0.0)` are deliberate: they reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// index loops over parallel per-vertex arrays read better than zips here
#![allow(clippy::needless_range_loop)]

//! Numerical toolkit for multivalued minimal graphs: exact generators,
//! a Dirichlet solver for the minimal surface equation on polar rectangles,
//! sheet certification, blow-up pair detection, complex-gradient asymptotics,
//! Gauss-map decomposition, and bi-Lipschitz comparison against helicoids.

pub mod asym;
pub mod error;
pub mod fit;
pub mod gauss;
pub mod geometry;
pub mod io;
pub mod plot;
pub mod sheets;
pub mod solver;
pub mod surfaces;

pub use error::{Error, Result};

// re-exported so downstream crates share the same linear-algebra types
pub use nalgebra;
