use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value at node {node} (rho index {i}, theta index {j})")]
    NonFinite { node: usize, i: usize, j: usize },

    #[error("grid too coarse for stencil: need at least {min_rho} radial and {min_theta} angular nodes")]
    GridTooCoarse { min_rho: usize, min_theta: usize },

    #[error("separation vanishes at {count} nodes (first indices: {first:?}); graph is not embedded as a multivalued graph")]
    SeparationVanishes { count: usize, first: Vec<usize> },

    #[error("angular spacing does not divide 2*pi; separation is not grid-aligned")]
    SeparationNotAligned,

    #[error("domain does not cover the required polar rectangle [{r1}, {r2}] x [{theta1}, {theta2}]")]
    InsufficientDomain {
        r1: f64,
        r2: f64,
        theta1: f64,
        theta2: f64,
    },

    #[error("degenerate triangles (area below threshold): {0:?}")]
    DegenerateTriangles(Vec<usize>),

    #[error("mesh is not edge-manifold or not consistently oriented: {0}")]
    BadMesh(String),

    #[error("mesh has no curvature data; compute |A|^2 first")]
    MissingCurvature,

    #[error("normal ray misses or multiply intersects the target for {count} base vertices (first: {first:?})")]
    NotANormalGraph { count: usize, first: Vec<usize> },

    #[error("all nodes masked: flat patch, Gauss map undefined")]
    FlatPatch,

    #[error("phase jump exceeds pi/2 between consecutive path nodes ({from} -> {to}): path too coarse")]
    PathTooCoarse { from: usize, to: usize },

    #[error("linear solve breakdown: {0}")]
    LinearSolveBreakdown(String),

    #[error("optimizer stagnation across all restarts (best residual {best_residual})")]
    OptimizerStagnation { best_residual: f64 },

    #[error("radius {rho} outside the graph domain [{r1}, {r2}]")]
    RadiusOutsideDomain { rho: f64, r1: f64, r2: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("file format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
