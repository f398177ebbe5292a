//! Polar-domain discretization, multivalued graphs, meshes, and curvature.

pub mod cone;
pub mod curvature;
pub mod derive;
pub mod field;
pub mod interp;
pub mod mesh;
pub mod multigraph;
pub mod polar;

pub use cone::Cone;
pub use curvature::{graph_a2, graph_embed, mesh_a2};
pub use derive::{derivatives, GraphDerivatives};
pub use field::{ScalarField, Unit, VectorField};

pub use mesh::MeshPatch;
pub use multigraph::{MultiGraph, Separation, SeparationSign};
pub use polar::{PolarGrid, PolarRect, RadialSpacing};
