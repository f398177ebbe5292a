//! Normal graphs between surfaces, the distortion of the graph map, best-fit
//! helicoids, and the bi-Lipschitz comparison pipeline.

pub mod bilip;
pub mod distortion;
pub mod helicoid_fit;
pub mod normal_graph;

pub use bilip::{bilipschitz_estimate, fit_and_compare};
pub use distortion::{phi_distortion, DistortionReport};
pub use helicoid_fit::{fit_helicoid, project_point, rms_distance, Projection};
pub use normal_graph::{build_normal_graph, from_offsets, NormalGraph, NormalGraphConfig};
