//! Closed-form surface generators and the axis-curve embeddedness test.

pub mod analytic;
pub mod generate;
pub mod weierstrass;

pub use analytic::{GraphFormula, GraphJet};
pub use generate::{
    catenoid_mesh, helicoid_ball_mesh, helicoid_mesh, make_surface, Frame, HelicoidModel,
    Resolution, SurfaceBundle, SurfaceSpec,
};
pub use weierstrass::{
    embeddedness_verdict, weierstrass_curve, CurveSamples, Embeddedness, WeierstrassAlpha,
};
