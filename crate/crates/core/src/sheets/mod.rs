//! Sheet certification, gradient decay, blow-up pairs, and the
//! between-sheets region.

pub mod blowup;
pub mod certify;
pub mod flatness;
pub mod region;

use nalgebra::{Rotation3, Vector3};

use crate::error::{Error, Result};
use crate::geometry::mesh::MeshPatch;

pub use blowup::{detect_blowup_pairs, BlowUpPair, BlowUpScan};
pub use certify::{
    certify_sheet, decay_check, CertifyConfig, DecayReport, SheetCertificate, SheetKind,
};
pub use flatness::{flatness_terms, FlatnessTerms};
pub use region::{region_e_membership, RegionEVerdict};

/// Rotation aligning the asymptotic tangent plane with the horizontal:
/// least-squares (mean) normal over the outermost vertices, mapped to the
/// vertical axis.  The sampling window is the fraction of the radial extent
/// counted from the rim (default 0.25 works for annulus patches).
pub fn fit_asymptotic_rotation(mesh: &MeshPatch, outer_fraction: f64) -> Result<Rotation3<f64>> {
    if mesh.n_vertices() == 0 {
        return Err(Error::invalid("empty mesh"));
    }
    let frac = outer_fraction.clamp(0.05, 1.0);
    let rmax = mesh
        .vertices
        .iter()
        .fold(0.0f64, |m, v| m.max(v.x.hypot(v.y)));
    let cut = rmax * (1.0 - frac);
    let mut mean = Vector3::zeros();
    for (v, n) in mesh.vertices.iter().zip(&mesh.normals) {
        if v.x.hypot(v.y) >= cut {
            // sheets come with either co-orientation; fold onto one side
            mean += if n.z >= 0.0 { *n } else { -*n };
        }
    }
    let len = mean.norm();
    if len < 1e-12 {
        return Err(Error::invalid(
            "outer normals average to zero; no asymptotic plane to fit",
        ));
    }
    let mean = mean / len;
    Ok(Rotation3::rotation_between(&mean, &Vector3::z())
        .unwrap_or_else(Rotation3::identity))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::curvature::graph_embed;
    use crate::geometry::multigraph::MultiGraph;
    use crate::geometry::polar::{PolarGrid, PolarRect, RadialSpacing};
    use crate::surfaces::analytic::GraphFormula;

    #[test]
    fn tilted_plane_rotation_is_recovered() {
        let rect = PolarRect::new(1.0, 4.0, 0.0, 2.0 * std::f64::consts::PI).unwrap();
        let grid = PolarGrid::new(rect, 17, 65, RadialSpacing::Geometric).unwrap();
        let tilted = MultiGraph::from_formula(
            grid,
            Vector3::zeros(),
            GraphFormula::Plane { gx: 0.2, gy: -0.1, offset: 0.0 },
        )
        .unwrap();
        let mesh = graph_embed(&tilted).unwrap();
        let rot = fit_asymptotic_rotation(&mesh, 0.5).unwrap();
        let rotated = mesh.rigid_transform(&rot, Vector3::zeros());
        for n in &rotated.normals {
            assert!((n - Vector3::z()).norm() < 1e-9, "normal {n:?}");
        }
    }
}
