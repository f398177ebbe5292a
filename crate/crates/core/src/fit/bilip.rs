//! Bi-Lipschitz comparison of a mesh patch against a helicoid: the patch is
//! expressed as a normal graph over the model (projection feet become the
//! base mesh) and the distortion of the graph map is measured.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fit::distortion::{phi_distortion, DistortionReport};
use crate::fit::helicoid_fit::{fit_helicoid, project_point, Projection};
use crate::fit::normal_graph::from_offsets;
use crate::geometry::mesh::{MeshPatch, VertexFrame};
use crate::surfaces::generate::HelicoidModel;
use nalgebra::{Matrix2, Vector3};

/// Tangential projection residue (relative to the patch scale) above which a
/// vertex is not on the base's normal line.
const PROJECTION_TOL: f64 = 1e-6;
/// Distinct patch vertices whose feet collide closer than this (relative)
/// while their offsets differ mean the patch double-covers the base.
const FOOT_MERGE_TOL: f64 = 1e-7;

/// Compare `patch` against `model`.  The patch must be a normal graph over
/// the model's sampled footprint; failures of that hypothesis are errors,
/// not numbers.
pub fn bilipschitz_estimate(patch: &MeshPatch, model: &HelicoidModel) -> Result<DistortionReport> {
    let projections: Vec<Projection> = patch
        .vertices
        .par_iter()
        .map(|p| project_point(model, *p))
        .collect();
    let scale = patch.patch_scale();
    // every vertex must sit on the normal line through its foot
    let mut bad: Vec<usize> = Vec::new();
    for (k, (p, pr)) in patch.vertices.iter().zip(&projections).enumerate() {
        let tangential = (p - (pr.foot + pr.nu * pr.normal)).norm();
        if tangential > PROJECTION_TOL * scale {
            bad.push(k);
        }
    }
    if !bad.is_empty() {
        let count = bad.len();
        return Err(Error::NotANormalGraph {
            count,
            first: bad.into_iter().take(8).collect(),
        });
    }
    // distinct vertices may not share a foot with different offsets
    let mut order: Vec<usize> = (0..projections.len()).collect();
    order.sort_by(|&a, &b| {
        projections[a]
            .t
            .partial_cmp(&projections[b].t)
            .unwrap()
            .then(projections[a].s.partial_cmp(&projections[b].s).unwrap())
    });
    for w in order.windows(2) {
        let (a, b) = (&projections[w[0]], &projections[w[1]]);
        let foot_gap = ((a.s - b.s).powi(2) + (a.t - b.t).powi(2)).sqrt();
        if foot_gap < FOOT_MERGE_TOL * scale && (a.nu - b.nu).abs() > PROJECTION_TOL * scale {
            return Err(Error::NotANormalGraph {
                count: 2,
                first: vec![w[0], w[1]],
            });
        }
    }

    // base mesh on the model at the projection feet, carrying the model's
    // exact normals, curvature, and frames
    let a = model.pitch;
    let rot = model.frame.rotation;
    let mut vertices = Vec::with_capacity(projections.len());
    let mut normals = Vec::with_capacity(projections.len());
    let mut a2 = Vec::with_capacity(projections.len());
    let mut frames = Vec::with_capacity(projections.len());
    let mut nu = Vec::with_capacity(projections.len());
    for pr in &projections {
        vertices.push(pr.foot);
        normals.push(pr.normal);
        a2.push(model.a2(pr.s));
        let denom = (a * a + pr.s * pr.s).sqrt();
        let e1 = rot * Vector3::new(pr.t.cos(), pr.t.sin(), 0.0);
        let e2 = rot * (Vector3::new(-pr.s * pr.t.sin(), pr.s * pr.t.cos(), a) / denom);
        let m = a / (a * a + pr.s * pr.s);
        frames.push(VertexFrame {
            e1,
            e2,
            dn: Matrix2::new(0.0, m, m, 0.0),
        });
        nu.push(pr.nu);
    }
    let base = MeshPatch {
        vertices,
        triangles: patch.triangles.clone(),
        normals,
        a2: Some(a2),
        frames: Some(frames),
    };
    base.validate().map_err(|e| match e {
        Error::BadMesh(msg) => Error::BadMesh(format!(
            "projected base mesh is not a graph-compatible mesh: {msg}"
        )),
        other => other,
    })?;

    let graph = from_offsets(base, nu)?;
    let mut report = phi_distortion(&graph)?;
    let rms = (projections.iter().map(|p| p.distance * p.distance).sum::<f64>()
        / projections.len() as f64)
        .sqrt();
    report.fitted = Some(model.clone());
    report.fit_residual = Some(rms);
    Ok(report)
}

/// Fit a helicoid to the patch and compare against it.
pub fn fit_and_compare(patch: &MeshPatch, seed: u64) -> Result<DistortionReport> {
    let (model, _) = fit_helicoid(patch, seed)?;
    bilipschitz_estimate(patch, &model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::generate::{catenoid_mesh, helicoid_mesh, HelicoidModel};

    #[test]
    fn exact_self_comparison_is_the_identity() {
        let model = HelicoidModel::axis_aligned(1.0);
        let patch = helicoid_mesh(&model, (0.5, 3.0), (-2.0, 2.0), 41, 61).unwrap();
        let rep = bilipschitz_estimate(&patch, &model).unwrap();
        assert!(
            rep.interval.0 >= 1.0 - 1e-6 && rep.interval.1 <= 1.0 + 1e-6,
            "interval {:?}",
            rep.interval
        );
        assert!(rep.fit_residual.unwrap() < 1e-9);
    }

    #[test]
    fn catenoid_against_a_helicoid_is_not_an_almost_isometry() {
        let patch = catenoid_mesh(1.0, (-1.2, 1.2), 48, 25).unwrap();
        let outcome = fit_and_compare(&patch, 11);
        match outcome {
            Err(_) => {} // not a normal graph: an honest negative
            Ok(rep) => {
                assert!(
                    !(rep.interval.0 >= 0.9 && rep.interval.1 <= 1.1),
                    "catenoid comparison unexpectedly tight: {:?}",
                    rep.interval
                );
            }
        }
    }
}
