//! Detection of blow-up pairs: points of almost-maximal curvature with the
//! scale tied to the curvature by `4 |A|^2(y) = 4 C^2 s^{-2}`.

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::mesh::MeshPatch;

/// Curvature-sup tolerance absorbing the discretization of the supremum.
pub const SUP_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowUpPair {
    pub center: Vector3<f64>,
    pub scale: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlowUpScan {
    pub c: f64,
    pub pairs: Vec<BlowUpPair>,
    /// Candidates whose ball left the mesh through its boundary.
    pub discarded_boundary: usize,
    /// Candidates outside the requested scale window.
    pub discarded_scan: usize,
    /// Candidates failing the curvature-sup inequality.
    pub failed_sup: usize,
    pub sup_tolerance: f64,
}

/// Scan every vertex `y` with `s = C / |A|(y)` for the blow-up inequality
/// `sup |A|^2 <= 4 |A|^2(y) (1 + tol)` over the in-component ball `B_s(y)`
/// (extrinsic distance).  Balls that exit the mesh are discarded and counted;
/// passing pairs are deduplicated by keeping local maxima of `|A|^2` and
/// sorted by height, then curvature.
pub fn detect_blowup_pairs(mesh: &MeshPatch, c: f64, scan: &[f64]) -> Result<BlowUpScan> {
    if !(c > 0.0) {
        return Err(Error::invalid("blow-up constant C must be positive"));
    }
    let a2 = mesh.a2.as_ref().ok_or(Error::MissingCurvature)?;
    let comp = mesh.components();
    let boundary = mesh.boundary_vertices();
    let adj = mesh.vertex_neighbors();
    let (scan_lo, scan_hi) = if scan.is_empty() {
        (0.0, f64::INFINITY)
    } else {
        (
            scan.iter().cloned().fold(f64::INFINITY, f64::min),
            scan.iter().cloned().fold(0.0f64, f64::max),
        )
    };

    #[derive(Clone, Copy)]
    enum Outcome {
        Pass(BlowUpPair),
        Boundary,
        ScanWindow,
        FailedSup,
        Skip,
    }

    let outcomes: Vec<Outcome> = (0..mesh.n_vertices())
        .into_par_iter()
        .map(|v| {
            let av = a2[v];
            if !(av > 0.0) {
                return Outcome::Skip; // flat point: no scale defined
            }
            // local maximum of |A|^2 (plateaus count)
            if adj[v].iter().any(|&w| a2[w] > av) {
                return Outcome::Skip;
            }
            let s = c / av.sqrt();
            if s < scan_lo || s > scan_hi {
                return Outcome::ScanWindow;
            }
            let y = mesh.vertices[v];
            let cv = comp[v];
            // ball exits the mesh if the boundary of this component is nearer
            // than s
            let exits = (0..mesh.n_vertices())
                .filter(|&b| boundary[b] && comp[b] == cv)
                .any(|b| (mesh.vertices[b] - y).norm() < s);
            if exits {
                return Outcome::Boundary;
            }
            let bound = 4.0 * av * (1.0 + SUP_TOLERANCE);
            let ok = (0..mesh.n_vertices())
                .filter(|&w| comp[w] == cv && (mesh.vertices[w] - y).norm() <= s)
                .all(|w| a2[w] <= bound);
            if ok {
                Outcome::Pass(BlowUpPair { center: y, scale: s, c })
            } else {
                Outcome::FailedSup
            }
        })
        .collect();

    let mut pairs = Vec::new();
    let mut discarded_boundary = 0;
    let mut discarded_scan = 0;
    let mut failed_sup = 0;
    for o in outcomes {
        match o {
            Outcome::Pass(p) => pairs.push(p),
            Outcome::Boundary => discarded_boundary += 1,
            Outcome::ScanWindow => discarded_scan += 1,
            Outcome::FailedSup => failed_sup += 1,
            Outcome::Skip => {}
        }
    }
    pairs.sort_by(|a, b| {
        a.center
            .z
            .partial_cmp(&b.center.z)
            .unwrap()
            .then(b.scale.partial_cmp(&a.scale).unwrap())
            .then(a.center.x.partial_cmp(&b.center.x).unwrap())
            .then(a.center.y.partial_cmp(&b.center.y).unwrap())
    });
    Ok(BlowUpScan {
        c,
        pairs,
        discarded_boundary,
        discarded_scan,
        failed_sup,
        sup_tolerance: SUP_TOLERANCE,
    })
}
