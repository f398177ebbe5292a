//! Normal graphs of one surface over another: the offset field `nu` with its
//! tangential gradient, built by casting base-normal rays at a target mesh.

use nalgebra::{Matrix2, Vector2, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::curvature::quadric_fit_curvature;
use crate::geometry::mesh::MeshPatch;

/// Offsets along base normals describing a target surface.
#[derive(Debug, Clone)]
pub struct NormalGraph {
    pub base: MeshPatch,
    /// Signed offset along the base normal, per base vertex.
    pub nu: Vec<f64>,
    /// Tangential gradient of `nu` in the base tangent frame.
    pub grad_nu: Vec<Vector2<f64>>,
    /// `sup(|nu| + |grad nu|)` over the vertices.
    pub sup_norm: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NormalGraphConfig {
    /// Rays are traced for `|t| <= search_radius`.
    pub search_radius: f64,
    /// Hits closer than this along the ray collapse into one intersection.
    pub hit_merge_tol: f64,
}

impl Default for NormalGraphConfig {
    fn default() -> Self {
        NormalGraphConfig {
            search_radius: 1.0,
            hit_merge_tol: 1e-9,
        }
    }
}

/// Cast each base-vertex normal line at the target mesh; exactly one
/// intersection (within the search radius) defines `nu` there.
pub fn build_normal_graph(
    base: &MeshPatch,
    target: &MeshPatch,
    cfg: &NormalGraphConfig,
) -> Result<NormalGraph> {
    let offsets: Vec<std::result::Result<f64, usize>> = (0..base.n_vertices())
        .into_par_iter()
        .map(|v| {
            let origin = base.vertices[v];
            let dir = base.normals[v];
            let mut hits: Vec<f64> = Vec::new();
            for t in &target.triangles {
                if let Some(tau) = ray_triangle(
                    origin,
                    dir,
                    target.vertices[t[0]],
                    target.vertices[t[1]],
                    target.vertices[t[2]],
                ) {
                    if tau.abs() <= cfg.search_radius {
                        hits.push(tau);
                    }
                }
            }
            hits.sort_by(|a, b| a.partial_cmp(b).unwrap());
            hits.dedup_by(|a, b| (*a - *b).abs() <= cfg.hit_merge_tol);
            if hits.len() == 1 {
                Ok(hits[0])
            } else {
                Err(hits.len())
            }
        })
        .collect();
    let mut nu = Vec::with_capacity(offsets.len());
    let mut bad = Vec::new();
    for (v, o) in offsets.iter().enumerate() {
        match o {
            Ok(tau) => nu.push(*tau),
            Err(_) => {
                bad.push(v);
                nu.push(0.0);
            }
        }
    }
    if !bad.is_empty() {
        let count = bad.len();
        return Err(Error::NotANormalGraph {
            count,
            first: bad.into_iter().take(8).collect(),
        });
    }
    from_offsets(base.clone(), nu)
}

/// Wrap an explicit offset field as a normal graph (used when the target is
/// constructed as `base + nu * n` directly).
pub fn from_offsets(base: MeshPatch, nu: Vec<f64>) -> Result<NormalGraph> {
    if nu.len() != base.n_vertices() {
        return Err(Error::invalid("offset count does not match the base mesh"));
    }
    let frames = match &base.frames {
        Some(f) => f.clone(),
        None => quadric_fit_curvature(&base)?.1,
    };
    let adj = base.vertex_neighbors();
    let mut grad = Vec::with_capacity(nu.len());
    for v in 0..nu.len() {
        let e1 = frames[v].e1;
        let e2 = frames[v].e2;
        let p0 = base.vertices[v];
        // least-squares fit of the offset increments over the 1-ring
        let mut ata = Matrix2::zeros();
        let mut atb = Vector2::zeros();
        for &w in &adj[v] {
            let d = base.vertices[w] - p0;
            let x = Vector2::new(d.dot(&e1), d.dot(&e2));
            ata += x * x.transpose();
            atb += x * (nu[w] - nu[v]);
        }
        let g = ata
            .try_inverse()
            .map(|inv| inv * atb)
            .ok_or_else(|| Error::BadMesh(format!("degenerate 1-ring at vertex {v}")))?;
        grad.push(g);
    }
    let sup_norm = nu
        .iter()
        .zip(&grad)
        .fold(0.0f64, |m, (n, g)| m.max(n.abs() + g.norm()));
    Ok(NormalGraph {
        base,
        nu,
        grad_nu: grad,
        sup_norm,
    })
}

/// Two-sided ray/triangle intersection; returns the ray parameter.
fn ray_triangle(
    origin: Vector3<f64>,
    dir: Vector3<f64>,
    a: Vector3<f64>,
    b: Vector3<f64>,
    c: Vector3<f64>,
) -> Option<f64> {
    let e1 = b - a;
    let e2 = c - a;
    let p = dir.cross(&e2);
    let det = e1.dot(&p);
    if det.abs() < 1e-300 {
        return None;
    }
    let inv = 1.0 / det;
    let s = origin - a;
    let u = s.dot(&p) * inv;
    if !(-1e-12..=1.0 + 1e-12).contains(&u) {
        return None;
    }
    let q = s.cross(&e1);
    let v = dir.dot(&q) * inv;
    if v < -1e-12 || u + v > 1.0 + 1e-12 {
        return None;
    }
    Some(e2.dot(&q) * inv)
}
