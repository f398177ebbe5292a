//! Triangulated, oriented surface patches in 3-space.

use std::collections::HashMap;

use nalgebra::{Matrix2, Rotation3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tangent frame and normal derivative at a vertex.
///
/// `dn[(i, j)] = <D n (e_i), e_j>` in the orthonormal basis `(e1, e2)`; the
/// shape operator is `-dn`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexFrame {
    pub e1: Vector3<f64>,
    pub e2: Vector3<f64>,
    pub dn: Matrix2<f64>,
}

/// Oriented triangle mesh with per-vertex normals and optional curvature data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshPatch {
    pub vertices: Vec<Vector3<f64>>,
    pub triangles: Vec<[usize; 3]>,
    /// Unit normals, one per vertex.
    pub normals: Vec<Vector3<f64>>,
    /// Norm squared of the second fundamental form, when populated.
    pub a2: Option<Vec<f64>>,
    /// Tangent frames with normal derivatives; not serialized, recomputable.
    #[serde(skip)]
    pub frames: Option<Vec<VertexFrame>>,
}

/// Triangles below this fraction of the patch scale (squared) are degenerate.
pub const DEGENERATE_AREA_FACTOR: f64 = 1e-14;

impl MeshPatch {
    /// Build a mesh and derive area-weighted vertex normals.
    pub fn new(vertices: Vec<Vector3<f64>>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let normals = area_weighted_normals(&vertices, &triangles)?;
        let m = MeshPatch {
            vertices,
            triangles,
            normals,
            a2: None,
            frames: None,
        };
        m.validate()?;
        Ok(m)
    }

    /// Build a mesh with normals already known (e.g. from a closed form).
    pub fn with_normals(
        vertices: Vec<Vector3<f64>>,
        triangles: Vec<[usize; 3]>,
        normals: Vec<Vector3<f64>>,
    ) -> Result<Self> {
        let m = MeshPatch {
            vertices,
            triangles,
            normals,
            a2: None,
            frames: None,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let nv = self.vertices.len();
        if self.normals.len() != nv {
            return Err(Error::BadMesh(format!(
                "normal count {} != vertex count {nv}",
                self.normals.len()
            )));
        }
        if let Some(a2) = &self.a2 {
            if a2.len() != nv {
                return Err(Error::BadMesh("curvature array length mismatch".into()));
            }
        }
        for (ti, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&k| k >= nv) {
                return Err(Error::BadMesh(format!("triangle {ti} indexes out of range")));
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::BadMesh(format!("triangle {ti} repeats a vertex")));
            }
        }
        for (k, n) in self.normals.iter().enumerate() {
            if (n.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::BadMesh(format!(
                    "normal {k} is not unit length (|n| = {})",
                    n.norm()
                )));
            }
        }
        // edge-manifold and consistently oriented: every directed edge occurs
        // at most once, every undirected edge in at most two triangles
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (ti, t) in self.triangles.iter().enumerate() {
            for e in 0..3 {
                let a = t[e];
                let b = t[(e + 1) % 3];
                if directed.insert((a, b), ti).is_some() {
                    return Err(Error::BadMesh(format!(
                        "directed edge ({a}, {b}) repeated at triangle {ti}: inconsistent orientation or non-manifold"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Bounding-box diagonal; the characteristic length of the patch.
    pub fn patch_scale(&self) -> f64 {
        if self.vertices.is_empty() {
            return 0.0;
        }
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for v in &self.vertices {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        (hi - lo).norm()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        0.5 * (self.vertices[b] - self.vertices[a])
            .cross(&(self.vertices[c] - self.vertices[a]))
            .norm()
    }

    /// Indices of triangles with area below the degeneracy cutoff.
    pub fn degenerate_triangles(&self) -> Vec<usize> {
        let cutoff = DEGENERATE_AREA_FACTOR * self.patch_scale().powi(2);
        (0..self.triangles.len())
            .filter(|&t| self.triangle_area(t) < cutoff)
            .collect()
    }

    /// Vertex adjacency lists (sorted, deduplicated).
    pub fn vertex_neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for t in &self.triangles {
            for e in 0..3 {
                let a = t[e];
                let b = t[(e + 1) % 3];
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Connected-component id per vertex (0-based, in first-seen order).
    pub fn components(&self) -> Vec<usize> {
        let adj = self.vertex_neighbors();
        let n = self.vertices.len();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0usize;
        let mut stack = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = next;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// Flags vertices lying on a boundary edge (an edge with one triangle).
    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut count: HashMap<(usize, usize), u32> = HashMap::new();
        for t in &self.triangles {
            for e in 0..3 {
                let a = t[e].min(t[(e + 1) % 3]);
                let b = t[e].max(t[(e + 1) % 3]);
                *count.entry((a, b)).or_insert(0) += 1;
            }
        }
        let mut on = vec![false; self.vertices.len()];
        for ((a, b), c) in count {
            if c == 1 {
                on[a] = true;
                on[b] = true;
            }
        }
        on
    }

    /// Apply a rigid motion; curvature data is carried along unchanged.
    pub fn rigid_transform(&self, rot: &Rotation3<f64>, trans: Vector3<f64>) -> MeshPatch {
        let vertices = self.vertices.iter().map(|v| rot * v + trans).collect();
        let normals = self.normals.iter().map(|n| rot * n).collect();
        let frames = self.frames.as_ref().map(|fr| {
            fr.iter()
                .map(|f| VertexFrame {
                    e1: rot * f.e1,
                    e2: rot * f.e2,
                    dn: f.dn,
                })
                .collect()
        });
        MeshPatch {
            vertices,
            triangles: self.triangles.clone(),
            normals,
            a2: self.a2.clone(),
            frames,
        }
    }

    /// Homothety by `lambda > 0` about the origin; curvature scales by
    /// `1/lambda^2`, normal derivatives by `1/lambda`.
    pub fn scaled(&self, lambda: f64) -> MeshPatch {
        MeshPatch {
            vertices: self.vertices.iter().map(|v| lambda * v).collect(),
            triangles: self.triangles.clone(),
            normals: self.normals.clone(),
            a2: self
                .a2
                .as_ref()
                .map(|a| a.iter().map(|v| v / (lambda * lambda)).collect()),
            frames: self.frames.as_ref().map(|fr| {
                fr.iter()
                    .map(|f| VertexFrame {
                        e1: f.e1,
                        e2: f.e2,
                        dn: f.dn / lambda,
                    })
                    .collect()
            }),
        }
    }

    /// Keep only triangles whose vertices all lie in the closed ball.
    pub fn clipped_to_ball(&self, center: Vector3<f64>, radius: f64) -> Result<MeshPatch> {
        let keep_v: Vec<bool> = self
            .vertices
            .iter()
            .map(|v| (v - center).norm() <= radius)
            .collect();
        let tris: Vec<[usize; 3]> = self
            .triangles
            .iter()
            .copied()
            .filter(|t| t.iter().all(|&k| keep_v[k]))
            .collect();
        let mut remap = vec![usize::MAX; self.vertices.len()];
        let mut vertices = Vec::new();
        let mut normals = Vec::new();
        let mut a2 = self.a2.as_ref().map(|_| Vec::new());
        let mut frames = self.frames.as_ref().map(|_| Vec::new());
        let mut triangles = Vec::with_capacity(tris.len());
        for t in tris {
            let mut nt = [0usize; 3];
            for (slot, &k) in nt.iter_mut().zip(t.iter()) {
                if remap[k] == usize::MAX {
                    remap[k] = vertices.len();
                    vertices.push(self.vertices[k]);
                    normals.push(self.normals[k]);
                    if let (Some(dst), Some(src)) = (a2.as_mut(), self.a2.as_ref()) {
                        dst.push(src[k]);
                    }
                    if let (Some(dst), Some(src)) = (frames.as_mut(), self.frames.as_ref()) {
                        dst.push(src[k]);
                    }
                }
                *slot = remap[k];
            }
            triangles.push(nt);
        }
        if triangles.is_empty() {
            return Err(Error::invalid("ball clip removed every triangle"));
        }
        let m = MeshPatch {
            vertices,
            triangles,
            normals,
            a2,
            frames,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn mean_edge_length(&self) -> f64 {
        let mut total = 0.0;
        let mut count = 0usize;
        for t in &self.triangles {
            for e in 0..3 {
                total += (self.vertices[t[e]] - self.vertices[t[(e + 1) % 3]]).norm();
                count += 1;
            }
        }
        if count == 0 {
            0.0
        } else {
            total / count as f64
        }
    }

    pub fn x3_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in &self.vertices {
            lo = lo.min(v.z);
            hi = hi.max(v.z);
        }
        (lo, hi)
    }
}

fn area_weighted_normals(
    vertices: &[Vector3<f64>],
    triangles: &[[usize; 3]],
) -> Result<Vec<Vector3<f64>>> {
    let mut acc = vec![Vector3::zeros(); vertices.len()];
    for t in triangles {
        let [a, b, c] = *t;
        let n = (vertices[b] - vertices[a]).cross(&(vertices[c] - vertices[a]));
        acc[a] += n;
        acc[b] += n;
        acc[c] += n;
    }
    acc.into_iter()
        .enumerate()
        .map(|(k, n)| {
            let len = n.norm();
            if len == 0.0 {
                Err(Error::BadMesh(format!(
                    "vertex {k} has no triangle area to define a normal"
                )))
            } else {
                Ok(n / len)
            }
        })
        .collect()
}
