//! Second fundamental form: exact graph formulas and mesh quadric fits.
//!
//! Minimality is never assumed; `|A|^2` is computed from the shape operator
//! in both routes, and the two routes are cross-checked in tests.

use nalgebra::{DMatrix, DVector, Matrix2, Vector3};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::derive::{derivatives, GraphDerivatives};
use crate::geometry::field::{ScalarField, Unit};
use crate::geometry::mesh::{MeshPatch, VertexFrame};
use crate::geometry::multigraph::MultiGraph;

/// Shape data of the graph `z = h(x, y)` at a point, from its gradient
/// `(p1, p2)` and Hessian entries.  Returned tangent vectors live in the same
/// coordinates as the graph; `dn` is the normal derivative in the `(e1, e2)`
/// basis and `a2 = |A|^2`.
pub fn graph_shape(
    p1: f64,
    p2: f64,
    hxx: f64,
    hxy: f64,
    hyy: f64,
) -> (Vector3<f64>, Vector3<f64>, Matrix2<f64>, f64) {
    let w2 = 1.0 + p1 * p1 + p2 * p2;
    let w = w2.sqrt();
    let t1 = Vector3::new(1.0, 0.0, p1);
    let t2 = Vector3::new(0.0, 1.0, p2);
    // d n / dx_k, with n = (-p, 1) / W
    let dndx = {
        let wx = (p1 * hxx + p2 * hxy) / w;
        Vector3::new(-hxx, -hxy, 0.0) / w - Vector3::new(-p1, -p2, 1.0) * (wx / w2)
    };
    let dndy = {
        let wy = (p1 * hxy + p2 * hyy) / w;
        Vector3::new(-hxy, -hyy, 0.0) / w - Vector3::new(-p1, -p2, 1.0) * (wy / w2)
    };
    let e1 = t1 / t1.norm();
    let proj = t2.dot(&e1);
    let e2v = t2 - proj * e1;
    let e2 = e2v / e2v.norm();
    // plane components (a_i, b_i) of e_i = a_i t1 + b_i t2
    let a1 = 1.0 / t1.norm();
    let b1 = 0.0;
    let b2 = 1.0 / e2v.norm();
    let a2c = -proj / (t1.norm() * e2v.norm());
    let dn_e1 = a1 * dndx + b1 * dndy;
    let dn_e2 = a2c * dndx + b2 * dndy;
    let dn = Matrix2::new(dn_e1.dot(&e1), dn_e1.dot(&e2), dn_e2.dot(&e1), dn_e2.dot(&e2));
    // symmetrize before taking the norm; dn is symmetric analytically
    let s11 = dn[(0, 0)];
    let s22 = dn[(1, 1)];
    let s12 = 0.5 * (dn[(0, 1)] + dn[(1, 0)]);
    let a2 = s11 * s11 + 2.0 * s12 * s12 + s22 * s22;
    (e1, e2, dn, a2)
}

/// `|A|^2` of a graph via the exact curvature formula on its derivatives.
pub fn graph_a2(u: &MultiGraph) -> Result<ScalarField> {
    let d = derivatives(u)?;
    Ok(graph_a2_from(&d))
}

pub fn graph_a2_from(d: &GraphDerivatives) -> ScalarField {
    let data = (0..d.len())
        .map(|k| {
            graph_shape(d.grad.x[k], d.grad.y[k], d.hess_xx[k], d.hess_xy[k], d.hess_yy[k]).3
        })
        .collect();
    ScalarField::new(Unit::PerLengthSq, data)
}

/// Embed a multivalued graph as a mesh.
///
/// Sheets are never welded: nodes over the same annulus point stay distinct
/// vertices.  Normals and curvature come from the graph formulas (exact when
/// a closed form is attached); the area-weighted fallback only fires if the
/// grid is too coarse for stencils.
pub fn graph_embed(u: &MultiGraph) -> Result<MeshPatch> {
    let g = &u.grid;
    let mut vertices = Vec::with_capacity(g.len());
    for i in 0..g.n_rho {
        for j in 0..g.n_theta {
            vertices.push(u.vertex(i, j));
        }
    }
    let mut triangles = Vec::with_capacity(2 * (g.n_rho - 1) * (g.n_theta - 1));
    for i in 0..g.n_rho - 1 {
        for j in 0..g.n_theta - 1 {
            let v00 = g.idx(i, j);
            let v10 = g.idx(i + 1, j);
            let v11 = g.idx(i + 1, j + 1);
            let v01 = g.idx(i, j + 1);
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    match derivatives(u) {
        Ok(d) => {
            let mut normals = Vec::with_capacity(g.len());
            let mut a2 = Vec::with_capacity(g.len());
            let mut frames = Vec::with_capacity(g.len());
            for k in 0..g.len() {
                let (p1, p2) = (d.grad.x[k], d.grad.y[k]);
                let w = (1.0 + p1 * p1 + p2 * p2).sqrt();
                normals.push(Vector3::new(-p1, -p2, 1.0) / w);
                let (e1, e2, dn, a) =
                    graph_shape(p1, p2, d.hess_xx[k], d.hess_xy[k], d.hess_yy[k]);
                a2.push(a);
                frames.push(VertexFrame { e1, e2, dn });
            }
            let mut m = MeshPatch::with_normals(vertices, triangles, normals)?;
            m.a2 = Some(a2);
            m.frames = Some(frames);
            Ok(m)
        }
        Err(Error::GridTooCoarse { .. }) => MeshPatch::new(vertices, triangles),
        Err(e) => Err(e),
    }
}

/// Per-vertex quadric fit in the normal frame over 2-ring neighborhoods.
///
/// Returns `(a2, frames)`; fails on degenerate triangles or vertices with
/// too few neighbors for the five-parameter fit.
pub fn quadric_fit_curvature(mesh: &MeshPatch) -> Result<(Vec<f64>, Vec<VertexFrame>)> {
    let degenerate = mesh.degenerate_triangles();
    if !degenerate.is_empty() {
        return Err(Error::DegenerateTriangles(degenerate));
    }
    let adj = mesh.vertex_neighbors();
    let results: Vec<Result<(f64, VertexFrame)>> = (0..mesh.n_vertices())
        .into_par_iter()
        .map(|v| fit_vertex(mesh, &adj, v))
        .collect();
    let mut a2 = Vec::with_capacity(results.len());
    let mut frames = Vec::with_capacity(results.len());
    for r in results {
        let (a, f) = r?;
        a2.push(a);
        frames.push(f);
    }
    Ok((a2, frames))
}

/// `|A|^2` of a mesh via the quadric fit (attaches nothing).
pub fn mesh_a2(mesh: &MeshPatch) -> Result<ScalarField> {
    let (a2, _) = quadric_fit_curvature(mesh)?;
    Ok(ScalarField::new(Unit::PerLengthSq, a2))
}

/// Compute and attach curvature and frames via the quadric fit.
pub fn attach_curvature(mesh: &mut MeshPatch) -> Result<()> {
    let (a2, frames) = quadric_fit_curvature(mesh)?;
    mesh.a2 = Some(a2);
    mesh.frames = Some(frames);
    Ok(())
}

fn fit_vertex(mesh: &MeshPatch, adj: &[Vec<usize>], v: usize) -> Result<(f64, VertexFrame)> {
    // collect a 2-ring, extending to 3 rings when the patch is thin
    let mut ring = collect_rings(adj, v, 2);
    if ring.len() < 12 {
        ring = collect_rings(adj, v, 3);
    }
    if ring.len() < 5 {
        return Err(Error::BadMesh(format!(
            "vertex {v} has only {} neighbors in 3 rings; cannot fit a quadric",
            ring.len()
        )));
    }
    // cubic correction terms keep the curvature second-order accurate on
    // one-sided / graded stencils; drop them when the ring is too small
    let cols = if ring.len() >= 12 { 9 } else { 5 };
    let n = mesh.normals[v];
    let f1 = orthogonal_to(n);
    let f2 = n.cross(&f1);
    let p0 = mesh.vertices[v];
    let rows = ring.len();
    let mut a = DMatrix::zeros(rows, cols);
    let mut rhs = DVector::zeros(rows);
    for (r, &w) in ring.iter().enumerate() {
        let d = mesh.vertices[w] - p0;
        let x = d.dot(&f1);
        let y = d.dot(&f2);
        let z = d.dot(&n);
        a[(r, 0)] = 0.5 * x * x;
        a[(r, 1)] = x * y;
        a[(r, 2)] = 0.5 * y * y;
        a[(r, 3)] = x;
        a[(r, 4)] = y;
        if cols == 9 {
            a[(r, 5)] = x * x * x;
            a[(r, 6)] = x * x * y;
            a[(r, 7)] = x * y * y;
            a[(r, 8)] = y * y * y;
        }
        rhs[r] = z;
    }
    let ata = a.transpose() * &a;
    let atb = a.transpose() * rhs;
    let sol = ata
        .clone()
        .cholesky()
        .map(|ch| ch.solve(&atb))
        .or_else(|| ata.lu().solve(&atb))
        .ok_or_else(|| Error::BadMesh(format!("quadric fit singular at vertex {v}")))?;
    let (hxx, hxy, hyy, gx, gy) = (sol[0], sol[1], sol[2], sol[3], sol[4]);
    let (e1l, e2l, dn, a2) = graph_shape(gx, gy, hxx, hxy, hyy);
    // map the fit-local tangent basis back to world coordinates
    let to_world = |w: Vector3<f64>| w.x * f1 + w.y * f2 + w.z * n;
    Ok((
        a2,
        VertexFrame {
            e1: to_world(e1l),
            e2: to_world(e2l),
            dn,
        },
    ))
}

fn collect_rings(adj: &[Vec<usize>], v: usize, rings: usize) -> Vec<usize> {
    let mut seen = vec![(v, 0usize)];
    let mut mark = std::collections::HashSet::new();
    mark.insert(v);
    let mut head = 0;
    while head < seen.len() {
        let (w, depth) = seen[head];
        head += 1;
        if depth == rings {
            continue;
        }
        for &u in &adj[w] {
            if mark.insert(u) {
                seen.push((u, depth + 1));
            }
        }
    }
    seen.into_iter().skip(1).map(|(w, _)| w).collect()
}

fn orthogonal_to(n: Vector3<f64>) -> Vector3<f64> {
    let pick = if n.x.abs() <= n.y.abs() && n.x.abs() <= n.z.abs() {
        Vector3::x()
    } else if n.y.abs() <= n.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    let t = pick - n.dot(&pick) * n;
    t / t.norm()
}

/// Project the vertical direction onto the tangent plane: `|grad_S x3|`.
pub fn grad_x3_norm(normal: &Vector3<f64>) -> f64 {
    (1.0 - normal.z * normal.z).max(0.0).sqrt()
}

/// Directional height change per unit angle along the surface: the `u_theta`
/// of the local graph structure, reconstructed from position and normal.
/// Returns `None` when the normal is horizontal (axis points).
pub fn mesh_u_theta(position: &Vector3<f64>, normal: &Vector3<f64>) -> Option<f64> {
    let rho = position.x.hypot(position.y);
    if rho == 0.0 || normal.z.abs() < 1e-12 {
        return None;
    }
    let az = Vector3::new(-position.y / rho, position.x / rho, 0.0);
    Some(-rho * az.dot(normal) / normal.z)
}
