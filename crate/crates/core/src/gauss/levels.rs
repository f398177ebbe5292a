//! Horizontal level sets of a mesh by triangle-crossing contouring.

use std::collections::HashMap;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::mesh::MeshPatch;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelSetTrace {
    /// Level actually used (the request is nudged off exact vertex hits).
    pub level: f64,
    pub requested_level: f64,
    pub polylines: Vec<Vec<Vector3<f64>>>,
    /// Whether each chain is closed (true) or ends on the mesh boundary.
    pub closed: Vec<bool>,
    pub components: usize,
}

/// Trace `x3 = level` across the mesh.  Exact vertex hits are avoided by
/// nudging the level by `1e-12` of the height range.
pub fn trace_level_set(mesh: &MeshPatch, level: f64) -> Result<LevelSetTrace> {
    let (lo, hi) = mesh.x3_range();
    if !(level > lo && level < hi) {
        return Err(Error::invalid(format!(
            "level {level} outside the mesh height range [{lo}, {hi}]"
        )));
    }
    let range = hi - lo;
    let mut c = level;
    for _ in 0..64 {
        if mesh.vertices.iter().all(|v| (v.z - c).abs() > 1e-14 * range) {
            break;
        }
        c += 1e-12 * range;
    }

    // one crossing point per cut edge, shared between the two triangles of
    // interior edges
    let mut edge_points: HashMap<(usize, usize), usize> = HashMap::new();
    let mut points: Vec<Vector3<f64>> = Vec::new();
    let mut segments: Vec<(usize, usize)> = Vec::new();
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    for t in &mesh.triangles {
        let mut cuts = [0usize; 3];
        let mut n_cuts = 0;
        for e in 0..3 {
            let (a, b) = (t[e], t[(e + 1) % 3]);
            let (za, zb) = (mesh.vertices[a].z - c, mesh.vertices[b].z - c);
            if za * zb < 0.0 {
                let id = *edge_points.entry(key(a, b)).or_insert_with(|| {
                    let s = za / (za - zb);
                    points.push(mesh.vertices[a] + s * (mesh.vertices[b] - mesh.vertices[a]));
                    points.len() - 1
                });
                cuts[n_cuts] = id;
                n_cuts += 1;
            }
        }
        match n_cuts {
            0 => {}
            2 => segments.push((cuts[0], cuts[1])),
            _ => {
                return Err(Error::BadMesh(format!(
                    "triangle cut {n_cuts} times at level {c}; degenerate crossing"
                )))
            }
        }
    }

    // chain segments into polylines
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for (s, (a, b)) in segments.iter().enumerate() {
        adj.entry(*a).or_default().push(s);
        adj.entry(*b).or_default().push(s);
        let da = adj[a].len();
        let db = adj[b].len();
        if da > 2 || db > 2 {
            return Err(Error::BadMesh(
                "level curve branches: mesh is not edge-manifold along the level".into(),
            ));
        }
    }
    let mut used = vec![false; segments.len()];
    let mut polylines = Vec::new();
    let mut closed_flags = Vec::new();
    // open chains first (start at degree-1 points), then closed loops
    let mut starts: Vec<usize> = adj
        .iter()
        .filter(|(_, segs)| segs.len() == 1)
        .map(|(&p, _)| p)
        .collect();
    starts.sort_unstable();
    let walk = |start_point: usize, used: &mut Vec<bool>| -> (Vec<Vector3<f64>>, bool) {
        let mut chain = vec![points[start_point]];
        let mut current = start_point;
        let mut closed = false;
        let origin = start_point;
        loop {
            let next_seg = adj[&current].iter().copied().find(|&s| !used[s]);
            let Some(s) = next_seg else { break };
            used[s] = true;
            let (a, b) = segments[s];
            current = if a == current { b } else { a };
            chain.push(points[current]);
            if current == origin {
                closed = true;
                break;
            }
        }
        (chain, closed)
    };
    for p in starts {
        if adj[&p].iter().all(|&s| used[s]) {
            continue;
        }
        let (chain, closed) = walk(p, &mut used);
        polylines.push(chain);
        closed_flags.push(closed);
    }
    for s in 0..segments.len() {
        if used[s] {
            continue;
        }
        let (chain, closed) = walk(segments[s].0, &mut used);
        polylines.push(chain);
        closed_flags.push(closed);
    }
    let components = polylines.len();
    Ok(LevelSetTrace {
        level: c,
        requested_level: level,
        polylines,
        closed: closed_flags,
        components,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::generate::{helicoid_ball_mesh, HelicoidModel};

    #[test]
    fn helicoid_ball_levels_are_single_chords() {
        let model = HelicoidModel::axis_aligned(1.0);
        let mesh = helicoid_ball_mesh(&model, 6.0, 161).unwrap();
        for &c in &[0.013, -2.4, 1.77, 4.2, -5.1] {
            let trace = trace_level_set(&mesh, c).unwrap();
            assert_eq!(trace.components, 1, "level {c}");
            // a chord of the ball: length close to 2 sqrt(36 - c^2)
            let len: f64 = trace.polylines[0]
                .windows(2)
                .map(|w| (w[1] - w[0]).norm())
                .sum();
            let expect = 2.0 * (36.0f64 - c * c).sqrt();
            assert!(
                (len - expect).abs() < 0.4,
                "level {c}: traced length {len}, chord {expect}"
            );
        }
    }

    #[test]
    fn two_bump_fixture_gives_two_components() {
        // two gaussian bumps over a rectangle: a level through the bumps
        // cuts two separate loops
        let n = 61;
        let mut vertices = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let x = -3.0 + 6.0 * i as f64 / (n - 1) as f64;
                let y = -3.0 + 6.0 * j as f64 / (n - 1) as f64;
                let z = (-((x - 1.5) * (x - 1.5) + y * y) * 2.0).exp()
                    + (-((x + 1.5) * (x + 1.5) + y * y) * 2.0).exp();
                vertices.push(Vector3::new(x, y, z));
            }
        }
        let mut triangles = Vec::new();
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                let v = |a: usize, b: usize| a * n + b;
                triangles.push([v(i, j), v(i + 1, j), v(i + 1, j + 1)]);
                triangles.push([v(i, j), v(i + 1, j + 1), v(i, j + 1)]);
            }
        }
        let mesh = MeshPatch::new(vertices, triangles).unwrap();
        let trace = trace_level_set(&mesh, 0.5).unwrap();
        assert_eq!(trace.components, 2);
        assert!(trace.closed.iter().all(|&c| c));
    }

    #[test]
    fn level_outside_range_is_rejected() {
        let model = HelicoidModel::axis_aligned(1.0);
        let mesh = helicoid_ball_mesh(&model, 2.0, 41).unwrap();
        assert!(trace_level_set(&mesh, 5.0).is_err());
    }
}
