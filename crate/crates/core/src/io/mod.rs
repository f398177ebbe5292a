//! File formats: the `hf-1` container (JSON metadata with embedded CSV
//! blocks) for graphs and meshes, JSON reports, and CSV profiles.
//!
//! All lengths in a file share one unit.  Serialization is deterministic:
//! struct field order is fixed and floats print as shortest round-trip
//! decimals, so identical inputs produce byte-identical files.

pub mod schema;

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::mesh::MeshPatch;
use crate::geometry::multigraph::MultiGraph;
use crate::geometry::polar::{PolarGrid, PolarRect, RadialSpacing};
use crate::surfaces::analytic::GraphFormula;

pub const SCHEMA_VERSION: &str = "hf-1";

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Container {
    schema: String,
    kind: String,
    meta: serde_json::Value,
    blocks: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GraphMeta {
    r1: f64,
    r2: f64,
    theta1: f64,
    theta2: f64,
    n_rho: usize,
    n_theta: usize,
    radial: RadialSpacing,
    /// The rectangle was unbounded and truncated at `r2`.
    truncated: bool,
    center: [f64; 3],
    winding: u32,
    analytic: Option<GraphFormula>,
    unit: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MeshMeta {
    n_vertices: usize,
    n_triangles: usize,
    has_curvature: bool,
    unit: String,
}

/// Either payload of an `hf-1` container.
#[derive(Debug, Clone)]
pub enum Surface {
    Graph(MultiGraph),
    Mesh(MeshPatch),
}

pub fn fmt_f64(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v}")
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    match s {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s
            .parse::<f64>()
            .map_err(|_| Error::Format(format!("bad float {s:?}"))),
    }
}

pub fn multigraph_to_string(g: &MultiGraph) -> Result<String> {
    let meta = GraphMeta {
        r1: g.grid.rect.r1,
        r2: g.grid.rect.r2,
        theta1: g.grid.rect.theta1,
        theta2: g.grid.rect.theta2,
        n_rho: g.grid.n_rho,
        n_theta: g.grid.n_theta,
        radial: g.grid.radial,
        truncated: g.grid.truncated_from.is_some(),
        center: [g.center.x, g.center.y, g.center.z],
        winding: g.winding,
        analytic: g.analytic,
        unit: "length".to_string(),
    };
    let mut block = String::from("rho,theta,u\n");
    for i in 0..g.grid.n_rho {
        for j in 0..g.grid.n_theta {
            block.push_str(&fmt_f64(g.grid.rho(i)));
            block.push(',');
            block.push_str(&fmt_f64(g.grid.theta(j)));
            block.push(',');
            block.push_str(&fmt_f64(g.at(i, j)));
            block.push('\n');
        }
    }
    let mut blocks = BTreeMap::new();
    blocks.insert("values".to_string(), block);
    let c = Container {
        schema: SCHEMA_VERSION.to_string(),
        kind: "multigraph".to_string(),
        meta: serde_json::to_value(meta)?,
        blocks,
    };
    Ok(serde_json::to_string_pretty(&c)? + "\n")
}

pub fn mesh_to_string(m: &MeshPatch) -> Result<String> {
    let meta = MeshMeta {
        n_vertices: m.n_vertices(),
        n_triangles: m.triangles.len(),
        has_curvature: m.a2.is_some(),
        unit: "length".to_string(),
    };
    let mut vblock = String::from(if m.a2.is_some() {
        "x,y,z,nx,ny,nz,a2\n"
    } else {
        "x,y,z,nx,ny,nz\n"
    });
    for (k, v) in m.vertices.iter().enumerate() {
        let n = m.normals[k];
        let mut row = format!(
            "{},{},{},{},{},{}",
            fmt_f64(v.x),
            fmt_f64(v.y),
            fmt_f64(v.z),
            fmt_f64(n.x),
            fmt_f64(n.y),
            fmt_f64(n.z)
        );
        if let Some(a2) = &m.a2 {
            row.push(',');
            row.push_str(&fmt_f64(a2[k]));
        }
        row.push('\n');
        vblock.push_str(&row);
    }
    let mut tblock = String::from("i0,i1,i2\n");
    for t in &m.triangles {
        tblock.push_str(&format!("{},{},{}\n", t[0], t[1], t[2]));
    }
    let mut blocks = BTreeMap::new();
    blocks.insert("vertices".to_string(), vblock);
    blocks.insert("triangles".to_string(), tblock);
    let c = Container {
        schema: SCHEMA_VERSION.to_string(),
        kind: "meshpatch".to_string(),
        meta: serde_json::to_value(meta)?,
        blocks,
    };
    Ok(serde_json::to_string_pretty(&c)? + "\n")
}

pub fn save_multigraph(path: impl AsRef<Path>, g: &MultiGraph) -> Result<()> {
    std::fs::write(path, multigraph_to_string(g)?)?;
    Ok(())
}

pub fn save_mesh(path: impl AsRef<Path>, m: &MeshPatch) -> Result<()> {
    std::fs::write(path, mesh_to_string(m)?)?;
    Ok(())
}

pub fn load_surface(path: impl AsRef<Path>) -> Result<Surface> {
    let text = std::fs::read_to_string(&path)?;
    let c: Container = serde_json::from_str(&text)?;
    if c.schema != SCHEMA_VERSION {
        return Err(Error::Format(format!(
            "unsupported schema {:?} (expected {SCHEMA_VERSION:?})",
            c.schema
        )));
    }
    match c.kind.as_str() {
        "multigraph" => Ok(Surface::Graph(parse_graph(&c)?)),
        "meshpatch" => Ok(Surface::Mesh(parse_mesh(&c)?)),
        other => Err(Error::Format(format!("unknown container kind {other:?}"))),
    }
}

pub fn load_multigraph(path: impl AsRef<Path>) -> Result<MultiGraph> {
    match load_surface(path)? {
        Surface::Graph(g) => Ok(g),
        Surface::Mesh(_) => Err(Error::Format("expected a multigraph container".into())),
    }
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<MeshPatch> {
    match load_surface(path)? {
        Surface::Mesh(m) => Ok(m),
        Surface::Graph(_) => Err(Error::Format("expected a meshpatch container".into())),
    }
}

fn block<'a>(c: &'a Container, name: &str) -> Result<&'a str> {
    c.blocks
        .get(name)
        .map(|s| s.as_str())
        .ok_or_else(|| Error::Format(format!("missing block {name:?}")))
}

fn parse_graph(c: &Container) -> Result<MultiGraph> {
    let meta: GraphMeta = serde_json::from_value(c.meta.clone())?;
    let rows = parse_csv_block(block(c, "values")?, 3)?;
    if rows.len() != meta.n_rho * meta.n_theta {
        return Err(Error::Format(format!(
            "values block has {} rows, expected {}",
            rows.len(),
            meta.n_rho * meta.n_theta
        )));
    }
    // node coordinates come from the block verbatim (bit-exact round trip)
    let mut rho = Vec::with_capacity(meta.n_rho);
    for i in 0..meta.n_rho {
        rho.push(rows[i * meta.n_theta][0]);
    }
    let mut theta = Vec::with_capacity(meta.n_theta);
    for j in 0..meta.n_theta {
        theta.push(rows[j][1]);
    }
    let rect = PolarRect::new(meta.r1, meta.r2, meta.theta1, meta.theta2)?;
    let truncated_from = meta.truncated.then_some(f64::INFINITY);
    let grid = PolarGrid::raw(rect, meta.radial, truncated_from, rho, theta);
    let values = rows.iter().map(|r| r[2]).collect();
    let mut g = MultiGraph::from_values(
        grid,
        values,
        Vector3::new(meta.center[0], meta.center[1], meta.center[2]),
    )?;
    g.analytic = meta.analytic;
    Ok(g)
}

fn parse_mesh(c: &Container) -> Result<MeshPatch> {
    let meta: MeshMeta = serde_json::from_value(c.meta.clone())?;
    let cols = if meta.has_curvature { 7 } else { 6 };
    let vrows = parse_csv_block(block(c, "vertices")?, cols)?;
    if vrows.len() != meta.n_vertices {
        return Err(Error::Format("vertex count mismatch".into()));
    }
    let mut vertices = Vec::with_capacity(vrows.len());
    let mut normals = Vec::with_capacity(vrows.len());
    let mut a2 = meta.has_curvature.then(Vec::new);
    for r in &vrows {
        vertices.push(Vector3::new(r[0], r[1], r[2]));
        normals.push(Vector3::new(r[3], r[4], r[5]));
        if let Some(a) = a2.as_mut() {
            a.push(r[6]);
        }
    }
    let trows = parse_csv_block(block(c, "triangles")?, 3)?;
    let mut triangles = Vec::with_capacity(trows.len());
    for r in &trows {
        triangles.push([r[0] as usize, r[1] as usize, r[2] as usize]);
    }
    let mut m = MeshPatch::with_normals(vertices, triangles, normals)?;
    m.a2 = a2;
    Ok(m)
}

fn parse_csv_block(text: &str, cols: usize) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if k == 0 || line.is_empty() {
            continue; // header
        }
        let row: Vec<f64> = line
            .split(',')
            .map(parse_f64)
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != cols {
            return Err(Error::Format(format!(
                "row {k} has {} columns, expected {cols}",
                row.len()
            )));
        }
        out.push(row);
    }
    Ok(out)
}

/// Pretty JSON with a trailing newline; the writer used for every report.
pub fn report_to_string<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn save_report<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    std::fs::write(path, report_to_string(value)?)?;
    Ok(())
}

/// CSV profile writer (header plus shortest-round-trip float rows).
pub fn csv_to_string(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| fmt_f64(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn save_csv(path: impl AsRef<Path>, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    std::fs::write(path, csv_to_string(header, rows))?;
    Ok(())
}
