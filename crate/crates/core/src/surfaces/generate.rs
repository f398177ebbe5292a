//! Oracle surface generators: plane, helicoid, catenoid.
//!
//! Each generator returns a graph representation where one exists and always
//! a mesh; analytic normals, curvature, and tangent frames are attached so
//! downstream modules can bypass finite differences.

use nalgebra::{Matrix2, Rotation3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::curvature::graph_embed;
use crate::geometry::mesh::{MeshPatch, VertexFrame};
use crate::geometry::multigraph::MultiGraph;
use crate::geometry::polar::{PolarGrid, PolarRect, RadialSpacing};
use crate::surfaces::analytic::GraphFormula;

/// A rigid frame: the surface is generated in local coordinates and mapped by
/// `x -> rotation * x + translation`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub rotation: Rotation3<f64>,
    pub translation: Vector3<f64>,
}

impl Default for Frame {
    fn default() -> Self {
        Frame {
            rotation: Rotation3::identity(),
            translation: Vector3::zeros(),
        }
    }
}

impl Frame {
    pub fn is_identity(&self) -> bool {
        self.rotation == Rotation3::identity() && self.translation == Vector3::zeros()
    }
}

/// A helicoid `(s cos t, s sin t, pitch * t)` carried by a rigid frame.
/// Handedness is the sign of `pitch`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HelicoidModel {
    pub pitch: f64,
    pub frame: Frame,
}

impl HelicoidModel {
    pub fn new(pitch: f64, frame: Frame) -> Result<Self> {
        if pitch == 0.0 || !pitch.is_finite() {
            return Err(Error::invalid(format!("helicoid pitch must be nonzero, got {pitch}")));
        }
        let r = frame.rotation.matrix();
        let defect = (r.transpose() * r - nalgebra::Matrix3::identity()).norm();
        if defect > 1e-12 {
            return Err(Error::invalid(format!(
                "frame rotation is not orthonormal (defect {defect:.3e})"
            )));
        }
        Ok(HelicoidModel { pitch, frame })
    }

    pub fn axis_aligned(pitch: f64) -> Self {
        HelicoidModel {
            pitch,
            frame: Frame::default(),
        }
    }

    /// Surface point in world coordinates at ruling parameter `s`, turn `t`.
    pub fn point(&self, s: f64, t: f64) -> Vector3<f64> {
        let local = Vector3::new(s * t.cos(), s * t.sin(), self.pitch * t);
        self.frame.rotation * local + self.frame.translation
    }

    /// Unit normal in world coordinates.
    pub fn normal(&self, s: f64, t: f64) -> Vector3<f64> {
        let a = self.pitch;
        let local = Vector3::new(a * t.sin(), -a * t.cos(), s) / (a * a + s * s).sqrt();
        self.frame.rotation * local
    }

    pub fn a2(&self, s: f64) -> f64 {
        let a = self.pitch;
        2.0 * a * a / (a * a + s * s).powi(2)
    }
}

/// Generated surface: graph where representable, mesh always.
#[derive(Debug, Clone)]
pub struct SurfaceBundle {
    pub graph: Option<MultiGraph>,
    pub mesh: MeshPatch,
    pub warning: Option<String>,
}

/// Kind selector for [`make_surface`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceSpec {
    Plane { gx: f64, gy: f64, offset: f64 },
    Helicoid { pitch: f64 },
    Catenoid { neck: f64, upper: bool },
}

/// Grid resolution for generated graphs.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Resolution {
    pub n_rho: usize,
    pub n_theta: usize,
    pub radial: RadialSpacing,
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution {
            n_rho: 65,
            n_theta: 129,
            radial: RadialSpacing::Geometric,
        }
    }
}

/// Build an oracle surface over a polar region.
///
/// `r_max` truncates unbounded regions (recorded on the grid).  The catenoid
/// is a graph only over `rho > neck`; a region reaching the neck yields a
/// mesh-only bundle with a warning.
pub fn make_surface(
    spec: SurfaceSpec,
    region: PolarRect,
    r_max: Option<f64>,
    res: Resolution,
) -> Result<SurfaceBundle> {
    let grid = match r_max {
        Some(rm) => PolarGrid::truncated(region, rm, res.n_rho, res.n_theta, res.radial)?,
        None => PolarGrid::new(region, res.n_rho, res.n_theta, res.radial)?,
    };
    let formula = match spec {
        SurfaceSpec::Plane { gx, gy, offset } => GraphFormula::Plane { gx, gy, offset },
        SurfaceSpec::Helicoid { pitch } => {
            if pitch == 0.0 {
                return Err(Error::invalid("helicoid pitch must be nonzero"));
            }
            GraphFormula::Helicoid { pitch }
        }
        SurfaceSpec::Catenoid { neck, upper } => {
            if !(neck > 0.0) {
                return Err(Error::invalid("catenoid neck radius must be positive"));
            }
            if grid.rect.r1 <= neck {
                // not a graph down to the neck: emit the parametric band only
                let v_hi = neck * (grid.rect.r2 / neck).acosh();
                let mesh = catenoid_mesh(neck, (-v_hi, v_hi), res.n_theta.max(32), res.n_rho.max(16))?;
                return Ok(SurfaceBundle {
                    graph: None,
                    mesh,
                    warning: Some(format!(
                        "region reaches rho = {} <= neck {neck}; catenoid is not a graph there, returning the parametric band",
                        grid.rect.r1
                    )),
                });
            }
            GraphFormula::Catenoid { neck, upper }
        }
    };
    let graph = MultiGraph::from_formula(grid, Vector3::zeros(), formula)?;
    let mesh = graph_embed(&graph)?;
    Ok(SurfaceBundle {
        graph: Some(graph),
        mesh,
        warning: None,
    })
}

/// Parametric helicoid mesh over `(s, t)` in `s_range x t_range`, including
/// the axis when the `s`-range spans zero.  Normals, curvature, and frames
/// are exact.
pub fn helicoid_mesh(
    model: &HelicoidModel,
    s_range: (f64, f64),
    t_range: (f64, f64),
    n_s: usize,
    n_t: usize,
) -> Result<MeshPatch> {
    if n_s < 2 || n_t < 2 {
        return Err(Error::invalid("helicoid mesh needs at least 2 nodes per axis"));
    }
    let a = model.pitch;
    let mut vertices = Vec::with_capacity(n_s * n_t);
    let mut normals = Vec::with_capacity(n_s * n_t);
    let mut a2 = Vec::with_capacity(n_s * n_t);
    let mut frames = Vec::with_capacity(n_s * n_t);
    let rot = model.frame.rotation;
    for i in 0..n_s {
        let s = s_range.0 + (s_range.1 - s_range.0) * i as f64 / (n_s - 1) as f64;
        for j in 0..n_t {
            let t = t_range.0 + (t_range.1 - t_range.0) * j as f64 / (n_t - 1) as f64;
            vertices.push(model.point(s, t));
            normals.push(model.normal(s, t));
            a2.push(model.a2(s));
            let denom = (a * a + s * s).sqrt();
            let e1 = rot * Vector3::new(t.cos(), t.sin(), 0.0);
            let e2 = rot * (Vector3::new(-s * t.sin(), s * t.cos(), a) / denom);
            let m = a / (a * a + s * s);
            frames.push(VertexFrame {
                e1,
                e2,
                dn: Matrix2::new(0.0, m, m, 0.0),
            });
        }
    }
    let mut triangles = Vec::with_capacity(2 * (n_s - 1) * (n_t - 1));
    for i in 0..n_s - 1 {
        for j in 0..n_t - 1 {
            let v00 = i * n_t + j;
            let v10 = (i + 1) * n_t + j;
            let v11 = (i + 1) * n_t + j + 1;
            let v01 = i * n_t + j + 1;
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    let mut mesh = MeshPatch::with_normals(vertices, triangles, normals)?;
    mesh.a2 = Some(a2);
    mesh.frames = Some(frames);
    Ok(mesh)
}

/// Helicoid mesh clipped to the ball of `radius` about the frame origin.
pub fn helicoid_ball_mesh(model: &HelicoidModel, radius: f64, n: usize) -> Result<MeshPatch> {
    let t_span = radius / model.pitch.abs();
    let full = helicoid_mesh(
        model,
        (-radius * 1.02, radius * 1.02),
        (-t_span * 1.02, t_span * 1.02),
        n,
        n,
    )?;
    full.clipped_to_ball(model.frame.translation, radius)
}

/// Parametric catenoid band `rho = neck * cosh(v / neck)`, welded around the
/// full circle; boundary is the two rim circles.
pub fn catenoid_mesh(neck: f64, v_range: (f64, f64), n_t: usize, n_v: usize) -> Result<MeshPatch> {
    if !(neck > 0.0) {
        return Err(Error::invalid("catenoid neck radius must be positive"));
    }
    if n_t < 8 || n_v < 2 {
        return Err(Error::invalid("catenoid mesh needs n_t >= 8, n_v >= 2"));
    }
    let c = neck;
    let mut vertices = Vec::with_capacity(n_t * n_v);
    let mut normals = Vec::with_capacity(n_t * n_v);
    let mut a2 = Vec::with_capacity(n_t * n_v);
    let mut frames = Vec::with_capacity(n_t * n_v);
    for i in 0..n_v {
        let v = v_range.0 + (v_range.1 - v_range.0) * i as f64 / (n_v - 1) as f64;
        let ch = (v / c).cosh();
        let sh = (v / c).sinh();
        for j in 0..n_t {
            let t = 2.0 * std::f64::consts::PI * j as f64 / n_t as f64;
            let (st, ct) = t.sin_cos();
            vertices.push(Vector3::new(c * ch * ct, c * ch * st, v));
            normals.push(Vector3::new(ct, st, -sh) / ch);
            a2.push(2.0 / (c * c * ch.powi(4)));
            let k = 1.0 / (c * ch * ch);
            frames.push(VertexFrame {
                e1: Vector3::new(-st, ct, 0.0),
                e2: Vector3::new(sh * ct, sh * st, 1.0) / ch,
                dn: Matrix2::new(k, 0.0, 0.0, -k),
            });
        }
    }
    let mut triangles = Vec::with_capacity(2 * (n_v - 1) * n_t);
    for i in 0..n_v - 1 {
        for j in 0..n_t {
            let jn = (j + 1) % n_t;
            let v00 = i * n_t + j;
            let v10 = (i + 1) * n_t + j;
            let v11 = (i + 1) * n_t + jn;
            let v01 = i * n_t + jn;
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    let mut mesh = MeshPatch::with_normals(vertices, triangles, normals)?;
    mesh.a2 = Some(a2);
    mesh.frames = Some(frames);
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::curvature::mesh_a2;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn helicoid_bundle_is_the_pitch_graph() {
        let region = PolarRect::new(1.0, 4.0, -4.0 * PI, 4.0 * PI).unwrap();
        let b = make_surface(
            SurfaceSpec::Helicoid { pitch: 1.0 },
            region,
            None,
            Resolution { n_rho: 9, n_theta: 129, radial: RadialSpacing::Geometric },
        )
        .unwrap();
        let g = b.graph.unwrap();
        assert_eq!(g.winding, 4);
        for i in 0..g.grid.n_rho {
            for j in 0..g.grid.n_theta {
                assert_relative_eq!(g.at(i, j), g.grid.theta(j), epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn plane_bundle_is_flat() {
        let region = PolarRect::new(1.0, 2.0, 0.0, 2.0 * PI).unwrap();
        let b = make_surface(
            SurfaceSpec::Plane { gx: 0.0, gy: 0.0, offset: 0.0 },
            region,
            None,
            Resolution { n_rho: 8, n_theta: 33, radial: RadialSpacing::Uniform },
        )
        .unwrap();
        let mesh = b.mesh;
        assert!(mesh.a2.unwrap().iter().all(|&a| a.abs() < 1e-14));
        assert!(mesh.vertices.iter().all(|v| v.z == 0.0));
    }

    #[test]
    fn catenoid_graph_only_above_the_neck() {
        let ok_region = PolarRect::new(1.5, 4.0, 0.0, 2.0 * PI).unwrap();
        let b = make_surface(
            SurfaceSpec::Catenoid { neck: 1.0, upper: true },
            ok_region,
            None,
            Resolution { n_rho: 17, n_theta: 33, radial: RadialSpacing::Geometric },
        )
        .unwrap();
        assert!(b.graph.is_some() && b.warning.is_none());

        let bad_region = PolarRect::new(0.5, 4.0, 0.0, 2.0 * PI).unwrap();
        let b = make_surface(
            SurfaceSpec::Catenoid { neck: 1.0, upper: true },
            bad_region,
            None,
            Resolution { n_rho: 17, n_theta: 33, radial: RadialSpacing::Geometric },
        )
        .unwrap();
        assert!(b.graph.is_none() && b.warning.is_some());
    }

    #[test]
    fn helicoid_mesh_axis_curvature_is_two_over_pitch_sq() {
        let model = HelicoidModel::axis_aligned(1.0);
        let mesh = helicoid_mesh(&model, (-2.0, 2.0), (-2.0, 2.0), 81, 81).unwrap();
        // fitted |A|^2 against the closed form at on-axis vertices
        let fitted = mesh_a2(&mesh).unwrap();
        let boundary = mesh.boundary_vertices();
        for (k, v) in mesh.vertices.iter().enumerate() {
            if boundary[k] {
                continue;
            }
            if v.x.hypot(v.y) < 1e-9 {
                assert_relative_eq!(fitted.data[k], 2.0, max_relative = 2e-2);
                assert_relative_eq!(mesh.a2.as_ref().unwrap()[k], 2.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn catenoid_mesh_curvature_matches_band_formula() {
        let mesh = catenoid_mesh(1.0, (-1.0, 1.0), 64, 17).unwrap();
        let fitted = mesh_a2(&mesh).unwrap();
        let exact = mesh.a2.as_ref().unwrap();
        let boundary = mesh.boundary_vertices();
        for k in 0..mesh.n_vertices() {
            if boundary[k] {
                continue;
            }
            assert_relative_eq!(fitted.data[k], exact[k], max_relative = 2e-2);
        }
    }

    #[test]
    fn ball_mesh_stays_in_the_ball() {
        let model = HelicoidModel::axis_aligned(1.0);
        let mesh = helicoid_ball_mesh(&model, 6.0, 121).unwrap();
        assert!(mesh.vertices.iter().all(|v| v.norm() <= 6.0 + 1e-12));
        assert!(mesh.validate().is_ok());
    }
}
