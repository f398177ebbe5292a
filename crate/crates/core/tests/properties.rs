//! Property tests for the structural invariants: gauge invariances of the
//! geometry operations, the generated-surface residual guarantee, sheet
//! interleaving, and distortion-window behavior.

use nalgebra::{Rotation3, Vector3};
use proptest::prelude::*;

use helisheet::fit::{from_offsets, phi_distortion};
use helisheet::gauss::trace_level_set;
use helisheet::geometry::cone::Cone;
use helisheet::geometry::curvature::{graph_embed, mesh_a2};
use helisheet::geometry::multigraph::MultiGraph;
use helisheet::geometry::polar::{PolarGrid, PolarRect, RadialSpacing};
use helisheet::solver::mse_residual;
use helisheet::surfaces::analytic::GraphFormula;
use helisheet::surfaces::generate::{helicoid_ball_mesh, helicoid_mesh, make_surface, HelicoidModel, Resolution, SurfaceSpec};
use helisheet::surfaces::weierstrass::WeierstrassAlpha;

fn sheet_grid() -> PolarGrid {
    let rect = PolarRect::sheet(1.0, 4.0, 2).unwrap();
    PolarGrid::new(rect, 9, 65, RadialSpacing::Geometric).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Adding any 2*pi-periodic angular ripple leaves the separation alone.
    #[test]
    fn separation_ignores_periodic_perturbations(
        amp in -0.5f64..0.5,
        freq in 1u32..5,
        phase in 0.0f64..std::f64::consts::TAU,
        pitch in 0.25f64..2.0,
    ) {
        let grid = sheet_grid();
        let plain = MultiGraph::from_fn(grid.clone(), Vector3::zeros(), |_, t| pitch * t).unwrap();
        let rippled = MultiGraph::from_fn(grid, Vector3::zeros(), |_, t| {
            pitch * t + amp * (f64::from(freq) * t + phase).sin()
        })
        .unwrap();
        let a = plain.separation().unwrap().unwrap();
        let b = rippled.separation().unwrap().unwrap();
        for (x, y) in a.w.data.iter().zip(&b.w.data) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    /// Vertical translation shifts the embedded mesh exactly.
    #[test]
    fn embedding_commutes_with_vertical_translation(c in -10.0f64..10.0) {
        let grid = sheet_grid();
        let base = MultiGraph::from_fn(grid.clone(), Vector3::zeros(), |r, t| t + 0.1 * r).unwrap();
        let lifted = MultiGraph::from_fn(grid, Vector3::zeros(), |r, t| t + 0.1 * r + c).unwrap();
        let ma = graph_embed(&base).unwrap();
        let mb = graph_embed(&lifted).unwrap();
        for (va, vb) in ma.vertices.iter().zip(&mb.vertices) {
            prop_assert_eq!(va + Vector3::new(0.0, 0.0, c), *vb);
        }
    }

    /// Homothety of the axis curve: alpha -> lambda alpha, t -> t / lambda
    /// rescales points by 1 / lambda.
    #[test]
    fn weierstrass_homothety(
        a1 in -2.0f64..2.0,
        a2 in 0.1f64..2.0,
        lambda in 0.2f64..5.0,
        t in -3.0f64..3.0,
    ) {
        let alpha = WeierstrassAlpha::new(a1, a2).unwrap();
        let scaled = WeierstrassAlpha::new(lambda * a1, lambda * a2).unwrap();
        let (x1, x2) = alpha.point(t);
        let (y1, y2) = scaled.point(t / lambda);
        prop_assert!((y1 - x1 / lambda).abs() < 1e-12 * (1.0 + x1.abs()));
        prop_assert!((y2 - x2 / lambda).abs() < 1e-12 * (1.0 + x2.abs()));
    }

    /// Cone membership is invariant under dilation about the vertex.
    #[test]
    fn cone_membership_is_scale_invariant(
        delta in 0.1f64..3.0,
        px in -5.0f64..5.0,
        py in -5.0f64..5.0,
        pz in -5.0f64..5.0,
        lambda in 0.1f64..10.0,
    ) {
        let vertex = Vector3::new(1.0, -2.0, 0.5);
        let cone = Cone::new(vertex, delta).unwrap();
        let p = Vector3::new(px, py, pz);
        let q = vertex + lambda * (p - vertex);
        prop_assert_eq!(cone.contains(p), cone.contains(q));
    }

    /// Mesh curvature estimates are invariant under rigid motion.
    #[test]
    fn quadric_curvature_rigid_invariance(
        roll in -3.0f64..3.0,
        yaw in -3.0f64..3.0,
        tx in -5.0f64..5.0,
    ) {
        let model = HelicoidModel::axis_aligned(1.0);
        let mesh = helicoid_mesh(&model, (0.5, 2.0), (-1.0, 1.0), 17, 17).unwrap();
        let rot = Rotation3::from_euler_angles(roll, 0.4, yaw);
        let moved = mesh.rigid_transform(&rot, Vector3::new(tx, 1.0, -2.0));
        let a = mesh_a2(&mesh).unwrap();
        let b = mesh_a2(&moved).unwrap();
        for (x, y) in a.data.iter().zip(&b.data) {
            prop_assert!((x - y).abs() < 1e-8 * (1.0 + x.abs()), "{} vs {}", x, y);
        }
    }

    /// The distortion interval is invariant under moving base and offsets by
    /// the same rigid motion.
    #[test]
    fn distortion_interval_rigid_invariance(
        roll in -3.0f64..3.0,
        pitch_angle in -1.2f64..1.2,
        tz in -4.0f64..4.0,
    ) {
        let model = HelicoidModel::axis_aligned(1.0);
        let base = helicoid_mesh(&model, (0.5, 2.0), (-1.0, 1.0), 17, 17).unwrap();
        let nu: Vec<f64> = base.vertices.iter().map(|v| 0.01 * (v.x + 0.5 * v.z).sin()).collect();
        let rep_a = phi_distortion(&from_offsets(base.clone(), nu.clone()).unwrap()).unwrap();
        let rot = Rotation3::from_euler_angles(roll, pitch_angle, 0.3);
        let moved = base.rigid_transform(&rot, Vector3::new(1.0, 0.0, tz));
        let rep_b = phi_distortion(&from_offsets(moved, nu).unwrap()).unwrap();
        prop_assert!((rep_a.interval.0 - rep_b.interval.0).abs() < 1e-8);
        prop_assert!((rep_a.interval.1 - rep_b.interval.1).abs() < 1e-8);
    }
}

#[test]
fn generated_surfaces_satisfy_the_equation_analytically() {
    let two_pi = 2.0 * std::f64::consts::PI;
    let cases = vec![
        (SurfaceSpec::Plane { gx: 0.4, gy: -0.3, offset: 1.0 }, PolarRect::new(1.0, 4.0, 0.0, two_pi).unwrap()),
        (SurfaceSpec::Helicoid { pitch: 1.0 }, PolarRect::new(1.0, 4.0, -two_pi, two_pi).unwrap()),
        (SurfaceSpec::Helicoid { pitch: -2.5 }, PolarRect::new(0.5, 8.0, 0.0, two_pi).unwrap()),
        (SurfaceSpec::Catenoid { neck: 1.0, upper: true }, PolarRect::new(1.5, 4.0, 0.0, two_pi).unwrap()),
        (SurfaceSpec::Catenoid { neck: 0.5, upper: false }, PolarRect::new(1.0, 6.0, 0.0, two_pi).unwrap()),
    ];
    for (spec, region) in cases {
        let b = make_surface(spec, region, None, Resolution::default()).unwrap();
        let g = b.graph.expect("graph representation");
        let r = mse_residual(&g).unwrap();
        assert!(r.sup_abs() <= 1e-10, "{spec:?}: residual {}", r.sup_abs());
    }
}

#[test]
fn helicoid_sheets_interleave() {
    // the offset sheet of the helicoid threads strictly between consecutive
    // turns of the first: u1(s, 0) < u2(s, 0) < u1(s, 2 pi)
    let grid = sheet_grid();
    let u1 = MultiGraph::from_formula(grid.clone(), Vector3::zeros(), GraphFormula::Helicoid { pitch: 1.0 })
        .unwrap();
    let u2 = MultiGraph::from_formula(
        grid,
        Vector3::new(0.0, 0.0, std::f64::consts::PI),
        GraphFormula::Helicoid { pitch: 1.0 },
    )
    .unwrap();
    let j0 = u1.grid.thetas().iter().position(|&t| t.abs() < 1e-12).unwrap();
    let j2pi = u1
        .grid
        .thetas()
        .iter()
        .position(|&t| (t - 2.0 * std::f64::consts::PI).abs() < 1e-9)
        .unwrap();
    for i in 0..u1.grid.n_rho {
        let a = u1.vertex(i, j0).z;
        let mid = u2.vertex(i, j0).z;
        let b = u1.vertex(i, j2pi).z;
        assert!(a < mid && mid < b, "heights {a}, {mid}, {b} fail to interleave");
    }
}

#[test]
fn distortion_window_tracks_the_offset_size() {
    // whenever sup(|nu| + |grad nu|) <= eps <= 0.05 on a unit-curvature base,
    // the measured interval sits inside [1 - 2 eps, 1 + 2 eps]
    let model = HelicoidModel::axis_aligned(1.0);
    let base = helicoid_mesh(&model, (-2.0, 2.0), (-2.0, 2.0), 33, 33).unwrap();
    for (k, eps) in [0.01, 0.02, 0.05].iter().enumerate() {
        let raw: Vec<f64> = base
            .vertices
            .iter()
            .map(|v| ((1.3 + k as f64 * 0.2) * v.x + 0.8 * v.y + 0.5 * v.z).sin())
            .collect();
        let probe = from_offsets(base.clone(), raw.clone()).unwrap();
        let rep0 = phi_distortion(&probe).unwrap();
        let lambda = rep0.rescale_factor;
        let sup = probe
            .nu
            .iter()
            .zip(&probe.grad_nu)
            .fold(0.0f64, |m, (n, g)| m.max(lambda * n.abs() + g.norm()));
        let nu: Vec<f64> = raw.iter().map(|v| v * 0.95 * eps / sup).collect();
        let rep = phi_distortion(&from_offsets(base.clone(), nu).unwrap()).unwrap();
        assert!(rep.sup_norm_rescaled <= *eps);
        assert!(
            rep.interval.0 >= 1.0 - 2.0 * eps && rep.interval.1 <= 1.0 + 2.0 * eps,
            "eps {eps}: interval {:?}",
            rep.interval
        );
    }
}

#[test]
fn level_chains_are_radially_monotone_on_the_sheets() {
    // away from the axis region the helicoid's level curves are straight
    // rays: the radius is strictly monotone along each traced run
    let model = HelicoidModel::axis_aligned(1.0);
    let mesh = helicoid_ball_mesh(&model, 6.0, 161).unwrap();
    for &c in &[0.4, -1.3, 2.6] {
        let trace = trace_level_set(&mesh, c).unwrap();
        let mut found_run = false;
        for poly in &trace.polylines {
            let mut run: Vec<f64> = Vec::new();
            let mut runs: Vec<Vec<f64>> = Vec::new();
            for p in poly {
                let rho = p.x.hypot(p.y);
                if rho >= 2.0 {
                    run.push(rho);
                } else if !run.is_empty() {
                    runs.push(std::mem::take(&mut run));
                }
            }
            if !run.is_empty() {
                runs.push(run);
            }
            for run in runs {
                if run.len() < 4 {
                    continue;
                }
                found_run = true;
                let increasing = run[1] > run[0];
                for w in run.windows(2) {
                    assert!(
                        (w[1] > w[0]) == increasing,
                        "radius not monotone along a sheet-region level chain"
                    );
                }
            }
        }
        assert!(found_run, "no sheet-region runs found at level {c}");
    }
}
