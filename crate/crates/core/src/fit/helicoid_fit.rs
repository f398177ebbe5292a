//! Best-fit helicoid through a mesh patch: point-to-surface projection,
//! Gauss-Newton refinement over rigid motion and pitch, deterministic
//! restarts.  The optimizer is local; the returned model is a heuristic best
//! iterate, not a certified global optimum.

use nalgebra::{Matrix3, Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::curvature::quadric_fit_curvature;
use crate::geometry::mesh::MeshPatch;
use crate::surfaces::generate::{Frame, HelicoidModel};

/// Foot point of a world point on a helicoid.
#[derive(Debug, Clone, Copy)]
pub struct Projection {
    pub s: f64,
    pub t: f64,
    pub foot: Vector3<f64>,
    pub normal: Vector3<f64>,
    /// Signed offset along the normal at the foot.
    pub nu: f64,
    pub distance: f64,
}

/// Closest point on the model by a guarded 1-d search in the turn parameter.
pub fn project_point(model: &HelicoidModel, p: Vector3<f64>) -> Projection {
    let a = model.pitch;
    let q = model.frame.rotation.inverse() * (p - model.frame.translation);
    let r = q.x.hypot(q.y);
    let phi = q.y.atan2(q.x);
    // the optimum satisfies |q3 - a t| <= r, so scan that window
    let t_center = q.z / a;
    let half = r / a.abs() + 0.5;
    let steps = ((2.0 * half) / (std::f64::consts::PI / 16.0)).ceil() as usize + 2;
    let d2 = |t: f64| {
        let sin = (phi - t).sin();
        let dz = q.z - a * t;
        r * r * sin * sin + dz * dz
    };
    let mut best_t = t_center;
    let mut best = d2(t_center);
    for k in 0..=steps {
        let t = t_center - half + 2.0 * half * k as f64 / steps as f64;
        let v = d2(t);
        if v < best {
            best = v;
            best_t = t;
        }
    }
    // Newton polish of F'(t) = -r^2 sin(2 (phi - t)) - 2 a (q3 - a t)... with
    // sign: d/dt sin^2(phi - t) = -sin(2 (phi - t))
    let mut t = best_t;
    for _ in 0..60 {
        let f1 = -r * r * (2.0 * (phi - t)).sin() - 2.0 * a * (q.z - a * t);
        let f2 = 2.0 * r * r * (2.0 * (phi - t)).cos() + 2.0 * a * a;
        if f2.abs() < 1e-300 {
            break;
        }
        let step = f1 / f2;
        let clamped = step.clamp(-0.5, 0.5);
        t -= clamped;
        if clamped.abs() < 1e-15 {
            break;
        }
    }
    if d2(t) > best {
        t = best_t;
    }
    let s = r * (phi - t).cos();
    let foot_local = Vector3::new(s * t.cos(), s * t.sin(), a * t);
    let foot = model.frame.rotation * foot_local + model.frame.translation;
    let denom = (a * a + s * s).sqrt();
    let normal =
        model.frame.rotation * (Vector3::new(a * t.sin(), -a * t.cos(), s) / denom);
    let offset = p - foot;
    Projection {
        s,
        t,
        foot,
        normal,
        nu: offset.dot(&normal),
        distance: offset.norm(),
    }
}

/// Root-mean-square point distance from the model.
pub fn rms_distance(model: &HelicoidModel, points: &[Vector3<f64>]) -> f64 {
    // collect, then reduce sequentially: the sum must not depend on rayon's
    // scheduling
    let sq: Vec<f64> = points
        .par_iter()
        .map(|p| {
            let d = project_point(model, *p).distance;
            d * d
        })
        .collect();
    (sq.iter().sum::<f64>() / points.len() as f64).sqrt()
}

const RESTARTS: usize = 8;
const GN_ITERS: usize = 80;

/// Fit pitch and rigid frame to the patch vertices.
///
/// Initialization uses the curvature-weighted centroid as the axis anchor and
/// several axis-direction candidates (mean folded normal, weighted principal
/// directions, seeded random draws); each restart runs a damped Gauss-Newton
/// on point-to-plane residuals.
pub fn fit_helicoid(patch: &MeshPatch, seed: u64) -> Result<(HelicoidModel, f64)> {
    if patch.n_vertices() < 100 {
        return Err(Error::invalid(format!(
            "helicoid fit needs at least 100 vertices, got {}",
            patch.n_vertices()
        )));
    }
    let a2 = match &patch.a2 {
        Some(a) => a.clone(),
        None => quadric_fit_curvature(patch)?.0,
    };
    let max_a2 = a2.iter().fold(0.0f64, |m, v| m.max(*v));
    if !(max_a2 > 1e-6) {
        return Err(Error::invalid(
            "patch is flat (max |A|^2 <= 1e-6); no helicoid to fit",
        ));
    }
    let points = &patch.vertices;

    // curvature-weighted centroid anchors the axis
    let wsum: f64 = a2.iter().sum();
    let mut centroid = Vector3::zeros();
    for (p, w) in points.iter().zip(&a2) {
        centroid += *p * (*w / wsum);
    }
    // axis direction candidates
    let mut dirs: Vec<Vector3<f64>> = Vec::new();
    let mut folded = Vector3::zeros();
    for n in &patch.normals {
        folded += if n.z >= 0.0 { *n } else { -*n };
    }
    if folded.norm() > 1e-9 {
        dirs.push(folded.normalize());
    }
    // weighted covariance principal directions
    let mut cov = Matrix3::zeros();
    for (p, w) in points.iter().zip(&a2) {
        let d = p - centroid;
        cov += (d * d.transpose()) * (*w / wsum);
    }
    let eig = nalgebra::SymmetricEigen::new(cov);
    for k in 0..3 {
        let v = eig.eigenvectors.column(k).into_owned();
        if v.norm() > 0.5 {
            dirs.push(v.normalize());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while dirs.len() < RESTARTS {
        let v = Vector3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        if v.norm() > 1e-3 {
            dirs.push(v.normalize());
        }
    }
    dirs.truncate(RESTARTS);
    // pitch candidates: the on-axis curvature value, and for axis-free
    // sheets the median height change per unit angle
    let pitch_curv = (2.0 / max_a2).sqrt();
    let mut pitches = vec![pitch_curv, -pitch_curv];
    let mut turn_rates: Vec<f64> = patch
        .vertices
        .iter()
        .zip(&patch.normals)
        .filter_map(|(p, n)| crate::geometry::curvature::mesh_u_theta(p, n))
        .collect();
    if turn_rates.len() >= patch.n_vertices() / 2 {
        turn_rates.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let med = turn_rates[turn_rates.len() / 2];
        if med.abs() > 1e-9 {
            pitches.insert(0, med);
        }
    }

    let starts: Vec<HelicoidModel> = dirs
        .iter()
        .enumerate()
        .map(|(k, dir)| {
            let rot = Rotation3::rotation_between(&Vector3::z(), dir)
                .unwrap_or_else(Rotation3::identity);
            HelicoidModel {
                pitch: pitches[k % pitches.len()],
                frame: Frame {
                    rotation: rot,
                    translation: centroid,
                },
            }
        })
        .collect();

    let fits: Vec<(HelicoidModel, f64)> = starts
        .par_iter()
        .map(|m0| gauss_newton(m0.clone(), points))
        .collect();
    let best = fits
        .into_iter()
        .filter(|(_, r)| r.is_finite())
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    match best {
        Some((m, r)) => Ok((m, r)),
        None => Err(Error::OptimizerStagnation {
            best_residual: f64::INFINITY,
        }),
    }
}

/// Damped Gauss-Newton on point-to-plane residuals over 7 parameters:
/// a left rotation increment, the translation, and the pitch.
fn gauss_newton(mut model: HelicoidModel, points: &[Vector3<f64>]) -> (HelicoidModel, f64) {
    let mut lambda = 1e-6;
    let mut rms = rms_distance(&model, points);
    for _ in 0..GN_ITERS {
        // normal equations
        let mut jtj = nalgebra::SMatrix::<f64, 7, 7>::zeros();
        let mut jtr = nalgebra::SVector::<f64, 7>::zeros();
        let rows: Vec<([f64; 7], f64)> = points
            .par_iter()
            .map(|p| {
                let pr = project_point(&model, *p);
                let n = pr.normal;
                let arm = pr.foot - model.frame.translation;
                let dt_rot = arm.cross(&n); // d<p - H, n>/dw = -<e_k x arm, n> = -(arm x n)_k
                let dz_local = model.frame.rotation * Vector3::new(0.0, 0.0, pr.t);
                let row = [
                    -dt_rot.x,
                    -dt_rot.y,
                    -dt_rot.z,
                    -n.x,
                    -n.y,
                    -n.z,
                    -dz_local.dot(&n),
                ];
                (row, pr.nu)
            })
            .collect();
        for (row, r) in &rows {
            for i in 0..7 {
                jtr[i] += row[i] * r;
                for j in 0..7 {
                    jtj[(i, j)] += row[i] * row[j];
                }
            }
        }
        let mut improved = false;
        for _ in 0..8 {
            let mut damped = jtj;
            for i in 0..7 {
                damped[(i, i)] += lambda * (jtj[(i, i)].abs() + 1e-12);
            }
            let Some(delta) = damped.lu().solve(&(-jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let w = Vector3::new(delta[0], delta[1], delta[2]);
            let rot = Rotation3::from_scaled_axis(w) * model.frame.rotation;
            let trial = HelicoidModel {
                pitch: model.pitch + delta[6],
                frame: Frame {
                    rotation: rot,
                    translation: model.frame.translation
                        + Vector3::new(delta[3], delta[4], delta[5]),
                },
            };
            if trial.pitch == 0.0 {
                lambda *= 10.0;
                continue;
            }
            let trial_rms = rms_distance(&trial, points);
            if trial_rms < rms {
                model = trial;
                let gain = rms - trial_rms;
                rms = trial_rms;
                lambda = (lambda * 0.3).max(1e-12);
                improved = true;
                if gain < 1e-15 * (1.0 + rms) {
                    return (model, rms);
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    (model, rms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::generate::helicoid_mesh;
    use approx::assert_relative_eq;

    #[test]
    fn projection_of_surface_points_is_exact() {
        let model = HelicoidModel::axis_aligned(0.8);
        for (s, t) in [(1.0, 0.3), (-2.0, 2.9), (0.01, -4.0), (3.0, 11.0)] {
            let p = model.point(s, t);
            let pr = project_point(&model, p);
            assert!(pr.distance < 1e-9, "distance {}", pr.distance);
        }
    }

    #[test]
    fn projection_matches_brute_force_off_surface() {
        let model = HelicoidModel::axis_aligned(1.0);
        let p = Vector3::new(1.3, -0.4, 2.2);
        let pr = project_point(&model, p);
        // dense parameter sweep as the oracle
        let mut best = f64::INFINITY;
        for i in 0..4000 {
            let t = -8.0 + 16.0 * i as f64 / 4000.0;
            for j in 0..400 {
                let s = -4.0 + 8.0 * j as f64 / 400.0;
                best = best.min((model.point(s, t) - p).norm());
            }
        }
        assert!(pr.distance <= best + 1e-4, "{} vs {}", pr.distance, best);
    }

    #[test]
    fn self_fit_recovers_the_pitch() {
        let model = HelicoidModel::axis_aligned(1.0);
        let mesh = helicoid_mesh(&model, (-2.0, 2.0), (-2.0, 2.0), 41, 41).unwrap();
        let (fitted, rms) = fit_helicoid(&mesh, 7).unwrap();
        assert!(rms <= 1e-6 * mesh.patch_scale(), "rms {rms}");
        assert_relative_eq!(fitted.pitch.abs(), 1.0, epsilon = 1e-4);
    }

    #[test]
    fn rigidly_moved_patch_fits_with_the_same_pitch() {
        let model = HelicoidModel::axis_aligned(1.0);
        let mesh = helicoid_mesh(&model, (-2.0, 2.0), (-2.0, 2.0), 41, 41).unwrap();
        let rot = Rotation3::from_euler_angles(0.7, -0.3, 1.9);
        let moved = mesh.rigid_transform(&rot, Vector3::new(3.0, -1.0, 2.0));
        let (fitted, rms) = fit_helicoid(&moved, 7).unwrap();
        assert!(rms <= 1e-6 * moved.patch_scale(), "rms {rms}");
        assert_relative_eq!(fitted.pitch.abs(), 1.0, epsilon = 1e-4);
        // the frame is recovered up to the screw symmetry: compare the axis
        // line instead of the raw frame
        let fitted_axis = fitted.frame.rotation * Vector3::z();
        let true_axis = rot * Vector3::z();
        assert!(fitted_axis.cross(&true_axis).norm() < 1e-4);
        // fitted translation lies on the true axis line
        let d = fitted.frame.translation - Vector3::new(3.0, -1.0, 2.0);
        assert!(d.cross(&true_axis).norm() < 1e-4 * (1.0 + d.norm()));
    }

    #[test]
    fn flat_patch_is_rejected() {
        let mut vertices = Vec::new();
        for i in 0..12 {
            for j in 0..12 {
                vertices.push(Vector3::new(i as f64, j as f64, 0.0));
            }
        }
        let mut triangles = Vec::new();
        for i in 0..11 {
            for j in 0..11 {
                let v = |a: usize, b: usize| a * 12 + b;
                triangles.push([v(i, j), v(i + 1, j), v(i + 1, j + 1)]);
                triangles.push([v(i, j), v(i + 1, j + 1), v(i, j + 1)]);
            }
        }
        let mut mesh = MeshPatch::new(vertices, triangles).unwrap();
        mesh.a2 = Some(vec![0.0; mesh.n_vertices()]);
        assert!(fit_helicoid(&mesh, 0).is_err());
    }

    #[test]
    fn small_patches_are_rejected() {
        let model = HelicoidModel::axis_aligned(1.0);
        let mesh = helicoid_mesh(&model, (-1.0, 1.0), (-1.0, 1.0), 5, 5).unwrap();
        assert!(fit_helicoid(&mesh, 0).is_err());
    }
}
