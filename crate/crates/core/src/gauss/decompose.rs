//! Split a mesh into an axis region (balls around blow-up pairs, where the
//! vertical gradient stays bounded below) and two oppositely oriented
//! spiraling sheet regions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::curvature::{grad_x3_norm, mesh_u_theta};
use crate::geometry::mesh::MeshPatch;
use crate::sheets::blowup::BlowUpPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionLabel {
    Axis,
    /// Sheet with upward-oriented normal (`n3 > 0`).
    SheetUp,
    /// Sheet with downward-oriented normal.
    SheetDown,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Axis vertex whose vertical gradient drops below the threshold.
    AxisGradient { vertex: usize, value: f64 },
    /// Sheet vertex whose spiraling derivative has the wrong sign or is
    /// undefined (horizontal normal).
    SheetSpiral { vertex: usize, value: Option<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecompositionLabeling {
    pub labels: Vec<RegionLabel>,
    pub epsilon0: f64,
    /// `ln(2 / epsilon0)`, the derived bound on `|h1|` over the axis region.
    pub gamma0: f64,
    pub r1_multiplier: f64,
    /// Spiral orientation sign per sheet label (up, down).
    pub spiral_sign: (f64, f64),
    pub violations: Vec<Violation>,
    /// Set when there were no pairs to anchor an axis region.
    pub vacuous: Option<String>,
}

impl DecompositionLabeling {
    pub fn count(&self, label: RegionLabel) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }
}

/// Label every vertex.  The axis region is the connected component, among
/// vertices within `r1_multiplier * s_i` of some pair center, containing the
/// pair centers, enlarged by absorbing complement components that do not
/// reach the mesh boundary.  The remainder splits by normal orientation; both
/// defining inequalities are verified and violations reported rather than
/// silently passed.
pub fn decompose(
    mesh: &MeshPatch,
    pairs: &[BlowUpPair],
    epsilon0: f64,
    r1_multiplier: f64,
) -> Result<DecompositionLabeling> {
    if !(epsilon0 > 0.0 && epsilon0 < 1.0) {
        return Err(Error::invalid("epsilon0 must lie in (0, 1)"));
    }
    if !(r1_multiplier > 0.0) {
        return Err(Error::invalid("r1 multiplier must be positive"));
    }
    let nv = mesh.n_vertices();
    let gamma0 = (2.0 / epsilon0).ln();
    if pairs.is_empty() {
        let labels: Vec<RegionLabel> = mesh
            .normals
            .iter()
            .map(|n| {
                if n.z >= 0.0 {
                    RegionLabel::SheetUp
                } else {
                    RegionLabel::SheetDown
                }
            })
            .collect();
        return Ok(DecompositionLabeling {
            labels,
            epsilon0,
            gamma0,
            r1_multiplier,
            spiral_sign: (0.0, 0.0),
            violations: Vec::new(),
            vacuous: Some("no blow-up pairs: decomposition is vacuous".to_string()),
        });
    }

    let adj = mesh.vertex_neighbors();
    // vertices inside some scaled pair ball
    let mut eligible = vec![false; nv];
    for (k, v) in mesh.vertices.iter().enumerate() {
        if pairs
            .iter()
            .any(|p| (v - p.center).norm() <= r1_multiplier * p.scale)
        {
            eligible[k] = true;
        }
    }
    // flood from the vertices nearest to the pair centers
    let mut in_axis = vec![false; nv];
    let mut stack = Vec::new();
    for p in pairs {
        let seed = (0..nv)
            .min_by(|&a, &b| {
                (mesh.vertices[a] - p.center)
                    .norm()
                    .partial_cmp(&(mesh.vertices[b] - p.center).norm())
                    .unwrap()
            })
            .unwrap();
        if eligible[seed] && !in_axis[seed] {
            in_axis[seed] = true;
            stack.push(seed);
        }
    }
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if eligible[w] && !in_axis[w] {
                in_axis[w] = true;
                stack.push(w);
            }
        }
    }
    // absorb complement components that never touch the mesh boundary
    let boundary = mesh.boundary_vertices();
    let mut seen = vec![false; nv];
    for start in 0..nv {
        if in_axis[start] || seen[start] {
            continue;
        }
        let mut comp = vec![start];
        let mut head = 0;
        seen[start] = true;
        let mut touches_boundary = boundary[start];
        while head < comp.len() {
            let v = comp[head];
            head += 1;
            for &w in &adj[v] {
                if !in_axis[w] && !seen[w] {
                    seen[w] = true;
                    touches_boundary |= boundary[w];
                    comp.push(w);
                }
            }
        }
        if !touches_boundary {
            for v in comp {
                in_axis[v] = true;
            }
        }
    }

    let mut labels = Vec::with_capacity(nv);
    for k in 0..nv {
        labels.push(if in_axis[k] {
            RegionLabel::Axis
        } else if mesh.normals[k].z >= 0.0 {
            RegionLabel::SheetUp
        } else {
            RegionLabel::SheetDown
        });
    }

    // verify the axis gradient bound
    let mut violations = Vec::new();
    for k in 0..nv {
        if labels[k] == RegionLabel::Axis {
            let g = grad_x3_norm(&mesh.normals[k]);
            if g < epsilon0 {
                violations.push(Violation::AxisGradient { vertex: k, value: g });
            }
        }
    }
    // verify strict spiraling per sheet, orientation-adjusted: each sheet
    // must carry one consistent sign of the angular height derivative
    let mut spiral_sign = (0.0f64, 0.0f64);
    for (label, slot) in [(RegionLabel::SheetUp, 0usize), (RegionLabel::SheetDown, 1)] {
        let mut sum = 0.0f64;
        for k in 0..nv {
            if labels[k] != label {
                continue;
            }
            if let Some(ut) = mesh_u_theta(&mesh.vertices[k], &mesh.normals[k]) {
                sum += ut.signum();
            }
        }
        let sign = if sum >= 0.0 { 1.0 } else { -1.0 };
        if slot == 0 {
            spiral_sign.0 = sign;
        } else {
            spiral_sign.1 = sign;
        }
        for k in 0..nv {
            if labels[k] != label {
                continue;
            }
            match mesh_u_theta(&mesh.vertices[k], &mesh.normals[k]) {
                Some(ut) if ut * sign > 0.0 => {}
                other => violations.push(Violation::SheetSpiral { vertex: k, value: other }),
            }
        }
    }

    Ok(DecompositionLabeling {
        labels,
        epsilon0,
        gamma0,
        r1_multiplier,
        spiral_sign,
        violations,
        vacuous: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sheets::blowup::detect_blowup_pairs;
    use crate::surfaces::generate::{helicoid_mesh, HelicoidModel};

    fn helicoid_with_pairs() -> (MeshPatch, Vec<BlowUpPair>) {
        // taller than wide so the pair sequence covers the working cylinder
        let model = HelicoidModel::axis_aligned(1.0);
        let mesh = helicoid_mesh(&model, (-4.0, 4.0), (-6.0, 6.0), 81, 121).unwrap();
        let scan = detect_blowup_pairs(&mesh, 2.0f64.sqrt(), &[]).unwrap();
        (mesh, scan.pairs)
    }

    #[test]
    fn helicoid_axis_region_covers_the_gradient_ball() {
        let (mesh, pairs) = helicoid_with_pairs();
        assert!(!pairs.is_empty());
        let lab = decompose(&mesh, &pairs, 0.5, 1.7).unwrap();
        // |grad_S x3| = 1/sqrt(1 + rho^2) >= 0.5 iff rho <= sqrt(3); the
        // inclusion is asserted on the height range the pair sequence covers
        let target = 3.0f64.sqrt() - 0.1;
        for (k, v) in mesh.vertices.iter().enumerate() {
            let rho = v.x.hypot(v.y);
            if rho <= target && v.z.abs() <= 4.0 {
                assert_eq!(lab.labels[k], RegionLabel::Axis, "vertex at rho = {rho}, z = {}", v.z);
            }
        }
        // no spiraling violations on the sheets, and the two sheets both
        // spiral upward
        assert!(
            lab.violations
                .iter()
                .all(|v| !matches!(v, Violation::SheetSpiral { .. })),
            "spiral violations: {:?}",
            lab.violations.len()
        );
        assert_eq!(lab.spiral_sign, (1.0, 1.0));
        assert!((lab.gamma0 - (2.0f64 / 0.5).ln()).abs() < 1e-15);
    }

    #[test]
    fn tight_epsilon_shrinks_the_axis_region() {
        let (mesh, pairs) = helicoid_with_pairs();
        // with eps0 = 0.99 the gradient bound only holds for rho <= 0.1425;
        // label with a correspondingly small ball multiplier
        let lab = decompose(&mesh, &pairs, 0.99, 0.15).unwrap();
        let cutoff = (1.0f64 / (0.99f64 * 0.99) - 1.0).sqrt();
        assert!((cutoff - 0.14249).abs() < 1e-4);
        let axis_violation = lab
            .violations
            .iter()
            .filter(|v| matches!(v, Violation::AxisGradient { .. }))
            .count();
        // mesh spacing is 0.1, so the ball keeps a ring of vertices slightly
        // beyond the exact cutoff; the checker reports them
        for (k, v) in mesh.vertices.iter().enumerate() {
            if lab.labels[k] == RegionLabel::Axis {
                let rho = v.x.hypot(v.y);
                assert!(rho <= 0.15 + 1e-9);
            }
        }
        let _ = axis_violation; // informational; geometry pins the count
    }

    #[test]
    fn no_pairs_is_vacuous() {
        let (mesh, _) = helicoid_with_pairs();
        let lab = decompose(&mesh, &[], 0.5, 1.7).unwrap();
        assert!(lab.vacuous.is_some());
        assert_eq!(lab.count(RegionLabel::Axis), 0);
    }

    #[test]
    fn downward_helicoid_sheets_spiral_down_consistently() {
        let model = HelicoidModel::axis_aligned(-1.0);
        let mesh = helicoid_mesh(&model, (-4.0, 4.0), (-4.0, 4.0), 81, 81).unwrap();
        let scan = detect_blowup_pairs(&mesh, 2.0f64.sqrt(), &[]).unwrap();
        let lab = decompose(&mesh, &scan.pairs, 0.5, 1.7).unwrap();
        assert!(lab
            .violations
            .iter()
            .all(|v| !matches!(v, Violation::SheetSpiral { .. })));
        assert_eq!(lab.spiral_sign, (-1.0, -1.0));
    }
}
