//! Synthetic meshes and scenes for tests, bundled samples and the demo.

use std::f64::consts::PI;

use crate::geometry::{Blocker, TriangleMesh};
use crate::hand::{Axis, FingerId, HandModel, JointId, RomEntry, RomSpec};
use crate::io::scene::{GraspScene, SceneLabels};
use crate::simulator::SimulationSettings;
use crate::Vec3;

/// Axis-aligned box, 12 triangles, outward winding.
pub fn box_mesh(min: Vec3, max: Vec3) -> TriangleMesh {
    crate::geometry::mesh::box_mesh(min, max)
}

/// Square in the plane `y = center.y`, two triangles.
pub fn plane_mesh(center: Vec3, half: f64) -> TriangleMesh {
    let c = center;
    TriangleMesh::new(
        vec![
            c + Vec3::new(-half, 0.0, -half),
            c + Vec3::new(half, 0.0, -half),
            c + Vec3::new(half, 0.0, half),
            c + Vec3::new(-half, 0.0, half),
        ],
        vec![[0, 2, 1], [0, 3, 2]],
        Some("plane".into()),
    )
    .expect("plane mesh is valid")
}

/// Latitude-longitude sphere with `segments * 2 * (rings - 1)` triangles.
pub fn uv_sphere(center: Vec3, radius: f64, rings: u32, segments: u32) -> TriangleMesh {
    assert!(rings >= 2 && segments >= 3);
    let mut v = vec![center + Vec3::new(0.0, radius, 0.0)];
    for i in 1..rings {
        let phi = PI * i as f64 / rings as f64;
        for j in 0..segments {
            let theta = 2.0 * PI * j as f64 / segments as f64;
            v.push(center + radius * Vec3::new(phi.sin() * theta.cos(), phi.cos(), phi.sin() * theta.sin()));
        }
    }
    v.push(center - Vec3::new(0.0, radius, 0.0));
    let south = (v.len() - 1) as u32;
    let ring = |i: u32, j: u32| 1 + (i - 1) * segments + j % segments;
    let mut t = Vec::new();
    for j in 0..segments {
        t.push([0, ring(1, j + 1), ring(1, j)]);
    }
    for i in 1..rings - 1 {
        for j in 0..segments {
            let (a, b, c, d) = (ring(i, j), ring(i, j + 1), ring(i + 1, j), ring(i + 1, j + 1));
            t.push([a, b, d]);
            t.push([a, d, c]);
        }
    }
    for j in 0..segments {
        t.push([south, ring(rings - 1, j), ring(rings - 1, j + 1)]);
    }
    TriangleMesh::new(v, t, Some("sphere".into())).expect("sphere mesh is valid")
}

/// Closed cylinder along X centered on `center`.
pub fn cylinder_x(center: Vec3, radius: f64, length: f64, segments: u32) -> TriangleMesh {
    let h = length / 2.0;
    let mut v = Vec::new();
    for side in [-h, h] {
        for j in 0..segments {
            let a = 2.0 * PI * j as f64 / segments as f64;
            v.push(center + Vec3::new(side, radius * a.cos(), radius * a.sin()));
        }
    }
    v.push(center - Vec3::new(h, 0.0, 0.0));
    v.push(center + Vec3::new(h, 0.0, 0.0));
    let (c0, c1) = (2 * segments, 2 * segments + 1);
    let mut t = Vec::new();
    for j in 0..segments {
        let k = (j + 1) % segments;
        let (a, b, c, d) = (j, k, segments + j, segments + k);
        t.push([a, b, d]);
        t.push([a, d, c]);
        t.push([c0, b, a]);
        t.push([c1, c, d]);
    }
    TriangleMesh::new(v, t, Some("cylinder".into())).expect("cylinder mesh is valid")
}

/// Index distal segment length of the canonical hand.
pub const ARC_RADIUS_MM: f64 = 20.0;

/// Canonical right hand with only the index DIP free over `[0, max_deg]`
/// and only the index enabled.
pub fn arc_scene(max_deg: f64, object: Option<TriangleMesh>, blockers: Vec<Blocker>) -> GraspScene {
    let rom = RomSpec::new(vec![RomEntry::new(JointId::IndexDip, Axis::X, 0.0, max_deg)])
        .expect("arc rom is valid");
    let hand = HandModel::canonical_right().with_rom(rom).expect("arc rom is valid");
    let settings = SimulationSettings {
        fingers: vec![FingerId::Index],
        ..SimulationSettings::default()
    };
    GraspScene::new(
        hand,
        object,
        blockers,
        settings,
        SceneLabels {
            object_name: Some("arc".into()),
            grasp_id: None,
        },
    )
    .expect("arc scene is valid")
}

/// Closed-form index tip on the arc at `deg` of DIP flexion.
pub fn arc_tip(deg: f64) -> Vec3 {
    let dip = HandModel::canonical_right().position(JointId::IndexDip);
    let t = deg.to_radians();
    dip + ARC_RADIUS_MM * Vec3::new(0.0, -t.sin(), t.cos())
}

/// Plane below the index DIP that admits DIP flexion up to `last_ok_deg`
/// and rejects the next 5 degree step, given the default radius and
/// tolerance.
pub fn arc_clip_plane(last_ok_deg: f64) -> TriangleMesh {
    let hand = HandModel::canonical_right();
    let dip = hand.position(JointId::IndexDip);
    let r = hand.segment_radius();
    let eps = crate::simulator::DEFAULT_EPSILON_MM;
    let lo = ARC_RADIUS_MM * last_ok_deg.to_radians().sin();
    let hi = ARC_RADIUS_MM * (last_ok_deg + 5.0).to_radians().sin();
    let drop = 0.5 * (lo + hi) + r - eps;
    plane_mesh(dip - Vec3::new(0.0, drop, 0.0), 200.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MeshShape;

    #[test]
    fn sphere_triangle_count_and_radius() {
        let m = uv_sphere(Vec3::new(1.0, 2.0, 3.0), 10.0, 51, 100);
        assert_eq!(m.triangle_count(), 10_000);
        for p in m.vertices() {
            assert!(((p - Vec3::new(1.0, 2.0, 3.0)).norm() - 10.0).abs() < 1e-9);
        }
        let shape = MeshShape::new(uv_sphere(Vec3::zeros(), 10.0, 8, 12));
        assert!(shape.contains_point(&Vec3::new(0.1, 0.2, 0.3)));
        assert!(!shape.contains_point(&Vec3::new(0.0, 11.0, 0.0)));
    }

    #[test]
    fn cylinder_is_closed() {
        let shape = MeshShape::new(cylinder_x(Vec3::zeros(), 5.0, 40.0, 24));
        assert!(shape.contains_point(&Vec3::new(10.0, 0.5, 0.3)));
        assert!(!shape.contains_point(&Vec3::new(25.0, 0.0, 0.0)));
        assert!(!shape.contains_point(&Vec3::new(0.0, 6.0, 0.0)));
    }

    #[test]
    fn arc_tip_at_rest_matches_hand() {
        let hand = HandModel::canonical_right();
        assert!((arc_tip(0.0) - hand.position(JointId::IndexTip)).norm() < 1e-12);
    }
}
