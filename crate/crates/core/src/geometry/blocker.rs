use super::distance::{point_segment_distance, segment_box_distance};
use super::{Aabb, Capsule, MeshShape};
use crate::Vec3;

/// Designer-declared region of space.
#[derive(Debug, Clone, PartialEq)]
pub struct Blocker {
    pub shape: BlockerShape,
    pub mode: BlockerMode,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BlockerShape {
    Box(Aabb),
    Sphere { center: Vec3, radius: f64 },
    Mesh(MeshShape),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockerMode {
    /// Configurations whose finger overlaps the region are invalid.
    BlockMotion,
    /// Reached points inside the region are dropped from the volume.
    ExcludePoints,
}

impl Blocker {
    pub fn new(shape: BlockerShape, mode: BlockerMode) -> Self {
        Self { shape, mode }
    }

    /// Strict interior test; points on the boundary are outside.
    pub fn contains_point(&self, p: &Vec3) -> bool {
        match &self.shape {
            BlockerShape::Box(b) => (0..3).all(|i| b.min[i] < p[i] && p[i] < b.max[i]),
            BlockerShape::Sphere { center, radius } => (p - center).norm() < *radius,
            BlockerShape::Mesh(m) => m.contains_point(p),
        }
    }

    /// How far a capsule reaches into the region: `radius - distance` from
    /// the centerline to the solid, clamped to `[0, radius]`. Mesh blockers
    /// use the surface distance.
    pub fn capsule_penetration(&self, c: &Capsule) -> f64 {
        let d = match &self.shape {
            BlockerShape::Box(b) => segment_box_distance(c.a, c.b, b),
            BlockerShape::Sphere { center, radius } => {
                (point_segment_distance(*center, c.a, c.b) - radius).max(0.0)
            }
            BlockerShape::Mesh(m) => return m.capsule_penetration(c),
        };
        (c.radius - d).max(0.0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        let shape = match &self.shape {
            BlockerShape::Box(b) => BlockerShape::Box(Aabb {
                min: b.min * s,
                max: b.max * s,
            }),
            BlockerShape::Sphere { center, radius } => BlockerShape::Sphere {
                center: center * s,
                radius: radius * s,
            },
            BlockerShape::Mesh(m) => BlockerShape::Mesh(MeshShape::new(m.mesh().scaled(s))),
        };
        Self::new(shape, self.mode)
    }

    pub fn mirrored_x(&self) -> Self {
        let shape = match &self.shape {
            BlockerShape::Box(b) => BlockerShape::Box(Aabb {
                min: Vec3::new(-b.max.x, b.min.y, b.min.z),
                max: Vec3::new(-b.min.x, b.max.y, b.max.z),
            }),
            BlockerShape::Sphere { center, radius } => BlockerShape::Sphere {
                center: Vec3::new(-center.x, center.y, center.z),
                radius: *radius,
            },
            BlockerShape::Mesh(m) => BlockerShape::Mesh(MeshShape::new(m.mesh().mirrored_x())),
        };
        Self::new(shape, self.mode)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::mesh::box_mesh;

    fn unit_box() -> Blocker {
        Blocker::new(
            BlockerShape::Box(Aabb {
                min: Vec3::zeros(),
                max: Vec3::repeat(10.0),
            }),
            BlockerMode::BlockMotion,
        )
    }

    #[test]
    fn box_center_is_inside() {
        assert!(unit_box().contains_point(&Vec3::repeat(5.0)));
        assert!(!unit_box().contains_point(&Vec3::new(10.0, 5.0, 5.0)));
    }

    #[test]
    fn sphere_surface_is_outside() {
        let s = Blocker::new(
            BlockerShape::Sphere {
                center: Vec3::zeros(),
                radius: 4.0,
            },
            BlockerMode::ExcludePoints,
        );
        assert!(!s.contains_point(&Vec3::new(0.0, 4.0, 0.0)));
        assert!(s.contains_point(&Vec3::new(0.0, 3.999, 0.0)));
    }

    #[test]
    fn capsule_overlapping_box_face() {
        // Centerline 2 mm above the top face, radius 3: one millimeter inside.
        let c = Capsule::new(Vec3::new(2.0, 12.0, 5.0), Vec3::new(8.0, 12.0, 5.0), 3.0);
        assert!((unit_box().capsule_penetration(&c) - 1.0).abs() < 1e-12);
        let inside = Capsule::new(Vec3::repeat(4.0), Vec3::repeat(6.0), 3.0);
        assert_eq!(unit_box().capsule_penetration(&inside), 3.0);
    }

    #[test]
    fn sphere_penetration_is_distance_arithmetic() {
        let s = Blocker::new(
            BlockerShape::Sphere {
                center: Vec3::zeros(),
                radius: 4.0,
            },
            BlockerMode::BlockMotion,
        );
        let c = Capsule::new(Vec3::new(-5.0, 6.0, 0.0), Vec3::new(5.0, 6.0, 0.0), 3.0);
        assert!((s.capsule_penetration(&c) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mesh_blocker_uses_mesh_kernels() {
        let m = Blocker::new(
            BlockerShape::Mesh(MeshShape::new(box_mesh(Vec3::zeros(), Vec3::repeat(10.0)))),
            BlockerMode::BlockMotion,
        );
        assert!(m.contains_point(&Vec3::repeat(5.0)));
        let c = Capsule::new(Vec3::new(2.0, 12.0, 5.0), Vec3::new(8.0, 12.0, 5.0), 3.0);
        assert!((m.capsule_penetration(&c) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mirrored_box_keeps_extent() {
        let b = unit_box().mirrored_x();
        assert!(b.contains_point(&Vec3::new(-5.0, 5.0, 5.0)));
        assert!(!b.contains_point(&Vec3::new(5.0, 5.0, 5.0)));
    }
}
