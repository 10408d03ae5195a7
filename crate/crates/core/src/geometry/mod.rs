//! Collision primitives and the distance queries used by the simulator.
//!
//! Everything here is distance based: a capsule penetrates a surface by
//! `radius - distance(centerline, surface)`, clamped at zero. Mesh winding is
//! never consulted, which keeps open scans usable as obstacles.

mod blocker;
mod bvh;
mod distance;
pub(crate) mod mesh;

pub use blocker::{Blocker, BlockerMode, BlockerShape};
pub use bvh::{Bvh, QueryStats};
pub use distance::{
    point_segment_distance, point_triangle_closest, point_triangle_distance,
    segment_box_distance, segment_segment_distance, segment_triangle_distance,
};
pub use mesh::{MeshError, MeshShape, TriangleMesh};

use crate::Vec3;

/// Segment swept by a sphere. Degenerates to a sphere when `a == b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Capsule {
    pub a: Vec3,
    pub b: Vec3,
    pub radius: f64,
}

impl Capsule {
    pub fn new(a: Vec3, b: Vec3, radius: f64) -> Self {
        Self { a, b, radius }
    }

    pub fn aabb(&self) -> Aabb {
        let r = Vec3::repeat(self.radius);
        Aabb {
            min: self.a.inf(&self.b) - r,
            max: self.a.sup(&self.b) + r,
        }
    }

    pub fn translated(&self, t: &Vec3) -> Self {
        Self::new(self.a + t, self.b + t, self.radius)
    }

    fn key(&self) -> [f64; 7] {
        [
            self.a.x, self.a.y, self.a.z, self.b.x, self.b.y, self.b.z, self.radius,
        ]
    }
}

/// Overlap depth of two capsules, zero when they are apart.
pub fn capsule_capsule_penetration(a: &Capsule, b: &Capsule) -> f64 {
    // Fixed argument order so that swapping the inputs is bit-exact.
    let (a, b) = if total_lt(&b.key(), &a.key()) {
        (b, a)
    } else {
        (a, b)
    };
    let d = segment_segment_distance(a.a, a.b, b.a, b.b);
    (a.radius + b.radius - d).max(0.0)
}

fn total_lt(x: &[f64; 7], y: &[f64; 7]) -> bool {
    for (p, q) in x.iter().zip(y) {
        match p.total_cmp(q) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn empty() -> Self {
        Self {
            min: Vec3::repeat(f64::INFINITY),
            max: Vec3::repeat(f64::NEG_INFINITY),
        }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Vec3>) -> Self {
        points.into_iter().fold(Self::empty(), |b, p| b.grown(p))
    }

    pub fn grown(&self, p: &Vec3) -> Self {
        Self {
            min: self.min.inf(p),
            max: self.max.sup(p),
        }
    }

    pub fn union(&self, o: &Aabb) -> Self {
        Self {
            min: self.min.inf(&o.min),
            max: self.max.sup(&o.max),
        }
    }

    pub fn inflated(&self, r: f64) -> Self {
        Self {
            min: self.min - Vec3::repeat(r),
            max: self.max + Vec3::repeat(r),
        }
    }

    pub fn overlaps(&self, o: &Aabb) -> bool {
        (0..3).all(|i| self.min[i] <= o.max[i] && o.min[i] <= self.max[i])
    }

    pub fn contains(&self, o: &Aabb) -> bool {
        (0..3).all(|i| self.min[i] <= o.min[i] && o.max[i] <= self.max[i])
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    /// Euclidean distance from a point to the box (zero inside).
    pub fn distance_to_point(&self, p: &Vec3) -> f64 {
        let clamped = p.sup(&self.min).inf(&self.max);
        (p - clamped).norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parallel_capsules_one_mm_apart() {
        let a = Capsule::new(Vec3::new(0.0, 0.0, 0.0), Vec3::new(10.0, 0.0, 0.0), 2.0);
        let b = Capsule::new(Vec3::new(0.0, 1.0, 0.0), Vec3::new(10.0, 1.0, 0.0), 2.0);
        assert!((capsule_capsule_penetration(&a, &b) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn identical_capsules_overlap_by_diameter() {
        let a = Capsule::new(Vec3::new(1.0, 2.0, 3.0), Vec3::new(4.0, 2.0, 9.0), 2.5);
        assert_eq!(capsule_capsule_penetration(&a, &a), 5.0);
    }

    #[test]
    fn distant_capsules_do_not_touch() {
        let a = Capsule::new(Vec3::zeros(), Vec3::x(), 1.0);
        let b = Capsule::new(Vec3::new(0.0, 50.0, 0.0), Vec3::new(1.0, 50.0, 0.0), 1.0);
        assert_eq!(capsule_capsule_penetration(&a, &b), 0.0);
    }

    #[test]
    fn sphere_capsules_are_allowed() {
        let a = Capsule::new(Vec3::zeros(), Vec3::zeros(), 1.0);
        let b = Capsule::new(Vec3::new(1.5, 0.0, 0.0), Vec3::new(1.5, 0.0, 0.0), 1.0);
        assert!((capsule_capsule_penetration(&a, &b) - 0.5).abs() < 1e-12);
    }

    fn arb_vec() -> impl Strategy<Value = Vec3> {
        proptest::array::uniform3(-50.0f64..50.0).prop_map(Vec3::from)
    }

    fn arb_capsule() -> impl Strategy<Value = Capsule> {
        (arb_vec(), arb_vec(), 0.1f64..10.0).prop_map(|(a, b, r)| Capsule::new(a, b, r))
    }

    proptest! {
        #[test]
        fn capsule_penetration_is_symmetric(a in arb_capsule(), b in arb_capsule()) {
            prop_assert_eq!(capsule_capsule_penetration(&a, &b), capsule_capsule_penetration(&b, &a));
        }

        #[test]
        fn capsule_penetration_is_translation_invariant(a in arb_capsule(), b in arb_capsule(), t in arb_vec()) {
            let d0 = capsule_capsule_penetration(&a, &b);
            let d1 = capsule_capsule_penetration(&a.translated(&t), &b.translated(&t));
            prop_assert!((d0 - d1).abs() <= 1e-9 * (1.0 + d0.abs()) + 1e-9);
        }
    }
}
