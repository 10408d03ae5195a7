use std::fmt;

use nalgebra::{Matrix3, Rotation3, Unit};
use serde::{Deserialize, Serialize};

use super::{Axis, FingerId, HandError, HandModel, JointId};
use crate::geometry::Capsule;
use crate::Vec3;

/// Integer step offsets, one per explored axis of a finger, relative to the
/// grasp pose. Ordered like [`FingerChain::axes`]. Compares lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FingerConfiguration(pub Vec<i32>);

impl FingerConfiguration {
    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn offsets(&self) -> &[i32] {
        &self.0
    }

    /// Sum of absolute step offsets.
    pub fn l1(&self) -> u64 {
        self.0.iter().map(|o| o.unsigned_abs() as u64).sum()
    }
}

impl fmt::Display for FingerConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, o) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{o}")?;
        }
        Ok(())
    }
}

/// One explored degree of freedom of a finger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainAxis {
    /// Position of the joint in the chain, 0 = root.
    pub slot: usize,
    pub joint: JointId,
    pub axis: Axis,
    pub min_deg: f64,
    pub max_deg: f64,
}

/// Posed finger: joint positions root..tip and the three segment capsules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FingerPose {
    pub joints: [Vec3; 4],
    pub segments: [Capsule; 3],
}

impl FingerPose {
    pub fn tip(&self) -> Vec3 {
        self.joints[3]
    }
}

/// Precomputed kinematic chain of one finger.
#[derive(Debug, Clone)]
pub struct FingerChain {
    finger: FingerId,
    rest: [Vec3; 4],
    frames: [Matrix3<f64>; 3],
    axes: Vec<ChainAxis>,
    radius: f64,
}

impl FingerChain {
    pub(super) fn new(hand: &HandModel, finger: FingerId) -> Self {
        let chain = finger.chain();
        let rest = chain.map(|j| hand.position(j));
        let frames = [0, 1, 2].map(|i| {
            hand.frame(chain[i])
                .expect("rotating joints carry frames")
                .rotation
        });
        let mut axes = Vec::new();
        for (slot, &joint) in chain[..3].iter().enumerate() {
            for axis in [Axis::X, Axis::Y] {
                let default_dof = axis == Axis::X || slot == 0;
                let entry = hand.rom().get(joint, axis);
                if default_dof || entry.is_some() {
                    let (min_deg, max_deg) = entry.map_or((0.0, 0.0), |e| (e.min_deg, e.max_deg));
                    axes.push(ChainAxis {
                        slot,
                        joint,
                        axis,
                        min_deg,
                        max_deg,
                    });
                }
            }
        }
        Self {
            finger,
            rest,
            frames,
            axes,
            radius: hand.segment_radius(),
        }
    }

    pub fn finger(&self) -> FingerId {
        self.finger
    }

    pub fn axes(&self) -> &[ChainAxis] {
        &self.axes
    }

    pub fn rest(&self) -> &[Vec3; 4] {
        &self.rest
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn seed(&self) -> FingerConfiguration {
        FingerConfiguration::zeros(self.axes.len())
    }

    /// Inclusive step bounds for every axis.
    pub fn bounds(&self, step_deg: f64) -> Vec<(i32, i32)> {
        self.axes
            .iter()
            .map(|a| {
                super::RomEntry::new(a.joint, a.axis, a.min_deg, a.max_deg).step_bounds(step_deg)
            })
            .collect()
    }

    /// Number of configurations in the full grid.
    pub fn grid_size(&self, step_deg: f64) -> u128 {
        self.bounds(step_deg)
            .iter()
            .map(|(lo, hi)| (hi - lo + 1) as u128)
            .product()
    }

    pub fn check(&self, config: &FingerConfiguration, step_deg: f64) -> Result<(), HandError> {
        if config.0.len() != self.axes.len() {
            return Err(HandError::ConfigurationArity {
                expected: self.axes.len(),
                got: config.0.len(),
            });
        }
        for ((&step, (lo, hi)), a) in config.0.iter().zip(self.bounds(step_deg)).zip(&self.axes) {
            if step < lo || step > hi {
                return Err(HandError::OutOfRom {
                    joint: a.joint,
                    axis: a.axis,
                    step,
                    lo,
                    hi,
                });
            }
        }
        Ok(())
    }

    /// Poses the finger. Rotations are applied proximal to distal; at each
    /// joint the rotation about the rest-frame X axis comes first, then Y.
    /// Joints ahead of the first rotated one keep their rest positions
    /// exactly.
    ///
    /// Panics if `config` has the wrong number of offsets.
    pub fn pose(&self, config: &FingerConfiguration, step_deg: f64) -> FingerPose {
        assert_eq!(config.0.len(), self.axes.len(), "configuration arity");
        let mut angles = [[0.0f64; 2]; 3];
        for (a, &steps) in self.axes.iter().zip(&config.0) {
            let k = match a.axis {
                Axis::X => 0,
                Axis::Y => 1,
            };
            angles[a.slot][k] = (steps as f64 * step_deg).to_radians();
        }

        let mut joints = self.rest;
        let mut acc: Option<Matrix3<f64>> = None;
        for slot in 0..3 {
            let [ax, ay] = angles[slot];
            if ax != 0.0 || ay != 0.0 {
                let frame = &self.frames[slot];
                let local = about(frame.column(1).into(), ay) * about(frame.column(0).into(), ax);
                acc = Some(match acc {
                    Some(m) => m * local,
                    None => local,
                });
            }
            if let Some(m) = acc {
                joints[slot + 1] = joints[slot] + m * (self.rest[slot + 1] - self.rest[slot]);
            }
        }

        let r = self.radius;
        FingerPose {
            joints,
            segments: [
                Capsule::new(joints[0], joints[1], r),
                Capsule::new(joints[1], joints[2], r),
                Capsule::new(joints[2], joints[3], r),
            ],
        }
    }
}

fn about(axis: Vec3, angle: f64) -> Matrix3<f64> {
    if angle == 0.0 {
        return Matrix3::identity();
    }
    Rotation3::from_axis_angle(&Unit::new_unchecked(axis), angle).into_inner()
}
