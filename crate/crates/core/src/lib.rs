//! Grasp interaction volumes.
//!
//! Given a parameterized hand, a grasp pose and an object mesh, `gravkit`
//! flood-fills each finger's joint configuration grid outward from the
//! grasp pose and records every collision-free fingertip position together
//! with the joint rotation needed to get there. The resulting 4D point cloud
//! (position + cost) can be post-processed, queried for reachability and
//! exported as CSV, PLY or OBJ.
//!
//! Conventions used throughout the crate:
//!
//! * lengths are millimeters, angles are degrees;
//! * the frame is right-handed with +X right, +Y up and +Z forward (the
//!   direction the fingers point in the canonical flat hand);
//! * a left-handed engine frame is reached by negating X on import/export.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod fixtures;
pub mod geometry;
pub mod hand;
pub mod io;
pub mod pipeline;
pub mod simulator;
pub mod volume;

pub use geometry::{Blocker, BlockerMode, BlockerShape, Bvh, Capsule, TriangleMesh};
pub use hand::{
    Axis, FingerId, Handedness, HandError, HandModel, JointFrame, JointId, RomEntry, RomSpec,
};
pub use io::scene::{GraspScene, SceneError};
pub use simulator::{
    simulate, simulate_finger, validate_configuration, FingerConfiguration, GravPoint, GravVolume,
    SimulationError, SimulationSettings, Verdict, VolumeMetadata,
};

/// 3-vector in millimeters.
pub type Vec3 = nalgebra::Vector3<f64>;
