use serde::{Deserialize, Serialize};

use crate::geometry::{capsule_capsule_penetration, BlockerMode, Capsule};
use crate::hand::{FingerChain, FingerConfiguration, FingerId, FingerPose, HandModel};
use crate::io::scene::GraspScene;

/// Outcome of checking one finger configuration. Checks run in the order
/// range of motion, object, hand (palm and own segments), blockers; the
/// first failure wins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "verdict", content = "depth_mm")]
pub enum Verdict {
    Valid,
    OutOfRom,
    ObjectCollision(f64),
    HandCollision(f64),
    BlockerCollision(f64),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

/// Everything needed to judge configurations of one finger, built once.
pub(crate) struct FingerContext<'a> {
    scene: &'a GraspScene,
    pub(crate) chain: FingerChain,
    pub(crate) bounds: Vec<(i32, i32)>,
    palm: Vec<Capsule>,
    /// Per-pair hand overlap already present in the grasp pose.
    baseline: Vec<f64>,
}

impl<'a> FingerContext<'a> {
    pub(crate) fn new(scene: &'a GraspScene, finger: FingerId) -> Self {
        let hand = &scene.hand;
        let chain = hand.chain(finger);
        let bounds = chain.bounds(scene.settings.step_deg);
        let palm = palm_capsules(hand);
        let seed_pose = chain.pose(&chain.seed(), scene.settings.step_deg);
        let baseline = hand_pair_depths(&seed_pose, &palm);
        Self {
            scene,
            chain,
            bounds,
            palm,
            baseline,
        }
    }

    pub(crate) fn step_deg(&self) -> f64 {
        self.scene.settings.step_deg
    }

    pub(crate) fn in_bounds(&self, config: &FingerConfiguration) -> bool {
        config.0.len() == self.bounds.len()
            && config
                .0
                .iter()
                .zip(&self.bounds)
                .all(|(&o, &(lo, hi))| lo <= o && o <= hi)
    }

    pub(crate) fn pose(&self, config: &FingerConfiguration) -> FingerPose {
        self.chain.pose(config, self.step_deg())
    }

    pub(crate) fn verdict(&self, config: &FingerConfiguration) -> Verdict {
        if !self.in_bounds(config) {
            return Verdict::OutOfRom;
        }
        let pose = self.pose(config);
        self.verdict_for_pose(&pose)
    }

    pub(crate) fn verdict_for_pose(&self, pose: &FingerPose) -> Verdict {
        let eps = self.scene.settings.epsilon_mm;

        if let Some(object) = &self.scene.object {
            let depth = pose
                .segments
                .iter()
                .map(|s| object.capsule_penetration(s))
                .fold(0.0f64, f64::max);
            if depth > eps {
                return Verdict::ObjectCollision(depth);
            }
        }

        // Overlap the grasp pose already has (short phalanges, curled
        // grasps) is not counted against it.
        let depth = hand_pair_depths(pose, &self.palm)
            .iter()
            .zip(&self.baseline)
            .map(|(d, b)| d - b)
            .fold(0.0f64, f64::max);
        if depth > eps {
            return Verdict::HandCollision(depth);
        }

        let depth = self
            .scene
            .blockers
            .iter()
            .filter(|b| b.mode == BlockerMode::BlockMotion)
            .flat_map(|b| pose.segments.iter().map(move |s| b.capsule_penetration(s)))
            .fold(0.0f64, f64::max);
        if depth > eps {
            return Verdict::BlockerCollision(depth);
        }
        Verdict::Valid
    }
}

/// Penetration of every non-adjacent hand pair for one finger pose: distal
/// against proximal, then middle and distal against each palm capsule. The
/// proximal segment hangs off the palm and is never tested against it.
fn hand_pair_depths(pose: &FingerPose, palm: &[Capsule]) -> Vec<f64> {
    let [proximal, middle, distal] = &pose.segments;
    let mut out = Vec::with_capacity(1 + 2 * palm.len());
    out.push(capsule_capsule_penetration(proximal, distal));
    for seg in [middle, distal] {
        out.extend(palm.iter().map(|p| capsule_capsule_penetration(seg, p)));
    }
    out
}

/// Wrist-to-root capsules plus the MCP rim, all at hand radius.
pub fn palm_capsules(hand: &HandModel) -> Vec<Capsule> {
    let r = hand.segment_radius();
    HandModel::palm_segments()
        .iter()
        .map(|&(a, b)| Capsule::new(hand.position(a), hand.position(b), r))
        .collect()
}

/// Checks one configuration of one finger against the scene.
pub fn validate_configuration(
    scene: &GraspScene,
    finger: FingerId,
    config: &FingerConfiguration,
) -> Verdict {
    FingerContext::new(scene, finger).verdict(config)
}
