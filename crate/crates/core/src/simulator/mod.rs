//! Flood-fill exploration of finger configuration grids.
//!
//! For each enabled finger the reachable set is the connected component of
//! the grasp pose in that finger's configuration grid, where a node is a
//! valid configuration and edges join configurations one step apart on a
//! single axis. Validity is judged on the whole finger (see [`Verdict`]).
//! Other fingers stay frozen at the grasp pose and are not collision tested.

mod flood;
mod validity;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::hand::FingerConfiguration;
use crate::hand::{FingerId, HandError, Handedness};
use crate::io::scene::GraspScene;
use crate::Vec3;
pub use flood::flood_fill;
pub use validity::{palm_capsules, validate_configuration, Verdict};
pub(crate) use validity::FingerContext;

pub const DEFAULT_STEP_DEG: f64 = 5.0;
pub const DEFAULT_EPSILON_MM: f64 = 0.5;
pub const DEFAULT_MAX_CONFIGURATIONS: u64 = 5_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimulationError {
    #[error("{finger}: grasp pose is not a valid configuration ({verdict:?})")]
    InvalidSeed { finger: FingerId, verdict: Verdict },
    #[error("{finger}: explored more than {cap} configurations")]
    ConfigurationCap { finger: FingerId, cap: u64 },
    #[error("no fingers enabled")]
    NoFingersEnabled,
    #[error("invalid settings: {0}")]
    InvalidSettings(String),
    #[error(transparent)]
    Hand(#[from] HandError),
}

/// Simulation parameters. The interaction element is always the fingertip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSettings {
    pub step_deg: f64,
    pub epsilon_mm: f64,
    pub fingers: Vec<FingerId>,
    /// Voxel edge for min-cost deduplication; 0 disables it.
    pub dedupe_mm: f64,
    pub max_configurations: u64,
}

impl Default for SimulationSettings {
    fn default() -> Self {
        Self {
            step_deg: DEFAULT_STEP_DEG,
            epsilon_mm: DEFAULT_EPSILON_MM,
            fingers: FingerId::ALL.to_vec(),
            dedupe_mm: 0.0,
            max_configurations: DEFAULT_MAX_CONFIGURATIONS,
        }
    }
}

impl SimulationSettings {
    pub fn validate(&self) -> Result<(), SimulationError> {
        if !(self.step_deg > 0.0 && self.step_deg.is_finite()) {
            return Err(SimulationError::InvalidSettings(format!(
                "step_deg must be positive, got {}",
                self.step_deg
            )));
        }
        if !(self.epsilon_mm >= 0.0 && self.epsilon_mm.is_finite()) {
            return Err(SimulationError::InvalidSettings(format!(
                "epsilon_mm must be non-negative, got {}",
                self.epsilon_mm
            )));
        }
        if !(self.dedupe_mm >= 0.0 && self.dedupe_mm.is_finite()) {
            return Err(SimulationError::InvalidSettings(format!(
                "dedupe_mm must be non-negative, got {}",
                self.dedupe_mm
            )));
        }
        Ok(())
    }

    /// Enabled fingers, deduplicated, thumb to little.
    pub fn enabled_fingers(&self) -> Vec<FingerId> {
        FingerId::ALL
            .into_iter()
            .filter(|f| self.fingers.contains(f))
            .collect()
    }
}

/// One reached fingertip position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GravPoint {
    pub position: Vec3,
    /// Joint rotation away from the grasp pose, degrees.
    pub cost: f64,
    pub finger: FingerId,
    pub config: FingerConfiguration,
}

impl GravPoint {
    pub fn cost_for(config: &FingerConfiguration, step_deg: f64) -> f64 {
        step_deg * config.l1() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandSummary {
    pub handedness: Handedness,
    pub thickness_mm: f64,
    /// Wrist to middle fingertip at rest.
    pub length_mm: f64,
    /// Little MCP to index MCP.
    pub mcp_span_mm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VolumeMetadata {
    pub generator: String,
    pub frame: String,
    pub scene_hash: Option<String>,
    pub settings: Option<SimulationSettings>,
    pub hand: Option<HandSummary>,
    pub object_name: Option<String>,
    pub grasp_id: Option<u8>,
    pub label: Option<String>,
    pub per_finger: Vec<FingerReport>,
    pub warnings: Vec<String>,
    pub excluded_points: u64,
    pub deduplicated_points: u64,
    pub scale: f64,
}

impl Default for VolumeMetadata {
    fn default() -> Self {
        Self {
            generator: concat!("gravkit ", env!("CARGO_PKG_VERSION")).to_string(),
            frame: "right_handed (+X right, +Y up, +Z forward), mm".to_string(),
            scene_hash: None,
            settings: None,
            hand: None,
            object_name: None,
            grasp_id: None,
            label: None,
            per_finger: Vec::new(),
            warnings: Vec::new(),
            excluded_points: 0,
            deduplicated_points: 0,
            scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FingerReport {
    pub finger: FingerId,
    pub points: u64,
    pub configurations_tested: u64,
    pub error: Option<String>,
}

/// Labeled 4D point cloud: fingertip position plus cost, finger and
/// configuration per point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct GravVolume {
    pub points: Vec<GravPoint>,
    pub metadata: VolumeMetadata,
}

impl GravVolume {
    pub fn new(points: Vec<GravPoint>) -> Self {
        Self {
            points,
            metadata: VolumeMetadata::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_cost(&self) -> f64 {
        self.points.iter().map(|p| p.cost).fold(0.0, f64::max)
    }

    pub fn fingers(&self) -> Vec<FingerId> {
        FingerId::ALL
            .into_iter()
            .filter(|f| self.points.iter().any(|p| p.finger == *f))
            .collect()
    }

    /// True if every enabled finger failed to produce its seed point.
    pub fn all_seeds_invalid(&self) -> bool {
        !self.metadata.per_finger.is_empty()
            && self.metadata.per_finger.iter().all(|r| r.error.is_some())
    }
}

/// Reachable configurations of one finger, in canonical order.
pub fn simulate_finger(scene: &GraspScene, finger: FingerId) -> Result<Vec<GravPoint>, SimulationError> {
    flood_fill(scene, finger).map(|r| r.points)
}

/// Runs every enabled finger and merges the results.
///
/// Per-finger failures (invalid seed, configuration cap) are recorded in the
/// metadata and do not abort the others. Exclude-points blockers and voxel
/// deduplication are applied to the merged cloud.
pub fn simulate(scene: &GraspScene) -> Result<GravVolume, SimulationError> {
    scene.settings.validate()?;
    let fingers = scene.settings.enabled_fingers();
    if fingers.is_empty() {
        return Err(SimulationError::NoFingersEnabled);
    }

    #[cfg(feature = "parallel")]
    let results: Vec<_> = {
        use rayon::prelude::*;
        fingers.par_iter().map(|&f| (f, flood_fill(scene, f))).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<_> = fingers.iter().map(|&f| (f, flood_fill(scene, f))).collect();

    let mut volume = GravVolume::default();
    for (finger, result) in results {
        match result {
            Ok(run) => {
                volume.metadata.per_finger.push(FingerReport {
                    finger,
                    points: run.points.len() as u64,
                    configurations_tested: run.tested,
                    error: None,
                });
                volume.points.extend(run.points);
            }
            Err(e) => {
                volume.metadata.warnings.push(e.to_string());
                volume.metadata.per_finger.push(FingerReport {
                    finger,
                    points: 0,
                    configurations_tested: 0,
                    error: Some(e.to_string()),
                });
            }
        }
    }

    let exclude: Vec<_> = scene
        .blockers
        .iter()
        .filter(|b| b.mode == crate::geometry::BlockerMode::ExcludePoints)
        .cloned()
        .collect();
    if !exclude.is_empty() {
        volume = crate::volume::apply_blockers(&volume, &exclude);
    }
    if scene.settings.dedupe_mm > 0.0 {
        volume = dedupe(volume, scene.settings.dedupe_mm);
    }

    let meta = &mut volume.metadata;
    meta.scene_hash = Some(scene.content_hash.clone());
    meta.settings = Some(scene.settings.clone());
    meta.hand = Some(summarize(scene));
    meta.object_name = scene.labels.object_name.clone();
    meta.grasp_id = scene.labels.grasp_id;
    meta.label = Some(scene.labels.stem());
    Ok(volume)
}

fn summarize(scene: &GraspScene) -> HandSummary {
    use crate::hand::JointId;
    let hand = &scene.hand;
    HandSummary {
        handedness: hand.handedness(),
        thickness_mm: hand.thickness(),
        length_mm: (hand.position(JointId::MiddleTip) - hand.position(JointId::Wrist)).norm(),
        mcp_span_mm: (hand.position(JointId::IndexMcp) - hand.position(JointId::LittleMcp)).norm(),
    }
}

/// Keeps the cheapest point of every occupied voxel. Ties go to the earlier
/// finger, then the lexicographically smaller configuration. Survivors keep
/// their relative order.
pub fn dedupe(mut volume: GravVolume, voxel_mm: f64) -> GravVolume {
    let key = |p: &Vec3| {
        [
            (p.x / voxel_mm).floor() as i64,
            (p.y / voxel_mm).floor() as i64,
            (p.z / voxel_mm).floor() as i64,
        ]
    };
    let mut best: HashMap<[i64; 3], usize> = HashMap::new();
    for (i, p) in volume.points.iter().enumerate() {
        best.entry(key(&p.position))
            .and_modify(|j| {
                let q = &volume.points[*j];
                let better = p
                    .cost
                    .total_cmp(&q.cost)
                    .then(p.finger.cmp(&q.finger))
                    .then(p.config.cmp(&q.config))
                    .is_lt();
                if better {
                    *j = i;
                }
            })
            .or_insert(i);
    }
    let mut keep = vec![false; volume.points.len()];
    for &i in best.values() {
        keep[i] = true;
    }
    let before = volume.points.len();
    let mut it = keep.iter();
    volume.points.retain(|_| *it.next().unwrap());
    volume.metadata.deduplicated_points += (before - volume.points.len()) as u64;
    volume
}

#[cfg(test)]
mod tests;
