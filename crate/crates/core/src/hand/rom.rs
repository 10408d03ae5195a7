use std::fmt;

use serde::{Deserialize, Serialize};

use super::{FingerId, HandError, JointId};

/// Rotation axis of a joint frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Flexion (+) / extension (-).
    X,
    /// Abduction / adduction.
    Y,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
        })
    }
}

/// Angular limits of one joint axis, in degrees relative to the grasp pose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RomEntry {
    pub joint: JointId,
    pub axis: Axis,
    pub min_deg: f64,
    pub max_deg: f64,
}

impl RomEntry {
    pub fn new(joint: JointId, axis: Axis, min_deg: f64, max_deg: f64) -> Self {
        Self {
            joint,
            axis,
            min_deg,
            max_deg,
        }
    }

    /// Integer step bounds `[ceil(min/step), floor(max/step)]`.
    pub fn step_bounds(&self, step_deg: f64) -> (i32, i32) {
        // Absorb representation error so that e.g. 0.3 / 0.1 still yields 3.
        const SLACK: f64 = 1e-9;
        let lo = (self.min_deg / step_deg - SLACK).ceil() as i32;
        let hi = (self.max_deg / step_deg + SLACK).floor() as i32;
        (lo.min(0), hi.max(0))
    }
}

/// Per-axis range of motion. Axes that are not listed are locked.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RomSpec {
    entries: Vec<RomEntry>,
}

impl RomSpec {
    pub fn new(entries: Vec<RomEntry>) -> Result<Self, HandError> {
        let spec = Self { entries };
        spec.validate()?;
        Ok(spec)
    }

    /// Every rotating joint locked.
    pub fn locked() -> Self {
        Self::default()
    }

    /// Tool default ranges, relative to the grasp pose. Finger MCPs and the
    /// thumb CMC get flexion and abduction, every other joint flexion only.
    pub fn defaults() -> Self {
        use JointId::*;
        let mut entries = vec![
            RomEntry::new(ThumbCmc, Axis::X, -20.0, 40.0),
            RomEntry::new(ThumbCmc, Axis::Y, -20.0, 40.0),
            RomEntry::new(ThumbMcp, Axis::X, -10.0, 50.0),
            RomEntry::new(ThumbIp, Axis::X, -15.0, 70.0),
        ];
        for finger in [FingerId::Index, FingerId::Middle, FingerId::Ring, FingerId::Little] {
            let [mcp, pip, dip, _] = finger.chain();
            entries.extend([
                RomEntry::new(mcp, Axis::X, -20.0, 70.0),
                RomEntry::new(mcp, Axis::Y, -15.0, 15.0),
                RomEntry::new(pip, Axis::X, -10.0, 90.0),
                RomEntry::new(dip, Axis::X, -10.0, 70.0),
            ]);
        }
        Self { entries }
    }

    pub fn entries(&self) -> &[RomEntry] {
        &self.entries
    }

    pub fn get(&self, joint: JointId, axis: Axis) -> Option<&RomEntry> {
        self.entries
            .iter()
            .find(|e| e.joint == joint && e.axis == axis)
    }

    /// Replaces (or adds) the range of one axis.
    pub fn set(&mut self, entry: RomEntry) {
        match self
            .entries
            .iter_mut()
            .find(|e| e.joint == entry.joint && e.axis == entry.axis)
        {
            Some(e) => *e = entry,
            None => self.entries.push(entry),
        }
    }

    /// Locks every axis of every finger not in `keep`.
    pub fn restricted_to(&self, keep: &[FingerId]) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .filter(|e| e.joint.finger().is_some_and(|f| keep.contains(&f)))
                .copied()
                .collect(),
        }
    }

    /// Range table for the mirrored hand: abduction limits swap sign.
    pub fn mirrored(&self) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|e| match e.axis {
                    Axis::X => *e,
                    Axis::Y => RomEntry::new(e.joint, e.axis, -e.max_deg, -e.min_deg),
                })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<(), HandError> {
        for (i, e) in self.entries.iter().enumerate() {
            let what = format!("{} {}", e.joint, e.axis);
            if !e.joint.is_rotating() {
                return Err(HandError::InvalidRom(format!("{} does not rotate", e.joint)));
            }
            if !(e.min_deg.is_finite() && e.max_deg.is_finite()) {
                return Err(HandError::InvalidRom(format!("{what}: non-finite limit")));
            }
            if e.min_deg > 0.0 || e.max_deg < 0.0 {
                return Err(HandError::InvalidRom(format!(
                    "{what}: [{}, {}] does not contain the grasp pose (0)",
                    e.min_deg, e.max_deg
                )));
            }
            if self.entries[..i]
                .iter()
                .any(|o| o.joint == e.joint && o.axis == e.axis)
            {
                return Err(HandError::InvalidRom(format!("{what}: listed twice")));
            }
        }
        Ok(())
    }
}
