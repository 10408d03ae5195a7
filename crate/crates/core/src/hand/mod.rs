//! Parameterized hand: joint hierarchy, joint frames and range of motion.
//!
//! The skeleton has 16 rotating joints (wrist, three per finger, three for
//! the thumb) plus five fingertip sites that terminate each chain. Frames are
//! derived from rest positions only:
//!
//! * forward (+Z) points from a joint to its child; for the wrist it points
//!   to the centroid of the five finger roots (four MCPs and the thumb CMC);
//! * right (+X) of a finger joint is the little-MCP to index-MCP direction on
//!   a right hand and its mirror image (index to little) on a left hand;
//! * right of a thumb joint is `cross(CMC->MCP, MCP->IP)`;
//! * up (+Y) completes the right-handed frame, `Y = Z x X`.
//!
//! The handedness-dependent sign on the finger right axis makes positive X
//! rotation mean flexion on both hands, so a mirrored hand reproduces the
//! mirrored motion once its Y (abduction) ranges are negated.

mod kinematics;
mod rom;
mod template;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Vec3;

pub use kinematics::{FingerChain, FingerConfiguration, FingerPose};
pub use rom::{Axis, RomEntry, RomSpec};
pub use template::HandMeasurements;

/// Hand thickness used when a scene leaves it out. A tool default, not a
/// measured population value.
pub const DEFAULT_THICKNESS_MM: f64 = 22.0;

const COINCIDENT_MM: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HandError {
    #[error("missing joint position for {0}")]
    MissingJoint(JointId),
    #[error("degenerate segment between {0} and {1}")]
    DegenerateSegment(JointId, JointId),
    #[error("non-finite input for {0}")]
    NonFiniteInput(String),
    #[error("non-positive length: {0}")]
    NonPositiveLength(String),
    #[error("invalid range of motion: {0}")]
    InvalidRom(String),
    #[error("configuration step {step} on {joint} {axis} is outside [{lo}, {hi}]")]
    OutOfRom {
        joint: JointId,
        axis: Axis,
        step: i32,
        lo: i32,
        hi: i32,
    },
    #[error("configuration has {got} offsets, finger explores {expected} axes")]
    ConfigurationArity { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Handedness {
    Left,
    Right,
}

impl Handedness {
    pub fn flipped(self) -> Self {
        match self {
            Handedness::Left => Handedness::Right,
            Handedness::Right => Handedness::Left,
        }
    }

    fn side_sign(self) -> f64 {
        match self {
            Handedness::Right => 1.0,
            Handedness::Left => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FingerId {
    Thumb,
    Index,
    Middle,
    Ring,
    Little,
}

impl FingerId {
    pub const ALL: [FingerId; 5] = [
        FingerId::Thumb,
        FingerId::Index,
        FingerId::Middle,
        FingerId::Ring,
        FingerId::Little,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FingerId::Thumb => "thumb",
            FingerId::Index => "index",
            FingerId::Middle => "middle",
            FingerId::Ring => "ring",
            FingerId::Little => "little",
        }
    }

    /// Root, two intermediate joints and the tip site, proximal to distal.
    pub fn chain(self) -> [JointId; 4] {
        use JointId::*;
        match self {
            FingerId::Thumb => [ThumbCmc, ThumbMcp, ThumbIp, ThumbTip],
            FingerId::Index => [IndexMcp, IndexPip, IndexDip, IndexTip],
            FingerId::Middle => [MiddleMcp, MiddlePip, MiddleDip, MiddleTip],
            FingerId::Ring => [RingMcp, RingPip, RingDip, RingTip],
            FingerId::Little => [LittleMcp, LittlePip, LittleDip, LittleTip],
        }
    }

    pub fn root(self) -> JointId {
        self.chain()[0]
    }
}

impl fmt::Display for FingerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FingerId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FingerId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown finger `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JointId {
    Wrist,
    ThumbCmc,
    ThumbMcp,
    ThumbIp,
    ThumbTip,
    IndexMcp,
    IndexPip,
    IndexDip,
    IndexTip,
    MiddleMcp,
    MiddlePip,
    MiddleDip,
    MiddleTip,
    RingMcp,
    RingPip,
    RingDip,
    RingTip,
    LittleMcp,
    LittlePip,
    LittleDip,
    LittleTip,
}

impl JointId {
    pub const COUNT: usize = 21;

    pub const ALL: [JointId; JointId::COUNT] = {
        use JointId::*;
        [
            Wrist, ThumbCmc, ThumbMcp, ThumbIp, ThumbTip, IndexMcp, IndexPip, IndexDip, IndexTip,
            MiddleMcp, MiddlePip, MiddleDip, MiddleTip, RingMcp, RingPip, RingDip, RingTip,
            LittleMcp, LittlePip, LittleDip, LittleTip,
        ]
    };

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        use JointId::*;
        match self {
            Wrist => "wrist",
            ThumbCmc => "thumb_cmc",
            ThumbMcp => "thumb_mcp",
            ThumbIp => "thumb_ip",
            ThumbTip => "thumb_tip",
            IndexMcp => "index_mcp",
            IndexPip => "index_pip",
            IndexDip => "index_dip",
            IndexTip => "index_tip",
            MiddleMcp => "middle_mcp",
            MiddlePip => "middle_pip",
            MiddleDip => "middle_dip",
            MiddleTip => "middle_tip",
            RingMcp => "ring_mcp",
            RingPip => "ring_pip",
            RingDip => "ring_dip",
            RingTip => "ring_tip",
            LittleMcp => "little_mcp",
            LittlePip => "little_pip",
            LittleDip => "little_dip",
            LittleTip => "little_tip",
        }
    }

    pub fn is_tip(self) -> bool {
        use JointId::*;
        matches!(self, ThumbTip | IndexTip | MiddleTip | RingTip | LittleTip)
    }

    /// Joints that can carry a rotation: everything except the wrist and the tips.
    pub fn is_rotating(self) -> bool {
        self != JointId::Wrist && !self.is_tip()
    }

    pub fn finger(self) -> Option<FingerId> {
        FingerId::ALL
            .into_iter()
            .find(|f| f.chain().contains(&self))
    }

    pub fn parent(self) -> Option<JointId> {
        if self == JointId::Wrist {
            return None;
        }
        let chain = self.finger()?.chain();
        let pos = chain.iter().position(|&j| j == self)?;
        Some(if pos == 0 { JointId::Wrist } else { chain[pos - 1] })
    }

    pub fn child(self) -> Option<JointId> {
        let chain = self.finger()?.chain();
        let pos = chain.iter().position(|&j| j == self)?;
        chain.get(pos + 1).copied()
    }
}

impl fmt::Display for JointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for JointId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        JointId::ALL
            .into_iter()
            .find(|j| j.name() == s)
            .ok_or_else(|| format!("unknown joint `{s}`"))
    }
}

/// Orientation (columns are the X, Y, Z axes) and origin of a joint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointFrame {
    pub rotation: Matrix3<f64>,
    pub origin: Vec3,
}

impl JointFrame {
    pub fn right(&self) -> Vec3 {
        self.rotation.column(0).into()
    }

    pub fn up(&self) -> Vec3 {
        self.rotation.column(1).into()
    }

    pub fn forward(&self) -> Vec3 {
        self.rotation.column(2).into()
    }

    pub fn axis(&self, axis: Axis) -> Vec3 {
        match axis {
            Axis::X => self.right(),
            Axis::Y => self.up(),
        }
    }

    /// Largest entry of `R * R^T - I`.
    pub fn orthonormality_error(&self) -> f64 {
        (self.rotation * self.rotation.transpose() - Matrix3::identity()).amax()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HandModel {
    handedness: Handedness,
    thickness: f64,
    positions: [Vec3; JointId::COUNT],
    frames: [Option<JointFrame>; JointId::COUNT],
    rom: RomSpec,
}

impl HandModel {
    /// Builds a hand from rest joint positions (the grasp pose).
    pub fn from_joint_positions(
        positions: &BTreeMap<JointId, Vec3>,
        thickness: f64,
        rom: RomSpec,
        handedness: Handedness,
    ) -> Result<Self, HandError> {
        let mut table = [Vec3::zeros(); JointId::COUNT];
        for joint in JointId::ALL {
            let p = positions
                .get(&joint)
                .ok_or(HandError::MissingJoint(joint))?;
            if !p.iter().all(|c| c.is_finite()) {
                return Err(HandError::NonFiniteInput(joint.name().to_string()));
            }
            table[joint.index()] = *p;
        }
        Self::from_table(table, thickness, rom, handedness)
    }

    /// Builds a hand on the flat-hand template from segment measurements.
    pub fn from_measurements(
        measurements: &HandMeasurements,
        thickness: f64,
        rom: RomSpec,
        handedness: Handedness,
    ) -> Result<Self, HandError> {
        let table = measurements.layout(handedness)?;
        Self::from_table(table, thickness, rom, handedness)
    }

    /// Right hand on the template with default measurements and default RoM.
    pub fn canonical_right() -> Self {
        Self::from_measurements(
            &HandMeasurements::default(),
            DEFAULT_THICKNESS_MM,
            RomSpec::defaults(),
            Handedness::Right,
        )
        .expect("default template is valid")
    }

    fn from_table(
        positions: [Vec3; JointId::COUNT],
        thickness: f64,
        rom: RomSpec,
        handedness: Handedness,
    ) -> Result<Self, HandError> {
        if !thickness.is_finite() {
            return Err(HandError::NonFiniteInput("thickness".into()));
        }
        if thickness <= 0.0 {
            return Err(HandError::NonPositiveLength(format!(
                "thickness {thickness} mm"
            )));
        }
        rom.validate()?;
        let frames = compute_frames(&positions, handedness)?;
        Ok(Self {
            handedness,
            thickness,
            positions,
            frames,
            rom,
        })
    }

    pub fn handedness(&self) -> Handedness {
        self.handedness
    }

    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    /// Radius of every hand capsule.
    pub fn segment_radius(&self) -> f64 {
        self.thickness / 2.0
    }

    pub fn rom(&self) -> &RomSpec {
        &self.rom
    }

    pub fn position(&self, joint: JointId) -> Vec3 {
        self.positions[joint.index()]
    }

    pub fn positions(&self) -> BTreeMap<JointId, Vec3> {
        JointId::ALL
            .into_iter()
            .map(|j| (j, self.position(j)))
            .collect()
    }

    /// Frame of a skeletal joint. Tips have none.
    pub fn frame(&self, joint: JointId) -> Option<&JointFrame> {
        self.frames[joint.index()].as_ref()
    }

    pub fn with_rom(&self, rom: RomSpec) -> Result<Self, HandError> {
        rom.validate()?;
        Ok(Self {
            rom,
            ..self.clone()
        })
    }

    /// Kinematic chain of one finger with its explored axes and grid bounds.
    pub fn chain(&self, finger: FingerId) -> FingerChain {
        FingerChain::new(self, finger)
    }

    /// Forward kinematics of one finger at a configuration.
    pub fn forward_kinematics(
        &self,
        finger: FingerId,
        config: &FingerConfiguration,
        step_deg: f64,
    ) -> Result<FingerPose, HandError> {
        let chain = self.chain(finger);
        chain.check(config, step_deg)?;
        Ok(chain.pose(config, step_deg))
    }

    /// Reflection through the YZ plane. Positions have X negated, frames are
    /// recomputed, handedness flips and abduction (Y) ranges are negated so
    /// that the mirrored configuration grid maps onto the original one.
    pub fn mirror(&self) -> Self {
        let mut positions = self.positions;
        for p in positions.iter_mut() {
            p.x = -p.x;
        }
        let handedness = self.handedness.flipped();
        let frames = compute_frames(&positions, handedness)
            .expect("mirroring preserves frame validity");
        Self {
            handedness,
            thickness: self.thickness,
            positions,
            frames,
            rom: self.rom.mirrored(),
        }
    }

    /// Uniformly scales rest positions and thickness; angles are unchanged.
    pub fn scaled(&self, s: f64) -> Result<Self, HandError> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(HandError::NonPositiveLength(format!("scale {s}")));
        }
        let mut positions = self.positions;
        for p in positions.iter_mut() {
            *p *= s;
        }
        Self::from_table(positions, self.thickness * s, self.rom.clone(), self.handedness)
    }

    /// Same model with every rest position moved by a rigid transform.
    pub fn transformed(&self, rotation: &Matrix3<f64>, translation: &Vec3) -> Result<Self, HandError> {
        let mut positions = self.positions;
        for p in positions.iter_mut() {
            *p = rotation * *p + translation;
        }
        Self::from_table(positions, self.thickness, self.rom.clone(), self.handedness)
    }

    /// Centroid of the four MCPs and the thumb CMC.
    pub fn centroid(&self) -> Vec3 {
        hand_centroid(&self.positions)
    }

    /// Palm collision body: wrist to every finger root, plus the rim joining
    /// neighbouring MCPs. Returned as (endpoint joint, endpoint joint) pairs.
    pub fn palm_segments() -> [(JointId, JointId); 8] {
        use JointId::*;
        [
            (Wrist, ThumbCmc),
            (Wrist, IndexMcp),
            (Wrist, MiddleMcp),
            (Wrist, RingMcp),
            (Wrist, LittleMcp),
            (IndexMcp, MiddleMcp),
            (MiddleMcp, RingMcp),
            (RingMcp, LittleMcp),
        ]
    }
}

fn hand_centroid(positions: &[Vec3; JointId::COUNT]) -> Vec3 {
    let roots = FingerId::ALL.map(|f| positions[f.root().index()]);
    roots.iter().fold(Vec3::zeros(), |acc, p| acc + p) / roots.len() as f64
}

fn unit_between(
    positions: &[Vec3; JointId::COUNT],
    from: JointId,
    to: JointId,
) -> Result<Vec3, HandError> {
    let d = positions[to.index()] - positions[from.index()];
    let n = d.norm();
    if !(n > COINCIDENT_MM) {
        return Err(HandError::DegenerateSegment(from, to));
    }
    Ok(d / n)
}

/// Orthonormal frame from a forward axis and an approximate right axis.
fn frame_from(
    forward: Vec3,
    right_hint: Vec3,
    origin: Vec3,
    joint: JointId,
    other: JointId,
) -> Result<JointFrame, HandError> {
    let x = right_hint - forward * right_hint.dot(&forward);
    let n = x.norm();
    if !(n > 1e-9 * right_hint.norm().max(1.0)) {
        return Err(HandError::DegenerateSegment(joint, other));
    }
    let x = x / n;
    let y = forward.cross(&x);
    Ok(JointFrame {
        rotation: Matrix3::from_columns(&[x, y, forward]),
        origin,
    })
}

fn compute_frames(
    positions: &[Vec3; JointId::COUNT],
    handedness: Handedness,
) -> Result<[Option<JointFrame>; JointId::COUNT], HandError> {
    use JointId::*;

    for finger in FingerId::ALL {
        let chain = finger.chain();
        unit_between(positions, Wrist, chain[0])?;
        for pair in chain.windows(2) {
            unit_between(positions, pair[0], pair[1])?;
        }
    }

    let side = unit_between(positions, LittleMcp, IndexMcp)? * handedness.side_sign();

    let cmc_mcp = positions[ThumbMcp.index()] - positions[ThumbCmc.index()];
    let mcp_ip = positions[ThumbIp.index()] - positions[ThumbMcp.index()];
    let thumb_side = cmc_mcp.cross(&mcp_ip);
    if !(thumb_side.norm() > 1e-9 * cmc_mcp.norm() * mcp_ip.norm()) {
        return Err(HandError::DegenerateSegment(ThumbMcp, ThumbIp));
    }
    let thumb_side = thumb_side.normalize();

    let mut frames = [None; JointId::COUNT];

    let wrist = positions[Wrist.index()];
    let centroid = hand_centroid(positions);
    let to_centroid = centroid - wrist;
    if !(to_centroid.norm() > COINCIDENT_MM) {
        return Err(HandError::DegenerateSegment(Wrist, MiddleMcp));
    }
    frames[Wrist.index()] = Some(frame_from(
        to_centroid.normalize(),
        side,
        wrist,
        Wrist,
        MiddleMcp,
    )?);

    for finger in FingerId::ALL {
        let chain = finger.chain();
        let hint = if finger == FingerId::Thumb {
            thumb_side
        } else {
            side
        };
        for pair in chain.windows(2) {
            let forward = unit_between(positions, pair[0], pair[1])?;
            frames[pair[0].index()] = Some(frame_from(
                forward,
                hint,
                positions[pair[0].index()],
                pair[0],
                pair[1],
            )?);
        }
    }
    Ok(frames)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Rotation3;

    fn canonical() -> HandModel {
        HandModel::canonical_right()
    }

    #[test]
    fn hierarchy_is_rooted_at_wrist() {
        for joint in JointId::ALL {
            let mut j = joint;
            let mut hops = 0;
            while let Some(p) = j.parent() {
                j = p;
                hops += 1;
            }
            assert_eq!(j, JointId::Wrist);
            assert!(hops <= 4);
        }
        assert_eq!(JointId::IndexPip.parent(), Some(JointId::IndexMcp));
        assert_eq!(JointId::ThumbCmc.parent(), Some(JointId::Wrist));
        assert_eq!(JointId::ThumbIp.child(), Some(JointId::ThumbTip));
        assert_eq!(JointId::ALL.iter().filter(|j| j.is_rotating()).count(), 15);
    }

    #[test]
    fn joint_names_round_trip() {
        for j in JointId::ALL {
            assert_eq!(j.name().parse::<JointId>().unwrap(), j);
            let json = serde_json::to_string(&j).unwrap();
            assert_eq!(json, format!("\"{}\"", j.name()));
        }
    }

    #[test]
    fn canonical_index_frame_is_axis_aligned() {
        let hand = canonical();
        let f = hand.frame(JointId::IndexMcp).unwrap();
        assert!((f.forward() - Vec3::z()).norm() < 1e-12);
        assert!((f.right() - Vec3::x()).norm() < 1e-12);
        assert!((f.up() - Vec3::y()).norm() < 1e-12);
    }

    #[test]
    fn frames_are_orthonormal() {
        let hand = canonical();
        for j in JointId::ALL {
            match hand.frame(j) {
                Some(f) => {
                    assert!(f.orthonormality_error() < 1e-6, "{j}");
                    assert!((f.rotation.determinant() - 1.0).abs() < 1e-9);
                }
                None => assert!(j.is_tip()),
            }
        }
    }

    #[test]
    fn wrist_points_at_centroid() {
        let hand = canonical();
        let f = hand.frame(JointId::Wrist).unwrap();
        let expected = (hand.centroid() - hand.position(JointId::Wrist)).normalize();
        assert!((f.forward() - expected).norm() < 1e-12);
    }

    #[test]
    fn doubling_positions_keeps_orientations() {
        let hand = canonical();
        let doubled: BTreeMap<_, _> = hand.positions().into_iter().map(|(j, p)| (j, p * 2.0)).collect();
        let big = HandModel::from_joint_positions(&doubled, 22.0, RomSpec::defaults(), Handedness::Right)
            .unwrap();
        for j in JointId::ALL.into_iter().filter(|j| !j.is_tip()) {
            let a = hand.frame(j).unwrap();
            let b = big.frame(j).unwrap();
            assert!((a.rotation - b.rotation).amax() < 1e-12, "{j}");
            assert_eq!(b.origin, a.origin * 2.0);
        }
    }

    #[test]
    fn thumb_right_is_hand_computed_cross_product() {
        let hand = canonical();
        let cmc = hand.position(JointId::ThumbCmc);
        let mcp = hand.position(JointId::ThumbMcp);
        let ip = hand.position(JointId::ThumbIp);
        let (a, b) = (mcp - cmc, ip - mcp);
        // Written out component-wise rather than through nalgebra's cross.
        let c = Vec3::new(
            a.y * b.z - a.z * b.y,
            a.z * b.x - a.x * b.z,
            a.x * b.y - a.y * b.x,
        );
        let c = c / (c.x * c.x + c.y * c.y + c.z * c.z).sqrt();
        for j in [JointId::ThumbCmc, JointId::ThumbMcp] {
            let r = hand.frame(j).unwrap().right();
            assert!((r - c).norm() < 1e-12, "{j}: {r:?} vs {c:?}");
        }
        // Flat template thumb lies in the palm plane, so its right axis is -Y.
        assert!((c - Vec3::new(0.0, -1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn missing_joint_is_reported() {
        let mut positions = canonical().positions();
        positions.remove(&JointId::RingDip);
        let err = HandModel::from_joint_positions(&positions, 20.0, RomSpec::defaults(), Handedness::Right)
            .unwrap_err();
        assert_eq!(err, HandError::MissingJoint(JointId::RingDip));
    }

    #[test]
    fn coincident_joints_are_degenerate() {
        let mut positions = canonical().positions();
        let pip = positions[&JointId::MiddlePip];
        positions.insert(JointId::MiddleDip, pip);
        let err = HandModel::from_joint_positions(&positions, 20.0, RomSpec::defaults(), Handedness::Right)
            .unwrap_err();
        assert_eq!(
            err,
            HandError::DegenerateSegment(JointId::MiddlePip, JointId::MiddleDip)
        );
    }

    #[test]
    fn collinear_thumb_is_degenerate() {
        let mut positions = canonical().positions();
        let cmc = positions[&JointId::ThumbCmc];
        let mcp = positions[&JointId::ThumbMcp];
        positions.insert(JointId::ThumbIp, mcp + (mcp - cmc));
        let err = HandModel::from_joint_positions(&positions, 20.0, RomSpec::defaults(), Handedness::Right)
            .unwrap_err();
        assert_eq!(err, HandError::DegenerateSegment(JointId::ThumbMcp, JointId::ThumbIp));
    }

    #[test]
    fn non_finite_positions_are_rejected() {
        let mut positions = canonical().positions();
        positions.insert(JointId::IndexTip, Vec3::new(f64::NAN, 0.0, 0.0));
        assert!(matches!(
            HandModel::from_joint_positions(&positions, 20.0, RomSpec::defaults(), Handedness::Right),
            Err(HandError::NonFiniteInput(_))
        ));
    }

    #[test]
    fn mirror_negates_x_and_is_an_involution() {
        let hand = canonical();
        let left = hand.mirror();
        assert_eq!(left.handedness(), Handedness::Left);
        let p = hand.position(JointId::IndexMcp);
        let q = left.position(JointId::IndexMcp);
        assert_eq!(q, Vec3::new(-p.x, p.y, p.z));
        assert_eq!(left.mirror(), hand);
    }

    #[test]
    fn rigid_motion_rotates_frames() {
        let hand = canonical();
        let rot = Rotation3::from_euler_angles(0.3, -1.1, 0.7).into_inner();
        let moved = hand.transformed(&rot, &Vec3::new(5.0, -3.0, 12.0)).unwrap();
        for j in JointId::ALL.into_iter().filter(|j| !j.is_tip()) {
            let a = rot * hand.frame(j).unwrap().rotation;
            let b = moved.frame(j).unwrap().rotation;
            assert!((a - b).amax() < 1e-9, "{j}");
        }
    }
}
