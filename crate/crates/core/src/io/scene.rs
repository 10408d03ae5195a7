//! Grasp scene: hand, grasp pose, object, blockers and settings.
//!
//! The JSON form (`schema_version: 1`):
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "coordinate_system": "right_handed",
//!   "labels": { "object_name": "screwdriver", "grasp_id": 17 },
//!   "hand": {
//!     "handedness": "right",
//!     "thickness_mm": 22.0,
//!     "joints": { "wrist": [0, 0, 0], "thumb_cmc": [30, 0, 19], "...": [] }
//!   },
//!   "rom": [ { "joint": "index_dip", "axis": "x", "min_deg": 0, "max_deg": 90 } ],
//!   "object": { "mesh": "screwdriver.obj",
//!               "transform": { "translation": [0, -20, 60], "rotation_deg": [0, 0, 90], "scale": 1 } },
//!   "fingers": ["thumb", "index"],
//!   "blockers": [ { "mode": "exclude_points", "shape": { "sphere": { "center": [0, 0, 0], "radius_mm": 5 } } } ],
//!   "settings": { "step_deg": 5, "epsilon_mm": 0.5, "dedupe_mm": 0, "max_configurations": 5000000 }
//! }
//! ```
//!
//! `hand` takes either `joints` (all 21 sites, the grasp pose itself) or
//! `measurements` (flat-hand template). `rom` entries are relative to the
//! grasp pose; leaving `rom` out applies the tool defaults, listing it locks
//! every axis that is not mentioned. Paths are relative to the scene file.
//! With `"coordinate_system": "left_handed"` every input coordinate has its X
//! negated on load.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use nalgebra::{Matrix3, Rotation3};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::geometry::{Aabb, Blocker, BlockerMode, BlockerShape, MeshError, MeshShape, TriangleMesh};
use crate::hand::{
    FingerId, HandError, HandMeasurements, HandModel, Handedness, JointId, RomEntry, RomSpec,
    DEFAULT_THICKNESS_MM,
};
use crate::simulator::SimulationSettings;
use crate::Vec3;

pub const SCHEMA_VERSION: u32 = 1;
/// Size of the grasp taxonomy that `grasp_id` indexes.
pub const GRASP_TYPES: u8 = 33;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SceneError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("mesh not found: {}", .0.display())]
    MeshNotFound(PathBuf),
    #[error("mesh {}: {error}", .path.display())]
    Mesh { path: PathBuf, error: MeshError },
    #[error("invalid range of motion: {0}")]
    InvalidRom(String),
    #[error("invalid hand: {0}")]
    Hand(HandError),
    #[error("invalid settings: {0}")]
    Settings(String),
}

impl SceneError {
    /// Short machine-friendly kind, used in batch manifests.
    pub fn kind(&self) -> &'static str {
        match self {
            SceneError::Io { .. } => "IoError",
            SceneError::Parse { .. } => "ParseError",
            SceneError::Schema(_) => "SchemaError",
            SceneError::MeshNotFound(_) => "MeshNotFound",
            SceneError::Mesh { .. } => "MeshError",
            SceneError::InvalidRom(_) => "InvalidRom",
            SceneError::Hand(_) => "InvalidHand",
            SceneError::Settings(_) => "InvalidSettings",
        }
    }
}

impl From<HandError> for SceneError {
    fn from(e: HandError) -> Self {
        match e {
            HandError::InvalidRom(m) => SceneError::InvalidRom(m),
            other => SceneError::Hand(other),
        }
    }
}

fn json_error(e: serde_json::Error) -> SceneError {
    use serde_json::error::Category;
    match e.classify() {
        Category::Data => SceneError::Schema(e.to_string()),
        _ => SceneError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordinateSystem {
    #[default]
    RightHanded,
    LeftHanded,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneLabels {
    pub object_name: Option<String>,
    pub grasp_id: Option<u8>,
}

impl SceneLabels {
    /// Output file stem: `<object_name>_grasp<NN>`.
    pub fn stem(&self) -> String {
        let object = self.object_name.as_deref().unwrap_or("scene");
        match self.grasp_id {
            Some(g) => format!("{object}_grasp{g:02}"),
            None => object.to_string(),
        }
    }
}

impl fmt::Display for SceneLabels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.stem())
    }
}

// ---- document types -------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDocument {
    pub schema_version: u32,
    #[serde(default)]
    pub coordinate_system: CoordinateSystem,
    #[serde(default)]
    pub labels: LabelsDocument,
    pub hand: HandDocument,
    #[serde(default)]
    pub rom: Option<Vec<RomEntry>>,
    #[serde(default)]
    pub object: Option<ObjectDocument>,
    #[serde(default)]
    pub fingers: Option<Vec<FingerId>>,
    #[serde(default)]
    pub blockers: Vec<BlockerDocument>,
    #[serde(default)]
    pub settings: SettingsDocument,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelsDocument {
    pub object_name: Option<String>,
    pub grasp_id: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HandDocument {
    #[serde(default = "default_handedness")]
    pub handedness: Handedness,
    pub thickness_mm: Option<f64>,
    pub joints: Option<BTreeMap<JointId, [f64; 3]>>,
    pub measurements: Option<HandMeasurements>,
}

fn default_handedness() -> Handedness {
    Handedness::Right
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectDocument {
    pub mesh: String,
    #[serde(default)]
    pub transform: TransformDocument,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransformDocument {
    pub translation: [f64; 3],
    /// Extrinsic X, then Y, then Z rotation, degrees.
    pub rotation_deg: [f64; 3],
    pub scale: f64,
}

impl Default for TransformDocument {
    fn default() -> Self {
        Self {
            translation: [0.0; 3],
            rotation_deg: [0.0; 3],
            scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockerDocument {
    pub mode: BlockerMode,
    pub shape: ShapeDocument,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeDocument {
    Box { min: [f64; 3], max: [f64; 3] },
    Sphere { center: [f64; 3], radius_mm: f64 },
    Mesh { path: String },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingsDocument {
    pub step_deg: Option<f64>,
    pub epsilon_mm: Option<f64>,
    pub dedupe_mm: Option<f64>,
    pub max_configurations: Option<u64>,
}

// ---- resolved scene -------------------------------------------------------

/// A validated scene, ready to simulate.
#[derive(Debug, Clone)]
pub struct GraspScene {
    pub hand: HandModel,
    pub object: Option<MeshShape>,
    pub blockers: Vec<Blocker>,
    pub settings: SimulationSettings,
    pub labels: SceneLabels,
    /// SHA-256 over the resolved scene content.
    pub content_hash: String,
}

impl GraspScene {
    pub fn new(
        hand: HandModel,
        object: Option<TriangleMesh>,
        blockers: Vec<Blocker>,
        settings: SimulationSettings,
        labels: SceneLabels,
    ) -> Result<Self, SceneError> {
        settings
            .validate()
            .map_err(|e| SceneError::Settings(e.to_string()))?;
        if let Some(g) = labels.grasp_id {
            if !(1..=GRASP_TYPES).contains(&g) {
                return Err(SceneError::Schema(format!(
                    "grasp_id {g} outside 1..={GRASP_TYPES}"
                )));
            }
        }
        let mut scene = Self {
            hand,
            object: object.map(MeshShape::new),
            blockers,
            settings,
            labels,
            content_hash: String::new(),
        };
        scene.content_hash = scene.compute_hash();
        Ok(scene)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SceneError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| SceneError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
        Self::from_json_str(&text, &base)
    }

    /// Parses a scene; mesh paths resolve against `base_dir`.
    pub fn from_json_str(text: &str, base_dir: &Path) -> Result<Self, SceneError> {
        let doc = parse_document(text)?;
        Self::from_document(&doc, &mut |rel: &str| {
            let path = base_dir.join(rel);
            let file = std::fs::File::open(&path).map_err(|_| SceneError::MeshNotFound(path.clone()))?;
            let name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
            TriangleMesh::from_obj_reader(&mut std::io::BufReader::new(file), name)
                .map_err(|error| SceneError::Mesh { path, error })
        })
    }

    /// Resolves a parsed document; `meshes` maps a mesh path to its mesh.
    pub fn from_document(
        doc: &SceneDocument,
        meshes: &mut dyn FnMut(&str) -> Result<TriangleMesh, SceneError>,
    ) -> Result<Self, SceneError> {
        if doc.schema_version != SCHEMA_VERSION {
            return Err(SceneError::Schema(format!(
                "unsupported schema_version {}, expected {SCHEMA_VERSION}",
                doc.schema_version
            )));
        }
        let flip = doc.coordinate_system == CoordinateSystem::LeftHanded;
        let point = |p: [f64; 3]| {
            let v = Vec3::from(p);
            if flip {
                Vec3::new(-v.x, v.y, v.z)
            } else {
                v
            }
        };

        let labels = resolve_labels(&doc.labels)?;

        let rom = match &doc.rom {
            Some(entries) => RomSpec::new(entries.clone())?,
            None => RomSpec::defaults(),
        };
        let thickness = doc.hand.thickness_mm.unwrap_or(DEFAULT_THICKNESS_MM);
        let hand = match (&doc.hand.joints, &doc.hand.measurements) {
            (Some(joints), None) => {
                let positions: BTreeMap<JointId, Vec3> =
                    joints.iter().map(|(&j, &p)| (j, point(p))).collect();
                HandModel::from_joint_positions(&positions, thickness, rom, doc.hand.handedness)?
            }
            (None, Some(m)) => HandModel::from_measurements(m, thickness, rom, doc.hand.handedness)?,
            _ => {
                return Err(SceneError::Schema(
                    "hand needs exactly one of `joints` or `measurements`".into(),
                ))
            }
        };

        let object = match &doc.object {
            Some(o) => {
                let t = &o.transform;
                if !(t.scale > 0.0 && t.scale.is_finite()) {
                    return Err(SceneError::Schema(format!(
                        "object transform scale must be positive, got {}",
                        t.scale
                    )));
                }
                let rotation = rotation_from_degrees(t.rotation_deg);
                let mesh = meshes(&o.mesh)?.transformed(&rotation, &Vec3::from(t.translation), t.scale);
                Some(if flip { mesh.mirrored_x() } else { mesh })
            }
            None => None,
        };

        let mut blockers = Vec::with_capacity(doc.blockers.len());
        for (i, b) in doc.blockers.iter().enumerate() {
            let shape = match &b.shape {
                ShapeDocument::Box { min, max } => {
                    let (a, c) = (point(*min), point(*max));
                    let bx = Aabb { min: a.inf(&c), max: a.sup(&c) };
                    if !(0..3).all(|k| bx.min[k] < bx.max[k]) {
                        return Err(SceneError::Schema(format!("blocker {i}: box has zero volume")));
                    }
                    BlockerShape::Box(bx)
                }
                ShapeDocument::Sphere { center, radius_mm } => {
                    if !(*radius_mm > 0.0 && radius_mm.is_finite()) {
                        return Err(SceneError::Schema(format!(
                            "blocker {i}: sphere radius must be positive"
                        )));
                    }
                    BlockerShape::Sphere {
                        center: point(*center),
                        radius: *radius_mm,
                    }
                }
                ShapeDocument::Mesh { path } => {
                    let mesh = meshes(path)?;
                    BlockerShape::Mesh(MeshShape::new(if flip { mesh.mirrored_x() } else { mesh }))
                }
            };
            blockers.push(Blocker::new(shape, b.mode));
        }

        let defaults = SimulationSettings::default();
        let s = &doc.settings;
        let settings = SimulationSettings {
            step_deg: s.step_deg.unwrap_or(defaults.step_deg),
            epsilon_mm: s.epsilon_mm.unwrap_or(defaults.epsilon_mm),
            fingers: doc.fingers.clone().unwrap_or(defaults.fingers),
            dedupe_mm: s.dedupe_mm.unwrap_or(defaults.dedupe_mm),
            max_configurations: s.max_configurations.unwrap_or(defaults.max_configurations),
        };

        Self::new(hand, object, blockers, settings, labels)
    }

    /// Same scene with different settings.
    pub fn with_settings(&self, settings: SimulationSettings) -> Result<Self, SceneError> {
        settings
            .validate()
            .map_err(|e| SceneError::Settings(e.to_string()))?;
        let mut scene = Self {
            settings,
            ..self.clone()
        };
        scene.content_hash = scene.compute_hash();
        Ok(scene)
    }

    /// Uniformly scales every length in the scene, including the collision
    /// tolerance and dedupe voxel. Angles are untouched.
    pub fn scaled(&self, s: f64) -> Result<Self, SceneError> {
        let hand = self.hand.scaled(s)?;
        let object = self.object.as_ref().map(|m| m.mesh().scaled(s));
        let blockers = self.blockers.iter().map(|b| b.scaled(s)).collect();
        let mut settings = self.settings.clone();
        settings.epsilon_mm *= s;
        settings.dedupe_mm *= s;
        Self::new(hand, object, blockers, settings, self.labels.clone())
    }

    /// Reflection through the YZ plane: left hand for right and vice versa.
    pub fn mirrored(&self) -> Self {
        let hand = self.hand.mirror();
        let object = self.object.as_ref().map(|m| m.mesh().mirrored_x());
        let blockers = self.blockers.iter().map(|b| b.mirrored_x()).collect();
        Self::new(hand, object, blockers, self.settings.clone(), self.labels.clone())
            .expect("mirroring keeps a valid scene valid")
    }

    fn compute_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(b"gravkit-scene-v1");
        h.update([self.hand.handedness() as u8]);
        h.update(self.hand.thickness().to_le_bytes());
        for j in JointId::ALL {
            for c in self.hand.position(j).iter() {
                h.update(c.to_le_bytes());
            }
        }
        h.update(serde_json::to_vec(self.hand.rom()).expect("rom serializes"));
        match &self.object {
            Some(m) => {
                h.update(b"object");
                h.update(m.mesh().content_bytes());
            }
            None => h.update(b"no-object"),
        }
        for b in &self.blockers {
            h.update([b.mode as u8]);
            match &b.shape {
                BlockerShape::Box(bx) => {
                    h.update(b"box");
                    for c in bx.min.iter().chain(bx.max.iter()) {
                        h.update(c.to_le_bytes());
                    }
                }
                BlockerShape::Sphere { center, radius } => {
                    h.update(b"sphere");
                    for c in center.iter().chain(std::iter::once(radius)) {
                        h.update(c.to_le_bytes());
                    }
                }
                BlockerShape::Mesh(m) => {
                    h.update(b"mesh");
                    h.update(m.mesh().content_bytes());
                }
            }
        }
        h.update(serde_json::to_vec(&self.settings).expect("settings serialize"));
        h.update(serde_json::to_vec(&self.labels).expect("labels serialize"));
        hex::encode(h.finalize())
    }
}

pub fn parse_document(text: &str) -> Result<SceneDocument, SceneError> {
    serde_json::from_str(text).map_err(json_error)
}

fn resolve_labels(doc: &LabelsDocument) -> Result<SceneLabels, SceneError> {
    if let Some(name) = &doc.object_name {
        let ok = !name.is_empty()
            && name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.');
        if !ok {
            return Err(SceneError::Schema(format!(
                "object_name `{name}` must be non-empty ASCII letters, digits, '_', '-' or '.'"
            )));
        }
    }
    let grasp_id = match doc.grasp_id {
        Some(g) if (1..=GRASP_TYPES as i64).contains(&g) => Some(g as u8),
        Some(g) => {
            return Err(SceneError::Schema(format!(
                "grasp_id {g} outside 1..={GRASP_TYPES}"
            )))
        }
        None => None,
    };
    Ok(SceneLabels {
        object_name: doc.object_name.clone(),
        grasp_id,
    })
}

/// Rotation matrix for extrinsic X, Y, Z Euler angles in degrees.
pub fn rotation_from_degrees(deg: [f64; 3]) -> Matrix3<f64> {
    let [rx, ry, rz] = deg.map(f64::to_radians);
    Rotation3::from_euler_angles(rx, ry, rz).into_inner()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(extra: &str) -> String {
        format!(
            r#"{{
  "schema_version": 1,
  "hand": {{ "measurements": {{
      "breadth_mm": 80, "palm_length_mm": 95,
      "segments": {{ "thumb": [45,32,27], "index": [43,25,20], "middle": [48,29,21],
                     "ring": [45,28,21], "little": [35,20,18] }} }} }}{extra}
}}"#
        )
    }

    fn tri_resolver(_: &str) -> Result<TriangleMesh, SceneError> {
        Ok(TriangleMesh::new(
            vec![Vec3::new(0.0, -50.0, 0.0), Vec3::new(10.0, -50.0, 0.0), Vec3::new(0.0, -50.0, 10.0)],
            vec![[0, 1, 2]],
            Some("tri".into()),
        )
        .unwrap())
    }

    fn load(text: &str) -> Result<GraspScene, SceneError> {
        GraspScene::from_document(&parse_document(text)?, &mut tri_resolver)
    }

    #[test]
    fn minimal_scene_gets_defaults() {
        let scene = load(&minimal(r#", "object": { "mesh": "tri.obj" }"#)).unwrap();
        assert_eq!(scene.settings.step_deg, 5.0);
        assert_eq!(scene.settings.epsilon_mm, 0.5);
        assert_eq!(scene.settings.fingers, FingerId::ALL.to_vec());
        assert_eq!(scene.hand.thickness(), DEFAULT_THICKNESS_MM);
        assert_eq!(scene.hand.rom(), &RomSpec::defaults());
        assert!(scene.object.is_some());
        assert_eq!(scene.content_hash.len(), 64);
    }

    #[test]
    fn grasp_id_out_of_range_is_a_schema_error() {
        let err = load(&minimal(r#", "labels": { "object_name": "mug", "grasp_id": 34 }"#)).unwrap_err();
        assert!(matches!(err, SceneError::Schema(_)), "{err}");
        let err = load(&minimal(r#", "labels": { "object_name": "mug", "grasp_id": 0 }"#)).unwrap_err();
        assert!(matches!(err, SceneError::Schema(_)));
        assert!(load(&minimal(r#", "labels": { "object_name": "mug", "grasp_id": 33 }"#)).is_ok());
    }

    #[test]
    fn rom_excluding_seed_is_invalid_rom() {
        let err = load(&minimal(
            r#", "rom": [ { "joint": "index_pip", "axis": "x", "min_deg": 10, "max_deg": 40 } ]"#,
        ))
        .unwrap_err();
        assert!(matches!(err, SceneError::InvalidRom(_)), "{err}");
        assert_eq!(err.kind(), "InvalidRom");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = load("{\n  \"schema_version\": 1,\n  oops\n}").unwrap_err();
        match err {
            SceneError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_schema_errors() {
        let err = load(&minimal(r#", "colour": "blue""#)).unwrap_err();
        assert!(matches!(err, SceneError::Schema(_)));
    }

    #[test]
    fn wrong_schema_version_is_rejected() {
        let text = minimal("").replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(matches!(load(&text), Err(SceneError::Schema(_))));
    }

    #[test]
    fn missing_mesh_file_names_the_path() {
        let text = minimal(r#", "object": { "mesh": "nope.obj" }"#);
        let dir = std::env::temp_dir().join("gravkit-missing-mesh");
        let err = GraspScene::from_json_str(&text, &dir).unwrap_err();
        assert_eq!(err, SceneError::MeshNotFound(dir.join("nope.obj")));
    }

    #[test]
    fn left_handed_input_negates_x() {
        let scene = load(&minimal(
            r#", "coordinate_system": "left_handed",
                "blockers": [ { "mode": "block_motion", "shape": { "box": { "min": [1,2,3], "max": [4,5,6] } } } ],
                "object": { "mesh": "tri.obj" }"#,
        ))
        .unwrap();
        match &scene.blockers[0].shape {
            BlockerShape::Box(b) => {
                assert_eq!(b.min, Vec3::new(-4.0, 2.0, 3.0));
                assert_eq!(b.max, Vec3::new(-1.0, 5.0, 6.0));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(scene.object.unwrap().mesh().vertices()[1].x, -10.0);
    }

    #[test]
    fn stem_zero_pads_grasp_id() {
        let labels = SceneLabels {
            object_name: Some("screwdriver".into()),
            grasp_id: Some(17),
        };
        assert_eq!(labels.stem(), "screwdriver_grasp17");
        let labels = SceneLabels {
            object_name: Some("mug".into()),
            grasp_id: Some(3),
        };
        assert_eq!(labels.stem(), "mug_grasp03");
    }

    #[test]
    fn hash_tracks_content() {
        let a = load(&minimal("")).unwrap();
        let b = load(&minimal(r#", "settings": { "step_deg": 10 }"#)).unwrap();
        assert_ne!(a.content_hash, b.content_hash);
        assert_eq!(a.content_hash, load(&minimal("")).unwrap().content_hash);
    }
}
