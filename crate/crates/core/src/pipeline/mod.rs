//! Batch generation of labeled volumes from a manifest of scenes.
//!
//! ```json
//! {
//!   "output_dir": "out",
//!   "formats": ["csv", "ply"],
//!   "settings": { "step_deg": 5 },
//!   "jobs": [
//!     { "scene": "screwdriver_grasp17.json" },
//!     { "object": "box", "grasp_id": 3 }
//!   ]
//! }
//! ```
//!
//! Paths are relative to the manifest. An `object`/`grasp_id` job reads
//! `<scene_dir>/<object>_grasp<NN>.json`. After a run every job carries a
//! `status` (`pending`, `done`, `failed`), the hash of its resolved inputs
//! and the SHA-256 of each output file. A rerun skips jobs that are done,
//! whose input hash is unchanged and whose outputs are intact on disk.
//!
//! Jobs run on a bounded pool of worker threads. Only the calling thread
//! touches the manifest, which is rewritten after every finished job.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::hand::FingerId;
use crate::io::scene::{GraspScene, SceneError, SceneLabels};
use crate::io::{Format, Frame};
use crate::simulator::{simulate, GravVolume, SimulationSettings};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("manifest {path}: {message}")]
    Manifest { path: PathBuf, message: String },
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

/// Settings applied on top of each scene's own.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingsOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_mm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fingers: Option<Vec<FingerId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dedupe_mm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_configurations: Option<u64>,
}

impl SettingsOverrides {
    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }

    pub fn apply(&self, base: &SimulationSettings) -> SimulationSettings {
        SimulationSettings {
            step_deg: self.step_deg.unwrap_or(base.step_deg),
            epsilon_mm: self.epsilon_mm.unwrap_or(base.epsilon_mm),
            fingers: self.fingers.clone().unwrap_or_else(|| base.fingers.clone()),
            dedupe_mm: self.dedupe_mm.unwrap_or(base.dedupe_mm),
            max_configurations: self.max_configurations.unwrap_or(base.max_configurations),
        }
    }

    /// Later values win.
    pub fn merged(&self, over: &SettingsOverrides) -> SettingsOverrides {
        SettingsOverrides {
            step_deg: over.step_deg.or(self.step_deg),
            epsilon_mm: over.epsilon_mm.or(self.epsilon_mm),
            fingers: over.fingers.clone().or_else(|| self.fingers.clone()),
            dedupe_mm: over.dedupe_mm.or(self.dedupe_mm),
            max_configurations: over.max_configurations.or(self.max_configurations),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobStatus {
    #[default]
    Pending,
    Done,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchJob {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scene: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grasp_id: Option<u8>,
    #[serde(default)]
    pub status: JobStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_hash: Option<String>,
    /// Output file name to SHA-256 of its bytes.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub outputs: BTreeMap<String, String>,
}

impl BatchJob {
    pub fn scene(path: impl Into<PathBuf>) -> Self {
        Self {
            scene: Some(path.into()),
            ..Self::default()
        }
    }

    pub fn object_grasp(object: impl Into<String>, grasp_id: u8) -> Self {
        Self {
            object: Some(object.into()),
            grasp_id: Some(grasp_id),
            ..Self::default()
        }
    }

    fn describe(&self) -> String {
        match (&self.scene, &self.object, self.grasp_id) {
            (Some(p), _, _) => p.display().to_string(),
            (None, Some(o), Some(g)) => SceneLabels {
                object_name: Some(o.clone()),
                grasp_id: Some(g),
            }
            .stem(),
            _ => "<invalid job>".into(),
        }
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Ply]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchManifest {
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scene_dir: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
    #[serde(default)]
    pub left_handed: bool,
    #[serde(default, skip_serializing_if = "SettingsOverrides::is_empty")]
    pub settings: SettingsOverrides,
    pub jobs: Vec<BatchJob>,
}

impl BatchManifest {
    pub fn new(jobs: Vec<BatchJob>) -> Self {
        Self {
            output_dir: default_output_dir(),
            scene_dir: None,
            formats: default_formats(),
            left_handed: false,
            settings: SettingsOverrides::default(),
            jobs,
        }
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let manifest: Self = serde_json::from_str(&text).map_err(|e| PipelineError::Manifest {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        if manifest.formats.is_empty() {
            return Err(PipelineError::Manifest {
                path: path.to_path_buf(),
                message: "no output formats".into(),
            });
        }
        Ok(manifest)
    }

    pub fn save(&self, path: &Path) -> Result<(), PipelineError> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("manifest serializes");
        bytes.push(b'\n');
        write_atomic(path, &bytes)
    }

    fn scene_path(&self, base: &Path, job: &BatchJob) -> Result<PathBuf, String> {
        match (&job.scene, &job.object, job.grasp_id) {
            (Some(p), None, None) => Ok(base.join(p)),
            (None, Some(o), Some(g)) => {
                let stem = SceneLabels {
                    object_name: Some(o.clone()),
                    grasp_id: Some(g),
                }
                .stem();
                let dir = base.join(self.scene_dir.as_deref().unwrap_or(Path::new("")));
                Ok(dir.join(format!("{stem}.json")))
            }
            _ => Err("Schema: a job needs either `scene` or both `object` and `grasp_id`".into()),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct BatchOptions {
    /// Worker threads; 0 means one per available core.
    pub jobs: usize,
    pub overrides: SettingsOverrides,
    pub frame: Option<Frame>,
}


#[derive(Debug, Clone, PartialEq)]
pub enum JobOutcome {
    Done { points: usize, outputs: Vec<PathBuf> },
    Skipped,
    Failed(String),
}

#[derive(Debug, Clone)]
pub struct JobReport {
    pub index: usize,
    pub label: String,
    pub outcome: JobOutcome,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Default)]
pub struct BatchReport {
    pub jobs: Vec<JobReport>,
}

impl BatchReport {
    pub fn executed(&self) -> usize {
        self.count(|o| matches!(o, JobOutcome::Done { .. }))
    }

    pub fn skipped(&self) -> usize {
        self.count(|o| matches!(o, JobOutcome::Skipped))
    }

    pub fn failed(&self) -> usize {
        self.count(|o| matches!(o, JobOutcome::Failed(_)))
    }

    fn count(&self, f: impl Fn(&JobOutcome) -> bool) -> usize {
        self.jobs.iter().filter(|j| f(&j.outcome)).count()
    }

    /// Fixed-width summary, one row per job.
    pub fn table(&self) -> String {
        let mut out = format!("{:<4} {:<32} {:<8} {:>8} {:>9}  detail\n", "#", "label", "status", "points", "time_s");
        for j in &self.jobs {
            let (status, points, detail) = match &j.outcome {
                JobOutcome::Done { points, .. } => ("done", points.to_string(), String::new()),
                JobOutcome::Skipped => ("skipped", "-".into(), "unchanged".into()),
                JobOutcome::Failed(r) => ("failed", "-".into(), r.clone()),
            };
            out.push_str(&format!(
                "{:<4} {:<32} {:<8} {:>8} {:>9.2}  {}\n",
                j.index,
                j.label,
                status,
                points,
                j.elapsed.as_secs_f64(),
                detail
            ));
        }
        out.push_str(&format!(
            "{} executed, {} skipped, {} failed\n",
            self.executed(),
            self.skipped(),
            self.failed()
        ));
        out
    }
}

/// Hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), PipelineError> {
    let io = |e: std::io::Error| PipelineError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, bytes).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}

/// Writes `<stem>.<ext>` for every format; returns (path, sha256) pairs.
pub fn write_outputs(
    volume: &GravVolume,
    stem: &str,
    out_dir: &Path,
    formats: &[Format],
    frame: Frame,
) -> Result<Vec<(PathBuf, String)>, PipelineError> {
    let mut written = Vec::new();
    let mut seen = Vec::new();
    for &f in formats {
        if seen.contains(&f) {
            continue;
        }
        seen.push(f);
        let bytes = f.encode(volume, frame);
        let path = out_dir.join(format!("{stem}.{}", f.extension()));
        write_atomic(&path, &bytes)?;
        written.push((path, sha256_hex(&bytes)));
    }
    Ok(written)
}

fn input_hash(scene: &GraspScene, formats: &[Format], frame: Frame) -> String {
    let mut h = Sha256::new();
    h.update(scene.content_hash.as_bytes());
    h.update(serde_json::to_vec(formats).expect("formats serialize"));
    h.update([frame as u8]);
    h.update(env!("CARGO_PKG_VERSION").as_bytes());
    hex::encode(h.finalize())
}

fn scene_error_reason(e: &SceneError) -> String {
    format!("{}: {e}", e.kind())
}

struct Prepared {
    scene: Option<GraspScene>,
    label: Option<String>,
    hash: Option<String>,
    error: Option<String>,
}

enum Msg {
    Prepared(usize, Box<Prepared>),
    Finished(usize, Result<(usize, Vec<(PathBuf, String)>), String>, Duration),
}

fn run_pool<T: Send>(n_items: usize, workers: usize, work: impl Fn(usize) -> T + Sync, mut sink: impl FnMut(T)) {
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel();
    std::thread::scope(|s| {
        for _ in 0..workers.max(1).min(n_items.max(1)) {
            let tx = tx.clone();
            let next = &next;
            let work = &work;
            s.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n_items {
                    break;
                }
                if tx.send(work(i)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for msg in rx {
            sink(msg);
        }
    });
}

/// Runs a manifest file in place.
pub fn run_batch(manifest_path: &Path, options: &BatchOptions) -> Result<BatchReport, PipelineError> {
    let mut manifest = BatchManifest::load(manifest_path)?;
    let base = manifest_path.parent().unwrap_or(Path::new("")).to_path_buf();
    let out_dir = base.join(&manifest.output_dir);
    let overrides = manifest.settings.merged(&options.overrides);
    let frame = options.frame.unwrap_or(if manifest.left_handed {
        Frame::LeftHanded
    } else {
        Frame::RightHanded
    });
    let formats = manifest.formats.clone();
    let workers = if options.jobs == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        options.jobs
    };

    let n = manifest.jobs.len();
    let started: Vec<Instant> = vec![Instant::now(); n];

    // Load every scene first: labels must be known to catch duplicates
    // before anything is written.
    let mut prepared: Vec<Option<Prepared>> = (0..n).map(|_| None).collect();
    {
        let jobs = &manifest.jobs;
        let manifest_ref = &manifest;
        run_pool(
            n,
            workers,
            |i| {
                let p = match manifest_ref.scene_path(&base, &jobs[i]) {
                    Err(e) => Prepared {
                        scene: None,
                        label: None,
                        hash: None,
                        error: Some(e),
                    },
                    Ok(path) => match GraspScene::load(&path).and_then(|s| {
                        let settings = overrides.apply(&s.settings);
                        s.with_settings(settings)
                    }) {
                        Ok(scene) => Prepared {
                            label: Some(scene.labels.stem()),
                            hash: Some(input_hash(&scene, &formats, frame)),
                            scene: Some(scene),
                            error: None,
                        },
                        Err(e) => Prepared {
                            scene: None,
                            label: None,
                            hash: None,
                            error: Some(scene_error_reason(&e)),
                        },
                    },
                };
                Msg::Prepared(i, Box::new(p))
            },
            |msg| {
                if let Msg::Prepared(i, p) = msg {
                    prepared[i] = Some(*p);
                }
            },
        );
    }
    let mut prepared: Vec<Prepared> = prepared.into_iter().map(|p| p.expect("every job prepared")).collect();

    let mut by_label: HashMap<String, Vec<usize>> = HashMap::new();
    for (i, p) in prepared.iter().enumerate() {
        if let Some(l) = &p.label {
            by_label.entry(l.clone()).or_default().push(i);
        }
    }
    for (label, idx) in &by_label {
        if idx.len() > 1 {
            for &i in idx {
                prepared[i].error = Some(format!(
                    "DuplicateLabel: output label `{label}` is shared by jobs {idx:?}"
                ));
                prepared[i].scene = None;
            }
        }
    }

    let mut reports: Vec<Option<JobReport>> = (0..n).map(|_| None).collect();
    let mut todo = Vec::new();
    for (i, p) in prepared.iter_mut().enumerate() {
        let job = &mut manifest.jobs[i];
        let label = p.label.clone().unwrap_or_else(|| job.describe());
        if let Some(reason) = p.error.take() {
            job.status = JobStatus::Failed;
            job.reason = Some(reason.clone());
            job.label = p.label.clone();
            job.input_hash = None;
            job.outputs.clear();
            reports[i] = Some(JobReport {
                index: i,
                label,
                outcome: JobOutcome::Failed(reason),
                elapsed: started[i].elapsed(),
            });
            continue;
        }
        let fresh = job.status == JobStatus::Done
            && job.input_hash == p.hash
            && job.label == p.label
            && outputs_intact(&out_dir, &job.outputs);
        if fresh {
            reports[i] = Some(JobReport {
                index: i,
                label,
                outcome: JobOutcome::Skipped,
                elapsed: Duration::ZERO,
            });
        } else {
            job.status = JobStatus::Pending;
            job.reason = None;
            job.label = p.label.clone();
            job.input_hash = p.hash.clone();
            job.outputs.clear();
            todo.push(i);
        }
    }
    manifest.save(manifest_path)?;

    let mut save_error = None;
    {
        let prepared = &prepared;
        let todo_ref = &todo;
        let out_dir = &out_dir;
        let formats = &formats;
        run_pool(
            todo.len(),
            workers,
            |k| {
                let i = todo_ref[k];
                let t0 = Instant::now();
                let scene = prepared[i].scene.as_ref().expect("runnable job has a scene");
                let result = run_job(scene, out_dir, formats, frame);
                Msg::Finished(i, result, t0.elapsed())
            },
            |msg| {
                if let Msg::Finished(i, result, elapsed) = msg {
                    let job = &mut manifest.jobs[i];
                    let label = job.label.clone().unwrap_or_else(|| job.describe());
                    let outcome = match result {
                        Ok((points, files)) => {
                            job.status = JobStatus::Done;
                            job.outputs = files
                                .iter()
                                .map(|(p, h)| (file_name(p), h.clone()))
                                .collect();
                            JobOutcome::Done {
                                points,
                                outputs: files.into_iter().map(|(p, _)| p).collect(),
                            }
                        }
                        Err(reason) => {
                            job.status = JobStatus::Failed;
                            job.reason = Some(reason.clone());
                            JobOutcome::Failed(reason)
                        }
                    };
                    reports[i] = Some(JobReport {
                        index: i,
                        label,
                        outcome,
                        elapsed,
                    });
                    if let Err(e) = manifest.save(manifest_path) {
                        save_error.get_or_insert(e);
                    }
                }
            },
        );
    }
    if let Some(e) = save_error {
        return Err(e);
    }

    Ok(BatchReport {
        jobs: reports.into_iter().map(|r| r.expect("every job reported")).collect(),
    })
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn outputs_intact(out_dir: &Path, outputs: &BTreeMap<String, String>) -> bool {
    !outputs.is_empty()
        && outputs.iter().all(|(name, hash)| {
            std::fs::read(out_dir.join(name)).is_ok_and(|bytes| sha256_hex(&bytes) == *hash)
        })
}

fn run_job(
    scene: &GraspScene,
    out_dir: &Path,
    formats: &[Format],
    frame: Frame,
) -> Result<(usize, Vec<(PathBuf, String)>), String> {
    let volume = simulate(scene).map_err(|e| format!("Simulation: {e}"))?;
    if volume.all_seeds_invalid() {
        return Err(format!(
            "InvalidSeed: {}",
            volume.metadata.warnings.join("; ")
        ));
    }
    let files = write_outputs(&volume, &scene.labels.stem(), out_dir, formats, frame).map_err(|e| format!("Io: {e}"))?;
    Ok((volume.len(), files))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_defaults_and_round_trip() {
        let m: BatchManifest = serde_json::from_str(r#"{"jobs":[{"scene":"a.json"},{"object":"box","grasp_id":3}]}"#).unwrap();
        assert_eq!(m.output_dir, PathBuf::from("out"));
        assert_eq!(m.formats, vec![Format::Csv, Format::Ply]);
        assert_eq!(m.jobs[0].status, JobStatus::Pending);
        let back: BatchManifest = serde_json::from_slice(&serde_json::to_vec(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        assert_eq!(
            m.scene_path(Path::new("/m"), &m.jobs[1]).unwrap(),
            PathBuf::from("/m/box_grasp03.json")
        );
    }

    #[test]
    fn malformed_job_is_reported() {
        let m = BatchManifest::new(vec![BatchJob {
            object: Some("x".into()),
            ..BatchJob::default()
        }]);
        assert!(m.scene_path(Path::new(""), &m.jobs[0]).is_err());
    }

    #[test]
    fn overrides_merge_later_wins() {
        let a = SettingsOverrides {
            step_deg: Some(10.0),
            epsilon_mm: Some(1.0),
            ..Default::default()
        };
        let b = SettingsOverrides {
            step_deg: Some(2.0),
            ..Default::default()
        };
        let m = a.merged(&b);
        assert_eq!(m.step_deg, Some(2.0));
        assert_eq!(m.epsilon_mm, Some(1.0));
        let s = m.apply(&SimulationSettings::default());
        assert_eq!(s.step_deg, 2.0);
        assert_eq!(s.dedupe_mm, 0.0);
    }
}
