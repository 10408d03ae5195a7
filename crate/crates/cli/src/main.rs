use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use gravkit::io::scene::GraspScene;
use gravkit::io::{read_volume, Format, Frame};
use gravkit::pipeline::{run_batch, write_outputs, BatchOptions, SettingsOverrides};
use gravkit::volume::{haptic_surface, motion_boundary, query_reachable};
use gravkit::{simulate, validate_configuration, FingerId, GravVolume, Vec3};

#[derive(Parser)]
#[command(name = "gravkit", version, about = "Grasp interaction volume simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scene and write the volume.
    Simulate(SimulateArgs),
    /// Run every job of a batch manifest.
    Batch(BatchArgs),
    /// Summarize a CSV or JSON volume.
    Info {
        volume: PathBuf,
    },
    /// Reachability of a sphere against a volume.
    Query {
        volume: PathBuf,
        /// Sphere center `x,y,z` in mm.
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        center: Vec3,
        #[arg(long)]
        radius: f64,
    },
    /// Convert a volume, optionally reduced to its boundary or haptic surface.
    Export(ExportArgs),
}

#[derive(Args, Clone, Default)]
struct SettingsArgs {
    #[arg(long)]
    step_deg: Option<f64>,
    #[arg(long)]
    epsilon_mm: Option<f64>,
    /// Comma-separated finger names.
    #[arg(long, value_delimiter = ',')]
    fingers: Option<Vec<FingerId>>,
    /// Keep the cheapest point per voxel of this edge length.
    #[arg(long)]
    dedupe_mm: Option<f64>,
    #[arg(long)]
    max_configurations: Option<u64>,
}

impl SettingsArgs {
    fn overrides(&self) -> SettingsOverrides {
        SettingsOverrides {
            step_deg: self.step_deg,
            epsilon_mm: self.epsilon_mm,
            fingers: self.fingers.clone(),
            dedupe_mm: self.dedupe_mm,
            max_configurations: self.max_configurations,
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    scene: PathBuf,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "csv,ply")]
    formats: Vec<Format>,
    /// Negate X in exported coordinates.
    #[arg(long)]
    left_handed: bool,
    /// Only check that each enabled finger's grasp pose is valid.
    #[arg(long)]
    seed_check_only: bool,
    #[command(flatten)]
    settings: SettingsArgs,
}

#[derive(Args)]
struct BatchArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Worker threads (default: one per core).
    #[arg(long, env = "GRAVKIT_JOBS")]
    jobs: Option<usize>,
    #[arg(long)]
    left_handed: bool,
    #[command(flatten)]
    settings: SettingsArgs,
}

#[derive(Args)]
struct ExportArgs {
    volume: PathBuf,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "csv,ply")]
    formats: Vec<Format>,
    #[arg(long)]
    left_handed: bool,
    /// Output file stem (default: the input's).
    #[arg(long)]
    stem: Option<String>,
    /// Keep only the voxel-shell boundary at this voxel size.
    #[arg(long, conflicts_with = "haptic_scene")]
    motion_boundary_mm: Option<f64>,
    /// Keep only points within `--contact-mm` of this scene's object.
    #[arg(long, requires = "contact_mm")]
    haptic_scene: Option<PathBuf>,
    #[arg(long)]
    contact_mm: Option<f64>,
}

fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z, got `{s}`"));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|_| format!("bad number `{p}`"))?;
    }
    Ok(Vec3::from(v))
}

fn frame(left_handed: bool) -> Frame {
    if left_handed {
        Frame::LeftHanded
    } else {
        Frame::RightHanded
    }
}

/// Outcome that maps to a process exit code.
enum Exit {
    Ok,
    Failed,
    AllSeedsInvalid,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Batch(a) => cmd_batch(a),
        Command::Info { volume } => cmd_info(&volume),
        Command::Query { volume, center, radius } => cmd_query(&volume, center, radius),
        Command::Export(a) => cmd_export(a),
    };
    match result {
        Ok(Exit::Ok) => ExitCode::SUCCESS,
        Ok(Exit::Failed) => ExitCode::from(1),
        Ok(Exit::AllSeedsInvalid) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load_scene(path: &Path, settings: &SettingsArgs) -> Result<GraspScene> {
    let scene = GraspScene::load(path).map_err(|e| anyhow!("{}: {e}", e.kind()))?;
    let merged = settings.overrides().apply(&scene.settings);
    scene
        .with_settings(merged)
        .map_err(|e| anyhow!("{}: {e}", e.kind()))
}

fn cmd_simulate(a: SimulateArgs) -> Result<Exit> {
    let scene = load_scene(&a.scene, &a.settings)?;
    let label = scene.labels.stem();

    if a.seed_check_only {
        let fingers = scene.settings.enabled_fingers();
        let mut valid = 0;
        for f in &fingers {
            let verdict = validate_configuration(&scene, *f, &scene.hand.chain(*f).seed());
            if verdict.is_valid() {
                valid += 1;
            }
            println!("{f:<7} {verdict:?}");
        }
        return Ok(if valid == 0 && !fingers.is_empty() {
            Exit::AllSeedsInvalid
        } else {
            Exit::Ok
        });
    }

    let t0 = Instant::now();
    let volume = simulate(&scene).map_err(|e| anyhow!("simulation: {e}"))?;
    let elapsed = t0.elapsed();
    for w in &volume.metadata.warnings {
        eprintln!("warning: {w}");
    }
    if volume.all_seeds_invalid() {
        eprintln!("error: InvalidSeed: no enabled finger has a valid grasp pose");
        return Ok(Exit::AllSeedsInvalid);
    }

    let files = write_outputs(&volume, &label, &a.out, &a.formats, frame(a.left_handed))?;
    println!("scene      {label}");
    println!("points     {}", volume.len());
    for r in &volume.metadata.per_finger {
        match &r.error {
            None => println!("  {:<8} {:>8}  ({} configurations tested)", r.finger.name(), r.points, r.configurations_tested),
            Some(e) => println!("  {:<8} {:>8}  failed: {e}", r.finger.name(), 0),
        }
    }
    if volume.metadata.excluded_points > 0 {
        println!("excluded   {}", volume.metadata.excluded_points);
    }
    if volume.metadata.deduplicated_points > 0 {
        println!("deduped    {}", volume.metadata.deduplicated_points);
    }
    println!("max cost   {:.1} deg", volume.max_cost());
    println!("wall time  {:.3} s", elapsed.as_secs_f64());
    for (path, _) in files {
        println!("wrote      {}", path.display());
    }
    Ok(Exit::Ok)
}

fn cmd_batch(a: BatchArgs) -> Result<Exit> {
    let options = BatchOptions {
        jobs: a.jobs.unwrap_or(0),
        overrides: a.settings.overrides(),
        frame: a.left_handed.then_some(Frame::LeftHanded),
    };
    let report = run_batch(&a.manifest, &options)?;
    print!("{}", report.table());
    Ok(if report.failed() > 0 { Exit::Failed } else { Exit::Ok })
}

fn load_volume(path: &Path) -> Result<GravVolume> {
    read_volume(path).with_context(|| format!("reading {}", path.display()))
}

fn cmd_info(path: &Path) -> Result<Exit> {
    let v = load_volume(path)?;
    println!("points     {}", v.len());
    if v.is_empty() {
        return Ok(Exit::Ok);
    }
    let stats = |costs: &mut dyn Iterator<Item = f64>| {
        let (mut n, mut sum, mut lo, mut hi) = (0usize, 0.0, f64::INFINITY, f64::NEG_INFINITY);
        for c in costs {
            n += 1;
            sum += c;
            lo = lo.min(c);
            hi = hi.max(c);
        }
        (n, lo, sum / n as f64, hi)
    };
    let (_, lo, mean, hi) = stats(&mut v.points.iter().map(|p| p.cost));
    println!("cost       min {lo:.1}  mean {mean:.1}  max {hi:.1} deg");
    println!("fingers");
    for f in v.fingers() {
        let (n, lo, mean, hi) = stats(&mut v.points.iter().filter(|p| p.finger == f).map(|p| p.cost));
        println!("  {:<8} {n:>8}  cost min {lo:.1}  mean {mean:.1}  max {hi:.1}", f.name());
    }
    let mut min = v.points[0].position;
    let mut max = min;
    for p in &v.points {
        min = min.inf(&p.position);
        max = max.sup(&p.position);
    }
    println!("bounds     min [{:.3}, {:.3}, {:.3}]", min.x, min.y, min.z);
    println!("           max [{:.3}, {:.3}, {:.3}]", max.x, max.y, max.z);
    Ok(Exit::Ok)
}

fn cmd_query(path: &Path, center: Vec3, radius: f64) -> Result<Exit> {
    let v = load_volume(path)?;
    let r = query_reachable(&v, &center, radius)?;
    println!("reachable: {}", r.reachable);
    match r.min_cost {
        Some(c) => println!("min_cost: {c:.6}"),
        None => println!("min_cost: none"),
    }
    let names: Vec<&str> = r.fingers.iter().map(|f| f.name()).collect();
    println!("fingers: {}", names.join(","));
    println!("points: {}", r.points);
    Ok(Exit::Ok)
}

fn cmd_export(a: ExportArgs) -> Result<Exit> {
    let mut v = load_volume(&a.volume)?;
    let mut stem = a
        .stem
        .clone()
        .or_else(|| a.volume.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "volume".into());
    if let Some(voxel) = a.motion_boundary_mm {
        v.points = motion_boundary(&v, voxel)?;
        if a.stem.is_none() {
            stem.push_str("_boundary");
        }
    }
    if let Some(scene_path) = &a.haptic_scene {
        let scene = GraspScene::load(scene_path).map_err(|e| anyhow!("{}: {e}", e.kind()))?;
        let Some(mesh) = &scene.object else {
            bail!("{} has no object mesh", scene_path.display());
        };
        let h = haptic_surface(&v, mesh, a.contact_mm.unwrap_or(0.0))?;
        println!("haptic triangles {}", h.triangles.len());
        v.points = h.points;
        if a.stem.is_none() {
            stem.push_str("_haptics");
        }
    }
    let files = write_outputs(&v, &stem, &a.out, &a.formats, frame(a.left_handed))?;
    println!("points {}", v.len());
    for (path, _) in files {
        println!("wrote {}", path.display());
    }
    Ok(Exit::Ok)
}
