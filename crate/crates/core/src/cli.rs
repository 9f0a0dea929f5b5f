//! Command-line front end.
//!
//! Every subcommand accepts one or more images. Landmark files are paired with
//! images by position through repeated `--landmarks` flags. Single-file output
//! flags (`--out`, `--mask-out`, ...) are only valid for one input; batches
//! write into `--out-dir` using the input file stem.
//!
//! Exit codes: 0 success, 1 at least one input failed (the rest still ran),
//! 2 usage error.

use std::collections::HashSet;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::color::{adjust_saturation_with, saturation_sweep, SaturationFactor, SaturationModel};
use crate::error::{Error, Result};
use crate::landmarks::{parse_landmarks, validate_against_image, EyeSide, LandmarkFile};
use crate::raster::{load_image, Rgb, RgbImage};
use crate::report::{assess_detailed, serialize_report, Assessment, QualityThresholds};
use crate::segmentation::{
    encode_mask_png, render_overlay, segment_both, MaskSidecar, SideFailure,
};
use crate::stats::{export_histogram_csv, RegionStats, RegionSummary};

pub const THRESHOLDS_ENV: &str = "SCLERA_QC_THRESHOLDS";

#[derive(Debug, Parser)]
#[command(
    name = "sclera-qc",
    version,
    about = "Sclera segmentation and face image quality statistics"
)]
struct Cli {
    /// Maximum number of inputs processed concurrently (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Segment both sclerae and write masks, overlays and sidecars.
    Segment(SegmentArgs),
    /// Region statistics of both sclerae and the face oval.
    Stats(StatsArgs),
    /// Write saturation-adjusted copies of images.
    Saturate(SaturateArgs),
    /// Tabulate face-oval and sclera means over saturation factors.
    Sweep(SweepArgs),
    /// Illumination quality report.
    Assess(AssessArgs),
    /// Parse landmark files and check them against their images.
    ValidateLandmarks(ValidateArgs),
}

#[derive(Debug, Args)]
struct Inputs {
    /// Input images (PNG or JPEG).
    #[arg(required = true)]
    images: Vec<PathBuf>,

    /// Landmark file for each image, in the same order.
    #[arg(long = "landmarks", required = true)]
    landmarks: Vec<PathBuf>,

    /// Directory for per-input outputs named after the image stem.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SegmentArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Full-size 8-bit mask (255 = sclera).
    #[arg(long)]
    mask_out: Option<PathBuf>,
    /// Input image with sclera pixels painted in `--color`.
    #[arg(long)]
    overlay_out: Option<PathBuf>,
    /// JSON sidecar with per-eye rectangles and pixel counts.
    #[arg(long)]
    sidecar_out: Option<PathBuf>,
    /// Overlay colour as `R,G,B`.
    #[arg(long, default_value = "255,255,255", value_parser = parse_rgb)]
    color: Rgb,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Statistics JSON (standard output when omitted for a single input).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for per-region histogram CSVs.
    #[arg(long)]
    histograms_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SaturateArgs {
    #[arg(required = true)]
    images: Vec<PathBuf>,
    #[arg(long)]
    factor: SaturationFactor,
    #[arg(long, default_value = "hsv")]
    model: SaturationModel,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Comma-separated saturation factors; the original image is always included.
    #[arg(long, default_value = "1,2,3,4,5", value_delimiter = ',')]
    factors: Vec<SaturationFactor>,
    #[arg(long, default_value = "luma-blend")]
    model: SaturationModel,
    /// Output CSV (standard output when omitted for a single input).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AssessArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Report JSON (standard output when omitted for a single input).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for per-region histogram CSVs.
    #[arg(long)]
    histograms_out: Option<PathBuf>,
    /// Thresholds JSON; overrides the SCLERA_QC_THRESHOLDS file.
    #[arg(long)]
    thresholds: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(required = true)]
    landmarks: Vec<PathBuf>,
    /// Image for each landmark file, in the same order.
    #[arg(long = "image")]
    images: Vec<PathBuf>,
}

fn parse_rgb(s: &str) -> std::result::Result<Rgb, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let bad = || format!("expected R,G,B with values 0-255, got `{s}`");
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut out = [0u8; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.trim().parse().map_err(|_| bad())?;
    }
    Ok(out)
}

struct UsageError(String);

/// Where one input's outputs go.
#[derive(Debug, Clone)]
enum Dest {
    Explicit,
    Dir(PathBuf, String),
}

impl Dest {
    fn resolve(&self, explicit: &Option<PathBuf>, suffix: &str) -> Option<PathBuf> {
        match self {
            Dest::Explicit => explicit.clone(),
            Dest::Dir(dir, stem) => Some(dir.join(format!("{stem}.{suffix}"))),
        }
    }
}

fn stem_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "input".into())
}

/// Checks pairing and output flags, returning one destination per input.
fn plan(
    images: &[PathBuf],
    landmarks: Option<&[PathBuf]>,
    out_dir: &Option<PathBuf>,
    explicit_outputs: &[&Option<PathBuf>],
) -> std::result::Result<Vec<Dest>, UsageError> {
    if let Some(lms) = landmarks {
        if lms.len() != images.len() {
            return Err(UsageError(format!(
                "{} image(s) but {} --landmarks file(s); pass one landmark file per image",
                images.len(),
                lms.len()
            )));
        }
    }
    let any_explicit = explicit_outputs.iter().any(|o| o.is_some());
    match out_dir {
        Some(dir) => {
            if any_explicit {
                return Err(UsageError(
                    "--out-dir cannot be combined with single-file output flags".into(),
                ));
            }
            let mut seen = HashSet::new();
            let mut dests = Vec::with_capacity(images.len());
            for img in images {
                let stem = stem_of(img);
                if !seen.insert(stem.clone()) {
                    return Err(UsageError(format!(
                        "two inputs share the file stem `{stem}`; outputs would collide"
                    )));
                }
                dests.push(Dest::Dir(dir.clone(), stem));
            }
            Ok(dests)
        }
        None => {
            if images.len() > 1 && any_explicit {
                return Err(UsageError(
                    "single-file output flags need exactly one input; use --out-dir for batches"
                        .into(),
                ));
            }
            Ok(images.iter().map(|_| Dest::Explicit).collect())
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn read_landmarks(path: &Path) -> Result<LandmarkFile> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_landmarks(&bytes)
}

fn to_json(value: &impl Serialize) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("serializable");
    out.push(b'\n');
    out
}

/// Result of one batch item: text for standard output plus warnings.
#[derive(Default)]
struct ItemOutput {
    stdout: String,
    warnings: Vec<String>,
}

fn run_batch<T: Sync>(
    jobs: Option<usize>,
    items: &[T],
    key: impl Fn(&T) -> PathBuf + Sync,
    work: impl Fn(&T) -> Result<ItemOutput> + Sync,
) -> i32 {
    let run = || -> Vec<(PathBuf, Result<ItemOutput>)> {
        items.par_iter().map(|it| (key(it), work(it))).collect()
    };
    let mut results = match jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
        {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        },
        None => run(),
    };
    results.sort_by(|a, b| a.0.cmp(&b.0));

    let mut failed = false;
    for (path, res) in results {
        match res {
            Ok(out) => {
                for w in out.warnings {
                    eprintln!("warning: {}: {w}", path.display());
                }
                print!("{}", out.stdout);
            }
            Err(e) => {
                failed = true;
                eprintln!("error: {}: {e}", path.display());
            }
        }
    }
    i32::from(failed)
}

struct Pair<'a> {
    image: &'a Path,
    landmarks: &'a Path,
    dest: Dest,
}

fn pairs<'a>(inputs: &'a Inputs, dests: Vec<Dest>) -> Vec<Pair<'a>> {
    inputs
        .images
        .iter()
        .zip(&inputs.landmarks)
        .zip(dests)
        .map(|((image, landmarks), dest)| Pair {
            image,
            landmarks,
            dest,
        })
        .collect()
}

fn load_pair(p: &Pair<'_>) -> Result<(RgbImage, LandmarkFile, Vec<String>)> {
    let image = load_image(p.image)?;
    let lm = read_landmarks(p.landmarks)?;
    let warnings = validate_against_image(&lm, image.width(), image.height())
        .iter()
        .map(ToString::to_string)
        .collect();
    Ok((image, lm, warnings))
}

#[derive(Serialize)]
struct SegmentSidecar {
    source_id: String,
    masks: Vec<MaskSidecar>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    failures: Vec<String>,
}

fn cmd_segment(jobs: Option<usize>, args: &SegmentArgs) -> std::result::Result<i32, UsageError> {
    let dests = plan(
        &args.inputs.images,
        Some(&args.inputs.landmarks),
        &args.inputs.out_dir,
        &[&args.mask_out, &args.overlay_out, &args.sidecar_out],
    )?;
    let items = pairs(&args.inputs, dests);
    Ok(run_batch(
        jobs,
        &items,
        |p| p.image.to_path_buf(),
        |p| {
            let (image, lm, warnings) = load_pair(p)?;
            let masks = segment_both(&lm, image.width(), image.height())?;
            let ok: Vec<_> = masks.successes().collect();
            let failures: Vec<String> = [&masks.left, &masks.right]
                .into_iter()
                .filter_map(|m| m.as_ref().err().map(SideFailure::to_string))
                .collect();

            if let Some(path) = p.dest.resolve(&args.mask_out, "mask.png") {
                write_file(&path, &encode_mask_png(image.width(), image.height(), &ok)?)?;
            }
            if let Some(path) = p.dest.resolve(&args.overlay_out, "overlay.png") {
                write_file(
                    &path,
                    &render_overlay(&image, &ok, args.color).encode_png()?,
                )?;
            }
            if let Some(path) = p.dest.resolve(&args.sidecar_out, "sclera.json") {
                let sidecar = SegmentSidecar {
                    source_id: lm.source_id.clone(),
                    masks: ok.iter().map(|m| m.sidecar()).collect(),
                    failures: failures.clone(),
                };
                write_file(&path, &to_json(&sidecar))?;
            }

            let count = |side: EyeSide| match masks.get(side) {
                Ok(m) => m.pixel_count().to_string(),
                Err(_) => "failed".into(),
            };
            let mut warnings = warnings;
            warnings.extend(failures);
            Ok(ItemOutput {
                stdout: format!(
                    "{}: left={} right={}\n",
                    p.image.display(),
                    count(EyeSide::Left),
                    count(EyeSide::Right)
                ),
                warnings,
            })
        },
    ))
}

#[derive(Serialize)]
struct RegionEntry {
    #[serde(skip_serializing_if = "Option::is_none")]
    stats: Option<RegionSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct StatsDocument {
    source_id: String,
    left_sclera: RegionEntry,
    right_sclera: RegionEntry,
    #[serde(skip_serializing_if = "Option::is_none")]
    face_oval: Option<RegionSummary>,
}

fn write_histograms(dir: &Path, stem: &str, a: &Assessment) -> Result<()> {
    let regions: [(&str, &Option<RegionStats>); 3] = [
        ("left_sclera", &a.left),
        ("right_sclera", &a.right),
        ("face_oval", &a.face_oval),
    ];
    for (name, stats) in regions {
        if let Some(s) = stats {
            write_file(
                &dir.join(format!("{stem}.{name}.csv")),
                &export_histogram_csv(s),
            )?;
        }
    }
    Ok(())
}

fn cmd_stats(jobs: Option<usize>, args: &StatsArgs) -> std::result::Result<i32, UsageError> {
    let dests = plan(
        &args.inputs.images,
        Some(&args.inputs.landmarks),
        &args.inputs.out_dir,
        &[&args.out],
    )?;
    let items = pairs(&args.inputs, dests);
    let to_stdout = items.len() == 1 && args.out.is_none() && args.inputs.out_dir.is_none();
    Ok(run_batch(
        jobs,
        &items,
        |p| p.image.to_path_buf(),
        |p| {
            let (image, lm, warnings) = load_pair(p)?;
            let a = assess_detailed(&image, &lm, &QualityThresholds::default())?;
            let entry = |side: EyeSide| {
                let eye = a.report.eye(side);
                RegionEntry {
                    stats: eye.stats.clone(),
                    error: eye.flags.error.clone(),
                }
            };
            let doc = to_json(&StatsDocument {
                source_id: lm.source_id.clone(),
                left_sclera: entry(EyeSide::Left),
                right_sclera: entry(EyeSide::Right),
                face_oval: a.report.face_oval.clone(),
            });
            if let Some(dir) = &args.histograms_out {
                write_histograms(dir, &stem_of(p.image), &a)?;
            }
            let stdout = if to_stdout {
                String::from_utf8(doc).expect("json is utf-8")
            } else {
                if let Some(path) = p.dest.resolve(&args.out, "stats.json") {
                    write_file(&path, &doc)?;
                }
                format!("{}: stats written\n", p.image.display())
            };
            Ok(ItemOutput { stdout, warnings })
        },
    ))
}

fn cmd_saturate(jobs: Option<usize>, args: &SaturateArgs) -> std::result::Result<i32, UsageError> {
    if args.out.is_none() && args.out_dir.is_none() {
        return Err(UsageError("saturate needs --out or --out-dir".into()));
    }
    let dests = plan(&args.images, None, &args.out_dir, &[&args.out])?;
    let items: Vec<(&PathBuf, Dest)> = args.images.iter().zip(dests).collect();
    let suffix = format!("sat-{}.png", args.factor);
    Ok(run_batch(
        jobs,
        &items,
        |(img, _)| img.to_path_buf(),
        |(img, dest)| {
            let image = load_image(img)?;
            let out = adjust_saturation_with(&image, args.factor, args.model);
            let path = dest
                .resolve(&args.out, &suffix)
                .expect("an output was required above");
            write_file(&path, &out.encode_png()?)?;
            Ok(ItemOutput {
                stdout: format!("{}: wrote {}\n", img.display(), path.display()),
                warnings: vec![],
            })
        },
    ))
}

fn cmd_sweep(jobs: Option<usize>, args: &SweepArgs) -> std::result::Result<i32, UsageError> {
    let dests = plan(
        &args.inputs.images,
        Some(&args.inputs.landmarks),
        &args.inputs.out_dir,
        &[&args.out],
    )?;
    let items = pairs(&args.inputs, dests);
    let to_stdout = items.len() == 1 && args.out.is_none() && args.inputs.out_dir.is_none();
    Ok(run_batch(
        jobs,
        &items,
        |p| p.image.to_path_buf(),
        |p| {
            let (image, lm, warnings) = load_pair(p)?;
            let table = saturation_sweep(&image, &lm, &args.factors, args.model)?;
            let csv = table.to_csv();
            let stdout = if to_stdout {
                String::from_utf8(csv).expect("csv is utf-8")
            } else {
                let path = p
                    .dest
                    .resolve(&args.out, "sweep.csv")
                    .expect("file or dir output");
                write_file(&path, &csv)?;
                format!("{}: wrote {}\n", p.image.display(), path.display())
            };
            Ok(ItemOutput { stdout, warnings })
        },
    ))
}

fn load_thresholds(flag: &Option<PathBuf>) -> Result<QualityThresholds> {
    let from_env = std::env::var_os(THRESHOLDS_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from);
    match flag.clone().or(from_env) {
        Some(path) => QualityThresholds::from_json_file(&path),
        None => Ok(QualityThresholds::default()),
    }
}

fn cmd_assess(jobs: Option<usize>, args: &AssessArgs) -> std::result::Result<i32, UsageError> {
    let dests = plan(
        &args.inputs.images,
        Some(&args.inputs.landmarks),
        &args.inputs.out_dir,
        &[&args.out],
    )?;
    let thresholds = load_thresholds(&args.thresholds).map_err(|e| UsageError(e.to_string()))?;
    let items = pairs(&args.inputs, dests);
    let to_stdout = items.len() == 1 && args.out.is_none() && args.inputs.out_dir.is_none();
    Ok(run_batch(
        jobs,
        &items,
        |p| p.image.to_path_buf(),
        |p| {
            let (image, lm, warnings) = load_pair(p)?;
            let a = assess_detailed(&image, &lm, &thresholds)?;
            let bytes = serialize_report(&a.report);
            if let Some(dir) = &args.histograms_out {
                write_histograms(dir, &stem_of(p.image), &a)?;
            }
            let ind = a.report.indicators;
            let stdout = if to_stdout {
                String::from_utf8(bytes).expect("json is utf-8")
            } else {
                let path = p
                    .dest
                    .resolve(&args.out, "report.json")
                    .expect("file or dir output");
                write_file(&path, &bytes)?;
                format!(
                    "{}: dark={} nonuniform={} insufficient={}\n",
                    p.image.display(),
                    ind.illumination_dark,
                    ind.illumination_nonuniform,
                    ind.sclera_insufficient
                )
            };
            Ok(ItemOutput { stdout, warnings })
        },
    ))
}

fn cmd_validate(jobs: Option<usize>, args: &ValidateArgs) -> std::result::Result<i32, UsageError> {
    if !args.images.is_empty() && args.images.len() != args.landmarks.len() {
        return Err(UsageError(format!(
            "{} landmark file(s) but {} --image(s)",
            args.landmarks.len(),
            args.images.len()
        )));
    }
    let items: Vec<(&PathBuf, Option<&PathBuf>)> = args
        .landmarks
        .iter()
        .enumerate()
        .map(|(i, lm)| (lm, args.images.get(i)))
        .collect();
    Ok(run_batch(
        jobs,
        &items,
        |(lm, _)| lm.to_path_buf(),
        |(lm_path, img)| {
            let lm = read_landmarks(lm_path)?;
            let (w, h) = match img {
                Some(path) => {
                    let image = load_image(path)?;
                    (image.width(), image.height())
                }
                None => (lm.image_width, lm.image_height),
            };
            let warnings: Vec<String> = validate_against_image(&lm, w, h)
                .iter()
                .map(ToString::to_string)
                .collect();
            Ok(ItemOutput {
                stdout: format!(
                    "{}: valid, {} warning(s)\n",
                    lm_path.display(),
                    warnings.len()
                ),
                warnings,
            })
        },
    ))
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let jobs = cli.jobs;
    let outcome = match &cli.command {
        Command::Segment(a) => cmd_segment(jobs, a),
        Command::Stats(a) => cmd_stats(jobs, a),
        Command::Saturate(a) => cmd_saturate(jobs, a),
        Command::Sweep(a) => cmd_sweep(jobs, a),
        Command::Assess(a) => cmd_assess(jobs, a),
        Command::ValidateLandmarks(a) => cmd_validate(jobs, a),
    };
    match outcome {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}
