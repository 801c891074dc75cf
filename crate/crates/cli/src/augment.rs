//! Batch erasing over a directory tree.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;
use reidkit::imaging::{
    load_image, re_erase, rpe_erase, save_image, save_mask_pgm, EraseConfig, EraseStatus,
    OcclusionMode, PolygonMask,
};
use reidkit::SplitMix64;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::config::{self, merge};
use crate::error::{CliError, CliResult};
use crate::{ConfigArg, Outcome};

const IMAGE_EXTENSIONS: [&str; 5] = ["png", "jpg", "jpeg", "ppm", "pgm"];

#[derive(Debug, Clone, Args)]
pub struct AugmentArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Must not exist, or be an empty directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// re, rpe or both [default: rpe]
    #[arg(long)]
    pub mode: Option<OcclusionMode>,
    /// Erasing probability [default: 0.5]
    #[arg(long)]
    pub prob: Option<f64>,
    /// Polygon vertex count [default: 20]
    #[arg(long)]
    pub points: Option<usize>,
    /// Minimum erased area fraction [default: 0.02]
    #[arg(long)]
    pub sl: Option<f64>,
    /// Maximum erased area fraction [default: 0.45]
    #[arg(long)]
    pub sh: Option<f64>,
    /// Aspect ratio lower bound [default: 0.35]
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write `<name>.mask.pgm` next to each erased image.
    #[arg(long)]
    pub dump_masks: bool,
    /// Worker threads; affects wall time only.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AugmentConfig {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub mode: OcclusionMode,
    pub prob: f64,
    pub points: usize,
    pub sl: f64,
    pub sh: f64,
    pub r: f64,
    pub seed: u64,
    pub dump_masks: bool,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        let e = EraseConfig::default();
        Self {
            input: None,
            output: None,
            mode: OcclusionMode::Rpe,
            prob: e.probability,
            points: e.vertices,
            sl: e.area_min,
            sh: e.area_max,
            r: e.aspect,
            seed: 0,
            dump_masks: false,
        }
    }
}

impl AugmentConfig {
    pub fn erase_config(&self) -> EraseConfig {
        EraseConfig {
            probability: self.prob,
            area_min: self.sl,
            area_max: self.sh,
            aspect: self.r,
            vertices: self.points,
            ..EraseConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImageStatus {
    Erased,
    Skipped,
    NoFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageSummary {
    /// Path relative to the input root, `/`-separated.
    pub path: String,
    pub index: usize,
    pub status: ImageStatus,
    pub erased_ratio: f64,
    /// The polygon degenerated and the rectangle was erased instead.
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentSummary {
    pub config: AugmentConfig,
    pub images: Vec<ImageSummary>,
    pub erased: usize,
    pub skipped: usize,
    pub no_fit: usize,
    pub copied_files: usize,
}

pub fn command(args: AugmentArgs) -> CliResult<Outcome> {
    let mut cfg: AugmentConfig = config::load(args.config.config.as_deref())?;
    merge!(cfg, args, input, output, mode, prob, points, sl, sh, r, seed);
    cfg.dump_masks |= args.dump_masks;
    let summary = match args.jobs {
        Some(0) => return Err(CliError::invalid("--jobs must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::io(e.to_string()))?
            .install(|| augment_tree(&cfg))?,
        None => augment_tree(&cfg)?,
    };
    Ok(Outcome::ok(config::to_value(&summary)))
}

fn has_image_extension(p: &Path) -> bool {
    p.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::io(format!("{}: {e}", path.display()))
}

fn rel_string(rel: &Path) -> String {
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

/// Augments every image under `cfg.input` into `cfg.output`. Image `i` in
/// sorted relative-path order draws from the stream `seed ^ i`; other files
/// are copied unchanged. The tree is staged next to the output and renamed
/// into place, so a failed run leaves nothing behind.
pub fn augment_tree(cfg: &AugmentConfig) -> CliResult<AugmentSummary> {
    let input = config::required(&cfg.input, "input")?;
    let output = config::required(&cfg.output, "output")?;
    let erase = cfg.erase_config();
    erase.validate()?;
    if !input.is_dir() {
        return Err(CliError::io(format!(
            "{}: not a directory",
            input.display()
        )));
    }
    if output.exists() {
        let empty = output.is_dir()
            && fs::read_dir(output)
                .map_err(|e| io_err(output, e))?
                .next()
                .is_none();
        if !empty {
            return Err(CliError::invalid(format!(
                "{} exists and is not an empty directory",
                output.display()
            )));
        }
    }
    let parent = match output.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&parent).map_err(|e| io_err(&parent, e))?;
    let stage = tempfile::Builder::new()
        .prefix(".reidkit-augment-")
        .tempdir_in(&parent)
        .map_err(|e| io_err(&parent, e))?;

    let mut images = Vec::new();
    let mut copied = 0;
    for entry in WalkDir::new(input).sort_by_file_name() {
        let entry = entry.map_err(|e| CliError::io(e.to_string()))?;
        let rel = entry
            .path()
            .strip_prefix(input)
            .expect("walk stays under root")
            .to_path_buf();
        let dest = stage.path().join(&rel);
        if entry.file_type().is_dir() {
            fs::create_dir_all(&dest).map_err(|e| io_err(&dest, e))?;
        } else if has_image_extension(&rel) {
            images.push(rel);
        } else {
            fs::copy(entry.path(), &dest).map_err(|e| io_err(entry.path(), e))?;
            copied += 1;
        }
    }
    log::info!(
        "augmenting {} images from {}",
        images.len(),
        input.display()
    );

    let results: Vec<ImageSummary> = images
        .par_iter()
        .enumerate()
        .map(|(i, rel)| augment_one(cfg, &erase, input, stage.path(), rel, i))
        .collect::<CliResult<_>>()?;

    if output.exists() {
        fs::remove_dir(output).map_err(|e| io_err(output, e))?;
    }
    let staged = stage.keep();
    if let Err(e) = fs::rename(&staged, output) {
        let _ = fs::remove_dir_all(&staged);
        return Err(io_err(output, e));
    }

    let count = |s| results.iter().filter(|r| r.status == s).count();
    Ok(AugmentSummary {
        config: cfg.clone(),
        erased: count(ImageStatus::Erased),
        skipped: count(ImageStatus::Skipped),
        no_fit: count(ImageStatus::NoFit),
        copied_files: copied,
        images: results,
    })
}

fn augment_one(
    cfg: &AugmentConfig,
    erase: &EraseConfig,
    input: &Path,
    stage: &Path,
    rel: &Path,
    index: usize,
) -> CliResult<ImageSummary> {
    let src = input.join(rel);
    let dest = stage.join(rel);
    let img = load_image(&src)?;
    let mut rng = SplitMix64::for_item(cfg.seed, index as u64);
    let steps: &[bool] = match cfg.mode {
        OcclusionMode::Re => &[false],
        OcclusionMode::Rpe => &[true],
        OcclusionMode::Both => &[false, true],
    };
    let mut current = img;
    let mut masks: Vec<PolygonMask> = Vec::new();
    let mut status = ImageStatus::Skipped;
    for &polygon in steps {
        let out = if polygon {
            rpe_erase(&current, erase, &mut rng)?
        } else {
            re_erase(&current, erase, &mut rng)?
        };
        match out.status {
            EraseStatus::Erased => status = ImageStatus::Erased,
            EraseStatus::NoFit if status == ImageStatus::Skipped => status = ImageStatus::NoFit,
            _ => {}
        }
        masks.extend(out.mask);
        current = out.image;
    }

    let (w, h) = (current.width(), current.height());
    let erased_ratio = match masks.as_slice() {
        [] => 0.0,
        [m] => m.area() as f64 / (w * h) as f64,
        _ => {
            let mut hit = vec![false; w * h];
            for (x, y) in masks.iter().flat_map(|m| m.pixels()) {
                hit[y * w + x] = true;
            }
            hit.iter().filter(|&&b| b).count() as f64 / (w * h) as f64
        }
    };
    if masks.is_empty() {
        fs::copy(&src, &dest).map_err(|e| io_err(&src, e))?;
    } else {
        save_image(&current, &dest)?;
        if cfg.dump_masks {
            let refs: Vec<&PolygonMask> = masks.iter().collect();
            save_mask_pgm(&refs, w, h, dest.with_extension("mask.pgm"))?;
        }
    }
    Ok(ImageSummary {
        path: rel_string(rel),
        index,
        status,
        erased_ratio,
        fallback: masks.iter().any(|m| m.fallback),
    })
}
