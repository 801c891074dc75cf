//! Occlusion robustness benchmark.
//!
//! Query images are occluded at each `(level, mode)` pair, passed through a
//! feature extractor, and scored against a clean gallery. Images handed to
//! the extractor are written as `000000.png`, `000001.png`, ... in
//! annotation order, and the extractor must return one feature row per
//! image in lexicographic filename order.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{evaluate, EvalOptions};
use crate::descriptor::{read_features, FeatureSet, Metric};
use crate::error::{Error, Result};
use crate::imaging::{inject_occlusion, load_image, save_image, Image, OcclusionMode};
use crate::matrix::Matrix;
use crate::rng::SplitMix64;

const IMAGE_EXTENSIONS: [&str; 5] = ["png", "jpg", "jpeg", "ppm", "pgm"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub filename: String,
    pub person_id: i32,
    pub camera_id: i32,
}

/// Reads `filename,person_id,camera_id` rows; a header row is optional.
pub fn read_annotations(path: impl AsRef<Path>) -> Result<Vec<Annotation>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::corrupt(path, e.to_string()))?;
    let mut out = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::corrupt(path, e.to_string()))?;
        if record.len() != 3 {
            return Err(Error::corrupt(
                path,
                format!("line {}: expected 3 fields", line + 1),
            ));
        }
        let (pid, cam) = (record[1].parse::<i32>(), record[2].parse::<i32>());
        match (pid, cam) {
            (Ok(person_id), Ok(camera_id)) => out.push(Annotation {
                filename: record[0].to_string(),
                person_id,
                camera_id,
            }),
            _ if line == 0 => continue,
            _ => return Err(Error::corrupt(path, format!("line {}: bad ids", line + 1))),
        }
    }
    Ok(out)
}

/// Produces one feature row per image in `input_dir`, in filename order.
pub trait ExtractorHook: Sync {
    fn name(&self) -> String;
    fn extract(&self, input_dir: &Path) -> Result<Matrix<f32>>;
}

/// Grayscale block-mean thumbnail: 16 rows x 8 columns, scaled to `[0, 1]`.
/// A deliberately weak feature for exercising the pipeline.
pub fn pixel_hash_features(img: &Image) -> Vec<f32> {
    const ROWS: usize = 16;
    const COLS: usize = 8;
    let (w, h, c) = (img.width(), img.height(), img.channels());
    let mut out = Vec::with_capacity(ROWS * COLS);
    for by in 0..ROWS {
        let (y0, y1) = (
            by * h / ROWS,
            ((by + 1) * h / ROWS).max(by * h / ROWS + 1).min(h),
        );
        for bx in 0..COLS {
            let (x0, x1) = (
                bx * w / COLS,
                ((bx + 1) * w / COLS).max(bx * w / COLS + 1).min(w),
            );
            let mut sum = 0u64;
            let mut count = 0u64;
            for y in y0.min(h - 1)..y1 {
                for x in x0.min(w - 1)..x1 {
                    sum += img.pixel(x, y).iter().map(|&v| u64::from(v)).sum::<u64>();
                    count += c as u64;
                }
            }
            out.push(sum as f32 / (count.max(1) as f32 * 255.0));
        }
    }
    out
}

fn list_images(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
        })
        .collect();
    files.sort();
    Ok(files)
}

/// Pixel-hash features for every image in `dir`, filename order.
pub fn extract_pixel_hash_dir(dir: &Path) -> Result<Matrix<f32>> {
    let files = list_images(dir)?;
    let rows: Vec<Vec<f32>> = files
        .par_iter()
        .map(|p| load_image(p).map(|img| pixel_hash_features(&img)))
        .collect::<Result<_>>()?;
    if rows.is_empty() {
        return Ok(Matrix::zeros(0, 128));
    }
    Matrix::from_rows(&rows)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PixelHashExtractor;

impl ExtractorHook for PixelHashExtractor {
    fn name(&self) -> String {
        "builtin:pixel-hash".into()
    }

    fn extract(&self, input_dir: &Path) -> Result<Matrix<f32>> {
        extract_pixel_hash_dir(input_dir)
    }
}

/// External program run as `<program> <args..> --input <dir> --output <file>`;
/// it must exit 0 and leave a REIDFEAT file at `<file>`. Its stdout is
/// forwarded to stderr.
#[derive(Debug, Clone)]
pub struct CommandExtractor {
    pub program: PathBuf,
    pub args: Vec<String>,
}

impl CommandExtractor {
    /// Splits a command line on whitespace.
    pub fn parse(cmd: &str) -> Result<Self> {
        let mut parts = cmd.split_whitespace();
        let program = parts
            .next()
            .ok_or_else(|| Error::Extractor("empty extractor command".into()))?;
        Ok(Self {
            program: program.into(),
            args: parts.map(String::from).collect(),
        })
    }
}

impl ExtractorHook for CommandExtractor {
    fn name(&self) -> String {
        std::iter::once(self.program.display().to_string())
            .chain(self.args.iter().cloned())
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn extract(&self, input_dir: &Path) -> Result<Matrix<f32>> {
        let out_dir = tempfile::tempdir().map_err(|e| Error::io(std::env::temp_dir(), e))?;
        let output = out_dir.path().join("features.reidfeat");
        let status = Command::new(&self.program)
            .args(&self.args)
            .arg("--input")
            .arg(input_dir)
            .arg("--output")
            .arg(&output)
            .stdout(Stdio::from(std::io::stderr()))
            .status()
            .map_err(|e| Error::Extractor(format!("cannot run {}: {e}", self.program.display())))?;
        if !status.success() {
            return Err(Error::Extractor(format!(
                "{} exited with {status}",
                self.name()
            )));
        }
        let set = read_features(&output)
            .map_err(|e| Error::Extractor(format!("malformed output: {e}")))?;
        Ok(set.features)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSpec {
    pub query_dir: PathBuf,
    pub query_annotations: Vec<Annotation>,
    pub gallery_dir: PathBuf,
    pub gallery_annotations: Vec<Annotation>,
    pub levels: Vec<f64>,
    pub modes: Vec<OcclusionMode>,
    pub metric: Metric,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchMetrics {
    pub r1: f64,
    pub map: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub level: f64,
    pub mode: OcclusionMode,
    pub r1: f64,
    pub map: f64,
    /// Query images whose occluder could not be placed.
    pub no_fit: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcclusionBenchReport {
    pub extractor: String,
    pub seed: u64,
    pub metric: Metric,
    pub baseline: BenchMetrics,
    /// Level-major: all modes for the first level, then the next level.
    pub rows: Vec<BenchRow>,
}

impl OcclusionBenchReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("level,mode,r1,map\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{}\n", r.level, r.mode, r.r1, r.map));
        }
        s
    }
}

fn load_annotated(dir: &Path, annotations: &[Annotation]) -> Result<Vec<Image>> {
    let annotated: HashSet<&str> = annotations.iter().map(|a| a.filename.as_str()).collect();
    for file in list_images(dir)? {
        let name = file
            .file_name()
            .and_then(|n| n.to_str())
            .unwrap_or_default();
        if !annotated.contains(name) {
            return Err(Error::MissingAnnotation(file.display().to_string()));
        }
    }
    annotations
        .par_iter()
        .map(|a| load_image(dir.join(&a.filename)))
        .collect()
}

fn write_staged(images: &[Image], dir: &Path) -> Result<()> {
    images
        .par_iter()
        .enumerate()
        .try_for_each(|(i, img)| save_image(img, dir.join(format!("{i:06}.png"))))
}

fn extract_staged(
    images: &[Image],
    annotations: &[Annotation],
    extractor: &dyn ExtractorHook,
) -> Result<FeatureSet<f64>> {
    let stage = tempfile::tempdir().map_err(|e| Error::io(std::env::temp_dir(), e))?;
    write_staged(images, stage.path())?;
    let features = extractor.extract(stage.path())?;
    if features.rows() != images.len() {
        return Err(Error::Extractor(format!(
            "expected {} feature rows, got {}",
            images.len(),
            features.rows()
        )));
    }
    let set = FeatureSet::new(
        features,
        annotations.iter().map(|a| a.person_id).collect(),
        annotations.iter().map(|a| a.camera_id).collect(),
    )
    .map_err(|e| Error::Extractor(e.to_string()))?;
    Ok(set.cast())
}

pub fn run_occlusion_bench(
    spec: &BenchSpec,
    extractor: &dyn ExtractorHook,
) -> Result<OcclusionBenchReport> {
    if let Some(&bad) = spec.levels.iter().find(|l| !(0.0..=1.0).contains(*l)) {
        return Err(Error::InvalidLevel(bad));
    }
    let queries = load_annotated(&spec.query_dir, &spec.query_annotations)?;
    let gallery = load_annotated(&spec.gallery_dir, &spec.gallery_annotations)?;
    let gallery_set = extract_staged(&gallery, &spec.gallery_annotations, extractor)?;
    let opts = EvalOptions {
        metric: spec.metric,
        ranks: vec![1],
        normalize: false,
    };
    let score = |images: &[Image]| -> Result<BenchMetrics> {
        let q = extract_staged(images, &spec.query_annotations, extractor)?;
        let r = evaluate(&q, &gallery_set, &opts)?;
        Ok(BenchMetrics {
            r1: r.cmc_at_rank(1),
            map: r.map,
        })
    };

    let baseline = score(&queries)?;
    let mut rows = Vec::with_capacity(spec.levels.len() * spec.modes.len());
    for &level in &spec.levels {
        for &mode in &spec.modes {
            let occluded: Vec<(Image, bool)> = queries
                .par_iter()
                .enumerate()
                .map(|(i, img)| {
                    let mut rng = SplitMix64::for_item(spec.seed, i as u64);
                    inject_occlusion(img, level, mode, &mut rng).map(|o| (o.image, o.no_fit))
                })
                .collect::<Result<_>>()?;
            let no_fit = occluded.iter().filter(|(_, nf)| *nf).count();
            let images: Vec<Image> = occluded.into_iter().map(|(img, _)| img).collect();
            let m = score(&images)?;
            log::info!("level {level} mode {mode}: R1 {:.4} mAP {:.4}", m.r1, m.map);
            rows.push(BenchRow {
                level,
                mode,
                r1: m.r1,
                map: m.map,
                no_fit,
            });
        }
    }
    Ok(OcclusionBenchReport {
        extractor: extractor.name(),
        seed: spec.seed,
        metric: spec.metric,
        baseline,
        rows,
    })
}
