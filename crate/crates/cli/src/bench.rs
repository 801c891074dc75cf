use std::path::PathBuf;

use clap::Args;
use reidkit::descriptor::Metric;
use reidkit::eval::{
    read_annotations, run_occlusion_bench, BenchSpec, CommandExtractor, ExtractorHook,
    OcclusionBenchReport, PixelHashExtractor,
};
use reidkit::imaging::OcclusionMode;
use serde::{Deserialize, Serialize};

use crate::config::{self, merge};
use crate::error::CliResult;
use crate::{ConfigArg, Outcome};

pub const BUILTIN_EXTRACTOR: &str = "builtin:pixel-hash";

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[arg(long)]
    pub query_dir: Option<PathBuf>,
    /// CSV `filename,person_id,camera_id`.
    #[arg(long)]
    pub query_annotations: Option<PathBuf>,
    #[arg(long)]
    pub gallery_dir: Option<PathBuf>,
    #[arg(long)]
    pub gallery_annotations: Option<PathBuf>,
    /// Occluded area fractions [default: 0,0.1,0.2,0.3,0.4,0.5]
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<f64>>,
    /// Occluder shapes [default: re,rpe,both]
    #[arg(long, value_delimiter = ',')]
    pub modes: Option<Vec<OcclusionMode>>,
    /// euclidean or cosine [default: euclidean]
    #[arg(long)]
    pub metric: Option<Metric>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Command run as `<cmd> --input <dir> --output <file.reidfeat>`,
    /// or `builtin:pixel-hash` [default: builtin:pixel-hash]
    #[arg(long)]
    pub extractor: Option<String>,
    /// Also write the report rows as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchConfig {
    pub query_dir: Option<PathBuf>,
    pub query_annotations: Option<PathBuf>,
    pub gallery_dir: Option<PathBuf>,
    pub gallery_annotations: Option<PathBuf>,
    pub levels: Vec<f64>,
    pub modes: Vec<OcclusionMode>,
    pub metric: Metric,
    pub seed: u64,
    pub extractor: String,
    pub csv: Option<PathBuf>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            query_dir: None,
            query_annotations: None,
            gallery_dir: None,
            gallery_annotations: None,
            levels: vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
            modes: vec![OcclusionMode::Re, OcclusionMode::Rpe, OcclusionMode::Both],
            metric: Metric::Euclidean,
            seed: 0,
            extractor: BUILTIN_EXTRACTOR.into(),
            csv: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchOutput {
    pub config: BenchConfig,
    pub report: OcclusionBenchReport,
}

pub fn command(args: BenchArgs) -> CliResult<Outcome> {
    let mut cfg: BenchConfig = config::load(args.config.config.as_deref())?;
    merge!(
        cfg,
        args,
        query_dir,
        query_annotations,
        gallery_dir,
        gallery_annotations,
        levels,
        modes,
        metric,
        seed,
        extractor,
        csv
    );
    let out = run_bench(&cfg)?;
    if let Some(path) = &cfg.csv {
        config::write_text(path, &out.report.to_csv())?;
    }
    Ok(Outcome::ok(config::to_value(&out)))
}

pub fn run_bench(cfg: &BenchConfig) -> CliResult<BenchOutput> {
    let spec = BenchSpec {
        query_dir: config::required(&cfg.query_dir, "query-dir")?.to_path_buf(),
        query_annotations: read_annotations(config::required(
            &cfg.query_annotations,
            "query-annotations",
        )?)?,
        gallery_dir: config::required(&cfg.gallery_dir, "gallery-dir")?.to_path_buf(),
        gallery_annotations: read_annotations(config::required(
            &cfg.gallery_annotations,
            "gallery-annotations",
        )?)?,
        levels: cfg.levels.clone(),
        modes: cfg.modes.clone(),
        metric: cfg.metric,
        seed: cfg.seed,
    };
    let extractor: Box<dyn ExtractorHook> = if cfg.extractor == BUILTIN_EXTRACTOR {
        Box::new(PixelHashExtractor)
    } else {
        Box::new(CommandExtractor::parse(&cfg.extractor)?)
    };
    let report = run_occlusion_bench(&spec, extractor.as_ref())?;
    Ok(BenchOutput {
        config: cfg.clone(),
        report,
    })
}
