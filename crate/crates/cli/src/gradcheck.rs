use clap::Args;
use reidkit::gradcheck::{run_gradcheck, GradcheckReport, LossKind, DEFAULT_STEP};
use serde::{Deserialize, Serialize};

use crate::config::{self, merge};
use crate::error::{CliError, CliResult, ExitCode};
use crate::{ConfigArg, Outcome};

#[derive(Debug, Clone, Args)]
pub struct GradcheckArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    /// ce, triplet, oim, mse or all [default: all]
    #[arg(long)]
    pub loss: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Random instances per loss [default: 10]
    #[arg(long)]
    pub trials: Option<usize>,
    /// Pass iff every max relative error is below this [default: 1e-4]
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Central-difference step [default: 1e-5]
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GradcheckConfig {
    pub loss: String,
    pub seed: u64,
    pub trials: usize,
    pub threshold: f64,
    pub step: f64,
}

impl Default for GradcheckConfig {
    fn default() -> Self {
        Self {
            loss: "all".into(),
            seed: 0,
            trials: 10,
            threshold: 1e-4,
            step: DEFAULT_STEP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradcheckSummary {
    pub config: GradcheckConfig,
    pub reports: Vec<GradcheckReport>,
    pub passed: bool,
}

pub fn command(args: GradcheckArgs) -> CliResult<Outcome> {
    let mut cfg: GradcheckConfig = config::load(args.config.config.as_deref())?;
    merge!(cfg, args, loss, seed, trials, threshold, step);
    let summary = run(&cfg)?;
    let failed: Vec<String> = summary
        .reports
        .iter()
        .filter(|r| !r.passed(cfg.threshold))
        .map(|r| match r.worst {
            Some(w) => format!(
                "{}: max rel err {:.3e} at trial {} coordinate {} (analytic {}, numeric {})",
                r.loss, r.max_rel_err, w.trial, w.coordinate, w.analytic, w.numeric
            ),
            None => format!("{}: no points checked", r.loss),
        })
        .collect();
    Ok(Outcome {
        report: config::to_value(&summary),
        exit: if summary.passed {
            ExitCode::Ok
        } else {
            ExitCode::Failure
        },
        diagnostic: (!failed.is_empty())
            .then(|| format!("gradient check failed\n{}", failed.join("\n"))),
    })
}

pub fn run(cfg: &GradcheckConfig) -> CliResult<GradcheckSummary> {
    if !(cfg.step > 0.0) || cfg.trials == 0 || cfg.threshold.is_nan() {
        return Err(CliError::invalid("step must be > 0 and trials >= 1"));
    }
    let kinds: Vec<LossKind> = if cfg.loss == "all" {
        LossKind::ALL.to_vec()
    } else {
        vec![cfg.loss.parse()?]
    };
    let reports = kinds
        .into_iter()
        .map(|k| run_gradcheck(k, cfg.seed, cfg.trials, cfg.step))
        .collect::<reidkit::Result<Vec<_>>>()?;
    // Zero points checked counts as a failure.
    let passed = reports
        .iter()
        .all(|r| r.points_checked > 0 && r.passed(cfg.threshold));
    Ok(GradcheckSummary {
        config: cfg.clone(),
        reports,
        passed,
    })
}
