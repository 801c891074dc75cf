use std::fs;
use std::path::PathBuf;

use clap::Args;
use reidkit::efficiency::{es_table, EsConfig, ModelProfile};
use serde::{Deserialize, Serialize};

use crate::config::{self, merge};
use crate::error::{CliError, CliResult};
use crate::{ConfigArg, Outcome};

#[derive(Debug, Clone, Args)]
pub struct EsArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    /// JSON array of {name, r1, map, fd, v, s}.
    #[arg(long)]
    pub models: Option<PathBuf>,
    /// Accuracy floor in percent [default: 30]
    #[arg(long)]
    pub thr: Option<f64>,
    /// Weight of the mAP score [default: 1]
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Also write the table as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EsCliConfig {
    pub models: Option<PathBuf>,
    pub thr: f64,
    pub lambda: f64,
    pub csv: Option<PathBuf>,
}

impl Default for EsCliConfig {
    fn default() -> Self {
        let d = EsConfig::<f64>::default();
        Self {
            models: None,
            thr: d.thr,
            lambda: d.lambda,
            csv: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EsTableRow {
    pub name: String,
    pub score_r1: f64,
    pub score_map: f64,
    pub es: f64,
    /// `es` rounded to two decimals.
    pub es_display: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EsReport {
    pub config: EsCliConfig,
    pub rows: Vec<EsTableRow>,
}

impl EsReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("name,score_r1,score_map,es,es_display\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                r.name, r.score_r1, r.score_map, r.es, r.es_display
            ));
        }
        s
    }
}

pub fn command(args: EsArgs) -> CliResult<Outcome> {
    let mut cfg: EsCliConfig = config::load(args.config.config.as_deref())?;
    merge!(cfg, args, models, thr, lambda, csv);
    let report = run_es(&cfg)?;
    if let Some(path) = &cfg.csv {
        config::write_text(path, &report.to_csv())?;
    }
    Ok(Outcome::ok(config::to_value(&report)))
}

pub fn run_es(cfg: &EsCliConfig) -> CliResult<EsReport> {
    let path = config::required(&cfg.models, "models")?;
    let text =
        fs::read_to_string(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    let models: Vec<ModelProfile<f64>> = serde_json::from_str(&text)
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
    let table = es_table(
        &models,
        &EsConfig {
            thr: cfg.thr,
            lambda: cfg.lambda,
        },
    )?;
    Ok(EsReport {
        config: cfg.clone(),
        rows: table
            .into_iter()
            .map(|r| EsTableRow {
                es_display: format!("{:.2}", r.es),
                name: r.name,
                score_r1: r.score_r1,
                score_map: r.score_map,
                es: r.es,
            })
            .collect(),
    })
}
