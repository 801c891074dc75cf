use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;
use reidkit::descriptor::{read_features, Metric};
use reidkit::eval::{evaluate, EvalOptions};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{self, merge};
use crate::error::CliResult;
use crate::{ConfigArg, Outcome};

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    /// Query REIDFEAT file.
    #[arg(long)]
    pub query: Option<PathBuf>,
    /// Gallery REIDFEAT file.
    #[arg(long)]
    pub gallery: Option<PathBuf>,
    /// euclidean or cosine [default: euclidean]
    #[arg(long)]
    pub metric: Option<Metric>,
    /// CMC ranks to report [default: 1,5,10]
    #[arg(long, value_delimiter = ',')]
    pub ranks: Option<Vec<usize>>,
    /// L2-normalize features before computing distances.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    pub query: Option<PathBuf>,
    pub gallery: Option<PathBuf>,
    pub metric: Metric,
    pub ranks: Vec<usize>,
    pub normalize: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        let o = EvalOptions::default();
        Self {
            query: None,
            gallery: None,
            metric: o.metric,
            ranks: o.ranks,
            normalize: o.normalize,
        }
    }
}

pub fn command(args: EvalArgs) -> CliResult<Outcome> {
    let mut cfg: EvalConfig = config::load(args.config.config.as_deref())?;
    merge!(cfg, args, query, gallery, metric, ranks);
    cfg.normalize |= args.normalize;
    Ok(Outcome::ok(run_eval(&cfg)?))
}

/// `{"R<k>": cmc, ..., "mAP": map, "valid_queries": n, "config": {...}}`.
pub fn run_eval(cfg: &EvalConfig) -> CliResult<Value> {
    let q = read_features(config::required(&cfg.query, "query")?)?.cast::<f64>();
    let g = read_features(config::required(&cfg.gallery, "gallery")?)?.cast::<f64>();
    let opts = EvalOptions {
        metric: cfg.metric,
        ranks: cfg.ranks.clone(),
        normalize: cfg.normalize,
    };
    let r = evaluate(&q, &g, &opts)?;
    let mut out: BTreeMap<String, Value> = r
        .cmc_at
        .iter()
        .map(|&(k, v)| (format!("R{k}"), Value::from(v)))
        .collect();
    out.insert("mAP".into(), r.map.into());
    out.insert("valid_queries".into(), r.valid_queries.into());
    out.insert("config".into(), config::to_value(cfg));
    Ok(config::to_value(&out))
}
