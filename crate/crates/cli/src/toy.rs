use std::path::PathBuf;

use clap::Args;
use reidkit::descriptor::{write_features, FeatureSet};
use reidkit::eval::extract_pixel_hash_dir;
use serde_json::json;

use crate::error::CliResult;
use crate::Outcome;

#[derive(Debug, Clone, Args)]
pub struct ToyArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
}

/// Writes pixel-hash features with person and camera ids set to 0; the
/// benchmark only reads the feature rows.
pub fn command(args: ToyArgs) -> CliResult<Outcome> {
    let features = extract_pixel_hash_dir(&args.input)?;
    let n = features.rows();
    let set = FeatureSet::new(features, vec![0; n], vec![0; n])?;
    write_features(&args.output, &set)?;
    Ok(Outcome::ok(json!({ "images": n, "output": args.output })))
}
