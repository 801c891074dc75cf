use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// Reads a subcommand config file, or returns the defaults when `path` is
/// `None`. Unknown keys are rejected by the config types themselves.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> CliResult<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text =
        fs::read_to_string(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

pub fn required<'a>(value: &'a Option<PathBuf>, flag: &str) -> CliResult<&'a Path> {
    value
        .as_deref()
        .ok_or_else(|| CliError::invalid(format!("missing required --{flag}")))
}

/// JSON value with object keys in sorted order.
pub fn to_value<T: Serialize>(v: &T) -> Value {
    // serde_json's default map is a BTreeMap, so a round trip through
    // `Value` sorts every object.
    serde_json::to_value(v).expect("serializable")
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

macro_rules! merge {
    ($cfg:ident, $args:ident, $($field:ident),+ $(,)?) => {
        $(if let Some(v) = $args.$field.clone() {
            $cfg.$field = v.into();
        })+
    };
}
pub(crate) use merge;
