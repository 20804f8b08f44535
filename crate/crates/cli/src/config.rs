//! `--config` files: the `JobConfig` shape with every field optional.
//! `.toml` files are read as TOML, anything else as JSON.

use std::path::{Path, PathBuf};

use eit_pipeline::{Operation, OutputFormat};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub input_root: Option<PathBuf>,
    pub output_root: Option<PathBuf>,
    pub operation: Option<Operation>,
    pub master_seed: Option<u64>,
    pub workers: Option<usize>,
    pub image_glob: Option<String>,
    pub format: Option<OutputFormat>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let parsed = if path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("toml"))
        {
            toml::from_str(&text).map_err(|e| e.to_string())
        } else {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }
}
