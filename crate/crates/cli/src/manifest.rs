use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::exit::CliError;

/// Written next to every output set. Passing it back through `--config`
/// replays the run with the same resolved configuration.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config_path: Option<String>,
    pub master_seed: Option<u64>,
    pub output_dir: String,
    pub version: String,
    pub timestamp: String,
    pub config: Value,
}

impl RunManifest {
    pub fn new(subcommand: &str, config_path: Option<&Path>, master_seed: Option<u64>, out: &Path, config: Value) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            config_path: config_path.map(|p| p.display().to_string()),
            master_seed,
            output_dir: out.display().to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            config,
        }
    }

    pub fn write(&self, out: &Path) -> Result<(), CliError> {
        let path = out.join("manifest.json");
        let text = serde_json::to_string_pretty(self).map_err(|e| CliError::io("manifest", e))?;
        fs::write(&path, text + "\n").map_err(|e| CliError::io(&path.display().to_string(), e))
    }
}
