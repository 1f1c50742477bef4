use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::commands::Command;
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything needed to rerun a command and check its output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub params: Command,
    /// MC seed, when the command draws random sections.
    pub seed: Option<u64>,
    pub version: String,
    pub wall_time_ms: u64,
    pub payload: Value,
}

impl RunRecord {
    pub fn new(params: Command, wall_time_ms: u64, payload: Value) -> Self {
        RunRecord { command: params.name().to_string(), seed: params.seed(), params, version: VERSION.to_string(), wall_time_ms, payload }
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{} is not a run record: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        }
        let text = serde_json::to_string_pretty(self).expect("plain data");
        fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    /// Default location: `<cache>/runs/<command>-<hash of params>.json`.
    pub fn default_path(cache: &Path, params: &Command) -> PathBuf {
        let key = hex::encode(Sha256::digest(serde_json::to_string(params).expect("plain data").as_bytes()));
        cache.join("runs").join(format!("{}-{}.json", params.name(), &key[..16]))
    }
}
