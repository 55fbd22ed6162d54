use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::failure::{Failure, Outcome};
use crate::runs::{read_text, write_json, ResolvedRun};

/// Written next to the primary output of every run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub version: String,
    pub timestamp: String,
    pub seed: u64,
    pub threads: usize,
    pub config: ResolvedRun,
    pub outputs: Vec<String>,
    pub wall_seconds: f64,
}

impl RunManifest {
    pub fn file_name(run: &ResolvedRun) -> String {
        format!("{}.manifest.json", run.primary_output())
    }

    pub fn write(&self, out_dir: &Path) -> Outcome<String> {
        write_json(out_dir, &Self::file_name(&self.config), self)
    }

    pub fn load(path: &Path) -> Outcome<Self> {
        serde_json::from_str(&read_text(path)?).map_err(|e| Failure::parse(path, e))
    }
}
