//! Run manifests: every command writes `<output>.manifest.json` beside its
//! output, capturing the full configuration so the run can be reproduced
//! byte for byte. Deliberately carries no timestamps.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{io_err, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub format_version: u32,
    pub command: String,
    pub args: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            tool: "dtl".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            format_version: super::model::FORMAT_VERSION,
            command: command.into(),
            args: BTreeMap::new(),
        }
    }

    pub fn arg(mut self, key: &str, value: impl ToString) -> Self {
        self.args.insert(key.into(), value.to_string());
        self
    }

    /// Writes the manifest beside the given output path.
    pub fn write_beside(&self, output: &Path) -> Result<()> {
        let mut name = output.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        let path = output.with_file_name(name);
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(&path, json + "\n").map_err(|e| io_err(&path, e))
    }
}
