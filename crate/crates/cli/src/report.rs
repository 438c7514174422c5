//! Versioned JSON envelope shared by every subcommand.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::Config;

pub const SCHEMA: &str = "fsplit-report/1";

#[derive(Debug, Serialize)]
pub struct Report<'a, T: Serialize> {
    pub schema: &'static str,
    pub command: &'a str,
    /// Fixture name or input file stem.
    pub source: &'a str,
    pub parameters: &'a Config,
    pub result: T,
}

impl<'a, T: Serialize> Report<'a, T> {
    pub fn new(command: &'a str, source: &'a str, parameters: &'a Config, result: T) -> Self {
        Report { schema: SCHEMA, command, source, parameters, result }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// Writes `<command>-<source>.json` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<std::path::PathBuf> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(format!("{}-{}.json", self.command, self.source));
        std::fs::write(&path, self.to_json()?).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}
