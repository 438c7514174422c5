//! Run parameters: defaults, then a `key=value` file, then `FSPLIT_*`
//! environment variables, then command-line flags.

use std::path::Path;

use anyhow::{bail, Context, Result};
use fsplit::classify::ClassifyParams;
use serde::Serialize;

pub const ENV_PREFIX: &str = "FSPLIT_";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Config {
    pub seg_len: usize,
    pub horizon: usize,
    pub stability: usize,
    pub length_cap: usize,
    pub ell: usize,
    pub budget: usize,
    pub letters: usize,
    pub range: i64,
    pub power: Option<usize>,
}

impl Default for Config {
    fn default() -> Config {
        let p = ClassifyParams::default();
        Config {
            seg_len: p.w.attraction.seg_len,
            horizon: p.w.attraction.horizon,
            stability: p.w.attraction.stability,
            length_cap: p.w.attraction.length_cap,
            ell: p.w.ell,
            budget: p.budget.moves,
            letters: p.budget.letters,
            range: p.range,
            power: None,
        }
    }
}

pub const KEYS: [&str; 9] = ["seg_len", "horizon", "stability", "length_cap", "ell", "budget", "letters", "range", "power"];

impl Config {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        let num = || v.parse::<usize>().with_context(|| format!("{key}={v} is not a non-negative integer"));
        match key {
            "seg_len" => self.seg_len = num()?,
            "horizon" => self.horizon = num()?,
            "stability" => self.stability = num()?,
            "length_cap" => self.length_cap = num()?,
            "ell" => self.ell = num()?,
            "budget" => self.budget = num()?,
            "letters" => self.letters = num()?,
            "range" => self.range = num()? as i64,
            "power" => self.power = Some(num()?),
            _ => bail!("unknown config key {key}"),
        }
        Ok(())
    }

    /// `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').with_context(|| format!("config line {}: expected key=value", i + 1))?;
            self.set(k.trim(), v).with_context(|| format!("config line {}", i + 1))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        self.apply_text(&text)
    }

    pub fn apply_env(&mut self, vars: impl IntoIterator<Item = (String, String)>) -> Result<()> {
        for (k, v) in vars {
            if let Some(key) = k.strip_prefix(ENV_PREFIX) {
                let key = key.to_ascii_lowercase();
                if KEYS.contains(&key.as_str()) {
                    self.set(&key, &v).with_context(|| format!("environment variable {k}"))?;
                }
            }
        }
        Ok(())
    }

    pub fn params(&self) -> ClassifyParams {
        let mut p = ClassifyParams::default();
        p.w.attraction.seg_len = self.seg_len;
        p.w.attraction.horizon = self.horizon;
        p.w.attraction.stability = self.stability;
        p.w.attraction.length_cap = self.length_cap;
        p.w.ell = self.ell;
        p.budget.moves = self.budget;
        p.budget.letters = self.letters;
        p.range = self.range;
        p.power = self.power;
        p
    }
}
