//! Flat key=value configuration files.
//!
//! Any long flag can be supplied from a config file (`tau = 0.5`,
//! `sigma-p-sq = 0.001`, `fill-gaps = true`); explicit command-line flags
//! always win. Keys are case-sensitive, `_` and `-` are interchangeable,
//! `#` starts a comment, and values may be quoted.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};

#[derive(Debug, Default)]
pub struct Config {
    values: HashMap<String, String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("failed to read config {}", path.display()))?;
        let mut values = HashMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() || line.starts_with('[') {
                continue; // section headers are tolerated and ignored
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!(
                    "{}:{}: expected `key = value`, got {raw:?}",
                    path.display(),
                    no + 1
                );
            };
            let key = key.trim().replace('_', "-").trim_start_matches("--").to_string();
            let value = value.trim().trim_matches('"').trim_matches('\'').to_string();
            values.insert(key, value);
        }
        Ok(Self { values })
    }

    /// Typed lookup; `None` when the key is absent.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => match raw.parse() {
                Ok(v) => Ok(Some(v)),
                Err(e) => bail!("config key {key}: bad value {raw:?}: {e}"),
            },
        }
    }

    /// Resolution order: explicit flag, then config, then the default.
    pub fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(flag.or(self.get(key)?).unwrap_or(default))
    }

    /// Boolean switches: a set flag wins, otherwise the config value.
    pub fn resolve_switch(&self, flag: bool, key: &str) -> Result<bool> {
        Ok(flag || self.get::<bool>(key)?.unwrap_or(false))
    }
}
