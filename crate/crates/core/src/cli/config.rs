//! `key=value` run configuration files.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Parsed configuration file. Keys are lower-cased with `_` mapped to `-`,
/// so `max_iter` and `max-iter` are the same key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

pub(crate) const KNOWN_KEYS: &[&str] = &[
    "algorithm",
    "k",
    "input",
    "affinity",
    "kernel",
    "gamma",
    "degree",
    "coef",
    "eta",
    "beta",
    "seed",
    "max-iter",
    "tol",
    "epsilon",
    "restarts",
    "transpose",
    "normalize-factors",
    "init",
    "output-dir",
];

fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('_', "-")
}

impl ConfigFile {
    /// Blank lines and lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::config(format!(
                    "config line {}: expected key=value",
                    i + 1
                )));
            };
            let key = normalize_key(key);
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::config(format!(
                    "config line {}: unknown key {key:?}",
                    i + 1
                )));
            }
            entries.insert(key, value.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| Error::config(format!("config key {key}: cannot parse {v:?}")))
            })
            .transpose()
    }
}
