//! Plain `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Keys are
//! case-insensitive and `-`/`_` are interchangeable, so a file can use the
//! same spelling as the command-line flags.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValueConfig {
    entries: BTreeMap<String, (usize, String)>,
}

fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('-', "_")
}

impl KeyValueConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {line_no}: expected key = value")))?;
            let key = normalize_key(key);
            if key.is_empty() {
                return Err(Error::Config(format!("line {line_no}: empty key")));
            }
            if let Some((first, _)) =
                entries.insert(key.clone(), (line_no, value.trim().to_string()))
            {
                return Err(Error::Config(format!(
                    "line {line_no}: key '{key}' already set on line {first}"
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries
            .get(&normalize_key(key))
            .map(|(_, v)| v.as_str())
    }

    /// Parsed value of `key`, if present.
    pub fn get<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        match self.entries.get(&normalize_key(key)) {
            None => Ok(None),
            Some((line, v)) => v.parse().map(Some).map_err(|e| {
                Error::Config(format!("line {line}: invalid value '{v}' for {key}: {e}"))
            }),
        }
    }

    /// Rejects any key outside `allowed`.
    pub fn ensure_only(&self, allowed: &[&str]) -> Result<()> {
        let allowed: Vec<String> = allowed.iter().map(|k| normalize_key(k)).collect();
        let unknown: Vec<String> = self
            .entries
            .iter()
            .filter(|(k, _)| !allowed.contains(k))
            .map(|(k, (line, _))| format!("'{k}' (line {line})"))
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "unknown config keys: {}",
                unknown.join(", ")
            )))
        }
    }
}
