//! Resolution of settings from flags, an optional `key = value` file and
//! defaults. Flags win over the file.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use socbench::config::KeyValueConfig;
use socbench::optim::Algorithm;
use socbench::{Error, Result};

pub const SEED_ENV: &str = "SOC_BENCH_SEED";

pub struct Settings {
    file: KeyValueConfig,
}

impl Settings {
    /// Loads `path` if given and rejects keys outside `allowed`.
    pub fn load(path: Option<&Path>, allowed: &[&str]) -> Result<Self> {
        let file = match path {
            Some(p) => KeyValueConfig::load(p)?,
            None => KeyValueConfig::default(),
        };
        file.ensure_only(allowed)?;
        Ok(Self { file })
    }

    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.file.get(key),
        }
    }

    pub fn pick_or<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }

    /// A boolean switch is on if the flag is present or the file sets it.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool> {
        Ok(flag || self.file.get::<bool>(key)?.unwrap_or(false))
    }

    /// Seed precedence: flag, config file, `SOC_BENCH_SEED`, then 0.
    pub fn seed(&self, flag: Option<u64>) -> Result<u64> {
        if let Some(s) = self.pick(flag, "seed")? {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|e| Error::Config(format!("{SEED_ENV}='{v}' is not a seed: {e}"))),
            Err(_) => Ok(0),
        }
    }
}

/// Parses `256,256,256` into hidden-layer widths. An empty string means no
/// hidden layers.
pub fn parse_hidden(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|e| Error::Config(format!("invalid hidden width '{s}': {e}")))
        })
        .collect()
}

pub fn parse_optimizers(text: &str) -> Result<Vec<Algorithm>> {
    let algs = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(Algorithm::from_str)
        .collect::<Result<Vec<_>>>()?;
    if algs.is_empty() {
        return Err(Error::Config("optimizer list is empty".into()));
    }
    Ok(algs)
}

/// Parses either one learning rate for every optimizer (`0.001`) or a list
/// of per-optimizer rates (`sgd:0.001,adamax:0.002`).
pub fn parse_learning_rates(
    text: &str,
    optimizers: &[Algorithm],
) -> Result<BTreeMap<Algorithm, f64>> {
    let number = |s: &str| -> Result<f64> {
        s.trim()
            .parse()
            .map_err(|e| Error::Config(format!("invalid learning rate '{s}': {e}")))
    };
    if !text.contains(':') {
        let eta = number(text)?;
        return Ok(optimizers.iter().map(|&a| (a, eta)).collect());
    }
    let mut rates = BTreeMap::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, value) = item
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("expected optimizer:rate, got '{item}'")))?;
        rates.insert(name.parse::<Algorithm>()?, number(value)?);
    }
    Ok(rates)
}
