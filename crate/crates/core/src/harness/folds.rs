use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FoldMode {
    /// Permute row indices before cutting folds.
    #[default]
    Shuffled,
    /// Cut folds from consecutive rows, preserving time order.
    Contiguous,
}

impl FromStr for FoldMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "shuffled" => Ok(FoldMode::Shuffled),
            "contiguous" => Ok(FoldMode::Contiguous),
            other => Err(Error::Config(format!(
                "unknown fold mode '{other}' (valid: shuffled, contiguous)"
            ))),
        }
    }
}

/// Row indices of one fold, each list ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldSplit {
    pub k: usize,
    pub n_rows: usize,
    pub folds: Vec<Fold>,
}

/// Partitions `0..n_rows` into `k` validation folds whose sizes differ by at
/// most one; each fold trains on the complement.
pub fn make_folds(n_rows: usize, k: usize, seed: u64, mode: FoldMode) -> Result<FoldSplit> {
    if k < 2 {
        return Err(Error::Input(format!("need at least 2 folds, got {k}")));
    }
    if k > n_rows {
        return Err(Error::Input(format!(
            "{k} folds requested for {n_rows} rows"
        )));
    }
    let mut order: Vec<usize> = (0..n_rows).collect();
    if mode == FoldMode::Shuffled {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let base = n_rows / k;
    let extra = n_rows % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for i in 0..k {
        let len = base + usize::from(i < extra);
        let mut validation = order[start..start + len].to_vec();
        validation.sort_unstable();
        let mut in_fold = vec![false; n_rows];
        for &v in &validation {
            in_fold[v] = true;
        }
        let train = (0..n_rows).filter(|&r| !in_fold[r]).collect();
        folds.push(Fold { train, validation });
        start += len;
    }
    Ok(FoldSplit { k, n_rows, folds })
}
