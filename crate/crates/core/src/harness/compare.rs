use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use super::folds::{make_folds, FoldMode};
use super::train::{cross_validate, evaluate, train, CrossValidation, TrainingLog};
use crate::data::{apply_normalization, fit_normalization, Dataset, FeatureRow};
use crate::nn::{default_architecture, LayerSpec, Metrics};
use crate::optim::{Algorithm, Hyperparameters};
use crate::{Error, Result};

pub const RESULTS_HEADER: [&str; 7] = [
    "cycle",
    "optimizer",
    "mae",
    "mse",
    "rmse",
    "seconds",
    "seed",
];

/// Raw (unnormalized) design-matrix rows of one drive cycle, in time order.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleDataset {
    pub name: String,
    pub rows: Vec<FeatureRow>,
}

/// Number of contiguous blocks a cycle is cut into by [`SplitMode::Interleaved`].
pub const SPLIT_BLOCKS: usize = 10;

/// How a cycle is divided into training and test rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitMode {
    /// Cut the cycle into [`SPLIT_BLOCKS`] contiguous blocks and hold out
    /// evenly spaced interior blocks. Test rows stay contiguous in time but
    /// their SOC range is bracketed by training data.
    #[default]
    Interleaved,
    /// Leading rows train, trailing rows test.
    Chronological,
}

impl FromStr for SplitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "interleaved" => Ok(SplitMode::Interleaved),
            "chronological" => Ok(SplitMode::Chronological),
            other => Err(Error::Config(format!(
                "unknown split mode '{other}' (valid: interleaved, chronological)"
            ))),
        }
    }
}

/// Returns ascending (train, test) row indices for `n` time-ordered rows.
///
/// The interleaved split holds out `round((1 - train_fraction) * 10)`
/// blocks (at least one), so the realised test share is rounded to tenths.
pub fn split_rows(
    n: usize,
    train_fraction: f64,
    mode: SplitMode,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Config(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let (train, test): (Vec<usize>, Vec<usize>) = match mode {
        SplitMode::Chronological => {
            let n_train = (n as f64 * train_fraction).round() as usize;
            ((0..n_train.min(n)).collect(), (n_train.min(n)..n).collect())
        }
        SplitMode::Interleaved => {
            if n < SPLIT_BLOCKS {
                return Err(Error::Input(format!(
                    "interleaved split needs at least {SPLIT_BLOCKS} rows, got {n}"
                )));
            }
            let held = (((1.0 - train_fraction) * SPLIT_BLOCKS as f64).round() as usize)
                .clamp(1, SPLIT_BLOCKS - 1);
            let test_blocks: Vec<usize> = (0..held)
                .map(|j| ((2 * j + 1) * SPLIT_BLOCKS) / (2 * held))
                .collect();
            (0..n).partition(|&i| !test_blocks.contains(&(i * SPLIT_BLOCKS / n)))
        }
    };
    if train.is_empty() || test.is_empty() {
        return Err(Error::Input(format!(
            "{n} rows leave an empty partition at train fraction {train_fraction}"
        )));
    }
    Ok((train, test))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonConfig {
    pub architecture: Vec<LayerSpec>,
    /// Shared settings. `eta` is replaced per optimizer, see
    /// [`hyper_for`](Self::hyper_for).
    pub hyper: Hyperparameters,
    /// Per-optimizer learning rates; absent entries use the optimizer default.
    pub learning_rates: BTreeMap<Algorithm, f64>,
    pub folds: usize,
    pub fold_mode: FoldMode,
    /// Share of each cycle used for training; the rest is the test set.
    pub train_fraction: f64,
    pub split: SplitMode,
}

impl Default for ComparisonConfig {
    fn default() -> Self {
        Self {
            architecture: default_architecture(),
            hyper: Hyperparameters::default(),
            learning_rates: BTreeMap::new(),
            folds: 4,
            fold_mode: FoldMode::Shuffled,
            train_fraction: 0.8,
            split: SplitMode::Interleaved,
        }
    }
}

impl ComparisonConfig {
    pub fn hyper_for(&self, algorithm: Algorithm) -> Hyperparameters {
        Hyperparameters {
            eta: self
                .learning_rates
                .get(&algorithm)
                .copied()
                .unwrap_or(algorithm.default_learning_rate()),
            ..self.hyper
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub cycle: String,
    pub optimizer: Algorithm,
    /// Held-out test error, % SOC and %^2 SOC.
    pub test: Metrics,
    pub seconds: f64,
    pub seed: u64,
    pub cross_validation: CrossValidation,
    /// Log of the final model trained on the whole training portion, scored
    /// on that same portion.
    pub final_log: TrainingLog,
    pub train_rows: usize,
    pub test_rows: usize,
}

impl ExperimentResult {
    pub fn rmse(&self) -> f64 {
        self.test.rmse()
    }
}

/// A cycle or (cycle, optimizer) pair that produced no result.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub cycle: String,
    pub optimizer: Option<Algorithm>,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ComparisonReport {
    /// Sorted by cycle name, then optimizer.
    pub results: Vec<ExperimentResult>,
    pub failures: Vec<RunFailure>,
}

impl ComparisonReport {
    pub fn get(&self, cycle: &str, optimizer: Algorithm) -> Option<&ExperimentResult> {
        self.results
            .iter()
            .find(|r| r.cycle == cycle && r.optimizer == optimizer)
    }
}

fn run_pair(
    cycle: &CycleDataset,
    algorithm: Algorithm,
    cfg: &ComparisonConfig,
) -> Result<ExperimentResult> {
    let started = Instant::now();
    let h = cfg.hyper_for(algorithm);
    let n = cycle.rows.len();
    let (train_idx, test_idx) = split_rows(n, cfg.train_fraction, cfg.split)?;
    if train_idx.len() < cfg.folds {
        return Err(Error::Input(format!(
            "{} training rows cannot form {} folds",
            train_idx.len(),
            cfg.folds
        )));
    }
    let train_rows: Vec<FeatureRow> = train_idx.iter().map(|&i| cycle.rows[i]).collect();
    let test_rows: Vec<FeatureRow> = test_idx.iter().map(|&i| cycle.rows[i]).collect();
    let n_train = train_rows.len();

    let folds = make_folds(n_train, cfg.folds, h.seed, cfg.fold_mode)?;
    let cross_validation = cross_validate(&cfg.architecture, &train_rows, &h, algorithm, &folds)?;

    let stats = fit_normalization(&train_rows)?;
    let train_set = Dataset::from_rows(&apply_normalization(&train_rows, &stats)?);
    let test_set = Dataset::from_rows(&apply_normalization(&test_rows, &stats)?);
    let (params, final_log) = train(&cfg.architecture, &train_set, None, algorithm, &h)?;
    let (test, _) = evaluate(&params, &test_set)?;

    Ok(ExperimentResult {
        cycle: cycle.name.clone(),
        optimizer: algorithm,
        test,
        seconds: started.elapsed().as_secs_f64(),
        seed: h.seed,
        cross_validation,
        final_log,
        train_rows: n_train,
        test_rows: n - n_train,
    })
}

/// Runs every (cycle, optimizer) pair: train/test split per `cfg.split`,
/// K-fold cross-validation on the training portion, a final model on the
/// whole training portion and its error on the test portion.
///
/// Pairs run in parallel on the current rayon pool. A pair that fails is
/// recorded in [`ComparisonReport::failures`] without stopping the others.
pub fn run_comparison(
    cycles: &[CycleDataset],
    optimizers: &[Algorithm],
    cfg: &ComparisonConfig,
) -> Result<ComparisonReport> {
    if cycles.is_empty() {
        return Err(Error::Input("no drive cycles to compare".into()));
    }
    if optimizers.is_empty() {
        return Err(Error::Input("no optimizers to compare".into()));
    }
    if !(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0) {
        return Err(Error::Config(format!(
            "train fraction must lie in (0, 1), got {}",
            cfg.train_fraction
        )));
    }
    cfg.hyper.validate()?;
    for &alg in optimizers {
        cfg.hyper_for(alg).validate()?;
    }
    crate::nn::validate_specs(&cfg.architecture)?;

    let mut algorithms = optimizers.to_vec();
    algorithms.sort_unstable();
    algorithms.dedup();
    let pairs: Vec<(&CycleDataset, Algorithm)> = cycles
        .iter()
        .flat_map(|c| algorithms.iter().map(move |&a| (c, a)))
        .collect();
    let outcomes: Vec<(String, Algorithm, Result<ExperimentResult>)> = pairs
        .par_iter()
        .map(|&(cycle, alg)| (cycle.name.clone(), alg, run_pair(cycle, alg, cfg)))
        .collect();

    let mut report = ComparisonReport::default();
    for (cycle, optimizer, outcome) in outcomes {
        match outcome {
            Ok(r) => report.results.push(r),
            Err(e) => report.failures.push(RunFailure {
                cycle,
                optimizer: Some(optimizer),
                message: e.to_string(),
            }),
        }
    }
    report
        .results
        .sort_by(|a, b| a.cycle.cmp(&b.cycle).then(a.optimizer.cmp(&b.optimizer)));
    report
        .failures
        .sort_by(|a, b| a.cycle.cmp(&b.cycle).then(a.optimizer.cmp(&b.optimizer)));
    Ok(report)
}

/// Writes `cycle,optimizer,mae,mse,rmse,seconds,seed`.
///
/// Wall time is the only non-reproducible quantity in a result; with
/// `record_time == false` the `seconds` column is written as `0` so that
/// repeated runs produce identical files.
pub fn write_results_csv<W: Write>(
    writer: W,
    results: &[ExperimentResult],
    record_time: bool,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(RESULTS_HEADER)?;
    for r in results {
        let seconds = if record_time {
            format!("{:.3}", r.seconds)
        } else {
            "0".to_string()
        };
        w.write_record([
            r.cycle.clone(),
            r.optimizer.key().to_string(),
            r.test.mae.to_string(),
            r.test.mse.to_string(),
            r.rmse().to_string(),
            seconds,
            r.seed.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

fn render_grid(
    out: &mut String,
    title: &str,
    report: &ComparisonReport,
    pick: impl Fn(&ExperimentResult) -> Metrics,
) {
    let mut optimizers: Vec<Algorithm> = report.results.iter().map(|r| r.optimizer).collect();
    optimizers.sort_unstable();
    optimizers.dedup();
    let mut cycles: BTreeMap<&str, ()> = BTreeMap::new();
    for r in &report.results {
        cycles.insert(&r.cycle, ());
    }
    let name_w = cycles
        .keys()
        .map(|c| c.len())
        .max()
        .unwrap_or(0)
        .max("Drive cycle".len());
    const CELL: usize = 19;

    let _ = writeln!(out, "{title}");
    let mut head = format!("{:<name_w$}", "Drive cycle");
    let mut sub = format!("{:<name_w$}", "");
    let mut rule = "-".repeat(name_w);
    for alg in &optimizers {
        let _ = write!(head, " | {:^CELL$}", alg.label());
        let _ = write!(sub, " | {:>9} {:>9}", "MAE", "MSE");
        rule.push_str(&format!("-+-{}", "-".repeat(CELL)));
    }
    let _ = writeln!(out, "{}", head.trim_end());
    let _ = writeln!(out, "{sub}");
    let _ = writeln!(out, "{rule}");
    for cycle in cycles.keys() {
        let mut line = format!("{cycle:<name_w$}");
        for &alg in &optimizers {
            match report.get(cycle, alg) {
                Some(r) => {
                    let m = pick(r);
                    let _ = write!(line, " | {:>9.4} {:>9.4}", m.mae, m.mse);
                }
                None => {
                    let _ = write!(line, " | {:>9} {:>9}", "-", "-");
                }
            }
        }
        let _ = writeln!(out, "{line}");
    }
}

/// Fixed-layout text report: one row per cycle, MAE/MSE column pairs per
/// optimizer, for the test set and for the cross-validation means.
pub fn format_table(report: &ComparisonReport) -> String {
    let mut out = String::new();
    render_grid(
        &mut out,
        "Test-set error (MAE in % SOC, MSE in %^2 SOC)",
        report,
        |r| r.test,
    );
    out.push('\n');
    render_grid(
        &mut out,
        "Cross-validation error, mean over folds",
        report,
        |r| r.cross_validation.mean,
    );
    if !report.failures.is_empty() {
        out.push_str("\nFailed runs\n");
        for f in &report.failures {
            let opt = f.optimizer.map_or("-", Algorithm::key);
            let _ = writeln!(out, "{} / {}: {}", f.cycle, opt, f.message);
        }
    }
    out
}
