use std::io::Write;

use ndarray::{Array1, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::folds::FoldSplit;
use crate::data::{apply_normalization, fit_normalization, Dataset, FeatureRow};
use crate::nn::{
    backward, forward, init_network, loss_mse, predict, LayerSpec, Metrics, NetworkParameters,
};
use crate::optim::{Algorithm, Hyperparameters, OptimizerState};
use crate::{Error, Result};

pub const LOG_HEADER: [&str; 4] = ["epoch", "train_loss", "val_mae", "val_mse"];

/// Rows scored per forward pass during evaluation.
const EVAL_CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: usize,
    /// Sample-weighted mean of the mini-batch MSE seen during the epoch.
    pub train_loss: f64,
    /// Metrics on the evaluation set after the epoch's last update.
    pub val_mae: f64,
    pub val_mse: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingLog {
    pub epochs: Vec<EpochRecord>,
}

impl TrainingLog {
    /// Epoch with the lowest evaluation MSE (earliest on ties).
    pub fn best_epoch(&self) -> Option<usize> {
        self.epochs
            .iter()
            .min_by(|a, b| a.val_mse.total_cmp(&b.val_mse))
            .map(|e| e.epoch)
    }

    pub fn last(&self) -> Option<&EpochRecord> {
        self.epochs.last()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(LOG_HEADER)?;
        for e in &self.epochs {
            w.write_record([
                e.epoch.to_string(),
                e.train_loss.to_string(),
                e.val_mae.to_string(),
                e.val_mse.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv output>", e))?;
        Ok(())
    }
}

/// Predictions and MAE/MSE of `params` on `data`.
pub fn evaluate(params: &NetworkParameters, data: &Dataset) -> Result<(Metrics, Array1<f64>)> {
    if data.is_empty() {
        return Err(Error::Input("cannot evaluate on an empty dataset".into()));
    }
    let mut predictions = Vec::with_capacity(data.len());
    for chunk in data.features.axis_chunks_iter(Axis(0), EVAL_CHUNK) {
        predictions.extend(predict(params, chunk)?);
    }
    let predictions = Array1::from(predictions);
    let metrics = Metrics::compute(
        predictions.as_slice().expect("contiguous"),
        data.targets.as_slice().expect("contiguous"),
    )?;
    Ok((metrics, predictions))
}

/// Mini-batch training from a fresh Glorot initialization.
///
/// Each epoch visits every row once in a seeded random order, one optimizer
/// step per batch. After the epoch the model is scored on `eval`, or on the
/// training data itself when `eval` is `None`. Initialization and shuffling
/// derive from `h.seed` only.
pub fn train(
    specs: &[LayerSpec],
    data: &Dataset,
    eval: Option<&Dataset>,
    algorithm: Algorithm,
    h: &Hyperparameters,
) -> Result<(NetworkParameters, TrainingLog)> {
    h.validate()?;
    if data.is_empty() {
        return Err(Error::Input("no training rows".into()));
    }
    let mut params = init_network(specs, h.seed)?;
    if data.features.ncols() != params.input_dim() {
        return Err(Error::Input(format!(
            "data has {} features, network expects {}",
            data.features.ncols(),
            params.input_dim()
        )));
    }
    let mut state = OptimizerState::new(algorithm, &params);
    let mut rng = ChaCha8Rng::seed_from_u64(h.seed);
    rng.set_stream(1);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let eval = eval.unwrap_or(data);
    let mut log = TrainingLog::default();

    for epoch in 1..=h.epochs {
        order.shuffle(&mut rng);
        let mut weighted_loss = 0.0;
        for (b, idx) in order.chunks(h.batch_size).enumerate() {
            let batch = b + 1;
            let x = data.features.select(Axis(0), idx);
            let y = data.targets.select(Axis(0), idx);
            let (pred, cache) = forward(&params, x.view())?;
            let loss = loss_mse(
                pred.as_slice().expect("contiguous"),
                y.as_slice().expect("contiguous"),
            )?;
            if !loss.is_finite() {
                return Err(Error::Diverged {
                    epoch,
                    batch,
                    reason: format!("loss is {loss}"),
                });
            }
            weighted_loss += loss * idx.len() as f64;
            let grads = backward(&params, &cache, y.view())?;
            state.step(&mut params, &grads, h).map_err(|e| match e {
                Error::Numeric(reason) => Error::Diverged {
                    epoch,
                    batch,
                    reason,
                },
                other => other,
            })?;
        }
        let (metrics, _) = evaluate(&params, eval)?;
        if !metrics.mse.is_finite() {
            return Err(Error::Diverged {
                epoch,
                batch: order.len().div_ceil(h.batch_size),
                reason: "evaluation error is not finite".into(),
            });
        }
        log.epochs.push(EpochRecord {
            epoch,
            train_loss: weighted_loss / data.len() as f64,
            val_mae: metrics.mae,
            val_mse: metrics.mse,
        });
    }
    Ok((params, log))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldScore {
    pub metrics: Metrics,
    pub log: TrainingLog,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    pub folds: Vec<FoldScore>,
    /// Arithmetic mean of the per-fold scores.
    pub mean: Metrics,
}

fn gather(rows: &[FeatureRow], idx: &[usize]) -> Vec<FeatureRow> {
    idx.iter().map(|&i| rows[i]).collect()
}

/// Trains one fresh model per fold on raw (unnormalized) rows. Each fold fits
/// its own normalization on its training partition. Folds run in parallel on
/// the current rayon pool; results are returned in fold order.
pub fn cross_validate(
    specs: &[LayerSpec],
    rows: &[FeatureRow],
    h: &Hyperparameters,
    algorithm: Algorithm,
    folds: &FoldSplit,
) -> Result<CrossValidation> {
    if folds.n_rows != rows.len() || folds.folds.len() != folds.k {
        return Err(Error::Input(format!(
            "fold split covers {} rows, dataset has {}",
            folds.n_rows,
            rows.len()
        )));
    }
    let tag = |fold: usize| {
        move |e: Error| Error::Fold {
            fold,
            source: Box::new(e),
        }
    };
    let scores = folds
        .folds
        .par_iter()
        .enumerate()
        .map(|(i, fold)| {
            let run = || -> Result<FoldScore> {
                let train_rows = gather(rows, &fold.train);
                let stats = fit_normalization(&train_rows)?;
                let train_set = Dataset::from_rows(&apply_normalization(&train_rows, &stats)?);
                let val_set = Dataset::from_rows(&apply_normalization(
                    &gather(rows, &fold.validation),
                    &stats,
                )?);
                let (params, log) = train(specs, &train_set, Some(&val_set), algorithm, h)?;
                let (metrics, _) = evaluate(&params, &val_set)?;
                Ok(FoldScore { metrics, log })
            };
            run().map_err(tag(i))
        })
        .collect::<Result<Vec<_>>>()?;
    let k = scores.len() as f64;
    let mean = Metrics {
        mae: scores.iter().map(|s| s.metrics.mae).sum::<f64>() / k,
        mse: scores.iter().map(|s| s.metrics.mse).sum::<f64>() / k,
    };
    Ok(CrossValidation {
        folds: scores,
        mean,
    })
}
