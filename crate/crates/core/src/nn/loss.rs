use crate::{Error, Result};

fn check_pair(predictions: &[f64], targets: &[f64]) -> Result<()> {
    if predictions.len() != targets.len() {
        return Err(Error::Input(format!(
            "{} predictions vs {} targets",
            predictions.len(),
            targets.len()
        )));
    }
    if predictions.is_empty() {
        return Err(Error::Input("cannot score an empty prediction set".into()));
    }
    Ok(())
}

/// Mean squared error.
pub fn loss_mse(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    check_pair(predictions, targets)?;
    let sum: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok(sum / predictions.len() as f64)
}

/// Mean absolute error.
pub fn loss_mae(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    check_pair(predictions, targets)?;
    let sum: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(p, t)| (p - t).abs())
        .sum();
    Ok(sum / predictions.len() as f64)
}

/// MAE and MSE of one prediction set, in target units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub mae: f64,
    pub mse: f64,
}

impl Metrics {
    pub fn compute(predictions: &[f64], targets: &[f64]) -> Result<Self> {
        Ok(Self {
            mae: loss_mae(predictions, targets)?,
            mse: loss_mse(predictions, targets)?,
        })
    }

    pub fn rmse(&self) -> f64 {
        self.mse.sqrt()
    }
}
