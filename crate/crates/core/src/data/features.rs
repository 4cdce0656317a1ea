use std::io::Write;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::{DriveCycleRecord, SocSeries};
use crate::nn::FEATURE_COUNT;
use crate::{Error, Result};

/// Moving-average length in samples.
pub const DEFAULT_WINDOW: usize = 400;

pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "x1 voltage",
    "x2 mean voltage",
    "x3 mean current",
    "x4 mean temperature",
];

/// One design-matrix row plus its SOC target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureRow {
    /// `V(t)`.
    pub voltage: f64,
    /// Trailing mean of the voltage.
    pub voltage_avg: f64,
    /// Trailing mean of the current.
    pub current_avg: f64,
    /// Trailing mean of the temperature.
    pub temperature_avg: f64,
    /// Target SOC in percent.
    pub soc: f64,
}

impl FeatureRow {
    pub fn features(&self) -> [f64; FEATURE_COUNT] {
        [
            self.voltage,
            self.voltage_avg,
            self.current_avg,
            self.temperature_avg,
        ]
    }

    fn with_features(&self, f: [f64; FEATURE_COUNT]) -> Self {
        Self {
            voltage: f[0],
            voltage_avg: f[1],
            current_avg: f[2],
            temperature_avg: f[3],
            soc: self.soc,
        }
    }
}

/// `out[i]` is the mean of `series[i + 1 - min(window, i + 1) ..= i]`: the
/// current sample and up to `window - 1` predecessors.
pub fn moving_average(series: &[f64], window: usize) -> Result<Vec<f64>> {
    if window == 0 {
        return Err(Error::Input(
            "moving-average window must be at least 1".into(),
        ));
    }
    if series.is_empty() {
        return Err(Error::Input("moving average of an empty series".into()));
    }
    Ok((0..series.len())
        .map(|i| {
            let start = (i + 1).saturating_sub(window);
            let slice = &series[start..=i];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect())
}

pub fn build_design_matrix(
    records: &[DriveCycleRecord],
    soc: &SocSeries,
    window: usize,
) -> Result<Vec<FeatureRow>> {
    if records.len() != soc.soc_percent.len() {
        return Err(Error::Input(format!(
            "{} records but {} SOC values",
            records.len(),
            soc.soc_percent.len()
        )));
    }
    let column = |f: fn(&DriveCycleRecord) -> f64| records.iter().map(f).collect::<Vec<_>>();
    let v_avg = moving_average(&column(|r| r.voltage_v), window)?;
    let i_avg = moving_average(&column(|r| r.current_a), window)?;
    let t_avg = moving_average(&column(|r| r.temperature_c), window)?;
    Ok(records
        .iter()
        .enumerate()
        .map(|(i, r)| FeatureRow {
            voltage: r.voltage_v,
            voltage_avg: v_avg[i],
            current_avg: i_avg[i],
            temperature_avg: t_avg[i],
            soc: soc.soc_percent[i],
        })
        .collect())
}

/// Per-feature mean and population standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

const MIN_STD: f64 = 1e-12;

impl NormalizationStats {
    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    pub fn normalize(&self, features: &mut [f64]) {
        for ((x, m), s) in features.iter_mut().zip(&self.mean).zip(&self.std) {
            *x = (*x - m) / s;
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mean.len() != self.std.len() {
            return Err(Error::ModelMismatch(format!(
                "normalization has {} means but {} deviations",
                self.mean.len(),
                self.std.len()
            )));
        }
        if self.mean.iter().any(|m| !m.is_finite())
            || self.std.iter().any(|s| !(s.is_finite() && *s > MIN_STD))
        {
            return Err(Error::ModelMismatch(
                "normalization statistics are degenerate".into(),
            ));
        }
        Ok(())
    }
}

/// Fits z-score statistics. Call on training rows only.
pub fn fit_normalization(rows: &[FeatureRow]) -> Result<NormalizationStats> {
    if rows.len() < 2 {
        return Err(Error::Data(format!(
            "normalization needs at least 2 rows, got {}",
            rows.len()
        )));
    }
    let n = rows.len() as f64;
    let mut mean = vec![0.0; FEATURE_COUNT];
    let mut std = vec![0.0; FEATURE_COUNT];
    for j in 0..FEATURE_COUNT {
        let mu = rows.iter().map(|r| r.features()[j]).sum::<f64>() / n;
        let var = rows
            .iter()
            .map(|r| {
                let d = r.features()[j] - mu;
                d * d
            })
            .sum::<f64>()
            / n;
        let sigma = var.sqrt();
        if sigma.is_nan() || sigma <= MIN_STD {
            return Err(Error::Data(format!(
                "feature '{}' is constant (std {sigma:e}); cannot normalize",
                FEATURE_NAMES[j]
            )));
        }
        mean[j] = mu;
        std[j] = sigma;
    }
    Ok(NormalizationStats { mean, std })
}

/// Applies `(x - mean) / std` to the features. Targets are untouched.
pub fn apply_normalization(
    rows: &[FeatureRow],
    stats: &NormalizationStats,
) -> Result<Vec<FeatureRow>> {
    if stats.len() != FEATURE_COUNT {
        return Err(Error::ModelMismatch(format!(
            "normalization covers {} features, rows have {FEATURE_COUNT}",
            stats.len()
        )));
    }
    Ok(rows
        .iter()
        .map(|r| {
            let mut f = r.features();
            stats.normalize(&mut f);
            r.with_features(f)
        })
        .collect())
}

/// Feature matrix (`n x 4`) and target vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Array2<f64>,
    pub targets: Array1<f64>,
}

impl Dataset {
    pub fn from_rows(rows: &[FeatureRow]) -> Self {
        let features =
            Array2::from_shape_fn((rows.len(), FEATURE_COUNT), |(i, j)| rows[i].features()[j]);
        let targets = rows.iter().map(|r| r.soc).collect();
        Self { features, targets }
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}

/// Exports rows as `x1,x2,x3,x4,soc`.
pub fn write_feature_csv<W: Write>(writer: W, rows: &[FeatureRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["x1", "x2", "x3", "x4", "soc"])?;
    for r in rows {
        let f = r.features();
        w.write_record([
            f[0].to_string(),
            f[1].to_string(),
            f[2].to_string(),
            f[3].to_string(),
            r.soc.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}
