//! JSON model files.
//!
//! ```json
//! {
//!   "layer_specs": [{"in": 4, "out": 256, "activation": "relu"}, ...],
//!   "weights": [[...row-major...], ...],
//!   "biases": [[...], ...],
//!   "normalization": {"mean": [...], "std": [...]},
//!   "seed": 7,
//!   "window": 400
//! }
//! ```
//!
//! Floats are written in shortest round-trip form and parsed back exactly.

use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::data::{NormalizationStats, DEFAULT_WINDOW};
use crate::nn::{Layer, LayerSpec, NetworkParameters};
use crate::{Error, Result};

fn default_window() -> usize {
    DEFAULT_WINDOW
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedModel {
    pub layer_specs: Vec<LayerSpec>,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
    pub normalization: NormalizationStats,
    pub seed: u64,
    /// Moving-average window the features were built with.
    #[serde(default = "default_window")]
    pub window: usize,
}

impl SavedModel {
    pub fn new(
        params: &NetworkParameters,
        normalization: NormalizationStats,
        seed: u64,
        window: usize,
    ) -> Self {
        Self {
            layer_specs: params.specs().to_vec(),
            weights: params
                .layers()
                .iter()
                .map(|l| l.weights.iter().copied().collect())
                .collect(),
            biases: params.layers().iter().map(|l| l.biases.to_vec()).collect(),
            normalization,
            seed,
            window,
        }
    }

    /// Rebuilds the network, checking every shape.
    pub fn network(&self) -> Result<NetworkParameters> {
        if self.weights.len() != self.layer_specs.len()
            || self.biases.len() != self.layer_specs.len()
        {
            return Err(Error::ModelMismatch(format!(
                "{} layer specs, {} weight blocks, {} bias blocks",
                self.layer_specs.len(),
                self.weights.len(),
                self.biases.len()
            )));
        }
        let layers = self
            .layer_specs
            .iter()
            .zip(self.weights.iter().zip(&self.biases))
            .enumerate()
            .map(|(i, (spec, (w, b)))| {
                let weights = Array2::from_shape_vec((spec.output_dim, spec.input_dim), w.clone())
                    .map_err(|_| {
                        Error::ModelMismatch(format!(
                            "layer {i}: {} weights for a {}x{} layer",
                            w.len(),
                            spec.output_dim,
                            spec.input_dim
                        ))
                    })?;
                Ok(Layer {
                    weights,
                    biases: Array1::from(b.clone()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        NetworkParameters::from_layers(self.layer_specs.clone(), layers)
            .map_err(|e| Error::ModelMismatch(e.to_string()))
    }

    /// Checks that the model consumes exactly `feature_count` inputs.
    pub fn check_features(&self, feature_count: usize) -> Result<()> {
        self.normalization.validate()?;
        let input = self.layer_specs.first().map_or(0, |s| s.input_dim);
        if input != feature_count || self.normalization.len() != feature_count {
            return Err(Error::ModelMismatch(format!(
                "model expects {input} inputs with {} normalization entries, data has {feature_count} features",
                self.normalization.len()
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::ModelMismatch(format!("unreadable model: {e}")))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
