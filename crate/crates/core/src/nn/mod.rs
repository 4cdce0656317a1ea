//! Dense feed-forward regression network.
//!
//! Layers compute `a = g(W a_prev + b)` with `W` stored as an
//! `output_dim x input_dim` matrix. Hidden layers use ReLU and the single
//! output unit is linear. Batches are `n x input_dim` matrices, one sample
//! per row.

mod loss;
mod network;

use std::sync::atomic::{AtomicU64, Ordering};

use ndarray::{Array, Array1, Array2, Dimension};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use loss::{loss_mae, loss_mse, Metrics};
pub use network::{backward, forward, predict, ForwardCache};

/// Input width of the battery design matrix (V, mean V, mean I, mean T).
pub const FEATURE_COUNT: usize = 4;

/// Hidden widths of the reference architecture.
pub const DEFAULT_HIDDEN: [usize; 3] = [256, 256, 256];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Activation {
    #[serde(rename = "relu")]
    ReLU,
    #[serde(rename = "identity")]
    Identity,
}

impl Activation {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::ReLU => z.max(0.0),
            Activation::Identity => z,
        }
    }

    /// Derivative with respect to the pre-activation. ReLU'(0) is 0.
    #[inline]
    pub fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::ReLU => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Identity => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    #[serde(rename = "in")]
    pub input_dim: usize,
    #[serde(rename = "out")]
    pub output_dim: usize,
    pub activation: Activation,
}

impl LayerSpec {
    pub fn new(input_dim: usize, output_dim: usize, activation: Activation) -> Self {
        Self {
            input_dim,
            output_dim,
            activation,
        }
    }

    /// Weights plus biases.
    pub fn parameter_count(&self) -> usize {
        self.output_dim * self.input_dim + self.output_dim
    }
}

/// ReLU hidden layers of the given widths followed by one linear output
/// unit. An empty `hidden` gives a linear model.
pub fn architecture(input_dim: usize, hidden: &[usize]) -> Vec<LayerSpec> {
    let mut specs = Vec::with_capacity(hidden.len() + 1);
    let mut prev = input_dim;
    for &width in hidden {
        specs.push(LayerSpec::new(prev, width, Activation::ReLU));
        prev = width;
    }
    specs.push(LayerSpec::new(prev, 1, Activation::Identity));
    specs
}

/// `4 -> 256 -> 256 -> 256 -> 1`, 133,121 trainable parameters.
pub fn default_architecture() -> Vec<LayerSpec> {
    architecture(FEATURE_COUNT, &DEFAULT_HIDDEN)
}

pub fn validate_specs(specs: &[LayerSpec]) -> Result<()> {
    if specs.is_empty() {
        return Err(Error::Config("network needs at least one layer".into()));
    }
    for (i, spec) in specs.iter().enumerate() {
        if spec.input_dim == 0 || spec.output_dim == 0 {
            return Err(Error::Config(format!(
                "layer {i} has a zero dimension ({} -> {})",
                spec.input_dim, spec.output_dim
            )));
        }
    }
    for (i, pair) in specs.windows(2).enumerate() {
        if pair[0].output_dim != pair[1].input_dim {
            return Err(Error::Config(format!(
                "layer {} outputs {} values but layer {} expects {}",
                i,
                pair[0].output_dim,
                i + 1,
                pair[1].input_dim
            )));
        }
    }
    let last = specs.last().expect("non-empty");
    if last.output_dim != 1 {
        return Err(Error::Config(format!(
            "output layer must have a single unit, got {}",
            last.output_dim
        )));
    }
    Ok(())
}

/// Weight matrix and bias vector of one layer. Also used for gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weights: Array2<f64>,
    pub biases: Array1<f64>,
}

impl Layer {
    fn zeros(spec: &LayerSpec) -> Self {
        Self {
            weights: Array2::zeros((spec.output_dim, spec.input_dim)),
            biases: Array1::zeros(spec.output_dim),
        }
    }

    /// Row-major copies where needed, so flat tensor views line up with
    /// parameter order. Matrix products of transposed views can come back
    /// column-major.
    fn into_standard_layout(self) -> Self {
        fn standard<D: Dimension>(a: Array<f64, D>) -> Array<f64, D> {
            if a.is_standard_layout() {
                a
            } else {
                a.as_standard_layout().into_owned()
            }
        }
        Self {
            weights: standard(self.weights),
            biases: standard(self.biases),
        }
    }

    fn matches(&self, spec: &LayerSpec) -> bool {
        self.weights.dim() == (spec.output_dim, spec.input_dim)
            && self.biases.len() == spec.output_dim
    }
}

static NEXT_NETWORK_ID: AtomicU64 = AtomicU64::new(1);

fn next_id() -> u64 {
    NEXT_NETWORK_ID.fetch_add(1, Ordering::Relaxed)
}

/// Trainable parameters of a network.
///
/// Every instance carries an identity and a revision counter so that a
/// [`ForwardCache`] can be checked against the exact parameter values it was
/// computed from.
#[derive(Debug)]
pub struct NetworkParameters {
    specs: Vec<LayerSpec>,
    layers: Vec<Layer>,
    id: u64,
    revision: u64,
}

impl Clone for NetworkParameters {
    fn clone(&self) -> Self {
        Self {
            specs: self.specs.clone(),
            layers: self.layers.clone(),
            id: next_id(),
            revision: 0,
        }
    }
}

impl PartialEq for NetworkParameters {
    fn eq(&self, other: &Self) -> bool {
        self.specs == other.specs && self.layers == other.layers
    }
}

impl NetworkParameters {
    /// Builds a network from explicit layer values.
    pub fn from_layers(specs: Vec<LayerSpec>, layers: Vec<Layer>) -> Result<Self> {
        validate_specs(&specs)?;
        if layers.len() != specs.len() {
            return Err(Error::Input(format!(
                "{} layer specs but {} parameter layers",
                specs.len(),
                layers.len()
            )));
        }
        for (i, (spec, layer)) in specs.iter().zip(&layers).enumerate() {
            if !layer.matches(spec) {
                return Err(Error::Input(format!(
                    "layer {i}: expected weights {}x{} and {} biases, got {:?} and {}",
                    spec.output_dim,
                    spec.input_dim,
                    spec.output_dim,
                    layer.weights.dim(),
                    layer.biases.len()
                )));
            }
            if layer
                .weights
                .iter()
                .chain(layer.biases.iter())
                .any(|v| !v.is_finite())
            {
                return Err(Error::Input(format!("layer {i} holds non-finite values")));
            }
        }
        Ok(Self {
            specs,
            layers: layers
                .into_iter()
                .map(Layer::into_standard_layout)
                .collect(),
            id: next_id(),
            revision: 0,
        })
    }

    pub fn specs(&self) -> &[LayerSpec] {
        &self.specs
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.specs[0].input_dim
    }

    /// Flat views of every weight matrix and bias vector, in layer order
    /// (weights then biases).
    pub fn tensors(&self) -> impl Iterator<Item = &[f64]> {
        self.layers.iter().flat_map(|l| {
            [
                l.weights.as_slice().expect("standard layout"),
                l.biases.as_slice().expect("standard layout"),
            ]
        })
    }

    /// Mutable counterpart of [`tensors`](Self::tensors). Invalidates any
    /// outstanding [`ForwardCache`].
    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        self.revision += 1;
        self.layers
            .iter_mut()
            .flat_map(|l| {
                [
                    l.weights.as_slice_mut().expect("standard layout"),
                    l.biases.as_slice_mut().expect("standard layout"),
                ]
            })
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().all(|t| t.iter().all(|v| v.is_finite()))
    }

    pub(crate) fn stamp(&self) -> (u64, u64) {
        (self.id, self.revision)
    }
}

/// Glorot-uniform weights (`+-sqrt(6 / (fan_in + fan_out))`) and zero biases,
/// drawn from a ChaCha8 stream seeded with `seed`.
pub fn init_network(specs: &[LayerSpec], seed: u64) -> Result<NetworkParameters> {
    validate_specs(specs)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layers = specs
        .iter()
        .map(|spec| {
            let limit = (6.0 / (spec.input_dim + spec.output_dim) as f64).sqrt();
            let mut layer = Layer::zeros(spec);
            for w in layer.weights.iter_mut() {
                *w = rng.random_range(-limit..limit);
            }
            layer
        })
        .collect();
    NetworkParameters::from_layers(specs.to_vec(), layers)
}

pub fn count_parameters(params: &NetworkParameters) -> usize {
    params.specs().iter().map(LayerSpec::parameter_count).sum()
}

/// dJ/dθ for every parameter, shaped like the network it was computed for.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSet {
    layers: Vec<Layer>,
}

impl GradientSet {
    pub fn new(layers: Vec<Layer>) -> Self {
        Self {
            layers: layers
                .into_iter()
                .map(Layer::into_standard_layout)
                .collect(),
        }
    }

    pub fn zeros_like(params: &NetworkParameters) -> Self {
        Self::filled_like(params, 0.0)
    }

    /// Every coordinate set to `value`.
    pub fn filled_like(params: &NetworkParameters, value: f64) -> Self {
        Self {
            layers: params
                .specs()
                .iter()
                .map(|spec| Layer {
                    weights: Array2::from_elem((spec.output_dim, spec.input_dim), value),
                    biases: Array1::from_elem(spec.output_dim, value),
                })
                .collect(),
        }
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn tensors(&self) -> impl Iterator<Item = &[f64]> {
        self.layers.iter().flat_map(|l| {
            [
                l.weights.as_slice().expect("standard layout"),
                l.biases.as_slice().expect("standard layout"),
            ]
        })
    }

    pub fn tensors_mut(&mut self) -> impl Iterator<Item = &mut [f64]> {
        self.layers.iter_mut().flat_map(|l| {
            [
                l.weights.as_slice_mut().expect("standard layout"),
                l.biases.as_slice_mut().expect("standard layout"),
            ]
        })
    }

    pub fn matches(&self, params: &NetworkParameters) -> bool {
        self.layers.len() == params.specs().len()
            && self
                .layers
                .iter()
                .zip(params.specs())
                .all(|(l, s)| l.matches(s))
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().all(|t| t.iter().all(|v| v.is_finite()))
    }
}
