use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis, Zip};

use super::{Activation, GradientSet, Layer, NetworkParameters};
use crate::{Error, Result};

/// Intermediates of one forward pass, consumed by [`backward`].
#[derive(Debug, Clone)]
pub struct ForwardCache {
    stamp: (u64, u64),
    input: Array2<f64>,
    pre_activations: Vec<Array2<f64>>,
    activations: Vec<Array2<f64>>,
}

impl ForwardCache {
    pub fn input(&self) -> &Array2<f64> {
        &self.input
    }

    /// Per-layer `z = W a_prev + b`, one row per sample.
    pub fn pre_activations(&self) -> &[Array2<f64>] {
        &self.pre_activations
    }

    /// Per-layer `a = g(z)`.
    pub fn activations(&self) -> &[Array2<f64>] {
        &self.activations
    }

    pub fn batch_len(&self) -> usize {
        self.input.nrows()
    }
}

fn check_batch(params: &NetworkParameters, batch: &ArrayView2<f64>) -> Result<()> {
    if batch.ncols() != params.input_dim() {
        return Err(Error::Input(format!(
            "batch has {} columns but the network expects {}",
            batch.ncols(),
            params.input_dim()
        )));
    }
    if batch.nrows() == 0 {
        return Err(Error::Input("empty batch".into()));
    }
    if batch.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("batch contains non-finite values".into()));
    }
    Ok(())
}

fn affine(layer: &Layer, input: &ArrayView2<f64>) -> Array2<f64> {
    let mut z = input.dot(&layer.weights.t());
    z += &layer.biases;
    z
}

fn activate(activation: Activation, z: &Array2<f64>) -> Array2<f64> {
    match activation {
        Activation::Identity => z.clone(),
        Activation::ReLU => z.mapv(|v| v.max(0.0)),
    }
}

/// Runs the network on `batch` (`n x input_dim`) and keeps every
/// intermediate for backpropagation.
pub fn forward(
    params: &NetworkParameters,
    batch: ArrayView2<f64>,
) -> Result<(Array1<f64>, ForwardCache)> {
    check_batch(params, &batch)?;
    let depth = params.layers().len();
    let mut pre_activations = Vec::with_capacity(depth);
    let mut activations: Vec<Array2<f64>> = Vec::with_capacity(depth);
    for (spec, layer) in params.specs().iter().zip(params.layers()) {
        let input = activations.last().map_or(batch, |a| a.view());
        let z = affine(layer, &input);
        let a = activate(spec.activation, &z);
        pre_activations.push(z);
        activations.push(a);
    }
    let predictions = activations.last().expect("non-empty").column(0).to_owned();
    let cache = ForwardCache {
        stamp: params.stamp(),
        input: batch.to_owned(),
        pre_activations,
        activations,
    };
    Ok((predictions, cache))
}

/// Forward pass without retaining intermediates.
pub fn predict(params: &NetworkParameters, batch: ArrayView2<f64>) -> Result<Array1<f64>> {
    check_batch(params, &batch)?;
    let mut current: Option<Array2<f64>> = None;
    for (spec, layer) in params.specs().iter().zip(params.layers()) {
        let input = current.as_ref().map_or(batch, |a| a.view());
        let mut z = affine(layer, &input);
        if spec.activation == Activation::ReLU {
            z.mapv_inplace(|v| v.max(0.0));
        }
        current = Some(z);
    }
    Ok(current.expect("non-empty").column(0).to_owned())
}

/// Gradient of the batch MSE `(1/n) sum (y_hat - y)^2` with respect to every
/// weight and bias.
pub fn backward(
    params: &NetworkParameters,
    cache: &ForwardCache,
    targets: ArrayView1<f64>,
) -> Result<GradientSet> {
    if cache.stamp != params.stamp() {
        return Err(Error::Internal(
            "forward cache was computed for different parameters".into(),
        ));
    }
    let depth = params.layers().len();
    if cache.activations.len() != depth || cache.pre_activations.len() != depth {
        return Err(Error::Internal("forward cache depth mismatch".into()));
    }
    let n = cache.batch_len();
    if targets.len() != n {
        return Err(Error::Input(format!(
            "{} targets for a batch of {n}",
            targets.len()
        )));
    }

    let scale = 2.0 / n as f64;
    let predictions = cache.activations[depth - 1].column(0);
    // dJ/da for the output layer, n x 1.
    let mut delta = Array2::from_shape_fn((n, 1), |(i, _)| scale * (predictions[i] - targets[i]));

    let mut grads: Vec<Layer> = Vec::with_capacity(depth);
    for l in (0..depth).rev() {
        let spec = &params.specs()[l];
        if spec.activation == Activation::ReLU {
            Zip::from(&mut delta)
                .and(&cache.pre_activations[l])
                .for_each(|d, &z| *d *= spec.activation.derivative(z));
        }
        let prev = if l == 0 {
            cache.input.view()
        } else {
            cache.activations[l - 1].view()
        };
        let weights = delta.t().dot(&prev);
        let biases = delta.sum_axis(Axis(0));
        if l > 0 {
            delta = delta.dot(&params.layers()[l].weights);
        }
        grads.push(Layer { weights, biases });
    }
    grads.reverse();
    Ok(GradientSet::new(grads))
}
