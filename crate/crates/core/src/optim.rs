//! First-order update rules.
//!
//! Every rule is coordinate-separable; accumulators are stored as flat
//! buffers that line up with [`NetworkParameters::tensors`].

use std::fmt;
use std::str::FromStr;

use crate::nn::{GradientSet, NetworkParameters};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    Sgd,
    RmsProp,
    Adam,
    Adamax,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Sgd,
        Algorithm::RmsProp,
        Algorithm::Adam,
        Algorithm::Adamax,
    ];

    /// Lower-case identifier used on the command line and in result files.
    pub fn key(self) -> &'static str {
        match self {
            Algorithm::Sgd => "sgd",
            Algorithm::RmsProp => "rmsprop",
            Algorithm::Adam => "adam",
            Algorithm::Adamax => "adamax",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Sgd => "SGD",
            Algorithm::RmsProp => "RMSProp",
            Algorithm::Adam => "Adam",
            Algorithm::Adamax => "Adamax",
        }
    }

    pub fn default_learning_rate(self) -> f64 {
        match self {
            Algorithm::Sgd => 0.01,
            Algorithm::RmsProp | Algorithm::Adam | Algorithm::Adamax => 0.001,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().to_ascii_lowercase();
        Algorithm::ALL
            .into_iter()
            .find(|a| a.key() == wanted)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown optimizer '{s}' (valid: sgd, rmsprop, adam, adamax)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparameters {
    /// Learning rate. Zero is accepted and turns every rule into a no-op.
    pub eta: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// RMSProp decay of the squared-gradient average.
    pub rho: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Self {
            eta: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-7,
            rho: 0.9,
            batch_size: 32,
            epochs: 50,
            seed: 0,
        }
    }
}

impl Hyperparameters {
    /// Defaults with the algorithm's default learning rate.
    pub fn for_algorithm(algorithm: Algorithm) -> Self {
        Self {
            eta: algorithm.default_learning_rate(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must lie in [0, 1), got {v}")))
            }
        };
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            return Err(Error::Config(format!(
                "learning rate must be finite and non-negative, got {}",
                self.eta
            )));
        }
        unit("beta1", self.beta1)?;
        unit("beta2", self.beta2)?;
        unit("rho", self.rho)?;
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::Config(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        Ok(())
    }
}

/// Per-run optimizer memory.
///
/// `first` holds Adam/Adamax `m`; `second` holds RMSProp `E[g^2]`, Adam `v`
/// or Adamax `u`. SGD keeps neither.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    algorithm: Algorithm,
    step: u64,
    first: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
}

impl OptimizerState {
    pub fn new(algorithm: Algorithm, params: &NetworkParameters) -> Self {
        let zeros = || -> Vec<Vec<f64>> { params.tensors().map(|t| vec![0.0; t.len()]).collect() };
        let (first, second) = match algorithm {
            Algorithm::Sgd => (Vec::new(), Vec::new()),
            Algorithm::RmsProp => (Vec::new(), zeros()),
            Algorithm::Adam | Algorithm::Adamax => (zeros(), zeros()),
        };
        Self {
            algorithm,
            step: 0,
            first,
            second,
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    /// Number of completed steps.
    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn first_moment(&self) -> &[Vec<f64>] {
        &self.first
    }

    pub fn second_moment(&self) -> &[Vec<f64>] {
        &self.second
    }

    /// Applies one update of this state's algorithm.
    pub fn step(
        &mut self,
        params: &mut NetworkParameters,
        grads: &GradientSet,
        h: &Hyperparameters,
    ) -> Result<()> {
        if !grads.matches(params) {
            return Err(Error::Input(
                "gradient shapes do not match the parameters".into(),
            ));
        }
        let sizes: Vec<usize> = params.tensors().map(<[f64]>::len).collect();
        let fits =
            |acc: &[Vec<f64>]| acc.is_empty() || acc.iter().map(Vec::len).eq(sizes.iter().copied());
        if !fits(&self.first) || !fits(&self.second) {
            return Err(Error::Input(
                "optimizer state was created for a different network".into(),
            ));
        }
        if !grads.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite gradient at step {}",
                self.step + 1
            )));
        }

        self.step += 1;
        let k = i32::try_from(self.step).unwrap_or(i32::MAX);
        let eta = h.eta;
        let mut tensors = params.tensors_mut();
        match self.algorithm {
            Algorithm::Sgd => {
                for (theta, g) in tensors.iter_mut().zip(grads.tensors()) {
                    for (t, &g) in theta.iter_mut().zip(g) {
                        *t -= eta * g;
                    }
                }
            }
            Algorithm::RmsProp => {
                let (rho, eps) = (h.rho, h.epsilon);
                for ((theta, g), sq) in tensors
                    .iter_mut()
                    .zip(grads.tensors())
                    .zip(&mut self.second)
                {
                    for ((t, &g), s) in theta.iter_mut().zip(g).zip(sq.iter_mut()) {
                        *s = rho * *s + (1.0 - rho) * g * g;
                        *t -= eta * g / (*s + eps).sqrt();
                    }
                }
            }
            Algorithm::Adam => {
                let (b1, b2, eps) = (h.beta1, h.beta2, h.epsilon);
                let c1 = 1.0 - b1.powi(k);
                let c2 = 1.0 - b2.powi(k);
                let iter = tensors
                    .iter_mut()
                    .zip(grads.tensors())
                    .zip(self.first.iter_mut().zip(&mut self.second));
                for ((theta, g), (m, v)) in iter {
                    for (((t, &g), m), v) in
                        theta.iter_mut().zip(g).zip(m.iter_mut()).zip(v.iter_mut())
                    {
                        *m = b1 * *m + (1.0 - b1) * g;
                        *v = b2 * *v + (1.0 - b2) * g * g;
                        let m_hat = *m / c1;
                        let v_hat = *v / c2;
                        *t -= eta * m_hat / (v_hat.sqrt() + eps);
                    }
                }
            }
            Algorithm::Adamax => {
                let (b1, b2, eps) = (h.beta1, h.beta2, h.epsilon);
                let rate = eta / (1.0 - b1.powi(k));
                let iter = tensors
                    .iter_mut()
                    .zip(grads.tensors())
                    .zip(self.first.iter_mut().zip(&mut self.second));
                for ((theta, g), (m, u)) in iter {
                    for (((t, &g), m), u) in
                        theta.iter_mut().zip(g).zip(m.iter_mut()).zip(u.iter_mut())
                    {
                        *m = b1 * *m + (1.0 - b1) * g;
                        *u = (b2 * *u).max(g.abs());
                        *t -= rate * *m / (*u + eps);
                    }
                }
            }
        }
        Ok(())
    }
}

fn step_as(
    expected: Algorithm,
    params: &mut NetworkParameters,
    grads: &GradientSet,
    h: &Hyperparameters,
    state: &mut OptimizerState,
) -> Result<()> {
    if state.algorithm != expected {
        return Err(Error::Input(format!(
            "{} step requested on {} optimizer state",
            expected.label(),
            state.algorithm.label()
        )));
    }
    state.step(params, grads, h)
}

/// `theta <- theta - eta * g`.
pub fn sgd_step(
    params: &mut NetworkParameters,
    grads: &GradientSet,
    h: &Hyperparameters,
    state: &mut OptimizerState,
) -> Result<()> {
    step_as(Algorithm::Sgd, params, grads, h, state)
}

/// `s <- rho s + (1 - rho) g^2`, `theta <- theta - eta g / sqrt(s + eps)`.
pub fn rmsprop_step(
    params: &mut NetworkParameters,
    grads: &GradientSet,
    h: &Hyperparameters,
    state: &mut OptimizerState,
) -> Result<()> {
    step_as(Algorithm::RmsProp, params, grads, h, state)
}

/// Bias-corrected first and second moments,
/// `theta <- theta - eta m_hat / (sqrt(v_hat) + eps)`.
pub fn adam_step(
    params: &mut NetworkParameters,
    grads: &GradientSet,
    h: &Hyperparameters,
    state: &mut OptimizerState,
) -> Result<()> {
    step_as(Algorithm::Adam, params, grads, h, state)
}

/// Infinity-norm variant of Adam: `u <- max(beta2 u, |g|)`,
/// `theta <- theta - (eta / (1 - beta1^k)) m / (u + eps)`.
pub fn adamax_step(
    params: &mut NetworkParameters,
    grads: &GradientSet,
    h: &Hyperparameters,
    state: &mut OptimizerState,
) -> Result<()> {
    step_as(Algorithm::Adamax, params, grads, h, state)
}

#[cfg(test)]
mod tests {
    use ndarray::array;
    use proptest::prelude::*;

    use super::*;
    use crate::nn::{Activation, Layer, LayerSpec};

    fn scalar(theta: f64) -> NetworkParameters {
        NetworkParameters::from_layers(
            vec![LayerSpec::new(1, 1, Activation::Identity)],
            vec![Layer {
                weights: array![[theta]],
                biases: array![theta],
            }],
        )
        .unwrap()
    }

    fn grad(g: f64) -> GradientSet {
        GradientSet::new(vec![Layer {
            weights: array![[g]],
            biases: array![g],
        }])
    }

    fn weight(p: &NetworkParameters) -> f64 {
        p.layers()[0].weights[[0, 0]]
    }

    fn run(
        alg: Algorithm,
        theta: f64,
        gs: &[f64],
        eta: f64,
    ) -> (NetworkParameters, OptimizerState) {
        let mut p = scalar(theta);
        let mut s = OptimizerState::new(alg, &p);
        let h = Hyperparameters {
            eta,
            ..Hyperparameters::default()
        };
        for &g in gs {
            s.step(&mut p, &grad(g), &h).unwrap();
        }
        (p, s)
    }

    #[test]
    fn sgd_examples() {
        let (p, s) = run(Algorithm::Sgd, 1.0, &[0.5], 0.01);
        assert!((weight(&p) - 0.995).abs() < 1e-15);
        assert_eq!(s.step_count(), 1);
        let (p, _) = run(Algorithm::Sgd, 0.0, &[1.0, 1.0], 0.1);
        assert!((weight(&p) + 0.2).abs() < 1e-15);
    }

    #[test]
    fn rmsprop_first_step() {
        let (p, s) = run(Algorithm::RmsProp, 0.0, &[1.0], 0.001);
        let expected = -0.001 / (0.1f64 + 1e-7).sqrt();
        assert!((weight(&p) - expected).abs() < 1e-15);
        assert!((weight(&p) + 3.1623e-3).abs() < 1e-7);
        assert!((s.second_moment()[0][0] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn rmsprop_constant_gradient_limit() {
        let gs = vec![0.7; 400];
        let (p, s) = run(Algorithm::RmsProp, 0.0, &gs, 0.001);
        assert!((s.second_moment()[0][0] - 0.49).abs() < 1e-12);
        let before = weight(&p);
        let (p2, _) = run(Algorithm::RmsProp, 0.0, &vec![0.7; 401], 0.001);
        let delta = (weight(&p2) - before).abs();
        let limit = 0.001 * 0.7 / (0.49f64 + 1e-7).sqrt();
        assert!((delta - limit).abs() < 1e-12);
        assert!((delta - 0.001).abs() < 1e-9);
    }

    #[test]
    fn adam_first_step() {
        let (p, s) = run(Algorithm::Adam, 0.0, &[1.0], 0.001);
        assert!((weight(&p) + 0.001 / (1.0 + 1e-7)).abs() < 1e-15);
        assert!((s.first_moment()[0][0] - 0.1).abs() < 1e-15);
        assert!((s.second_moment()[0][0] - 0.001).abs() < 1e-15);
    }

    #[test]
    fn adamax_first_step() {
        let (p, s) = run(Algorithm::Adamax, 0.0, &[1.0], 0.001);
        assert!((weight(&p) + 0.001 / (1.0 + 1e-7)).abs() < 1e-15);
        assert_eq!(s.second_moment()[0][0], 1.0);
    }

    #[test]
    fn zero_gradient_is_a_fixed_point() {
        for alg in Algorithm::ALL {
            let (p, s) = run(alg, 1.25, &[0.0, 0.0, 0.0], 0.1);
            assert_eq!(weight(&p), 1.25, "{alg}");
            assert_eq!(s.step_count(), 3);
        }
    }

    #[test]
    fn zero_learning_rate_is_a_no_op() {
        for alg in Algorithm::ALL {
            let (p, _) = run(alg, -0.5, &[3.0, -1.0, 2.0], 0.0);
            assert_eq!(weight(&p), -0.5, "{alg}");
        }
    }

    #[test]
    fn rejects_wrong_state_and_shapes() {
        let mut p = scalar(0.0);
        let mut s = OptimizerState::new(Algorithm::Adam, &p);
        let h = Hyperparameters::default();
        assert!(matches!(
            sgd_step(&mut p, &grad(1.0), &h, &mut s),
            Err(Error::Input(_))
        ));
        assert!(adam_step(&mut p, &grad(1.0), &h, &mut s).is_ok());

        let wrong = GradientSet::new(vec![Layer {
            weights: array![[1.0, 2.0]],
            biases: array![1.0],
        }]);
        assert!(matches!(s.step(&mut p, &wrong, &h), Err(Error::Input(_))));
        assert!(matches!(
            s.step(&mut p, &grad(f64::NAN), &h),
            Err(Error::Numeric(_))
        ));
        assert_eq!(s.step_count(), 1);
    }

    #[test]
    fn optimizer_names_parse() {
        assert_eq!("Adamax".parse::<Algorithm>().unwrap(), Algorithm::Adamax);
        let err = "nadam".parse::<Algorithm>().unwrap_err().to_string();
        assert!(err.contains("sgd, rmsprop, adam, adamax"));
    }

    #[test]
    fn hyperparameter_validation() {
        assert!(Hyperparameters::default().validate().is_ok());
        let bad = [
            Hyperparameters {
                eta: -1.0,
                ..Default::default()
            },
            Hyperparameters {
                beta1: 1.0,
                ..Default::default()
            },
            Hyperparameters {
                beta2: -0.1,
                ..Default::default()
            },
            Hyperparameters {
                epsilon: 0.0,
                ..Default::default()
            },
            Hyperparameters {
                rho: 1.5,
                ..Default::default()
            },
            Hyperparameters {
                batch_size: 0,
                ..Default::default()
            },
            Hyperparameters {
                epochs: 0,
                ..Default::default()
            },
        ];
        for h in bad {
            assert!(h.validate().is_err(), "{h:?}");
        }
    }

    fn vector_net(values: &[f64]) -> NetworkParameters {
        let n = values.len();
        NetworkParameters::from_layers(
            vec![LayerSpec::new(n, 1, Activation::Identity)],
            vec![Layer {
                weights: ndarray::Array2::from_shape_vec((1, n), values.to_vec()).unwrap(),
                biases: array![0.0],
            }],
        )
        .unwrap()
    }

    fn vector_grad(values: &[f64]) -> GradientSet {
        GradientSet::new(vec![Layer {
            weights: ndarray::Array2::from_shape_vec((1, values.len()), values.to_vec()).unwrap(),
            biases: array![0.0],
        }])
    }

    fn trajectory(alg: Algorithm, theta: &[f64], grads: &[Vec<f64>]) -> (Vec<f64>, OptimizerState) {
        let mut p = vector_net(theta);
        let mut s = OptimizerState::new(alg, &p);
        let h = Hyperparameters::for_algorithm(alg);
        for g in grads {
            s.step(&mut p, &vector_grad(g), &h).unwrap();
        }
        (p.layers()[0].weights.iter().copied().collect(), s)
    }

    fn algorithm() -> impl Strategy<Value = Algorithm> {
        prop::sample::select(Algorithm::ALL.to_vec())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn updates_are_coordinate_separable(
            alg in algorithm(),
            theta in prop::collection::vec(-5.0f64..5.0, 2..8),
            seed_grads in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 8), 1..6),
            rotate in 0usize..8,
        ) {
            let n = theta.len();
            let grads: Vec<Vec<f64>> = seed_grads.iter().map(|g| g[..n].to_vec()).collect();
            let r = rotate % n;
            let rot = |v: &[f64]| { let mut v = v.to_vec(); v.rotate_left(r); v };
            let (plain, _) = trajectory(alg, &theta, &grads);
            let rotated_grads: Vec<Vec<f64>> = grads.iter().map(|g| rot(g)).collect();
            let (permuted, _) = trajectory(alg, &rot(&theta), &rotated_grads);
            prop_assert_eq!(rot(&plain), permuted);
        }

        #[test]
        fn accumulators_stay_non_negative(
            alg in algorithm(),
            grads in prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 3), 1..20),
        ) {
            let (_, s) = trajectory(alg, &[0.1, -0.2, 0.3], &grads);
            prop_assert_eq!(s.step_count(), grads.len() as u64);
            for acc in s.second_moment() {
                prop_assert!(acc.iter().all(|&v| v >= 0.0));
            }
        }

        #[test]
        fn first_step_is_scale_invariant_for_adam_family(
            g in prop::collection::vec(-4.0f64..4.0, 3),
            c in 0.01f64..100.0,
        ) {
            prop_assume!(g.iter().all(|v| v.abs() > 1e-3));
            let scaled: Vec<f64> = g.iter().map(|v| v * c).collect();
            for alg in [Algorithm::Adam, Algorithm::Adamax] {
                let (a, _) = trajectory(alg, &[0.0; 3], std::slice::from_ref(&g));
                let (b, _) = trajectory(alg, &[0.0; 3], std::slice::from_ref(&scaled));
                for ((x, y), gv) in a.iter().zip(&b).zip(&g) {
                    // |step| = eta * |g| / (|g| + eps): equal up to eps / |g|.
                    let tol = 2.0 * 0.001 * 1e-7 / (gv.abs() * c.min(1.0));
                    prop_assert!((x - y).abs() < tol);
                    prop_assert!((x + 0.001 * gv.signum()).abs() < tol);
                }
            }
            let (a, _) = trajectory(Algorithm::Sgd, &[0.0; 3], std::slice::from_ref(&g));
            let (b, _) = trajectory(Algorithm::Sgd, &[0.0; 3], &[scaled]);
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((y - c * x).abs() < 1e-12 * (1.0 + y.abs()));
            }
        }

        #[test]
        fn trajectories_are_deterministic(
            alg in algorithm(),
            grads in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 4), 1..10),
        ) {
            let (a, sa) = trajectory(alg, &[1.0, 2.0, 3.0, 4.0], &grads);
            let (b, sb) = trajectory(alg, &[1.0, 2.0, 3.0, 4.0], &grads);
            prop_assert_eq!(a, b);
            prop_assert_eq!(sa, sb);
        }
    }
}
