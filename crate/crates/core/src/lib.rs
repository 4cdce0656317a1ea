//! Feed-forward state-of-charge estimation engine.
//!
//! The crate covers the whole pipeline from raw drive-cycle telemetry to an
//! optimizer comparison table:
//!
//! - [`data`]: CSV ingestion, Coulomb-counted SOC ground truth, the
//!   four-feature design matrix and z-score normalization.
//! - [`synth`]: a seeded single-cell simulator producing telemetry in the
//!   same CSV schema, so everything runs without an external dataset.
//! - [`nn`]: dense ReLU network, MSE/MAE losses and exact backpropagation.
//! - [`optim`]: SGD, RMSProp, Adam and Adamax update rules.
//! - [`harness`]: training loop, K-fold cross-validation and the
//!   per-cycle, per-optimizer comparison.
//! - [`model`]: JSON model persistence.
//!
//! All arithmetic is `f64`. SOC is expressed in percent (0 to 100) throughout.

pub mod config;
pub mod data;
mod error;
pub mod harness;
pub mod model;
pub mod nn;
pub mod optim;
pub mod synth;

pub use error::{Error, Result};
