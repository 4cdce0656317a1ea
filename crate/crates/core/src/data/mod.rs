//! Drive-cycle telemetry to training rows.
//!
//! The pipeline is `ingest_csv -> coulomb_count -> build_design_matrix ->
//! fit_normalization / apply_normalization`. Current is positive on
//! discharge; SOC is in percent.

mod features;
mod ingest;
mod soc;

pub use features::{
    apply_normalization, build_design_matrix, fit_normalization, moving_average, write_feature_csv,
    Dataset, FeatureRow, NormalizationStats, DEFAULT_WINDOW, FEATURE_NAMES,
};
pub use ingest::{
    ingest_csv, read_records, write_records_csv, CycleData, IngestOptions, CSV_HEADER,
};
pub use soc::{coulomb_count, soc_trace, SocSeries};

pub(crate) use soc::{charge_increment_ah, soc_from_charge};

/// One telemetry sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveCycleRecord {
    pub time_s: f64,
    pub voltage_v: f64,
    /// Positive while discharging.
    pub current_a: f64,
    pub temperature_c: f64,
}

/// Accepted single-cell voltage range, exclusive.
pub const VOLTAGE_BOUNDS: (f64, f64) = (0.0, 6.0);
/// Accepted cell temperature range, exclusive.
pub const TEMPERATURE_BOUNDS: (f64, f64) = (-40.0, 80.0);
