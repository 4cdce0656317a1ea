use super::DriveCycleRecord;
use crate::{Error, Result};

/// Coulomb-counted state of charge aligned with the input records.
#[derive(Debug, Clone, PartialEq)]
pub struct SocSeries {
    /// Clamped to `[0, 100]`.
    pub soc_percent: Vec<f64>,
    pub soc0_percent: f64,
    pub capacity_ah: f64,
    /// Samples whose raw value fell outside `[0, 100]`.
    pub clamp_events: usize,
}

/// Trapezoidal charge (Ah) drawn between two samples.
#[inline]
pub(crate) fn charge_increment_ah(current_prev: f64, current: f64, dt_s: f64) -> f64 {
    0.5 * (current_prev + current) * dt_s / 3600.0
}

#[inline]
pub(crate) fn soc_from_charge(soc0_percent: f64, charge_ah: f64, capacity_ah: f64) -> f64 {
    soc0_percent - 100.0 * charge_ah / capacity_ah
}

fn check_inputs(records: &[DriveCycleRecord], soc0_percent: f64, capacity_ah: f64) -> Result<()> {
    if !(capacity_ah.is_finite() && capacity_ah > 0.0) {
        return Err(Error::Input(format!(
            "capacity must be positive, got {capacity_ah} Ah"
        )));
    }
    if !(0.0..=100.0).contains(&soc0_percent) {
        return Err(Error::Input(format!(
            "initial SOC must lie in [0, 100] %, got {soc0_percent}"
        )));
    }
    if records.len() < 2 {
        return Err(Error::Input(
            "coulomb counting needs at least two samples".into(),
        ));
    }
    Ok(())
}

/// Unclamped SOC per sample:
/// `SOC(t) = SOC0 - 100 * integral(I dt) / (3600 * Q_n)`,
/// integrated with the trapezoidal rule over the recorded timestamps.
pub fn soc_trace(
    records: &[DriveCycleRecord],
    soc0_percent: f64,
    capacity_ah: f64,
) -> Result<Vec<f64>> {
    check_inputs(records, soc0_percent, capacity_ah)?;
    let mut charge = 0.0;
    let mut out = Vec::with_capacity(records.len());
    out.push(soc0_percent);
    for pair in records.windows(2) {
        let dt = pair[1].time_s - pair[0].time_s;
        charge += charge_increment_ah(pair[0].current_a, pair[1].current_a, dt);
        out.push(soc_from_charge(soc0_percent, charge, capacity_ah));
    }
    Ok(out)
}

/// Ground-truth SOC by Coulomb counting, clamped to `[0, 100]`.
pub fn coulomb_count(
    records: &[DriveCycleRecord],
    soc0_percent: f64,
    capacity_ah: f64,
) -> Result<SocSeries> {
    let raw = soc_trace(records, soc0_percent, capacity_ah)?;
    let mut clamp_events = 0;
    let soc_percent = raw
        .into_iter()
        .map(|s| {
            if (0.0..=100.0).contains(&s) {
                s
            } else {
                clamp_events += 1;
                s.clamp(0.0, 100.0)
            }
        })
        .collect();
    Ok(SocSeries {
        soc_percent,
        soc0_percent,
        capacity_ah,
        clamp_events,
    })
}
