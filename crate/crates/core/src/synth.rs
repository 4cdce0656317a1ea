//! Seeded single-cell drive-cycle simulator.
//!
//! The cell is a linear open-circuit-voltage source behind a series
//! resistance, with a first-order thermal model:
//!
//! - `V = OCV(SOC) - I R`, `OCV` linear between `v_min` (0 %) and `v_max` (100 %)
//! - SOC integrated from current with the same trapezoidal rule as
//!   [`coulomb_count`](crate::data::coulomb_count)
//! - `dT/dt = k (T_amb + h I^2 R - T)`, integrated exactly with the current
//!   held over each sample interval

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::KeyValueConfig;
use crate::data::{charge_increment_ah, soc_from_charge, DriveCycleRecord};
use crate::{Error, Result};

/// Current range of random-mix segments, amperes. Negative is regeneration.
pub const RANDOM_MIX_CURRENT_A: (f64, f64) = (-2.0, 5.0);
/// Length range of random-mix segments, seconds.
pub const RANDOM_MIX_SEGMENT_S: (f64, f64) = (5.0, 60.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticCellParams {
    pub capacity_ah: f64,
    pub r_internal_ohm: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub t_ambient_c: f64,
    /// Steady-state temperature rise per watt dissipated, K/W.
    pub heating_coeff: f64,
    /// Thermal relaxation rate, 1/s.
    pub cooling_rate: f64,
    pub sample_period_s: f64,
    pub soc0_percent: f64,
}

impl Default for SyntheticCellParams {
    fn default() -> Self {
        Self {
            capacity_ah: 2.9,
            r_internal_ohm: 0.03,
            v_min: 3.0,
            v_max: 4.2,
            t_ambient_c: 25.0,
            heating_coeff: 6.0,
            cooling_rate: 0.01,
            sample_period_s: 0.1,
            soc0_percent: 100.0,
        }
    }
}

impl SyntheticCellParams {
    pub const CONFIG_KEYS: [&'static str; 9] = [
        "capacity_ah",
        "r_internal_ohm",
        "v_min",
        "v_max",
        "t_ambient_c",
        "heating_coeff",
        "cooling_rate",
        "sample_period_s",
        "soc0_percent",
    ];

    /// Overrides defaults with whichever [`CONFIG_KEYS`](Self::CONFIG_KEYS)
    /// appear in `cfg`. Other keys are ignored here.
    pub fn from_config(cfg: &KeyValueConfig) -> Result<Self> {
        let mut p = Self::default();
        let fields: [(&str, &mut f64); 9] = [
            ("capacity_ah", &mut p.capacity_ah),
            ("r_internal_ohm", &mut p.r_internal_ohm),
            ("v_min", &mut p.v_min),
            ("v_max", &mut p.v_max),
            ("t_ambient_c", &mut p.t_ambient_c),
            ("heating_coeff", &mut p.heating_coeff),
            ("cooling_rate", &mut p.cooling_rate),
            ("sample_period_s", &mut p.sample_period_s),
            ("soc0_percent", &mut p.soc0_percent),
        ];
        for (key, slot) in fields {
            if let Some(v) = cfg.get::<f64>(key)? {
                *slot = v;
            }
        }
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [
            self.capacity_ah,
            self.r_internal_ohm,
            self.v_min,
            self.v_max,
            self.t_ambient_c,
            self.heating_coeff,
            self.cooling_rate,
            self.sample_period_s,
            self.soc0_percent,
        ]
        .iter()
        .all(|v| v.is_finite());
        let problem = if !all_finite {
            Some("cell parameters must be finite".to_string())
        } else if self.capacity_ah <= 0.0 {
            Some(format!(
                "capacity must be positive, got {}",
                self.capacity_ah
            ))
        } else if self.r_internal_ohm < 0.0 {
            Some(format!(
                "internal resistance must be >= 0, got {}",
                self.r_internal_ohm
            ))
        } else if self.v_max <= self.v_min {
            Some(format!(
                "v_max ({}) must exceed v_min ({})",
                self.v_max, self.v_min
            ))
        } else if self.sample_period_s <= 0.0 {
            Some(format!(
                "sample period must be positive, got {}",
                self.sample_period_s
            ))
        } else if self.heating_coeff < 0.0 || self.cooling_rate < 0.0 {
            Some("thermal coefficients must be non-negative".to_string())
        } else if !(0.0..=100.0).contains(&self.soc0_percent) {
            Some(format!(
                "initial SOC must lie in [0, 100], got {}",
                self.soc0_percent
            ))
        } else {
            None
        };
        problem.map_or(Ok(()), |p| Err(Error::Config(p)))
    }

    /// Open-circuit voltage at `soc_percent`, clamped to the 0..100 % range.
    pub fn ocv(&self, soc_percent: f64) -> f64 {
        self.v_min + (self.v_max - self.v_min) * soc_percent.clamp(0.0, 100.0) / 100.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    ConstantDischarge {
        current_a: f64,
    },
    /// `current_a` for `on_s` seconds, then rest for `off_s` seconds, repeated.
    PulseTrain {
        current_a: f64,
        on_s: f64,
        off_s: f64,
    },
    /// Seeded piecewise-constant segments drawn from
    /// [`RANDOM_MIX_CURRENT_A`] and [`RANDOM_MIX_SEGMENT_S`].
    RandomMix,
}

impl Profile {
    fn validate(&self) -> Result<()> {
        match *self {
            Profile::ConstantDischarge { current_a } if !current_a.is_finite() => {
                Err(Error::Config("profile current must be finite".into()))
            }
            Profile::PulseTrain {
                current_a,
                on_s,
                off_s,
            } => {
                if !current_a.is_finite()
                    || !on_s.is_finite()
                    || on_s <= 0.0
                    || !off_s.is_finite()
                    || off_s < 0.0
                {
                    Err(Error::Config(
                        "pulse train needs a finite current, on > 0 and off >= 0".into(),
                    ))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

/// Generated telemetry plus the simulator's own SOC trace (unclamped).
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCycle {
    pub records: Vec<DriveCycleRecord>,
    pub soc_percent: Vec<f64>,
}

impl SyntheticCycle {
    pub fn final_soc(&self) -> f64 {
        *self.soc_percent.last().expect("at least one sample")
    }
}

struct RandomMixSource {
    rng: ChaCha8Rng,
    segment_end: f64,
    current: f64,
}

impl RandomMixSource {
    fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            segment_end: f64::NEG_INFINITY,
            current: 0.0,
        }
    }

    fn current_at(&mut self, t: f64) -> f64 {
        while t >= self.segment_end {
            let start = self.segment_end.max(0.0);
            self.segment_end = start
                + self
                    .rng
                    .random_range(RANDOM_MIX_SEGMENT_S.0..=RANDOM_MIX_SEGMENT_S.1);
            self.current = self
                .rng
                .random_range(RANDOM_MIX_CURRENT_A.0..=RANDOM_MIX_CURRENT_A.1);
        }
        self.current
    }
}

/// Simulates `duration_s` seconds sampled every `params.sample_period_s`,
/// starting at `t = 0` and including the final sample.
pub fn generate_cycle(
    params: &SyntheticCellParams,
    profile: Profile,
    duration_s: f64,
    seed: u64,
) -> Result<SyntheticCycle> {
    params.validate()?;
    profile.validate()?;
    if !(duration_s.is_finite() && duration_s > 0.0) {
        return Err(Error::Config(format!(
            "duration must be positive, got {duration_s}"
        )));
    }
    let period = params.sample_period_s;
    let samples = (duration_s / period + 1e-9).floor() as usize + 1;

    let mut random = RandomMixSource::new(seed);
    let mut current_at = |t: f64| match profile {
        Profile::ConstantDischarge { current_a } => current_a,
        Profile::PulseTrain {
            current_a,
            on_s,
            off_s,
        } => {
            if t % (on_s + off_s) < on_s {
                current_a
            } else {
                0.0
            }
        }
        Profile::RandomMix => random.current_at(t),
    };

    // Random-mix regeneration is cut off near full charge, like a BMS would.
    // Regen is allowed only while SOC sits at least two worst-case steps
    // below 100 %, which keeps the trapezoidal trace at or below 100 %.
    let regen_margin =
        2.0 * RANDOM_MIX_CURRENT_A.0.abs() * period / 3600.0 / params.capacity_ah * 100.0;

    let r = params.r_internal_ohm;
    let mut records: Vec<DriveCycleRecord> = Vec::with_capacity(samples);
    let mut soc_percent = Vec::with_capacity(samples);
    let mut charge = 0.0;
    let mut temperature = params.t_ambient_c;
    for i in 0..samples {
        let t = i as f64 * period;
        let mut current = current_at(t);
        let soc_prev = soc_percent.last().copied().unwrap_or(params.soc0_percent);
        if matches!(profile, Profile::RandomMix) && current < 0.0 && soc_prev > 100.0 - regen_margin
        {
            current = 0.0;
        }
        let soc = match records.last() {
            None => params.soc0_percent,
            Some(prev) => {
                let dt = t - prev.time_s;
                charge += charge_increment_ah(prev.current_a, current, dt);
                let held = prev.current_a;
                let target = params.t_ambient_c + params.heating_coeff * held * held * r;
                temperature = target + (temperature - target) * (-params.cooling_rate * dt).exp();
                soc_from_charge(params.soc0_percent, charge, params.capacity_ah)
            }
        };
        records.push(DriveCycleRecord {
            time_s: t,
            voltage_v: params.ocv(soc) - current * r,
            current_a: current,
            temperature_c: temperature,
        });
        soc_percent.push(soc);
    }
    Ok(SyntheticCycle {
        records,
        soc_percent,
    })
}
