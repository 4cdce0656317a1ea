//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.
//!
//! Oracles here are computed independently of the library: closed-form
//! integrals, hand-expanded optimizer updates and finite differences.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use ndarray::{array, Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use socbench::data::{
    apply_normalization, build_design_matrix, coulomb_count, fit_normalization, ingest_csv,
    soc_trace, write_records_csv, DriveCycleRecord, FeatureRow, IngestOptions, DEFAULT_WINDOW,
};
use socbench::harness::{
    make_folds, run_comparison, write_results_csv, ComparisonConfig, CycleDataset, FoldMode,
};
use socbench::nn::{
    architecture, backward, count_parameters, default_architecture, forward, init_network,
    loss_mse, predict, Activation, GradientSet, Layer, LayerSpec, NetworkParameters,
};
use socbench::optim::{Algorithm, Hyperparameters, OptimizerState};
use socbench::synth::{generate_cycle, Profile, SyntheticCellParams};

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------- 1

fn architecture_exactness() -> Outcome {
    let specs = default_architecture();
    let per_layer: Vec<usize> = specs.iter().map(LayerSpec::parameter_count).collect();
    ensure(per_layer == [1_280, 65_792, 65_792, 257], || {
        format!("per-layer counts {per_layer:?}")
    })?;
    let net = init_network(&specs, 0).map_err(|e| e.to_string())?;
    let stored: usize = net.tensors().map(<[f64]>::len).sum();
    let total = count_parameters(&net);
    ensure(total == 133_121 && stored == 133_121, || {
        format!("total {total}, stored values {stored}")
    })?;
    Ok(format!("133121 parameters, per layer {per_layer:?}"))
}

// ---------------------------------------------------------------- 2

const FD_STEP: f64 = 1e-5;

fn batch_loss(params: &NetworkParameters, x: &Array2<f64>, y: &Array1<f64>) -> f64 {
    let p = predict(params, x.view()).unwrap();
    loss_mse(p.as_slice().unwrap(), y.as_slice().unwrap()).unwrap()
}

fn relu_pattern(params: &NetworkParameters, x: &Array2<f64>) -> Vec<bool> {
    let (_, cache) = forward(params, x.view()).unwrap();
    let hidden = cache.pre_activations().len() - 1;
    cache.pre_activations()[..hidden]
        .iter()
        .flat_map(|z| z.iter().map(|&v| v > 0.0))
        .collect()
}

fn gradient_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst, mut compared, mut skipped) = (0.0f64, 0usize, 0usize);
    for net_index in 0..50 {
        let input = rng.random_range(1..=6usize);
        let depth = rng.random_range(1..=3usize);
        let hidden: Vec<usize> = (0..depth).map(|_| rng.random_range(1..=16usize)).collect();
        let n = rng.random_range(1..=32usize);
        let params = init_network(&architecture(input, &hidden), rng.random()).unwrap();
        let x = Array2::from_shape_fn((n, input), |_| rng.random_range(-2.0..2.0));
        let y = Array1::from_shape_fn(n, |_| rng.random_range(-1.0..1.0));

        let (_, cache) = forward(&params, x.view()).unwrap();
        let grads = backward(&params, &cache, y.view()).unwrap();
        let analytic: Vec<Vec<f64>> = grads.tensors().map(<[f64]>::to_vec).collect();
        let base = relu_pattern(&params, &x);
        for (t, tensor) in analytic.iter().enumerate() {
            for (j, &a) in tensor.iter().enumerate() {
                let mut plus = params.clone();
                plus.tensors_mut()[t][j] += FD_STEP;
                let mut minus = params.clone();
                minus.tensors_mut()[t][j] -= FD_STEP;
                // A difference straddling a ReLU kink measures a one-sided slope.
                if relu_pattern(&plus, &x) != base || relu_pattern(&minus, &x) != base {
                    skipped += 1;
                    continue;
                }
                let numeric =
                    (batch_loss(&plus, &x, &y) - batch_loss(&minus, &x, &y)) / (2.0 * FD_STEP);
                compared += 1;
                let scale = a.abs().max(numeric.abs());
                // Below 1e-8 the difference quotient is rounding noise.
                if scale > 1e-8 {
                    let rel = (a - numeric).abs() / scale;
                    worst = worst.max(rel);
                    ensure(rel <= 1e-5, || {
                        format!("net {net_index} {hidden:?} tensor {t} coord {j}: analytic {a:e} vs numeric {numeric:e}")
                    })?;
                }
            }
        }
    }
    Ok(format!(
        "50 networks, {compared} coordinates, worst relative error {worst:.2e}, {skipped} kink-adjacent skipped"
    ))
}

// ---------------------------------------------------------------- 3

fn scalar_net(w: f64, b: f64) -> NetworkParameters {
    NetworkParameters::from_layers(
        vec![LayerSpec::new(1, 1, Activation::Identity)],
        vec![Layer {
            weights: array![[w]],
            biases: array![b],
        }],
    )
    .unwrap()
}

fn scalar_grad(gw: f64, gb: f64) -> GradientSet {
    GradientSet::new(vec![Layer {
        weights: array![[gw]],
        biases: array![gb],
    }])
}

/// Applies the gradient sequence to a weight starting at `w0`; returns the weight.
fn run_steps(alg: Algorithm, w0: f64, grads: &[f64]) -> f64 {
    let h = Hyperparameters::for_algorithm(alg);
    let mut net = scalar_net(w0, 0.0);
    let mut state = OptimizerState::new(alg, &net);
    for &g in grads {
        state.step(&mut net, &scalar_grad(g, 0.0), &h).unwrap();
    }
    net.layers()[0].weights[[0, 0]]
}

fn optimizer_oracles() -> Outcome {
    let (eta_sgd, eta) = (0.01, 0.001);
    let (b1, b2, eps, rho): (f64, f64, f64, f64) = (0.9, 0.999, 1e-7, 0.9);
    let close = |name: &str, got: f64, want: f64| {
        ensure((got - want).abs() <= 1e-12, || {
            format!("{name}: got {got:.15e}, oracle {want:.15e}")
        })
    };

    close(
        "sgd",
        run_steps(Algorithm::Sgd, 0.5, &[2.0]),
        0.5 - eta_sgd * 2.0,
    )?;

    let rms = run_steps(Algorithm::RmsProp, 0.0, &[1.0]);
    close(
        "rmsprop",
        rms,
        -eta * 1.0 / ((1.0 - rho) * 1.0 + eps).sqrt(),
    )?;
    ensure((rms + 3.1623e-3).abs() < 1e-7, || {
        format!("rmsprop step {rms:e} is not about -3.1623e-3")
    })?;

    let g1 = 0.3;
    close(
        "adam",
        run_steps(Algorithm::Adam, 0.0, &[g1]),
        -eta * g1 / (g1.abs() + eps),
    )?;
    let g2 = -0.1;
    let m1 = (1.0 - b1) * g1;
    let v1 = (1.0 - b2) * g1 * g1;
    let w1 = -eta * (m1 / (1.0 - b1)) / ((v1 / (1.0 - b2)).sqrt() + eps);
    let m2 = b1 * m1 + (1.0 - b1) * g2;
    let v2 = b2 * v1 + (1.0 - b2) * g2 * g2;
    let w2 = w1 - eta * (m2 / (1.0 - b1 * b1)) / ((v2 / (1.0 - b2 * b2)).sqrt() + eps);
    close(
        "adam two steps",
        run_steps(Algorithm::Adam, 0.0, &[g1, g2]),
        w2,
    )?;

    let g = -0.4;
    let adamax = run_steps(Algorithm::Adamax, 0.0, &[g]);
    close(
        "adamax",
        adamax,
        -(eta / (1.0 - b1)) * ((1.0 - b1) * g) / (g.abs() + eps),
    )?;
    ensure((adamax.abs() - eta).abs() < 1e-9, || {
        format!("adamax first step {adamax:e} is not about eta")
    })?;
    let u2 = (b2 * g.abs()).max(g2.abs());
    let m2 = b1 * (1.0 - b1) * g + (1.0 - b1) * g2;
    close(
        "adamax two steps",
        run_steps(Algorithm::Adamax, 0.0, &[g, g2]),
        adamax - (eta / (1.0 - b1 * b1)) * m2 / (u2 + eps),
    )?;

    for alg in Algorithm::ALL {
        let h = Hyperparameters::for_algorithm(alg);
        let mut net = scalar_net(0.7, -0.2);
        let before = net.clone();
        let mut state = OptimizerState::new(alg, &net);
        for _ in 0..3 {
            state.step(&mut net, &scalar_grad(0.0, 0.0), &h).unwrap();
        }
        ensure(net == before, || {
            format!("{} moved on a zero gradient", alg.key())
        })?;
    }
    Ok("sgd, rmsprop (-3.1623e-3), adam and adamax (|step| = eta) match; zero gradient is a fixed point for all four".into())
}

// ---------------------------------------------------------------- 4

fn records(times: &[f64], current: impl Fn(f64) -> f64) -> Vec<DriveCycleRecord> {
    times
        .iter()
        .map(|&t| DriveCycleRecord {
            time_s: t,
            voltage_v: 3.7,
            current_a: current(t),
            temperature_c: 25.0,
        })
        .collect()
}

fn coulomb_exactness() -> Outcome {
    let q = 2.9;
    let mut worst = 0.0f64;

    let times: Vec<f64> = (0..=1800).map(f64::from).collect();
    let soc = coulomb_count(&records(&times, |_| 2.0), 100.0, q).map_err(|e| e.to_string())?;
    for (t, s) in times.iter().zip(&soc.soc_percent) {
        worst = worst.max((s - (100.0 - 100.0 * 2.0 * t / 3600.0 / q)).abs());
    }

    // Current ramps up, then down, sampled irregularly with a sample on the
    // breakpoint so the trapezoidal rule is exact.
    let current = |t: f64| {
        if t <= 600.0 {
            1.0 + 0.002 * t
        } else {
            2.2 - 0.001 * (t - 600.0)
        }
    };
    let charge_ah = |t: f64| {
        let up = |t: f64| t + 0.001 * t * t;
        let ah = if t <= 600.0 {
            up(t)
        } else {
            let s = t - 600.0;
            up(600.0) + 2.2 * s - 0.0005 * s * s
        };
        ah / 3600.0
    };
    let mut times = Vec::new();
    let mut t = 0.0;
    let mut i = 0u32;
    while t < 1500.0 {
        times.push(t);
        t += [0.5, 1.25, 3.0, 0.75][i as usize % 4];
        i += 1;
    }
    times.push(600.0);
    times.sort_by(f64::total_cmp);
    times.dedup();
    let soc0 = 90.0;
    let trace = soc_trace(&records(&times, current), soc0, q).map_err(|e| e.to_string())?;
    for (t, s) in times.iter().zip(&trace) {
        worst = worst.max((s - (soc0 - 100.0 * charge_ah(*t) / q)).abs());
    }
    ensure(worst <= 1e-9, || {
        format!("closed-form deviation {worst:e} % SOC")
    })?;

    let cell = SyntheticCellParams::default();
    let cycle = generate_cycle(&cell, Profile::RandomMix, 3600.0, 17).map_err(|e| e.to_string())?;
    let counted = soc_trace(&cycle.records, cell.soc0_percent, cell.capacity_ah)
        .map_err(|e| e.to_string())?;
    let round_trip = counted
        .iter()
        .zip(&cycle.soc_percent)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    ensure(round_trip <= 1e-6, || {
        format!("generator round trip off by {round_trip:e} % SOC")
    })?;
    Ok(format!(
        "closed forms within {worst:.1e} % SOC, generator round trip within {round_trip:.1e} % SOC"
    ))
}

// ---------------------------------------------------------------- 5

fn normalization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rows: Vec<FeatureRow> = (0..997)
        .map(|_| FeatureRow {
            voltage: rng.random_range(3.0..4.2),
            voltage_avg: 1e3 + rng.random_range(-0.01..0.01),
            current_avg: rng.random_range(-2.0..5.0),
            temperature_avg: rng.random_range(-20.0..60.0),
            soc: rng.random_range(0.0..100.0),
        })
        .collect();
    let stats = fit_normalization(&rows).map_err(|e| e.to_string())?;
    let out = apply_normalization(&rows, &stats).map_err(|e| e.to_string())?;
    let n = out.len() as f64;
    let mut worst = 0.0f64;
    for j in 0..4 {
        let col: Vec<f64> = out.iter().map(|r| r.features()[j]).collect();
        let mean = col.iter().sum::<f64>() / n;
        let std = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        worst = worst.max(mean.abs()).max((std - 1.0).abs());
    }
    ensure(worst <= 1e-9, || format!("moments off by {worst:e}"))?;

    let example: Vec<FeatureRow> = [2.0, 4.0, 6.0]
        .iter()
        .map(|&x| FeatureRow {
            voltage: x,
            voltage_avg: x,
            current_avg: x,
            temperature_avg: x,
            soc: 0.0,
        })
        .collect();
    let stats = fit_normalization(&example).map_err(|e| e.to_string())?;
    let z: Vec<f64> = apply_normalization(&example, &stats)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|r| r.voltage)
        .collect();
    let sigma = (8.0f64 / 3.0).sqrt();
    let want = [-2.0 / sigma, 0.0, 2.0 / sigma];
    ensure(
        (stats.mean[0] - 4.0).abs() <= 1e-9 && (stats.std[0] - sigma).abs() <= 1e-9,
        || {
            format!(
                "[2,4,6] fit gave mean {} std {}",
                stats.mean[0], stats.std[0]
            )
        },
    )?;
    ensure(
        z.iter().zip(want).all(|(a, b)| (a - b).abs() <= 1e-9),
        || format!("[2,4,6] normalized to {z:?}"),
    )?;
    Ok(format!(
        "moments within {worst:.1e}; [2,4,6] -> mean 4, std 1.63299, z [-1.2247, 0, 1.2247]"
    ))
}

// ---------------------------------------------------------------- 6

fn fold_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0;
    for k in 2..=10usize {
        let mut sizes: Vec<usize> = (k..k + 30).collect();
        sizes.extend((0..40).map(|_| rng.random_range(k..=10_000)));
        sizes.push(10_000);
        for n in sizes {
            for mode in [FoldMode::Shuffled, FoldMode::Contiguous] {
                let seed = rng.random();
                let split = make_folds(n, k, seed, mode).map_err(|e| e.to_string())?;
                let lens: Vec<usize> = split.folds.iter().map(|f| f.validation.len()).collect();
                let spread = lens.iter().max().unwrap() - lens.iter().min().unwrap();
                let mut all: Vec<usize> = split
                    .folds
                    .iter()
                    .flat_map(|f| f.validation.iter().copied())
                    .collect();
                all.sort_unstable();
                let partition = all.len() == n && all.iter().enumerate().all(|(i, &v)| i == v);
                let complements = split.folds.iter().all(|f| {
                    let mut seen = vec![false; n];
                    f.train
                        .iter()
                        .chain(&f.validation)
                        .for_each(|&i| seen[i] = true);
                    f.train.len() + f.validation.len() == n && seen.iter().all(|&s| s)
                });
                ensure(
                    split.folds.len() == k && spread <= 1 && partition && complements,
                    || format!("n {n} k {k} {mode:?} seed {seed}: sizes {lens:?}"),
                )?;
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{checked} splits, n up to 10000, k 2..=10, both modes"
    ))
}

// ---------------------------------------------------------------- 7, 8, 9

const SEED: u64 = 7;
const EPOCHS: usize = 20;
const CYCLE: &str = "randmix";

struct Experiment {
    dir: tempfile::TempDir,
    report: socbench::harness::ComparisonReport,
    library_csv: Vec<u8>,
}

fn comparison_config() -> ComparisonConfig {
    let mut cfg = ComparisonConfig {
        architecture: default_architecture(),
        hyper: Hyperparameters {
            epochs: EPOCHS,
            seed: SEED,
            ..Hyperparameters::default()
        },
        ..ComparisonConfig::default()
    };
    // SGD's 0.01 default diverges on percent-scale targets with this network.
    cfg.learning_rates.insert(Algorithm::Sgd, 1e-3);
    cfg
}

/// 10,000-sample random-mix cycle at 25 degC, written to CSV and read back
/// the way the CLI does, then compared across SGD, RMSProp and Adamax.
fn run_experiment() -> Result<Experiment, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cell = SyntheticCellParams {
        sample_period_s: 0.25,
        t_ambient_c: 25.0,
        ..Default::default()
    };
    let cycle =
        generate_cycle(&cell, Profile::RandomMix, 2499.75, SEED).map_err(|e| e.to_string())?;
    if cycle.records.len() != 10_000 {
        return Err(format!("generated {} samples", cycle.records.len()));
    }
    let path = dir.path().join(format!("{CYCLE}.csv"));
    let file = std::fs::File::create(&path).map_err(|e| e.to_string())?;
    write_records_csv(file, &cycle.records, Some(cell.capacity_ah)).map_err(|e| e.to_string())?;

    let data = ingest_csv(&path, IngestOptions::default()).map_err(|e| e.to_string())?;
    let soc = coulomb_count(&data.records, 100.0, data.capacity_ah.unwrap())
        .map_err(|e| e.to_string())?;
    let rows =
        build_design_matrix(&data.records, &soc, DEFAULT_WINDOW).map_err(|e| e.to_string())?;
    let cycles = [CycleDataset {
        name: CYCLE.into(),
        rows,
    }];
    let optimizers = [Algorithm::Sgd, Algorithm::RmsProp, Algorithm::Adamax];
    let report =
        run_comparison(&cycles, &optimizers, &comparison_config()).map_err(|e| e.to_string())?;
    let mut library_csv = Vec::new();
    write_results_csv(&mut library_csv, &report.results, false).map_err(|e| e.to_string())?;
    Ok(Experiment {
        dir,
        report,
        library_csv,
    })
}

fn desk_scale_learning(exp: &Experiment) -> Outcome {
    ensure(exp.report.failures.is_empty(), || {
        format!("failed runs: {:?}", exp.report.failures)
    })?;
    let mut notes = Vec::new();
    for r in &exp.report.results {
        let first = r
            .final_log
            .epochs
            .first()
            .map(|e| e.train_loss)
            .unwrap_or(f64::NAN);
        let last = r.final_log.last().map(|e| e.train_loss).unwrap_or(f64::NAN);
        ensure(last <= 0.5 * first, || {
            format!(
                "{}: train MSE {first:.4} -> {last:.4} is not halved",
                r.optimizer.key()
            )
        })?;
        notes.push(format!("{} {first:.1}->{last:.3}", r.optimizer.key()));
    }
    let adamax = exp
        .report
        .get(CYCLE, Algorithm::Adamax)
        .ok_or("no adamax result")?
        .test
        .mae;
    ensure(adamax < 2.0, || {
        format!("adamax test MAE {adamax:.4} % SOC")
    })?;
    Ok(format!(
        "train MSE {}; adamax test MAE {adamax:.4} % SOC after {EPOCHS} epochs",
        notes.join(", ")
    ))
}

fn optimizer_choice_matters(exp: &Experiment) -> Outcome {
    let maes: Vec<(Algorithm, f64)> = exp
        .report
        .results
        .iter()
        .map(|r| (r.optimizer, r.test.mae))
        .collect();
    let best = maes
        .iter()
        .cloned()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or("no results")?;
    let worst = maes
        .iter()
        .cloned()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or("no results")?;
    let gap = worst.1 - best.1;
    let listing: Vec<String> = maes
        .iter()
        .map(|(a, m)| format!("{} {m:.4}", a.key()))
        .collect();
    ensure(gap > 0.1, || {
        format!("test MAE spread {gap:.4} % SOC ({})", listing.join(", "))
    })?;
    Ok(format!(
        "test MAE {}; best {} vs worst {} differ by {gap:.4} % SOC",
        listing.join(", "),
        best.0.key(),
        worst.0.key()
    ))
}

fn run_cli_compare(dir: &Path, out: &str) -> Result<Vec<u8>, String> {
    let output = Command::new(env!("CARGO_BIN_EXE_socbench"))
        .current_dir(dir)
        .args([
            "compare",
            "--data",
            &format!("{CYCLE}.csv"),
            "--seed",
            &SEED.to_string(),
        ])
        .args([
            "--epochs",
            &EPOCHS.to_string(),
            "--lr",
            "sgd:0.001",
            "--jobs",
            "1",
            "--out",
            out,
        ])
        .output()
        .map_err(|e| e.to_string())?;
    if !output.status.success() {
        return Err(format!(
            "compare exited with {}: {}",
            output.status,
            String::from_utf8_lossy(&output.stderr)
        ));
    }
    std::fs::read(dir.join(out)).map_err(|e| e.to_string())
}

fn determinism(exp: &Experiment) -> Outcome {
    let cli = run_cli_compare(exp.dir.path(), "results.csv")?;
    let text = String::from_utf8_lossy(&cli);
    ensure(
        text.starts_with("cycle,optimizer,mae,mse,rmse,seconds,seed\n"),
        || format!("unexpected header in {text}"),
    )?;
    ensure(cli == exp.library_csv, || {
        format!(
            "CLI run differs from in-process run:\n{text}\nvs\n{}",
            String::from_utf8_lossy(&exp.library_csv)
        )
    })?;
    Ok(format!(
        "separate `compare` run on one thread reproduced the {}-byte results CSV exactly",
        cli.len()
    ))
}

// ----------------------------------------------------------------

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(outcome) => outcome,
        Err(panic) => Err(panic
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into())),
    }
}

fn main() {
    let mut failed = 0;
    let mut report = |id: u32, name: &str, started: Instant, outcome: Outcome| {
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id} [{name}]: PASS ({secs:.1}s) {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id} [{name}]: FAIL ({secs:.1}s) {detail}");
            }
        }
    };

    let quick: [Criterion; 6] = [
        (1, "architecture exactness", architecture_exactness),
        (2, "gradient correctness", gradient_correctness),
        (3, "optimizer step oracles", optimizer_oracles),
        (4, "coulomb counting exactness", coulomb_exactness),
        (5, "normalization", normalization),
        (6, "fold properties", fold_properties),
    ];
    for (id, name, f) in quick {
        let started = Instant::now();
        report(id, name, started, guarded(f));
    }

    let started = Instant::now();
    let experiment =
        catch_unwind(run_experiment).unwrap_or_else(|_| Err("experiment panicked".into()));
    match &experiment {
        Ok(exp) => {
            report(
                7,
                "desk-scale learning",
                started,
                guarded(|| desk_scale_learning(exp)),
            );
            report(
                8,
                "optimizer choice matters",
                started,
                guarded(|| optimizer_choice_matters(exp)),
            );
            let started = Instant::now();
            report(9, "determinism", started, guarded(|| determinism(exp)));
        }
        Err(e) => {
            for (id, name) in [
                (7, "desk-scale learning"),
                (8, "optimizer choice matters"),
                (9, "determinism"),
            ] {
                report(
                    id,
                    name,
                    started,
                    Err(format!("experiment did not run: {e}")),
                );
            }
        }
    }

    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 9 acceptance criteria passed");
}
