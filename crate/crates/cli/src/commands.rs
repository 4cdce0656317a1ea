use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use socbench::data::{
    apply_normalization, build_design_matrix, coulomb_count, fit_normalization, ingest_csv,
    write_records_csv, Dataset, FeatureRow, IngestOptions, DEFAULT_WINDOW,
};
use socbench::harness::{
    evaluate as score, format_table, run_comparison, train as fit, write_results_csv,
    ComparisonConfig, CycleDataset, FoldMode, RunFailure, SplitMode,
};
use socbench::model::SavedModel;
use socbench::nn::{architecture, count_parameters, FEATURE_COUNT};
use socbench::optim::{Algorithm, Hyperparameters};
use socbench::synth::{generate_cycle, Profile, SyntheticCellParams};
use socbench::{Error, Result};

use crate::settings::{parse_hidden, parse_learning_rates, parse_optimizers, Settings};
use crate::{CompareArgs, CycleArgs, EvaluateArgs, GenerateArgs, TrainArgs, TrainingArgs};

const DEFAULT_HIDDEN: &str = "256,256,256";
const DEFAULT_OPTIMIZERS: &str = "sgd,rmsprop,adamax";
const CYCLE_KEYS: [&str; 3] = ["invert_current", "soc0_percent", "capacity_ah"];
const TRAINING_KEYS: [&str; 8] = [
    "hidden",
    "window",
    "epochs",
    "batch_size",
    "beta1",
    "beta2",
    "epsilon",
    "rho",
];

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| io_error(path, e))
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| io_error(path, e))
}

pub fn generate(args: GenerateArgs) -> Result<()> {
    let allowed = [
        &SyntheticCellParams::CONFIG_KEYS[..],
        &[
            "seed",
            "profile",
            "current",
            "pulse_on",
            "pulse_off",
            "duration",
        ],
    ]
    .concat();
    let s = Settings::load(args.config.as_deref(), &allowed)?;
    let seed = s.seed(args.seed)?;

    let mut cell = SyntheticCellParams::default();
    let overrides = [
        (args.capacity_ah, "capacity_ah", &mut cell.capacity_ah),
        (
            args.r_internal_ohm,
            "r_internal_ohm",
            &mut cell.r_internal_ohm,
        ),
        (args.v_min, "v_min", &mut cell.v_min),
        (args.v_max, "v_max", &mut cell.v_max),
        (args.t_ambient_c, "t_ambient_c", &mut cell.t_ambient_c),
        (args.heating_coeff, "heating_coeff", &mut cell.heating_coeff),
        (args.cooling_rate, "cooling_rate", &mut cell.cooling_rate),
        (
            args.sample_period_s,
            "sample_period_s",
            &mut cell.sample_period_s,
        ),
        (args.soc0_percent, "soc0_percent", &mut cell.soc0_percent),
    ];
    for (flag, key, slot) in overrides {
        if let Some(v) = s.pick(flag, key)? {
            *slot = v;
        }
    }

    let duration = s
        .pick(args.duration, "duration")?
        .ok_or_else(|| Error::Config("--duration is required".into()))?;
    let profile_name = s.pick_or(args.profile, "profile", "random".to_string())?;
    let current = || {
        s.pick(args.current, "current")?
            .ok_or_else(|| Error::Config(format!("profile '{profile_name}' needs --current")))
    };
    let profile = match profile_name.to_ascii_lowercase().as_str() {
        "constant" => Profile::ConstantDischarge {
            current_a: current()?,
        },
        "pulse" => Profile::PulseTrain {
            current_a: current()?,
            on_s: s
                .pick(args.pulse_on, "pulse_on")?
                .ok_or_else(|| Error::Config("profile 'pulse' needs --pulse-on".into()))?,
            off_s: s.pick_or(args.pulse_off, "pulse_off", 0.0)?,
        },
        "random" => Profile::RandomMix,
        other => {
            return Err(Error::Config(format!(
                "unknown profile '{other}' (valid: constant, pulse, random)"
            )))
        }
    };

    let cycle = generate_cycle(&cell, profile, duration, seed)?;
    let mut w = create(&args.out)?;
    write_records_csv(&mut w, &cycle.records, Some(cell.capacity_ah))?;
    finish(w, &args.out)?;

    let span = cycle.records.last().map_or(0.0, |r| r.time_s);
    println!(
        "wrote {} rows covering {span} s to {}; final SOC {:.2}%",
        cycle.records.len(),
        args.out.display(),
        cycle.final_soc().clamp(0.0, 100.0)
    );
    Ok(())
}

struct CycleSettings {
    ingest: IngestOptions,
    soc0: f64,
    capacity: Option<f64>,
}

impl CycleSettings {
    fn resolve(s: &Settings, args: &CycleArgs) -> Result<Self> {
        Ok(Self {
            ingest: IngestOptions {
                invert_current: s.switch(args.invert_current, "invert_current")?,
            },
            soc0: s.pick_or(args.soc0_percent, "soc0_percent", 100.0)?,
            capacity: s.pick(args.capacity_ah, "capacity_ah")?,
        })
    }

    /// Ingests `path` and builds SOC-labelled feature rows.
    fn rows(&self, path: &Path, window: usize) -> Result<Vec<FeatureRow>> {
        let data = ingest_csv(path, self.ingest)?;
        let capacity = self.capacity.or(data.capacity_ah).ok_or_else(|| {
            Error::Config(format!(
                "{}: cell capacity unknown; pass --capacity-ah or add a capacity_ah column",
                path.display()
            ))
        })?;
        let soc = coulomb_count(&data.records, self.soc0, capacity)?;
        if soc.clamp_events > 0 {
            eprintln!(
                "warning: {}: {} SOC samples clamped to [0, 100]",
                path.display(),
                soc.clamp_events
            );
        }
        build_design_matrix(&data.records, &soc, window)
    }
}

struct TrainingSettings {
    hidden: Vec<usize>,
    window: usize,
    hyper: Hyperparameters,
}

impl TrainingSettings {
    fn resolve(s: &Settings, args: &TrainingArgs, seed: u64) -> Result<Self> {
        let d = Hyperparameters::default();
        let hidden = s.pick_or(args.hidden.clone(), "hidden", DEFAULT_HIDDEN.to_string())?;
        Ok(Self {
            hidden: parse_hidden(&hidden)?,
            window: s.pick_or(args.window, "window", DEFAULT_WINDOW)?,
            hyper: Hyperparameters {
                eta: d.eta,
                beta1: s.pick_or(args.beta1, "beta1", d.beta1)?,
                beta2: s.pick_or(args.beta2, "beta2", d.beta2)?,
                epsilon: s.pick_or(args.epsilon, "epsilon", d.epsilon)?,
                rho: s.pick_or(args.rho, "rho", d.rho)?,
                batch_size: s.pick_or(args.batch_size, "batch_size", d.batch_size)?,
                epochs: s.pick_or(args.epochs, "epochs", d.epochs)?,
                seed,
            },
        })
    }
}

pub fn train(args: TrainArgs) -> Result<()> {
    let allowed = [
        &CYCLE_KEYS[..],
        &TRAINING_KEYS,
        &["seed", "optimizer", "lr"],
    ]
    .concat();
    let s = Settings::load(args.config.as_deref(), &allowed)?;
    let seed = s.seed(args.seed)?;
    let cycle = CycleSettings::resolve(&s, &args.cycle)?;
    let t = TrainingSettings::resolve(&s, &args.training, seed)?;
    let algorithm = s.pick_or(args.optimizer, "optimizer", Algorithm::Adamax)?;
    let h = Hyperparameters {
        eta: s.pick_or(args.lr, "lr", algorithm.default_learning_rate())?,
        ..t.hyper
    };
    h.validate()?;
    if h.eta == 0.0 {
        eprintln!("warning: learning rate is 0; parameters will keep their initial values");
    }

    let rows = cycle.rows(&args.data, t.window)?;
    let stats = fit_normalization(&rows)?;
    let data = Dataset::from_rows(&apply_normalization(&rows, &stats)?);
    let specs = architecture(FEATURE_COUNT, &t.hidden);
    let (params, log) = fit(&specs, &data, None, algorithm, &h)?;

    SavedModel::new(&params, stats, seed, t.window).save(&args.model_out)?;
    let mut w = create(&args.log_out)?;
    log.write_csv(&mut w)?;
    finish(w, &args.log_out)?;

    let last = log
        .last()
        .ok_or_else(|| Error::Internal("empty training log".into()))?;
    println!(
        "trained {} ({} parameters) for {} epochs on {} rows",
        algorithm.label(),
        count_parameters(&params),
        h.epochs,
        data.len()
    );
    if let Some(best) = log.best_epoch() {
        println!("best epoch by MAE: {best}");
    }
    println!("mae {}", last.val_mae);
    println!("mse {}", last.val_mse);
    println!(
        "model written to {}, log to {}",
        args.model_out.display(),
        args.log_out.display()
    );
    Ok(())
}

pub fn evaluate(args: EvaluateArgs) -> Result<()> {
    let s = Settings::load(args.config.as_deref(), &CYCLE_KEYS)?;
    let cycle = CycleSettings::resolve(&s, &args.cycle)?;
    let model = SavedModel::load(&args.model)?;
    model.check_features(FEATURE_COUNT)?;
    let params = model.network()?;

    let rows = cycle.rows(&args.data, model.window)?;
    let data = Dataset::from_rows(&apply_normalization(&rows, &model.normalization)?);
    let (metrics, predictions) = score(&params, &data)?;

    if let Some(path) = &args.predictions_out {
        let mut w = create(path)?;
        writeln!(w, "soc_true,soc_pred").map_err(|e| io_error(path, e))?;
        for (y, p) in data.targets.iter().zip(predictions.iter()) {
            writeln!(w, "{y},{p}").map_err(|e| io_error(path, e))?;
        }
        finish(w, path)?;
    }
    println!("rows {}", data.len());
    println!("mae {}", metrics.mae);
    println!("mse {}", metrics.mse);
    println!("rmse {}", metrics.rmse());
    Ok(())
}

fn csv_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| io_error(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv")))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::Config(format!("no .csv files in {}", dir.display())));
    }
    Ok(files)
}

fn cycle_name(path: &Path) -> String {
    path.file_stem().map_or_else(
        || path.display().to_string(),
        |s| s.to_string_lossy().into_owned(),
    )
}

pub fn compare(args: CompareArgs) -> Result<()> {
    let allowed = [
        &CYCLE_KEYS[..],
        &TRAINING_KEYS,
        &[
            "seed",
            "optimizers",
            "lr",
            "folds",
            "fold_mode",
            "split",
            "train_fraction",
            "jobs",
        ],
    ]
    .concat();
    let s = Settings::load(args.config.as_deref(), &allowed)?;
    let seed = s.seed(args.seed)?;
    let cycle = CycleSettings::resolve(&s, &args.cycle)?;
    let t = TrainingSettings::resolve(&s, &args.training, seed)?;
    let optimizers = parse_optimizers(&s.pick_or(
        args.optimizers.clone(),
        "optimizers",
        DEFAULT_OPTIMIZERS.to_string(),
    )?)?;
    let learning_rates = match s.pick::<String>(args.lr.clone(), "lr")? {
        Some(text) => parse_learning_rates(&text, &optimizers)?,
        None => Default::default(),
    };
    let defaults = ComparisonConfig::default();
    let cfg = ComparisonConfig {
        architecture: architecture(FEATURE_COUNT, &t.hidden),
        hyper: t.hyper,
        learning_rates,
        folds: s.pick_or(args.folds, "folds", defaults.folds)?,
        fold_mode: s
            .pick_or(args.fold_mode.clone(), "fold_mode", "shuffled".to_string())?
            .parse::<FoldMode>()?,
        split: s
            .pick_or(args.split.clone(), "split", "interleaved".to_string())?
            .parse::<SplitMode>()?,
        train_fraction: s.pick_or(
            args.train_fraction,
            "train_fraction",
            defaults.train_fraction,
        )?,
    };
    let jobs = s.pick_or(args.jobs, "jobs", 0usize)?;

    let mut paths = args.data.clone();
    if let Some(dir) = &args.data_dir {
        paths.extend(csv_files(dir)?);
    }
    if paths.is_empty() {
        return Err(Error::Config(
            "no data given; use --data or --data-dir".into(),
        ));
    }

    let mut cycles = Vec::new();
    let mut failures = Vec::new();
    let mut first_error = None;
    for path in &paths {
        let name = cycle_name(path);
        match cycle.rows(path, t.window) {
            Ok(rows) => cycles.push(CycleDataset { name, rows }),
            Err(e) => {
                eprintln!("error: skipping {name}: {e}");
                failures.push(RunFailure {
                    cycle: name,
                    optimizer: None,
                    message: e.to_string(),
                });
                first_error.get_or_insert(e);
            }
        }
    }
    if cycles.is_empty() {
        return Err(first_error.unwrap_or_else(|| Error::Internal("no cycles loaded".into())));
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let mut report = pool.install(|| run_comparison(&cycles, &optimizers, &cfg))?;
    failures.append(&mut report.failures);
    failures.sort_by(|a, b| (&a.cycle, a.optimizer).cmp(&(&b.cycle, b.optimizer)));
    report.failures = failures;

    let mut w = create(&args.out)?;
    write_results_csv(&mut w, &report.results, args.record_time)?;
    finish(w, &args.out)?;

    let table = format_table(&report);
    print!("{table}");
    if let Some(path) = &args.table_out {
        fs::write(path, &table).map_err(|e| io_error(path, e))?;
    }
    if let Some(dir) = &args.log_dir {
        for r in &report.results {
            let stem = format!("{}_{}", r.cycle, r.optimizer.key());
            let path = dir.join(format!("{stem}.csv"));
            let mut w = create(&path)?;
            r.final_log.write_csv(&mut w)?;
            finish(w, &path)?;
            for (i, fold) in r.cross_validation.folds.iter().enumerate() {
                let path = dir.join(format!("{stem}_fold{i}.csv"));
                let mut w = create(&path)?;
                fold.log.write_csv(&mut w)?;
                finish(w, &path)?;
            }
        }
    }
    for f in &report.failures {
        eprintln!(
            "failed: {} / {}: {}",
            f.cycle,
            f.optimizer.map_or("-", Algorithm::key),
            f.message
        );
    }
    if report.results.is_empty() {
        return Err(Error::Data("every run failed".into()));
    }
    Ok(())
}
