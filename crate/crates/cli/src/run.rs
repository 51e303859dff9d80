//! Experiment dispatch and output files.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use gaplab_core::eigen::{eigen_decompose, eigenvalues};
use gaplab_core::eigenvector_analysis::nodal_report_with_tol;
use gaplab_core::ensembles::Ensemble;
use gaplab_core::gap_experiments::{
    min_gap_experiment, run_tail_experiment, simple_spectrum_experiment, ExperimentConfig,
    TailCurve,
};
use gaplab_core::littlewood_offord::{
    lcd, regularized_lcd, segmental_small_ball, small_ball_auto, CompressParams, LcdParams,
    LcdResult, SubsetStrategy,
};
use gaplab_core::rng::{rng_from_seed, trial_seed};
use gaplab_core::smoothed_power::smoothed_solve;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Experiment, RunConfig, SCHEMA_VERSION};
use crate::report::report;
use crate::CliError;

/// Environment variable overriding the configured worker count.
pub const WORKERS_ENV: &str = "GAPLAB_WORKERS";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub experiment: Experiment,
    pub seed: u64,
    pub workers: usize,
    pub wall_time_seconds: f64,
    pub outputs: Vec<OutputFile>,
    pub config: RunConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub output_dir: PathBuf,
    pub outputs: Vec<OutputFile>,
    /// Report text for `report` runs.
    pub summary: Option<String>,
}

struct Table {
    name: &'static str,
    text: String,
    rows: usize,
}

impl Table {
    fn new(name: &'static str, header: &[&str]) -> Self {
        Self {
            name,
            text: format!("{}\n", header.join(",")),
            rows: 0,
        }
    }

    fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
        self.rows += 1;
    }
}

fn f(x: f64) -> String {
    format!("{x:?}")
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

/// Writes `contents` to `dir/name` through a temporary file and a rename,
/// so readers never observe a partial file.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(contents.as_bytes())?;
        file.sync_all()?;
        fs::rename(&tmp, &target)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(io_err(&target, e));
    }
    Ok(())
}

/// Worker count from `GAPLAB_WORKERS`, then the config, then the machine.
pub fn resolve_workers(config: &RunConfig) -> Result<usize, CliError> {
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        return match v.trim().parse::<usize>() {
            Ok(w) if w > 0 => Ok(w),
            _ => Err(CliError::Usage(format!("{WORKERS_ENV} must be a positive integer, got `{v}`"))),
        };
    }
    Ok(config.workers.unwrap_or_else(|| {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    }))
}

pub fn run(config: &RunConfig) -> Result<RunOutcome, CliError> {
    let dir = PathBuf::from(&config.output);
    if config.experiment == Experiment::Report {
        let rep = report(&dir)?;
        return Ok(RunOutcome {
            output_dir: dir,
            outputs: Vec::new(),
            summary: Some(rep.text),
        });
    }
    let workers = resolve_workers(config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let start = Instant::now();
    let tables = pool.install(|| compute(config))?;
    let wall = start.elapsed().as_secs_f64();

    fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
    let mut outputs = Vec::new();
    for t in &tables {
        write_atomic(&dir, t.name, &t.text)?;
        outputs.push(OutputFile {
            file: t.name.to_string(),
            rows: t.rows,
        });
    }
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        tool: "gaplab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        experiment: config.experiment,
        seed: config.seed,
        workers,
        wall_time_seconds: wall,
        outputs: outputs.clone(),
        config: config.clone(),
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_atomic(&dir, "manifest.json", &(text + "\n"))?;
    Ok(RunOutcome {
        output_dir: dir,
        outputs,
        summary: None,
    })
}

fn compute(config: &RunConfig) -> Result<Vec<Table>, CliError> {
    Ok(match config.experiment {
        Experiment::Sample => vec![sample(config)?],
        Experiment::Tails => vec![tails(config)?],
        Experiment::Mingap => vec![mingap(config)?],
        Experiment::Simple => vec![simple(config)?],
        Experiment::Lcd => lcd_tables(config)?,
        Experiment::Smallball => vec![smallball(config)?],
        Experiment::Nodal => vec![nodal(config)?],
        Experiment::Power => vec![power(config)?],
        Experiment::Report => unreachable!("handled before dispatch"),
    })
}

fn sample(config: &RunConfig) -> Result<Table, CliError> {
    let spec = config.ensemble_spec()?;
    let spectra: Vec<gaplab_core::Result<Vec<f64>>> = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let seed = spec.trial_seed(t);
            eigenvalues(&spec.sample_with_seed(seed)).map_err(|e| e.in_trial(t, seed))
        })
        .collect();
    let mut table = Table::new("spectrum.csv", &["trial", "index", "eigenvalue"]);
    for (t, ev) in spectra.into_iter().enumerate() {
        for (i, v) in ev?.iter().enumerate() {
            table.row(&[t.to_string(), (i + 1).to_string(), f(*v)]);
        }
    }
    Ok(table)
}

pub const TAILS_HEADER: [&str; 10] = [
    "n", "l", "index_mode", "delta", "trials", "successes", "p_hat", "ci_lo", "ci_hi", "seed",
];

pub fn tails_table_text(curve: &TailCurve) -> String {
    let mut table = Table::new("tails.csv", &TAILS_HEADER);
    push_tail_rows(&mut table, curve);
    table.text
}

fn push_tail_rows(table: &mut Table, curve: &TailCurve) {
    let label = curve.index_mode.label();
    for p in &curve.points {
        table.row(&[
            curve.n.to_string(),
            curve.l.to_string(),
            label.clone(),
            f(p.delta),
            p.trials.to_string(),
            p.successes.to_string(),
            f(p.p_hat),
            f(p.ci_lo),
            f(p.ci_hi),
            curve.seed.to_string(),
        ]);
    }
}

fn tails(config: &RunConfig) -> Result<Table, CliError> {
    let exp = ExperimentConfig::new(
        config.ensemble_spec()?,
        config.trials,
        config.l,
        config.delta_grid.clone(),
        config.index_mode(),
    )?;
    let curve = run_tail_experiment(&exp)?;
    let mut table = Table::new("tails.csv", &TAILS_HEADER);
    push_tail_rows(&mut table, &curve);
    Ok(table)
}

fn mingap(config: &RunConfig) -> Result<Table, CliError> {
    let spec = config.ensemble_spec()?;
    let summary = min_gap_experiment(&spec, config.trials)?;
    let mut table = Table::new("mingap.csv", &["trial", "n", "min_gap", "min_gap_scaled", "seed"]);
    for r in &summary.records {
        table.row(&[
            r.trial.to_string(),
            summary.n.to_string(),
            f(r.min_gap),
            f(r.scaled),
            r.seed.to_string(),
        ]);
    }
    Ok(table)
}

fn simple(config: &RunConfig) -> Result<Table, CliError> {
    let spec = config.ensemble_spec()?;
    let tol = config.tol.unwrap_or(1e-10 * (spec.dim() as f64).sqrt());
    let summary = simple_spectrum_experiment(&spec, config.trials, tol)?;
    let mut table = Table::new("simple.csv", &["trial", "min_gap", "is_simple"]);
    for r in &summary.records {
        table.row(&[r.trial.to_string(), f(r.min_gap), r.is_simple.to_string()]);
    }
    Ok(table)
}

/// Configured vectors, or `vector_count` Gaussian directions of length `dim`
/// normalized to the unit sphere.
pub fn corpus(config: &RunConfig) -> Vec<Vec<f64>> {
    if let Some(vs) = &config.vectors {
        return vs.clone();
    }
    (0..config.vector_count as u64)
        .map(|k| {
            let mut rng = rng_from_seed(trial_seed(config.seed, k));
            let v: Vec<f64> = (0..config.dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / norm).collect()
        })
        .collect()
}

fn lcd_tables(config: &RunConfig) -> Result<Vec<Table>, CliError> {
    let mut params = LcdParams::new(config.kappa, config.gamma)?;
    if let Some(t) = config.theta_max {
        params = params.with_theta_max(t)?;
    }
    let vectors = corpus(config);
    let results: Vec<gaplab_core::Result<LcdResult>> =
        vectors.par_iter().map(|v| lcd(v, &params)).collect();
    let mut table = Table::new(
        "lcd.csv",
        &["vector_id", "kappa", "gamma", "value", "achieved_distance", "bounded"],
    );
    for (id, r) in results.into_iter().enumerate() {
        let r = r.map_err(|e| e.in_trial(id as u64, config.seed))?;
        table.row(&[
            id.to_string(),
            f(config.kappa),
            f(config.gamma),
            f(r.value()),
            r.achieved_distance().map(f).unwrap_or_default(),
            r.is_bounded().to_string(),
        ]);
    }
    let mut tables = vec![table];

    if let Some(alpha) = config.alpha {
        let compress = CompressParams::new(config.c0, config.c1)?;
        let reg: Vec<_> = vectors
            .par_iter()
            .enumerate()
            .map(|(id, v)| {
                regularized_lcd(v, alpha, &params, &compress, config.budget, trial_seed(config.seed, id as u64))
            })
            .collect();
        let mut t = Table::new("regularized_lcd.csv", &["vector_id", "alpha", "value", "witness"]);
        for (id, r) in reg.into_iter().enumerate() {
            // vectors without enough spread coordinates have no regularized LCD
            let (value, witness) = match r {
                Ok(r) => (
                    f(r.value.value()),
                    r.witness.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(" "),
                ),
                Err(gaplab_core::Error::InsufficientSpread { .. }) => (String::new(), String::new()),
                Err(e) => return Err(e.in_trial(id as u64, config.seed).into()),
            };
            t.row(&[id.to_string(), f(alpha), value, witness]);
        }
        tables.push(t);
    }
    Ok(tables)
}

fn smallball(config: &RunConfig) -> Result<Table, CliError> {
    let vectors = corpus(config);
    let jobs: Vec<(usize, usize)> = (0..vectors.len())
        .flat_map(|v| (0..config.delta_grid.len()).map(move |d| (v, d)))
        .collect();
    let rows: Vec<gaplab_core::Result<Vec<String>>> = jobs
        .par_iter()
        .map(|&(id, k)| {
            let delta = config.delta_grid[k];
            let seed = trial_seed(config.seed, (id * config.delta_grid.len() + k) as u64);
            let (method, est) = match config.alpha {
                None => {
                    let e = small_ball_auto(&vectors[id], delta, config.law, config.mc_trials, seed)?;
                    (e.method.label().to_string(), e)
                }
                Some(alpha) => {
                    let strategy = if vectors[id].len() <= gaplab_core::littlewood_offord::EXHAUSTIVE_SUBSET_LIMIT {
                        SubsetStrategy::Exhaustive
                    } else {
                        SubsetStrategy::Sampled {
                            random_subsets: config.budget,
                        }
                    };
                    let s = segmental_small_ball(
                        &vectors[id],
                        delta,
                        alpha,
                        config.law,
                        strategy,
                        config.mc_trials,
                        seed,
                    )?;
                    (format!("segmental_{}", s.estimate.method.label()), s.estimate)
                }
            };
            Ok(vec![id.to_string(), f(delta), method, f(est.estimate), f(est.half_width)])
        })
        .collect();
    let mut table = Table::new("smallball.csv", &["vector_id", "delta", "method", "estimate", "half_width"]);
    for r in rows {
        table.row(&r?);
    }
    Ok(table)
}

fn nodal(config: &RunConfig) -> Result<Table, CliError> {
    let spec = config.ensemble_spec()?;
    let zero_tol = config.zero_tol.unwrap_or(1e-10 * (spec.dim() as f64).sqrt());
    let reports: Vec<gaplab_core::Result<_>> = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let seed = spec.trial_seed(t);
            let adj = spec.sample_with_seed(seed);
            let spectrum = eigen_decompose(&adj).map_err(|e| e.in_trial(t, seed))?;
            nodal_report_with_tol(&adj, &spectrum, zero_tol)
        })
        .collect();
    let mut table = Table::new(
        "nodal.csv",
        &["trial", "eigen_index", "eigenvalue", "min_abs_coord", "strong_count", "weak_count"],
    );
    for (t, rep) in reports.into_iter().enumerate() {
        for e in rep?.entries {
            table.row(&[
                t.to_string(),
                (e.index + 1).to_string(),
                f(e.eigenvalue),
                f(e.min_abs),
                e.strong_count().to_string(),
                e.weak_count().to_string(),
            ]);
        }
    }
    Ok(table)
}

fn power(config: &RunConfig) -> Result<Table, CliError> {
    let spec = config.ensemble_spec()?;
    let Ensemble::Perturbed {
        deterministic,
        scale,
        ..
    } = spec.ensemble()
    else {
        return Err(CliError::Usage("power needs a perturbed ensemble".into()));
    };
    let tol = config.tol.unwrap_or(1e-6);
    let results: Vec<gaplab_core::Result<_>> = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let seed = spec.trial_seed(t);
            smoothed_solve(deterministic, *scale, tol, config.max_iter, seed)
                .map_err(|e| e.in_trial(t, seed))
        })
        .collect();
    let mut table = Table::new(
        "power.csv",
        &["seed", "sigma", "iterations", "converged", "lambda_est", "gap_perturbed", "weyl_bound"],
    );
    for r in results {
        let r = r?;
        table.row(&[
            r.seed.to_string(),
            f(r.sigma),
            r.trace.iterations.to_string(),
            r.trace.converged.to_string(),
            f(r.trace.lambda),
            f(r.gap_perturbed),
            f(r.weyl_bound()),
        ]);
    }
    Ok(table)
}
