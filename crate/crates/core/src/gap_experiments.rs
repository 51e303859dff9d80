//! Monte Carlo estimates of eigenvalue-gap tail probabilities, minimum gaps
//! and simple-spectrum frequencies.
//!
//! Trials are independent: trial `t` samples its matrix from the stream
//! seeded by `(master_seed, t)`, and all aggregation is by integer counts or
//! trial-ordered lists, so results do not depend on the rayon pool size.

use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::eigenvalues;
use crate::ensembles::EnsembleSpec;
use crate::error::{Error, Result};
use crate::spectral::min_gap;
use crate::stats::{least_squares, quantile_sorted, wilson_interval, Z_95};

/// Repulsion exponent `c_l = ((3l + 3 - 2^{d+1}) 2^d - 1) / 3`, `d = ⌊log₂ l⌋`.
pub fn c_exponent(l: u32) -> Rational64 {
    assert!(l >= 1, "gap order must be positive");
    let d = 31 - l.leading_zeros();
    let pow = 1i64 << d;
    let l = l as i64;
    Rational64::new((3 * l + 3 - 2 * pow) * pow - 1, 3)
}

/// Which eigenvalue indices an experiment watches. Indices are one-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexMode {
    /// The gap `λ_{i+l} - λ_i` for one fixed `i`.
    Single(usize),
    /// Every `i` with `εn ≤ i ≤ (1-ε)n`, pooled within each sample.
    BulkAverage(f64),
    /// The smallest `l`-gap over all `i`.
    AllMin,
}

impl IndexMode {
    pub fn label(&self) -> String {
        match self {
            IndexMode::Single(i) => format!("single({i})"),
            IndexMode::BulkAverage(eps) => format!("bulk_average({eps})"),
            IndexMode::AllMin => "all_min".to_string(),
        }
    }

    /// Zero-based indices `i` whose gap `λ_{i+l} - λ_i` is observed.
    pub fn indices(&self, n: usize, l: usize) -> Vec<usize> {
        match *self {
            IndexMode::Single(i) => vec![i - 1],
            IndexMode::BulkAverage(eps) => {
                let lo = ((eps * n as f64).ceil() as usize).max(1);
                let hi = (((1.0 - eps) * n as f64).floor() as usize).min(n - l);
                (lo..=hi).map(|i| i - 1).collect()
            }
            IndexMode::AllMin => (0..n - l).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub ensemble: EnsembleSpec,
    pub trials: u64,
    pub l: usize,
    pub delta_grid: Vec<f64>,
    pub index_mode: IndexMode,
}

impl ExperimentConfig {
    pub fn new(
        ensemble: EnsembleSpec,
        trials: u64,
        l: usize,
        delta_grid: Vec<f64>,
        index_mode: IndexMode,
    ) -> Result<Self> {
        let n = ensemble.dim();
        if trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if l == 0 || l >= n {
            return Err(Error::InvalidConfig(format!("l must lie in [1, {}], got {l}", n - 1)));
        }
        if delta_grid.is_empty() {
            return Err(Error::InvalidConfig("delta_grid is empty".into()));
        }
        if delta_grid.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(Error::InvalidConfig("delta_grid values must be positive".into()));
        }
        if delta_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig("delta_grid must be strictly ascending".into()));
        }
        match index_mode {
            IndexMode::Single(i) if i == 0 || i + l > n => {
                return Err(Error::InvalidConfig(format!(
                    "single index must lie in [1, {}], got {i}",
                    n - l
                )));
            }
            IndexMode::BulkAverage(eps) => {
                if !(0.0..0.5).contains(&eps) {
                    return Err(Error::InvalidConfig(format!("bulk epsilon must lie in [0, 0.5), got {eps}")));
                }
                if index_mode.indices(n, l).is_empty() {
                    return Err(Error::InvalidConfig("bulk window contains no indices".into()));
                }
            }
            _ => {}
        }
        Ok(Self {
            ensemble,
            trials,
            l,
            delta_grid,
            index_mode,
        })
    }

    pub fn seed(&self) -> u64 {
        self.ensemble.master_seed()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailPoint {
    pub delta: f64,
    /// Number of pooled indicator observations.
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl TailPoint {
    pub fn new(delta: f64, trials: u64, successes: u64) -> Self {
        let (ci_lo, ci_hi) = wilson_interval(successes, trials, Z_95);
        Self {
            delta,
            trials,
            successes,
            p_hat: successes as f64 / trials as f64,
            ci_lo,
            ci_hi,
        }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_hi - self.ci_lo)
    }
}

/// Empirical `P(λ_{i+l} - λ_i ≤ δ n^{-1/2})` over a δ-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TailCurve {
    pub n: usize,
    pub l: usize,
    pub index_mode: IndexMode,
    pub seed: u64,
    pub points: Vec<TailPoint>,
}

fn trial_counts(config: &ExperimentConfig, indices: &[usize], trial: u64) -> Result<Vec<u64>> {
    let n = config.ensemble.dim();
    let seed = config.ensemble.trial_seed(trial);
    let matrix = config.ensemble.sample_with_seed(seed);
    let ev = eigenvalues(&matrix).map_err(|e| e.in_trial(trial, seed))?;
    let scale = (n as f64).sqrt();
    let thresholds: Vec<f64> = config.delta_grid.iter().map(|d| d / scale).collect();
    let l = config.l;
    let observed: Vec<f64> = match config.index_mode {
        IndexMode::AllMin => {
            let m = indices
                .iter()
                .map(|&i| ev[i + l] - ev[i])
                .fold(f64::INFINITY, f64::min);
            vec![m]
        }
        _ => indices.iter().map(|&i| ev[i + l] - ev[i]).collect(),
    };
    // diff array over the ascending threshold grid
    let mut diff = vec![0u64; thresholds.len() + 1];
    for g in observed {
        let first = thresholds.partition_point(|&t| g > t);
        diff[first] += 1;
    }
    let mut counts = Vec::with_capacity(thresholds.len());
    let mut running = 0;
    for d in &diff[..thresholds.len()] {
        running += d;
        counts.push(running);
    }
    Ok(counts)
}

fn first_error<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    results.into_iter().collect()
}

pub fn run_tail_experiment(config: &ExperimentConfig) -> Result<TailCurve> {
    let n = config.ensemble.dim();
    let indices = config.index_mode.indices(n, config.l);
    let per_trial: Vec<Result<Vec<u64>>> = (0..config.trials)
        .into_par_iter()
        .map(|t| trial_counts(config, &indices, t))
        .collect();
    let per_trial = first_error(per_trial)?;
    let mut successes = vec![0u64; config.delta_grid.len()];
    for counts in &per_trial {
        for (s, c) in successes.iter_mut().zip(counts) {
            *s += c;
        }
    }
    let observations = match config.index_mode {
        IndexMode::BulkAverage(_) => config.trials * indices.len() as u64,
        _ => config.trials,
    };
    let points = config
        .delta_grid
        .iter()
        .zip(successes)
        .map(|(&delta, s)| TailPoint::new(delta, observations, s))
        .collect();
    Ok(TailCurve {
        n,
        l: config.l,
        index_mode: config.index_mode,
        seed: config.seed(),
        points,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub slope_se: f64,
    pub delta_range: (f64, f64),
    pub used: Vec<f64>,
    /// Grid points inside the range dropped for having zero successes.
    pub excluded: Vec<f64>,
}

impl ExponentFit {
    /// Approximate 95% interval on the slope from its standard error.
    pub fn slope_interval(&self) -> (f64, f64) {
        (self.slope - Z_95 * self.slope_se, self.slope + Z_95 * self.slope_se)
    }
}

/// Least-squares slope of `log p_hat` against `log δ` for grid points in
/// `[delta_min, delta_max]` with at least one success.
pub fn fit_exponent(curve: &TailCurve, delta_min: f64, delta_max: f64) -> Result<ExponentFit> {
    let mut used = Vec::new();
    let mut excluded = Vec::new();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for p in &curve.points {
        if p.delta < delta_min || p.delta > delta_max {
            continue;
        }
        if p.successes == 0 {
            excluded.push(p.delta);
        } else {
            used.push(p.delta);
            xs.push(p.delta.ln());
            ys.push(p.p_hat.ln());
        }
    }
    let fit = least_squares(&xs, &ys).ok_or(Error::InsufficientData)?;
    Ok(ExponentFit {
        slope: fit.slope,
        intercept: fit.intercept,
        residual: fit.rss,
        slope_se: fit.slope_se,
        delta_range: (delta_min, delta_max),
        used,
        excluded,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinGapRecord {
    pub trial: u64,
    pub seed: u64,
    pub min_gap: f64,
    /// `δ_min · n^{3/2}`.
    pub scaled: f64,
    /// Zero-based index `i` of the minimizing gap `λ_{i+1} - λ_i`.
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinGapSummary {
    pub n: usize,
    pub records: Vec<MinGapRecord>,
    pub min_scaled: f64,
    /// Quartiles (25%, 50%, 75%) of the scaled minimum gap.
    pub quartiles: [f64; 3],
}

impl MinGapSummary {
    /// Fraction of trials with `δ_min ≥ n^{-3/2}`.
    pub fn fraction_above_floor(&self) -> f64 {
        let ok = self.records.iter().filter(|r| r.scaled >= 1.0).count();
        ok as f64 / self.records.len() as f64
    }
}

pub fn min_gap_experiment(ensemble: &EnsembleSpec, trials: u64) -> Result<MinGapSummary> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let n = ensemble.dim();
    let scale = (n as f64).powf(1.5);
    let records: Vec<Result<MinGapRecord>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let seed = ensemble.trial_seed(trial);
            let ev = eigenvalues(&ensemble.sample_with_seed(seed)).map_err(|e| e.in_trial(trial, seed))?;
            let (g, index) = min_gap(&ev)?;
            Ok(MinGapRecord {
                trial,
                seed,
                min_gap: g,
                scaled: g * scale,
                index,
            })
        })
        .collect();
    let records = first_error(records)?;
    let mut sorted: Vec<f64> = records.iter().map(|r| r.scaled).collect();
    sorted.sort_by(f64::total_cmp);
    Ok(MinGapSummary {
        n,
        min_scaled: sorted[0],
        quartiles: [
            quantile_sorted(&sorted, 0.25),
            quantile_sorted(&sorted, 0.5),
            quantile_sorted(&sorted, 0.75),
        ],
        records,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimpleRecord {
    pub trial: u64,
    pub min_gap: f64,
    pub is_simple: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimpleSpectrumSummary {
    pub tol: f64,
    pub fraction: f64,
    pub records: Vec<SimpleRecord>,
}

/// Fraction of trials whose consecutive gaps all exceed `tol`.
pub fn simple_spectrum_experiment(
    ensemble: &EnsembleSpec,
    trials: u64,
    tol: f64,
) -> Result<SimpleSpectrumSummary> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    if !(tol >= 0.0) {
        return Err(Error::param("tol", format!("must be >= 0, got {tol}")));
    }
    let records: Vec<Result<SimpleRecord>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let seed = ensemble.trial_seed(trial);
            let ev = eigenvalues(&ensemble.sample_with_seed(seed)).map_err(|e| e.in_trial(trial, seed))?;
            let (g, _) = min_gap(&ev)?;
            Ok(SimpleRecord {
                trial,
                min_gap: g,
                is_simple: g > tol,
            })
        })
        .collect();
    let records = first_error(records)?;
    let simple = records.iter().filter(|r| r.is_simple).count();
    Ok(SimpleSpectrumSummary {
        tol,
        fraction: simple as f64 / trials as f64,
        records,
    })
}
