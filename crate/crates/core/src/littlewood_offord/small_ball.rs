use rand::seq::index::sample as sample_indices;

use crate::ensembles::EntryLaw;
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, trial_seed};
use crate::stats::dkw_half_width;

/// Largest dimension enumerated exactly (2^20 sign patterns).
pub const EXACT_LIMIT: usize = 20;
/// Largest dimension for exhaustive subset search in the segmental estimate.
pub const EXHAUSTIVE_SUBSET_LIMIT: usize = 16;

const WINDOW_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmallBallMethod {
    ExactEnumeration,
    MonteCarlo,
}

impl SmallBallMethod {
    pub fn label(&self) -> &'static str {
        match self {
            SmallBallMethod::ExactEnumeration => "exact",
            SmallBallMethod::MonteCarlo => "monte_carlo",
        }
    }
}

/// Estimate of `ρ_δ(x) = sup_a P(|Σ ξ_i x_i - a| ≤ δ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallBallEstimate {
    pub delta: f64,
    pub estimate: f64,
    /// Sample count; `2^n` for exact enumeration.
    pub trials: u64,
    pub half_width: f64,
    pub method: SmallBallMethod,
}

// Maximum total weight of sorted points inside any closed window of width `width`.
fn max_window_weight(points: &[(f64, f64)], width: f64) -> f64 {
    let mut best = 0.0_f64;
    let mut lo = 0;
    let mut acc = 0.0;
    for hi in 0..points.len() {
        acc += points[hi].1;
        while points[hi].0 - points[lo].0 > width {
            acc -= points[lo].1;
            lo += 1;
        }
        best = best.max(acc);
    }
    best
}

fn max_window_count(sorted: &[f64], width: f64) -> usize {
    let mut best = 0;
    let mut lo = 0;
    for hi in 0..sorted.len() {
        while sorted[hi] - sorted[lo] > width {
            lo += 1;
        }
        best = best.max(hi - lo + 1);
    }
    best
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::param("delta", format!("must be finite and >= 0, got {delta}")));
    }
    Ok(())
}

fn window_width(x: &[f64], delta: f64) -> f64 {
    let l1: f64 = x.iter().map(|v| v.abs()).sum();
    2.0 * delta + WINDOW_SLACK * (1.0 + l1)
}

/// Exact `ρ_δ(x)` for a two-point law by enumerating all `2^n` outcomes.
pub fn small_ball_exact(x: &[f64], delta: f64, law: EntryLaw) -> Result<SmallBallEstimate> {
    check_delta(delta)?;
    let n = x.len();
    if n > EXACT_LIMIT {
        return Err(Error::TooLarge { n, limit: EXACT_LIMIT });
    }
    let atoms = law
        .atoms()
        .ok_or_else(|| Error::UnsupportedLaw(format!("{law:?} has no finite atom list")))?;
    let mut outcomes = vec![(0.0_f64, 1.0_f64)];
    for &xi in x {
        let mut next = Vec::with_capacity(outcomes.len() * 2);
        for &(s, w) in &outcomes {
            for &(a, pa) in &atoms {
                next.push((s + a * xi, w * pa));
            }
        }
        outcomes = next;
    }
    outcomes.sort_by(|a, b| a.0.total_cmp(&b.0));
    let estimate = max_window_weight(&outcomes, window_width(x, delta)).min(1.0);
    Ok(SmallBallEstimate {
        delta,
        estimate,
        trials: 1u64 << n,
        half_width: 0.0,
        method: SmallBallMethod::ExactEnumeration,
    })
}

/// Monte Carlo `ρ_δ(x)`: the densest closed window of width `2δ` among
/// sorted sampled sums. Half-width is the 95% DKW bound.
pub fn small_ball(
    x: &[f64],
    delta: f64,
    law: EntryLaw,
    trials: u64,
    seed: u64,
) -> Result<SmallBallEstimate> {
    check_delta(delta)?;
    if trials < 100 {
        return Err(Error::InvalidConfig(format!("small_ball needs at least 100 trials, got {trials}")));
    }
    let mut rng = rng_from_seed(seed);
    let mut sums: Vec<f64> = (0..trials)
        .map(|_| x.iter().map(|&xi| law.sample(&mut rng) * xi).sum())
        .collect();
    sums.sort_by(f64::total_cmp);
    let count = max_window_count(&sums, window_width(x, delta));
    Ok(SmallBallEstimate {
        delta,
        estimate: count as f64 / trials as f64,
        trials,
        half_width: dkw_half_width(trials),
        method: SmallBallMethod::MonteCarlo,
    })
}

/// Exact when the law is two-point and `n ≤ EXACT_LIMIT`, Monte Carlo otherwise.
pub fn small_ball_auto(
    x: &[f64],
    delta: f64,
    law: EntryLaw,
    trials: u64,
    seed: u64,
) -> Result<SmallBallEstimate> {
    if x.len() <= EXACT_LIMIT && law.atoms().is_some() {
        small_ball_exact(x, delta, law)
    } else {
        small_ball(x, delta, law, trials, seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SubsetStrategy {
    /// Every subset of size `⌊αn⌋`; exact infimum.
    Exhaustive,
    /// Contiguous windows of the coordinates sorted by magnitude, plus
    /// `random_subsets` uniformly drawn subsets.
    Sampled { random_subsets: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentalEstimate {
    /// Minimum over the candidate family: an upper bound on `ρ_{δ,α}`.
    pub estimate: SmallBallEstimate,
    /// Zero-based coordinates of the minimizing subset.
    pub witness: Vec<usize>,
}

pub(crate) fn floor_fraction(alpha: f64, n: usize) -> usize {
    (alpha * n as f64 + 1e-9).floor() as usize
}

pub(crate) fn ceil_fraction(alpha: f64, n: usize) -> usize {
    (alpha * n as f64 - 1e-9).ceil().max(0.0) as usize
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let m = c.len();
    let mut i = m;
    while i > 0 {
        i -= 1;
        if c[i] < n - m + i {
            c[i] += 1;
            for j in i + 1..m {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Segmental small-ball `ρ_{δ,α}(v) = inf_{|I| = ⌊αn⌋} ρ_δ(v|_I)` over a
/// candidate family of subsets. Each candidate is evaluated exactly when the
/// law allows it, by Monte Carlo with `trials` samples otherwise.
pub fn segmental_small_ball(
    v: &[f64],
    delta: f64,
    alpha: f64,
    law: EntryLaw,
    strategy: SubsetStrategy,
    trials: u64,
    seed: u64,
) -> Result<SegmentalEstimate> {
    let n = v.len();
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param("alpha", format!("must lie in (0, 1], got {alpha}")));
    }
    let m = floor_fraction(alpha, n);
    if m == 0 {
        return Err(Error::param("alpha", format!("floor(alpha * n) = 0 for n = {n}")));
    }

    let mut candidates: Vec<Vec<usize>> = Vec::new();
    match strategy {
        SubsetStrategy::Exhaustive => {
            if n > EXHAUSTIVE_SUBSET_LIMIT {
                return Err(Error::TooLarge {
                    n,
                    limit: EXHAUSTIVE_SUBSET_LIMIT,
                });
            }
            let mut c: Vec<usize> = (0..m).collect();
            loop {
                candidates.push(c.clone());
                if !next_combination(&mut c, n) {
                    break;
                }
            }
        }
        SubsetStrategy::Sampled { random_subsets } => {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs()));
            for start in 0..=n - m {
                let mut w = order[start..start + m].to_vec();
                w.sort_unstable();
                candidates.push(w);
            }
            let mut rng = rng_from_seed(trial_seed(seed, u64::MAX));
            for _ in 0..random_subsets {
                let mut w = sample_indices(&mut rng, n, m).into_vec();
                w.sort_unstable();
                candidates.push(w);
            }
        }
    }

    let mut best: Option<SegmentalEstimate> = None;
    for (k, subset) in candidates.into_iter().enumerate() {
        let restricted: Vec<f64> = subset.iter().map(|&i| v[i]).collect();
        let est = small_ball_auto(&restricted, delta, law, trials, trial_seed(seed, k as u64))?;
        if best.as_ref().is_none_or(|b| est.estimate < b.estimate.estimate) {
            best = Some(SegmentalEstimate {
                estimate: est,
                witness: subset,
            });
        }
    }
    Ok(best.expect("at least one candidate subset"))
}

/// Instance check of the Erdős-type inverse theorem: if `ρ_δ(v) ≥ n^{-1/2+ε}`
/// then at most `εn` coordinates exceed `δ` in magnitude. The estimate is
/// exact for `n ≤ EXACT_LIMIT`; otherwise the Monte Carlo half-width is
/// subtracted so the hypothesis is only asserted when it is certain.
pub fn erdos_check(v: &[f64], delta: f64, eps: f64, trials: u64, seed: u64) -> Result<bool> {
    let n = v.len();
    let est = small_ball_auto(v, delta, EntryLaw::Rademacher, trials, seed)?;
    let rho = est.estimate - est.half_width;
    let threshold = (n as f64).powf(-0.5 + eps);
    let large = v.iter().filter(|x| x.abs() > delta).count();
    Ok(rho < threshold || large as f64 <= eps * n as f64)
}
