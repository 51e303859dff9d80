//! Least common denominator of a vector, its two-dimensional (subspace)
//! version and the regularized LCD over spread subsets.

use rand::seq::index::sample as sample_indices;

use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, trial_seed};

use super::compress::{norm, spread_set, CompressParams};
use super::small_ball::ceil_fraction;

/// Slack making the defining strict inequality robust to rounding.
pub const STRICT_TOL: f64 = 1e-12;
/// Absolute width of the final bisection bracket.
pub const BISECTION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LcdParams {
    pub kappa: f64,
    pub gamma: f64,
    /// Search ceiling; `None` uses `8√n/γ`.
    pub theta_max: Option<f64>,
}

impl LcdParams {
    pub fn new(kappa: f64, gamma: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::param("kappa", format!("must be positive, got {kappa}")));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::param("gamma", format!("must lie in (0, 1), got {gamma}")));
        }
        Ok(Self {
            kappa,
            gamma,
            theta_max: None,
        })
    }

    pub fn with_theta_max(mut self, theta_max: f64) -> Result<Self> {
        if !(theta_max > 0.0 && theta_max.is_finite()) {
            return Err(Error::param("theta_max", format!("must be positive, got {theta_max}")));
        }
        self.theta_max = Some(theta_max);
        Ok(self)
    }

    pub fn theta_max_for(&self, n: usize) -> f64 {
        self.theta_max
            .unwrap_or_else(|| 8.0 * (n as f64).sqrt() / self.gamma)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LcdResult {
    Bounded {
        /// Lower end of the final bisection bracket: no admissible θ was
        /// found at or below it.
        value: f64,
        /// Upper end of the bracket, an admissible θ.
        upper: f64,
        /// `dist(upper·x, Z^n)`.
        achieved_distance: f64,
        /// Nearest integer point to `upper·x`.
        witness: Vec<i64>,
    },
    Unbounded {
        theta_max: f64,
    },
}

impl LcdResult {
    /// Infimal θ, or `+∞` when nothing below the ceiling qualifies.
    pub fn value(&self) -> f64 {
        match self {
            LcdResult::Bounded { value, .. } => *value,
            LcdResult::Unbounded { .. } => f64::INFINITY,
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, LcdResult::Bounded { .. })
    }

    pub fn achieved_distance(&self) -> Option<f64> {
        match self {
            LcdResult::Bounded {
                achieved_distance, ..
            } => Some(*achieved_distance),
            LcdResult::Unbounded { .. } => None,
        }
    }
}

/// Euclidean distance from `theta·x` to the integer lattice; ties round to even.
pub fn lattice_distance(x: &[f64], theta: f64) -> f64 {
    x.iter()
        .map(|&v| {
            let y = theta * v;
            let r = y - y.round_ties_even();
            r * r
        })
        .sum::<f64>()
        .sqrt()
}

struct Condition<'a> {
    x: &'a [f64],
    norm: f64,
    kappa: f64,
    gamma: f64,
}

impl Condition<'_> {
    fn bound(&self, theta: f64) -> f64 {
        (self.gamma * theta * self.norm).min(self.kappa)
    }

    fn admissible(&self, theta: f64) -> bool {
        lattice_distance(self.x, theta) + STRICT_TOL < self.bound(theta)
    }
}

/// `inf{θ > 0 : dist(θx, Z^n) < min(γ‖θx‖, κ)}` by an adaptive scan with
/// step `min(γθ‖x‖, κ)/(8‖x‖)` and bisection of the first admissible step.
pub fn lcd(x: &[f64], params: &LcdParams) -> Result<LcdResult> {
    let nrm = norm(x);
    if nrm == 0.0 || !nrm.is_finite() {
        return Err(Error::ZeroVector);
    }
    let theta_max = params.theta_max_for(x.len());
    let cond = Condition {
        x,
        norm: nrm,
        kappa: params.kappa,
        gamma: params.gamma,
    };
    let sup = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    // Below 0.5/‖x‖_∞ every coordinate rounds to zero and the distance is
    // ‖θx‖ > γ‖θx‖.
    let mut prev = 0.5 / sup;
    if prev > theta_max {
        return Ok(LcdResult::Unbounded { theta_max });
    }
    if cond.admissible(prev) {
        return Ok(bounded(&cond, prev, prev));
    }
    loop {
        let step = cond.bound(prev) / (8.0 * nrm);
        let theta = (prev + step).min(theta_max);
        if cond.admissible(theta) {
            let (mut lo, mut hi) = (prev, theta);
            while hi - lo > BISECTION_TOL {
                let mid = 0.5 * (lo + hi);
                if cond.admissible(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(bounded(&cond, lo, hi));
        }
        if theta >= theta_max {
            return Ok(LcdResult::Unbounded { theta_max });
        }
        prev = theta;
    }
}

fn bounded(cond: &Condition<'_>, lo: f64, hi: f64) -> LcdResult {
    LcdResult::Bounded {
        value: lo,
        upper: hi,
        achieved_distance: lattice_distance(cond.x, hi),
        witness: cond
            .x
            .iter()
            .map(|&v| (hi * v).round_ties_even() as i64)
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lcd2dResult {
    /// `min_φ LCD(cos φ·v + sin φ·w)`; `+∞` if unbounded at every angle tried.
    pub value: f64,
    pub phi: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Two-dimensional LCD: the smallest LCD over unit vectors of span{v, w},
/// searched on a uniform angle grid over `[0, π)` and refined by
/// golden-section search around the best grid angle.
pub fn lcd_2d(v: &[f64], w: &[f64], params: &LcdParams, angular_steps: usize) -> Result<Lcd2dResult> {
    if v.len() != w.len() {
        return Err(Error::DimensionMismatch {
            expected: v.len(),
            actual: w.len(),
        });
    }
    if angular_steps == 0 {
        return Err(Error::param("angular_steps", "must be positive"));
    }
    let nv = norm(v);
    if nv == 0.0 {
        return Err(Error::ZeroVector);
    }
    let v: Vec<f64> = v.iter().map(|x| x / nv).collect();
    let mut w = w.to_vec();
    let vw = dot(&v, &w);
    if vw.abs() > 1e-10 {
        w.iter_mut().zip(&v).for_each(|(wi, vi)| *wi -= vw * vi);
    }
    let nw = norm(&w);
    if nw < 1e-12 {
        return Err(Error::ParallelVectors);
    }
    w.iter_mut().for_each(|x| *x /= nw);

    let eval = |phi: f64| -> Result<f64> {
        let (s, c) = phi.sin_cos();
        let x: Vec<f64> = v.iter().zip(&w).map(|(a, b)| c * a + s * b).collect();
        Ok(lcd(&x, params)?.value())
    };

    let step = std::f64::consts::PI / angular_steps as f64;
    let mut best = Lcd2dResult {
        value: f64::INFINITY,
        phi: 0.0,
    };
    let mut best_k = 0;
    for k in 0..angular_steps {
        let phi = k as f64 * step;
        let value = eval(phi)?;
        if value < best.value {
            best = Lcd2dResult { value, phi };
            best_k = k;
        }
    }
    if best.value.is_finite() {
        // golden-section refinement on the bracket around the best grid angle
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = ((best_k as f64 - 1.0) * step, (best_k as f64 + 1.0) * step);
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let (mut fc, mut fd) = (eval(c)?, eval(d)?);
        for _ in 0..40 {
            for (phi, value) in [(c, fc), (d, fd)] {
                if value < best.value {
                    best = Lcd2dResult {
                        value,
                        phi: phi.rem_euclid(std::f64::consts::PI),
                    };
                }
            }
            if fc <= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = eval(c)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = eval(d)?;
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularizedLcd {
    /// Best LCD over the candidate subsets: a lower bound on the maximum.
    pub value: LcdResult,
    /// Zero-based coordinates of the maximizing subset.
    pub witness: Vec<usize>,
}

/// Regularized LCD: the maximum of `LCD(x_I/‖x_I‖)` over subsets `I` of the
/// spread set with `|I| = ⌈αn⌉`. Candidates are the lowest-index subset plus
/// `budget` random subsets drawn with `seed`.
pub fn regularized_lcd(
    x: &[f64],
    alpha: f64,
    params: &LcdParams,
    compress: &CompressParams,
    budget: usize,
    seed: u64,
) -> Result<RegularizedLcd> {
    let n = x.len();
    let spread = spread_set(x, compress)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param("alpha", format!("must lie in (0, 1), got {alpha}")));
    }
    let m = ceil_fraction(alpha, n).max(1);
    if m > spread.len() {
        return Err(Error::param(
            "alpha",
            format!("subset size {m} exceeds the spread set size {}", spread.len()),
        ));
    }

    let mut candidates = vec![spread[..m].to_vec()];
    let mut rng = rng_from_seed(trial_seed(seed, 0));
    for _ in 0..budget {
        let mut pick: Vec<usize> = sample_indices(&mut rng, spread.len(), m)
            .into_iter()
            .map(|k| spread[k])
            .collect();
        pick.sort_unstable();
        candidates.push(pick);
    }

    let mut best: Option<RegularizedLcd> = None;
    for subset in candidates {
        let restricted: Vec<f64> = subset.iter().map(|&i| x[i]).collect();
        let nr = norm(&restricted);
        let unit: Vec<f64> = restricted.iter().map(|v| v / nr).collect();
        let value = lcd(&unit, params)?;
        if best.as_ref().is_none_or(|b| value.value() > b.value.value()) {
            best = Some(RegularizedLcd {
                value,
                witness: subset,
            });
        }
    }
    Ok(best.expect("at least one candidate"))
}
