//! Power iteration for the top eigenpair, its predicted iteration count, and
//! smoothed solving through a small random symmetric perturbation.

use crate::eigen::eigenvalues;
use crate::ensembles::{sample_wigner, EntryLaw};
use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Added to the diagonal while iterating and removed from the reported λ.
    pub shift: f64,
    /// Spectral gap below the top eigenvalue. When set, the stopping rule is
    /// `residual ≤ tol·min(gap, 1)`, which bounds the sine of the angle to the
    /// top eigenvector by `tol`.
    pub gap: Option<f64>,
}

impl PowerOptions {
    pub fn new(tol: f64, max_iter: usize) -> Self {
        Self {
            tol,
            max_iter,
            shift: 0.0,
            gap: None,
        }
    }

    fn threshold(&self) -> f64 {
        match self.gap {
            Some(g) => self.tol * g.min(1.0),
            None => self.tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerTrace {
    /// Matrix-vector products applied before stopping.
    pub iterations: usize,
    /// `‖Au_k − λ_k u_k‖` at every checked iterate `k = 0, 1, …`.
    pub residuals: Vec<f64>,
    /// Rayleigh quotient of the final iterate.
    pub lambda: f64,
    /// `‖Au_k‖` of the final iterate.
    pub norm_estimate: f64,
    pub vector: Vec<f64>,
    pub converged: bool,
}

impl PowerTrace {
    pub fn final_residual(&self) -> f64 {
        *self.residuals.last().expect("at least one residual")
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Power iteration `u_{k+1} = Au_k/‖Au_k‖` until the residual drops to `tol`
/// or `max_iter` products have been applied.
pub fn power_iterate(a: &SymmetricMatrix, u0: &[f64], tol: f64, max_iter: usize) -> Result<PowerTrace> {
    power_iterate_with(a, u0, &PowerOptions::new(tol, max_iter))
}

pub fn power_iterate_with(a: &SymmetricMatrix, u0: &[f64], opts: &PowerOptions) -> Result<PowerTrace> {
    let n = a.dim();
    if u0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: u0.len(),
        });
    }
    if !(opts.tol > 0.0) {
        return Err(Error::param("tol", format!("must be positive, got {}", opts.tol)));
    }
    if let Some(g) = opts.gap {
        if !(g > 0.0) {
            return Err(Error::GapZero);
        }
    }
    let u_norm = norm(u0);
    if (u_norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnit { norm: u_norm });
    }
    let threshold = opts.threshold();
    let mut u = u0.to_vec();
    let mut residuals = Vec::new();
    let mut iteration = 0;
    loop {
        let mut w = a.mat_vec(&u);
        if opts.shift != 0.0 {
            w.iter_mut().zip(&u).for_each(|(wi, ui)| *wi += opts.shift * ui);
        }
        let w_norm = norm(&w);
        if w_norm == 0.0 || !w_norm.is_finite() {
            return Err(Error::Breakdown { iteration });
        }
        let rayleigh: f64 = w.iter().zip(&u).map(|(x, y)| x * y).sum();
        let residual = w
            .iter()
            .zip(&u)
            .map(|(x, y)| (x - rayleigh * y).powi(2))
            .sum::<f64>()
            .sqrt();
        residuals.push(residual);
        let converged = residual <= threshold;
        if converged || iteration >= opts.max_iter {
            let norm_estimate = w
                .iter()
                .zip(&u)
                .map(|(x, y)| (x - opts.shift * y).powi(2))
                .sum::<f64>()
                .sqrt();
            return Ok(PowerTrace {
                iterations: iteration,
                residuals,
                lambda: rayleigh - opts.shift,
                norm_estimate,
                vector: u,
                converged,
            });
        }
        u = w.into_iter().map(|x| x / w_norm).collect();
        iteration += 1;
    }
}

/// `⌈λ_top/(λ_top − λ_second)·ln(1/ε)⌉`.
pub fn predicted_iterations(lambda_top: f64, lambda_second: f64, eps: f64) -> Result<u64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param("eps", format!("must lie in (0, 1), got {eps}")));
    }
    if !(lambda_second >= 0.0) {
        return Err(Error::param(
            "lambda_second",
            format!("must be non-negative, got {lambda_second}"),
        ));
    }
    let gap = lambda_top - lambda_second;
    if !(gap > 0.0) {
        return Err(Error::GapZero);
    }
    let k = (lambda_top / gap * (1.0 / eps).ln()).ceil();
    Ok(if k >= u64::MAX as f64 { u64::MAX } else { k as u64 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedResult {
    pub trace: PowerTrace,
    pub sigma: f64,
    pub seed: u64,
    /// Diagonal shift used to make the iterated matrix positive semi-definite.
    pub shift: f64,
    /// `‖X‖₂` of the sampled perturbation.
    pub perturbation_norm: f64,
    /// `λ_n − λ_{n−1}` of `F + σX`.
    pub gap_perturbed: f64,
    pub lambda_top_perturbed: f64,
    pub lambda_second_perturbed: f64,
    /// `λ_max(F)`.
    pub lambda_max_f: f64,
}

impl SmoothedResult {
    /// Weyl bound `σ‖X‖₂` on how far any eigenvalue moved.
    pub fn weyl_bound(&self) -> f64 {
        self.sigma * self.perturbation_norm
    }

    /// `|λ_est − λ_max(F)| ≤ σ‖X‖₂ + final residual`.
    pub fn weyl_certificate(&self) -> bool {
        let slack = 1e-12 * (1.0 + self.lambda_max_f.abs());
        (self.trace.lambda - self.lambda_max_f).abs()
            <= self.weyl_bound() + self.trace.final_residual() + slack
    }
}

/// `1e-2·‖F‖₂`.
pub fn default_sigma(f: &SymmetricMatrix) -> Result<f64> {
    let ev = eigenvalues(f)?;
    Ok(1e-2 * ev.iter().fold(0.0_f64, |m, x| m.max(x.abs())))
}

/// Runs power iteration on `F + σX` with `X` a Gaussian Wigner matrix drawn
/// from `seed`, starting from the uniform unit vector. The stopping rule is
/// scaled by the exact top gap of the iterated matrix, so a near-degenerate
/// top pair cannot pass the residual test early.
pub fn smoothed_solve(
    f: &SymmetricMatrix,
    sigma: f64,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<SmoothedResult> {
    let n = f.dim();
    if n < 2 {
        return Err(Error::param("n", "need at least two rows"));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::param("sigma", format!("must be non-negative, got {sigma}")));
    }
    let x = sample_wigner(n, EntryLaw::Gaussian, EntryLaw::Gaussian, seed);
    let perturbation_norm = eigenvalues(&x)?
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    let m = if sigma == 0.0 {
        f.clone()
    } else {
        f.add_scaled(&x, sigma)?
    };
    let ev_f = eigenvalues(f)?;
    let ev_m = eigenvalues(&m)?;
    let top = ev_m[n - 1];
    let second = ev_m[n - 2];
    let shift = if m.gershgorin_psd() {
        0.0
    } else {
        1.1 * m.max_abs_row_sum()
    };
    let gap = top - second;
    let opts = PowerOptions {
        tol,
        max_iter,
        shift,
        gap: Some(gap),
    };
    let u0 = vec![1.0 / (n as f64).sqrt(); n];
    let trace = power_iterate_with(&m, &u0, &opts)?;
    Ok(SmoothedResult {
        trace,
        sigma,
        seed,
        shift,
        perturbation_norm,
        gap_perturbed: gap,
        lambda_top_perturbed: top,
        lambda_second_perturbed: second,
        lambda_max_f: ev_f[n - 1],
    })
}
