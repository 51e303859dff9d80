//! Seed-reproducible sampling of Wigner, Erdős–Rényi adjacency and
//! deterministic-plus-noise symmetric matrices.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;
use crate::rng::{rng_from_seed, trial_seed};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Distribution of a single matrix entry. All laws have mean zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryLaw {
    Gaussian,
    /// ±1 with probability 1/2 each.
    Rademacher,
    /// `1 - p` with probability `p`, `-p` otherwise. Variance `p(1 - p)`.
    CenteredBernoulli { p: f64 },
    /// Uniform on `[-√3, √3]`.
    Uniform,
    /// Point mass at zero, used for zero diagonals.
    Zero,
}

impl EntryLaw {
    pub fn variance(&self) -> f64 {
        match *self {
            EntryLaw::Gaussian | EntryLaw::Rademacher | EntryLaw::Uniform => 1.0,
            EntryLaw::CenteredBernoulli { p } => p * (1.0 - p),
            EntryLaw::Zero => 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let EntryLaw::CenteredBernoulli { p } = *self {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::param("p", format!("centered bernoulli needs 0 < p < 1, got {p}")));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            EntryLaw::Gaussian => rng.sample(StandardNormal),
            EntryLaw::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            EntryLaw::CenteredBernoulli { p } => {
                if rng.random::<f64>() < p {
                    1.0 - p
                } else {
                    -p
                }
            }
            EntryLaw::Uniform => (2.0 * rng.random::<f64>() - 1.0) * SQRT_3,
            EntryLaw::Zero => 0.0,
        }
    }

    /// Two-point laws as `(value, probability)` atoms, for exact enumeration.
    pub fn atoms(&self) -> Option<[(f64, f64); 2]> {
        match *self {
            EntryLaw::Rademacher => Some([(-1.0, 0.5), (1.0, 0.5)]),
            EntryLaw::CenteredBernoulli { p } => Some([(-p, 1.0 - p), (1.0 - p, p)]),
            _ => None,
        }
    }
}

/// Wigner sample: strictly upper entries iid `off_diag`, diagonal iid `diag`.
pub fn sample_wigner(n: usize, off_diag: EntryLaw, diag: EntryLaw, seed: u64) -> SymmetricMatrix {
    let mut rng = rng_from_seed(seed);
    SymmetricMatrix::from_upper_fn(n, |i, j| {
        if i == j {
            diag.sample(&mut rng)
        } else {
            off_diag.sample(&mut rng)
        }
    })
}

/// Adjacency matrix of G(n, p). `p` in `[0, 1]`; the endpoints give the empty
/// and complete graphs.
pub fn sample_adjacency(n: usize, p: f64, seed: u64) -> Result<SymmetricMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("p", format!("edge density must lie in [0, 1], got {p}")));
    }
    let mut rng = rng_from_seed(seed);
    Ok(SymmetricMatrix::from_upper_fn(n, |i, j| {
        if i == j {
            0.0
        } else if rng.random::<f64>() < p {
            1.0
        } else {
            0.0
        }
    }))
}

/// `F + scale * X` with `X` a Wigner sample drawn from `seed`.
pub fn sample_perturbed(
    deterministic: &SymmetricMatrix,
    noise: EntryLaw,
    diag_noise: EntryLaw,
    scale: f64,
    seed: u64,
) -> Result<SymmetricMatrix> {
    if !(scale >= 0.0 && scale.is_finite()) {
        return Err(Error::param("sigma", format!("scale must be finite and >= 0, got {scale}")));
    }
    let x = sample_wigner(deterministic.dim(), noise, diag_noise, seed);
    deterministic.add_scaled(&x, scale)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Ensemble {
    Wigner {
        n: usize,
        off_diag: EntryLaw,
        diag: EntryLaw,
    },
    Adjacency {
        n: usize,
        p: f64,
    },
    Perturbed {
        deterministic: SymmetricMatrix,
        noise: EntryLaw,
        diag_noise: EntryLaw,
        scale: f64,
    },
}

/// A validated ensemble plus the master seed its trial streams derive from.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    ensemble: Ensemble,
    master_seed: u64,
}

impl EnsembleSpec {
    pub fn new(ensemble: Ensemble, master_seed: u64) -> Result<Self> {
        let n = match &ensemble {
            Ensemble::Wigner { n, off_diag, diag } => {
                off_diag.validate()?;
                diag.validate()?;
                *n
            }
            Ensemble::Adjacency { n, p } => {
                if !(*p > 0.0 && *p < 1.0) {
                    return Err(Error::param("p", format!("edge density must lie in (0, 1), got {p}")));
                }
                *n
            }
            Ensemble::Perturbed {
                deterministic,
                noise,
                diag_noise,
                scale,
            } => {
                noise.validate()?;
                diag_noise.validate()?;
                if !(*scale >= 0.0 && scale.is_finite()) {
                    return Err(Error::param("sigma", format!("must be finite and >= 0, got {scale}")));
                }
                deterministic.dim()
            }
        };
        if n < 2 {
            return Err(Error::param("n", format!("dimension must be at least 2, got {n}")));
        }
        Ok(Self {
            ensemble,
            master_seed,
        })
    }

    /// Gaussian Wigner matrix with unit-variance diagonal.
    pub fn goe(n: usize, master_seed: u64) -> Result<Self> {
        Self::new(
            Ensemble::Wigner {
                n,
                off_diag: EntryLaw::Gaussian,
                diag: EntryLaw::Gaussian,
            },
            master_seed,
        )
    }

    pub fn ensemble(&self) -> &Ensemble {
        &self.ensemble
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn with_seed(&self, master_seed: u64) -> Self {
        Self {
            ensemble: self.ensemble.clone(),
            master_seed,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.ensemble {
            Ensemble::Wigner { n, .. } | Ensemble::Adjacency { n, .. } => *n,
            Ensemble::Perturbed { deterministic, .. } => deterministic.dim(),
        }
    }

    pub fn trial_seed(&self, trial: u64) -> u64 {
        trial_seed(self.master_seed, trial)
    }

    pub fn sample_with_seed(&self, seed: u64) -> SymmetricMatrix {
        match &self.ensemble {
            Ensemble::Wigner { n, off_diag, diag } => sample_wigner(*n, *off_diag, *diag, seed),
            Ensemble::Adjacency { n, p } => {
                sample_adjacency(*n, *p, seed).expect("density validated at construction")
            }
            Ensemble::Perturbed {
                deterministic,
                noise,
                diag_noise,
                scale,
            } => sample_perturbed(deterministic, *noise, *diag_noise, *scale, seed)
                .expect("parameters validated at construction"),
        }
    }

    /// Sample for trial `trial`; depends only on `(master_seed, trial)`.
    pub fn sample(&self, trial: u64) -> SymmetricMatrix {
        self.sample_with_seed(self.trial_seed(trial))
    }
}
