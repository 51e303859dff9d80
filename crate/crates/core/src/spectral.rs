//! Gap extraction and the structural spectrum checks: Cauchy interlacing,
//! spectrum range and Weyl perturbation bounds.

use crate::eigen::{eigenvalues, Spectrum};
use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;

/// The `l`-gaps `λ_{i+l} - λ_i` of an ascending spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct GapVector {
    pub l: usize,
    pub values: Vec<f64>,
}

pub fn gaps(eigenvalues: &[f64], l: usize) -> Result<GapVector> {
    let n = eigenvalues.len();
    if l == 0 || l >= n {
        return Err(Error::param("l", format!("gap order must lie in [1, {}], got {l}", n.saturating_sub(1))));
    }
    let values = eigenvalues
        .iter()
        .zip(&eigenvalues[l..])
        .map(|(lo, hi)| hi - lo)
        .collect();
    Ok(GapVector { l, values })
}

/// Smallest consecutive gap and its (zero-based) index, first minimum wins.
pub fn min_gap(eigenvalues: &[f64]) -> Result<(f64, usize)> {
    if eigenvalues.len() < 2 {
        return Err(Error::param("n", "minimum gap needs at least two eigenvalues"));
    }
    let mut best = (f64::INFINITY, 0);
    for (i, w) in eigenvalues.windows(2).enumerate() {
        let g = w[1] - w[0];
        if g < best.0 {
            best = (g, i);
        }
    }
    Ok(best)
}

/// Deletes row and column `k`, where `k` is one-based as in `1..=n`.
pub fn principal_minor(a: &SymmetricMatrix, k: usize) -> Result<SymmetricMatrix> {
    let n = a.dim();
    if n < 2 {
        return Err(Error::param("n", "principal minor needs n >= 2"));
    }
    if k == 0 || k > n {
        return Err(Error::param("k", format!("index must lie in [1, {n}], got {k}")));
    }
    Ok(a.without_index(k - 1))
}

/// Cauchy interlacing `λ_i(outer) ≤ λ_i(inner) ≤ λ_{i+1}(outer)` with slack `tol`.
pub fn check_interlacing(outer: &[f64], inner: &[f64], tol: f64) -> Result<bool> {
    if inner.len() + 1 != outer.len() {
        return Err(Error::DimensionMismatch {
            expected: outer.len().saturating_sub(1),
            actual: inner.len(),
        });
    }
    Ok(inner
        .iter()
        .enumerate()
        .all(|(i, &mu)| outer[i] <= mu + tol && mu <= outer[i + 1] + tol))
}

/// True iff every eigenvalue satisfies `|λ| ≤ c·√n`.
pub fn spectrum_in_range(eigenvalues: &[f64], c: f64) -> bool {
    let bound = c * (eigenvalues.len() as f64).sqrt();
    eigenvalues.iter().all(|x| x.abs() <= bound)
}

/// Measured eigenvalue displacement under an additive perturbation against
/// the Weyl bound `‖E‖_2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylCheck {
    pub max_deviation: f64,
    pub perturbation_norm: f64,
}

impl WeylCheck {
    pub fn holds(&self, slack: f64) -> bool {
        self.max_deviation <= self.perturbation_norm + slack
    }
}

pub fn weyl_check(a: &SymmetricMatrix, perturbation: &SymmetricMatrix) -> Result<WeylCheck> {
    let sum = a.add_scaled(perturbation, 1.0)?;
    let before = eigenvalues(a)?;
    let after = eigenvalues(&sum)?;
    let e = eigenvalues(perturbation)?;
    let perturbation_norm = e.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let max_deviation = before
        .iter()
        .zip(&after)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    Ok(WeylCheck {
        max_deviation,
        perturbation_norm,
    })
}

impl Spectrum {
    pub fn gaps(&self, l: usize) -> Result<GapVector> {
        gaps(self.eigenvalues(), l)
    }

    pub fn min_gap(&self) -> Result<(f64, usize)> {
        min_gap(self.eigenvalues())
    }

    pub fn in_range(&self, c: f64) -> bool {
        spectrum_in_range(self.eigenvalues(), c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::eigen_decompose;
    use crate::ensembles::{sample_wigner, EntryLaw};

    #[test]
    fn gap_examples() {
        let ev = [1.0, 2.0, 4.0];
        assert_eq!(gaps(&ev, 1).unwrap().values, vec![1.0, 2.0]);
        assert_eq!(gaps(&ev, 2).unwrap().values, vec![3.0]);
        assert!(gaps(&ev, 0).is_err());
        assert!(gaps(&ev, 3).is_err());
    }

    #[test]
    fn min_gap_examples() {
        assert_eq!(min_gap(&[1.0, 1.5, 3.0]).unwrap(), (0.5, 0));
        assert_eq!(min_gap(&[1.0, 1.0, 2.0]).unwrap(), (0.0, 0));
        assert_eq!(min_gap(&[0.0, 2.0, 3.0, 4.0]).unwrap(), (1.0, 1));
    }

    #[test]
    fn min_gap_equals_brute_force_on_sample() {
        let a = sample_wigner(128, EntryLaw::Gaussian, EntryLaw::Gaussian, 77);
        let s = eigen_decompose(&a).unwrap();
        let g = s.gaps(1).unwrap();
        let brute = g.values.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(s.min_gap().unwrap().0, brute);
    }

    #[test]
    fn telescoping_sum() {
        let a = sample_wigner(20, EntryLaw::Rademacher, EntryLaw::Rademacher, 1);
        let ev = eigenvalues(&a).unwrap();
        let sum: f64 = gaps(&ev, 1).unwrap().values.iter().sum();
        assert!((sum - (ev[19] - ev[0])).abs() < 1e-12);
    }

    #[test]
    fn minor_examples() {
        let d = SymmetricMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
        assert_eq!(principal_minor(&d, 3).unwrap(), SymmetricMatrix::from_diagonal(&[1.0, 2.0]));
        let swap = SymmetricMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(principal_minor(&swap, 1).unwrap(), SymmetricMatrix::from_diagonal(&[0.0]));
        assert!(principal_minor(&d, 0).is_err());
        assert!(principal_minor(&d, 4).is_err());

        let a = sample_wigner(6, EntryLaw::Gaussian, EntryLaw::Gaussian, 2);
        let twice = principal_minor(&principal_minor(&a, 1).unwrap(), 1).unwrap();
        let direct = SymmetricMatrix::from_upper_fn(4, |i, j| a.get(i + 2, j + 2));
        assert_eq!(twice, direct);
    }

    #[test]
    fn interlacing_examples() {
        assert!(check_interlacing(&[1.0, 2.0, 3.0], &[1.0, 2.0], 0.0).unwrap());
        assert!(!check_interlacing(&[0.0, 1.0], &[2.0], 0.0).unwrap());
        assert!(check_interlacing(&[0.0, 1.0], &[0.5, 0.7], 0.0).is_err());
    }

    #[test]
    fn range_examples() {
        assert!(spectrum_in_range(&[-2.0, -1.0, 1.0, 2.0], 10.0));
        assert!(!spectrum_in_range(&[-1.0, 0.0, 1.0, 25.0], 10.0));
    }
}
