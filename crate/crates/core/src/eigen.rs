//! Dense symmetric eigensolver: Householder tridiagonalization followed by
//! implicit-shift QL, after the EISPACK routines `tred2` and `tql2`.

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;

/// Iteration cap per eigenvalue in the QL phase.
pub const MAX_SWEEPS_PER_EIGENVALUE: usize = 64;

const SIGN_THRESHOLD: f64 = 1e-12;

/// Ascending eigenvalues with an orthonormal eigenvector basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    n: usize,
    eigenvalues: Vec<f64>,
    // column-major: eigenvector j occupies [j*n, (j+1)*n)
    vectors: Vec<f64>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unit eigenvector of the `j`-th smallest eigenvalue (zero-based).
    pub fn eigenvector(&self, j: usize) -> &[f64] {
        &self.vectors[j * self.n..(j + 1) * self.n]
    }

    pub fn eigenvectors(&self) -> impl Iterator<Item = &[f64]> {
        self.vectors.chunks_exact(self.n)
    }

    pub fn largest(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// `max |λ_i|`, the spectral norm of the decomposed matrix.
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `max |(VᵀV - I)_ij|`.
    pub fn orthogonality_error(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in a..n {
                let dot: f64 = self
                    .eigenvector(a)
                    .iter()
                    .zip(self.eigenvector(b))
                    .map(|(x, y)| x * y)
                    .sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// `‖AV - VΛ‖_F` against the matrix this spectrum was computed from.
    pub fn residual(&self, a: &SymmetricMatrix) -> f64 {
        let mut sum = 0.0;
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let v = self.eigenvector(j);
            let av = a.mat_vec(v);
            sum += av
                .iter()
                .zip(v)
                .map(|(x, y)| (x - lambda * y).powi(2))
                .sum::<f64>();
        }
        sum.sqrt()
    }
}

/// Full eigendecomposition. Eigenvalues ascend; each eigenvector has its first
/// coordinate with `|v_i| > 1e-12` made positive.
pub fn eigen_decompose(a: &SymmetricMatrix) -> Result<Spectrum> {
    let n = a.dim();
    let mut v = a.to_dense();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    if n == 0 {
        return Ok(Spectrum {
            n,
            eigenvalues: d,
            vectors: v,
        });
    }
    tred2(n, &mut v, &mut d, &mut e);
    tql2(n, &mut d, &mut e, Some(&mut v))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| d[x].total_cmp(&d[y]));
    let eigenvalues = order.iter().map(|&k| d[k]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for &k in &order {
        let start = vectors.len();
        vectors.extend((0..n).map(|row| v[row * n + k]));
        let col = &mut vectors[start..];
        if let Some(first) = col.iter().find(|x| x.abs() > SIGN_THRESHOLD) {
            if *first < 0.0 {
                col.iter_mut().for_each(|x| *x = -*x);
            }
        }
    }
    Ok(Spectrum {
        n,
        eigenvalues,
        vectors,
    })
}

/// Eigenvalues only, ascending. Skips the eigenvector rotations.
pub fn eigenvalues(a: &SymmetricMatrix) -> Result<Vec<f64>> {
    let n = a.dim();
    let mut v = a.to_dense();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    if n == 0 {
        return Ok(d);
    }
    tred2(n, &mut v, &mut d, &mut e);
    tql2(n, &mut d, &mut e, None)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

// Householder reduction to tridiagonal form. On exit `d` is the diagonal,
// `e[1..]` the subdiagonal and `v` the accumulated orthogonal transform.
fn tred2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
    }

    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = 0.0;
                v[j * n + i] = 0.0;
            }
        } else {
            for dk in &mut d[..i] {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }

            for j in 0..i {
                f = d[j];
                v[j * n + i] = f;
                g = e[j] + v[j * n + j] * f;
                for k in j + 1..i {
                    g += v[k * n + j] * d[k];
                    e[k] += v[k * n + j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k * n + j] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = 0.0;
            }
        }
        d[i] = h;
    }

    // Accumulate transformations.
    for i in 0..n - 1 {
        v[(n - 1) * n + i] = v[i * n + i];
        v[i * n + i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k * n + i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k * n + i + 1] * v[k * n + j];
                }
                for k in 0..=i {
                    v[k * n + j] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[k * n + i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
        v[(n - 1) * n + j] = 0.0;
    }
    v[(n - 1) * n + n - 1] = 1.0;
    e[0] = 0.0;
}

// Implicit-shift QL on the tridiagonal (d, e). Rotations are applied to `v`
// when eigenvectors are requested.
fn tql2(n: usize, d: &mut [f64], e: &mut [f64], mut v: Option<&mut [f64]>) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }

        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_SWEEPS_PER_EIGENVALUE {
                    return Err(Error::NumericalFailure { seed: None });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_deref_mut() {
                        for k in 0..n {
                            let row = k * n;
                            h = v[row + i + 1];
                            v[row + i + 1] = s * v[row + i] + c * h;
                            v[row + i] = c * v[row + i] - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if !p.is_finite() || !d[l].is_finite() {
                    return Err(Error::NumericalFailure { seed: None });
                }
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    if d.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericalFailure { seed: None });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample_wigner, EntryLaw};

    #[test]
    fn diagonal_matrix() {
        let a = SymmetricMatrix::from_diagonal(&[3.0, 1.0, 2.0]);
        let s = eigen_decompose(&a).unwrap();
        assert_eq!(s.eigenvalues(), &[1.0, 2.0, 3.0]);
        // signed permutation of identity columns; sign convention makes it positive
        assert_eq!(s.eigenvector(0), &[0.0, 1.0, 0.0]);
        assert_eq!(s.eigenvector(1), &[0.0, 0.0, 1.0]);
        assert_eq!(s.eigenvector(2), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn swap_matrix() {
        let a = SymmetricMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let s = eigen_decompose(&a).unwrap();
        assert!((s.eigenvalues()[0] + 1.0).abs() < 1e-15);
        assert!((s.eigenvalues()[1] - 1.0).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = s.eigenvector(0);
        let v1 = s.eigenvector(1);
        assert!((v0[0] - h).abs() < 1e-15 && (v0[1] + h).abs() < 1e-15);
        assert!((v1[0] - h).abs() < 1e-15 && (v1[1] - h).abs() < 1e-15);
    }

    #[test]
    fn gaussian_sample_invariants() {
        let n = 50;
        let a = sample_wigner(n, EntryLaw::Gaussian, EntryLaw::Gaussian, 21);
        let s = eigen_decompose(&a).unwrap();
        assert!(s.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        assert!(s.orthogonality_error() <= 1e-10 * n as f64);
        assert!(s.residual(&a) <= 1e-9 * a.frobenius_norm().max(1.0));
        let values = eigenvalues(&a).unwrap();
        for (x, y) in values.iter().zip(s.eigenvalues()) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn trace_is_preserved() {
        let a = sample_wigner(30, EntryLaw::Uniform, EntryLaw::Uniform, 4);
        let trace: f64 = a.diagonal().iter().sum();
        let sum: f64 = eigenvalues(&a).unwrap().iter().sum();
        assert!((trace - sum).abs() < 1e-10);
    }

    #[test]
    fn one_by_one_and_zero_matrix() {
        let s = eigen_decompose(&SymmetricMatrix::from_diagonal(&[4.0])).unwrap();
        assert_eq!(s.eigenvalues(), &[4.0]);
        assert_eq!(s.eigenvector(0), &[1.0]);
        let z = eigen_decompose(&SymmetricMatrix::zeros(4)).unwrap();
        assert!(z.eigenvalues().iter().all(|&x| x == 0.0));
        assert!(z.orthogonality_error() < 1e-15);
    }
}
