use crate::error::{Error, Result};

use super::small_ball::ceil_fraction;

const UNIT_TOL: f64 = 1e-10;
const SUPPORT_THRESHOLD: f64 = 1e-14;

/// Sparsity fraction `c0` and distance `c1` of the compressible set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressParams {
    pub c0: f64,
    pub c1: f64,
}

impl CompressParams {
    pub fn new(c0: f64, c1: f64) -> Result<Self> {
        if !(c0 > 0.0 && c0 < 1.0) {
            return Err(Error::param("c0", format!("must lie in (0, 1), got {c0}")));
        }
        if !(c1 > 0.0 && c1 < 1.0) {
            return Err(Error::param("c1", format!("must lie in (0, 1), got {c1}")));
        }
        Ok(Self { c0, c1 })
    }

    /// `c' = c0·c1²/4`, the relative size of the spread set.
    pub fn c_prime(&self) -> f64 {
        self.c0 * self.c1 * self.c1 / 4.0
    }

    /// The band `c1/√(2n) ≤ |x_k| ≤ 1/√(c0·n)` spread coordinates live in.
    pub fn spread_band(&self, n: usize) -> (f64, f64) {
        let n = n as f64;
        (self.c1 / (2.0 * n).sqrt(), 1.0 / (self.c0 * n).sqrt())
    }
}

impl Default for CompressParams {
    fn default() -> Self {
        Self { c0: 0.5, c1: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Compressibility {
    /// At most `c0·n` nonzero coordinates.
    Sparse,
    /// Within distance `c1` of a `c0·n`-sparse vector.
    Compressible,
    Incompressible,
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn check_unit(x: &[f64]) -> Result<()> {
    let norm = norm(x);
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnit { norm });
    }
    Ok(())
}

/// Distance from `x` to the nearest vector supported on `k` coordinates.
pub fn sparse_distance(x: &[f64], k: usize) -> f64 {
    let mut sq: Vec<f64> = x.iter().map(|v| v * v).collect();
    sq.sort_by(|a, b| b.total_cmp(a));
    sq.iter().skip(k).sum::<f64>().sqrt()
}

pub fn classify(x: &[f64], params: &CompressParams) -> Result<Compressibility> {
    check_unit(x)?;
    let n = x.len();
    let budget = params.c0 * n as f64;
    let support = x.iter().filter(|v| v.abs() > SUPPORT_THRESHOLD).count();
    if support as f64 <= budget {
        return Ok(Compressibility::Sparse);
    }
    let keep = (budget + 1e-9).floor() as usize;
    if sparse_distance(x, keep) <= params.c1 {
        Ok(Compressibility::Compressible)
    } else {
        Ok(Compressibility::Incompressible)
    }
}

/// The lowest-index `⌈c'n⌉` coordinates inside the spread band (zero-based).
pub fn spread_set(x: &[f64], params: &CompressParams) -> Result<Vec<usize>> {
    let n = x.len();
    let needed = ceil_fraction(params.c_prime(), n).max(1);
    let (lo, hi) = params.spread_band(n);
    let qualifying: Vec<usize> = x
        .iter()
        .enumerate()
        .filter(|(_, v)| (lo..=hi).contains(&v.abs()))
        .map(|(i, _)| i)
        .collect();
    if qualifying.len() < needed {
        return Err(Error::InsufficientSpread {
            found: qualifying.len(),
            needed,
        });
    }
    Ok(qualifying[..needed].to_vec())
}
