//! Generalized arithmetic progressions `{a_1w_1 + … + a_rw_r : |a_i| ≤ N_i}`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

use super::compress::norm;

/// Enumeration refuses progressions larger than this.
pub const VOLUME_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Gap {
    generators: Vec<f64>,
    dims: Vec<u32>,
}

impl Gap {
    pub fn new(generators: Vec<f64>, dims: Vec<u32>) -> Result<Self> {
        if generators.len() != dims.len() {
            return Err(Error::DimensionMismatch {
                expected: generators.len(),
                actual: dims.len(),
            });
        }
        if dims.contains(&0) {
            return Err(Error::param("dims", "every dimension must be positive"));
        }
        if generators.iter().any(|w| !w.is_finite()) {
            return Err(Error::param("generators", "must be finite"));
        }
        Ok(Self { generators, dims })
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    pub fn generators(&self) -> &[f64] {
        &self.generators
    }

    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    /// `∏(2N_i + 1)`, saturating.
    pub fn volume(&self) -> u128 {
        self.dims
            .iter()
            .fold(1u128, |v, &d| v.saturating_mul(2 * d as u128 + 1))
    }

    fn check_cap(&self) -> Result<()> {
        let volume = self.volume();
        if volume > VOLUME_CAP {
            return Err(Error::VolumeCap {
                volume,
                cap: VOLUME_CAP,
            });
        }
        Ok(())
    }

    fn point(&self, coeffs: &[i64]) -> f64 {
        coeffs
            .iter()
            .zip(&self.generators)
            .map(|(&a, w)| a as f64 * w)
            .sum()
    }
}

/// All points of the progression in ascending order, with values equal up
/// to a relative `1e-12` collapsed into one.
pub fn gap_points(g: &Gap) -> Result<Vec<f64>> {
    g.check_cap()?;
    let r = g.rank();
    let mut coeffs: Vec<i64> = g.dims.iter().map(|&d| -(d as i64)).collect();
    let mut points = Vec::with_capacity(g.volume() as usize);
    loop {
        points.push(g.point(&coeffs));
        // odometer increment
        let mut k = 0;
        while k < r {
            if coeffs[k] < g.dims[k] as i64 {
                coeffs[k] += 1;
                break;
            }
            coeffs[k] = -(g.dims[k] as i64);
            k += 1;
        }
        if k == r {
            break;
        }
    }
    points.sort_by(f64::total_cmp);
    let scale = points.iter().fold(0.0_f64, |m, p| m.max(p.abs())).max(1.0);
    points.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * scale);
    Ok(points)
}

/// A unit vector whose coordinates are uniform draws from the progression
/// plus independent offsets uniform in `[-jitter, jitter]`, then normalized.
pub fn gap_vector(g: &Gap, n: usize, seed: u64, jitter: f64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::param("n", "must be positive"));
    }
    if !(jitter >= 0.0 && jitter.is_finite()) {
        return Err(Error::param("jitter", format!("must be non-negative, got {jitter}")));
    }
    let mut rng = rng_from_seed(seed);
    let mut v: Vec<f64> = (0..n)
        .map(|_| {
            let coeffs: Vec<i64> = g
                .dims
                .iter()
                .map(|&d| rng.random_range(-(d as i64)..=d as i64))
                .collect();
            let offset = if jitter > 0.0 {
                rng.random_range(-jitter..=jitter)
            } else {
                0.0
            };
            g.point(&coeffs) + offset
        })
        .collect();
    let nrm = norm(&v);
    if !(nrm > 0.0) {
        return Err(Error::ZeroVector);
    }
    v.iter_mut().for_each(|x| *x /= nrm);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one() {
        let g = Gap::new(vec![1.0], vec![2]).unwrap();
        assert_eq!(gap_points(&g).unwrap(), vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
    }

    #[test]
    fn volume_product() {
        let g = Gap::new(vec![1.0, 10.0], vec![2, 1]).unwrap();
        assert_eq!(g.volume(), 15);
        assert_eq!(gap_points(&g).unwrap().len(), 15);
    }

    #[test]
    fn collisions_collapse() {
        let g = Gap::new(vec![1.0, 2.0], vec![2, 1]).unwrap();
        // a + 2b with |a| ≤ 2, |b| ≤ 1 covers -4..=4
        assert_eq!(gap_points(&g).unwrap().len(), 9);
        assert_eq!(Gap::new(vec![], vec![]).unwrap().volume(), 1);
    }

    #[test]
    fn irrational_generators_distinct() {
        let g = Gap::new(vec![1.0, 2f64.sqrt()], vec![1, 1]).unwrap();
        assert_eq!(gap_points(&g).unwrap().len(), 9);
    }

    #[test]
    fn cap_enforced() {
        let g = Gap::new(vec![1.0; 3], vec![100; 3]).unwrap();
        assert!(matches!(gap_points(&g), Err(Error::VolumeCap { .. })));
    }

    #[test]
    fn vector_unit_and_structured() {
        let g = Gap::new(vec![1.0], vec![3]).unwrap();
        let v = gap_vector(&g, 50, 7, 0.0).unwrap();
        assert!((norm(&v) - 1.0).abs() < 1e-12);
        let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs())) / 3.0;
        for x in &v {
            let a = x / scale;
            assert!((a - a.round()).abs() < 1e-9);
        }
        let zero = Gap::new(vec![0.0], vec![1]).unwrap();
        assert_eq!(gap_vector(&zero, 4, 1, 0.0), Err(Error::ZeroVector));
    }
}
