//! Eigenvector diagnostics: delocalization, mass spread, coordinate
//! non-degeneration and nodal domains of graph eigenvectors.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::eigen::Spectrum;
use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;

/// `#{i : |v_i| ≥ threshold}`.
pub fn delocalization_count(v: &[f64], threshold: f64) -> usize {
    v.iter().filter(|x| x.abs() >= threshold).count()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DelocalizationProfile {
    pub threshold: f64,
    /// One count per eigenvector, ascending eigenvalue order.
    pub counts: Vec<usize>,
    pub min_count: usize,
}

pub fn delocalization_profile(spectrum: &Spectrum, threshold: f64) -> Result<DelocalizationProfile> {
    if !(threshold > 0.0) {
        return Err(Error::param("threshold", format!("must be positive, got {threshold}")));
    }
    let counts: Vec<usize> = spectrum
        .eigenvectors()
        .map(|v| delocalization_count(v, threshold))
        .collect();
    let min_count = counts.iter().copied().min().unwrap_or(0);
    Ok(DelocalizationProfile {
        threshold,
        counts,
        min_count,
    })
}

/// Largest mass `Σ_{i∈S} v_i²` over sets of `⌊fraction·n⌋` coordinates.
pub fn mass_concentration(v: &[f64], fraction: f64) -> Result<f64> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::param("fraction", format!("must lie in (0, 1], got {fraction}")));
    }
    let k = (fraction * v.len() as f64 + 1e-9).floor() as usize;
    if k == 0 {
        return Err(Error::param("fraction", "floor(fraction * n) = 0"));
    }
    let mut sq: Vec<f64> = v.iter().map(|x| x * x).collect();
    sq.sort_by(|a, b| b.total_cmp(a));
    Ok(sq[..k].iter().sum())
}

/// Smallest `|v_i|` and its first (zero-based) index.
pub fn min_abs_coordinate(v: &[f64]) -> Option<(f64, usize)> {
    let mut best: Option<(f64, usize)> = None;
    for (i, x) in v.iter().enumerate() {
        let a = x.abs();
        if best.is_none_or(|(b, _)| a < b) {
            best = Some((a, i));
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodalMode {
    /// Components where neighbouring coordinates have strictly positive products.
    Strong,
    /// Components where neighbouring coordinates have non-negative products.
    Weak,
}

/// Default zero tolerance `1e-10·√n`.
pub fn default_zero_tol(n: usize) -> f64 {
    1e-10 * (n as f64).sqrt()
}

fn check_adjacency(adj: &SymmetricMatrix) -> Result<()> {
    let n = adj.dim();
    for i in 0..n {
        for j in i..n {
            let a = adj.get(i, j);
            let ok = if i == j { a == 0.0 } else { a == 0.0 || a == 1.0 };
            if !ok {
                return Err(Error::NonBinaryAdjacency {
                    row: i,
                    col: j,
                    value: a,
                });
            }
        }
    }
    Ok(())
}

// Connected components of the subgraph induced on `mask`, each sorted.
fn components(adj: &SymmetricMatrix, mask: &[bool]) -> Vec<Vec<usize>> {
    let n = adj.dim();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if !mask[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut comp = Vec::new();
        while let Some(u) = queue.pop_front() {
            comp.push(u);
            for w in 0..n {
                if mask[w] && !seen[w] && adj.get(u, w) == 1.0 {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Nodal domains of `v` on the graph `adj` (zero-based vertices). Strong
/// domains come from `{v > tol}` and `{v < -tol}`; weak domains from
/// `{v ≥ -tol}` and `{v ≤ tol}`, with duplicates removed.
pub fn nodal_domains(
    adj: &SymmetricMatrix,
    v: &[f64],
    mode: NodalMode,
    zero_tol: f64,
) -> Result<Vec<Vec<usize>>> {
    let n = adj.dim();
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: v.len(),
        });
    }
    if !(zero_tol >= 0.0) {
        return Err(Error::param("zero_tol", format!("must be non-negative, got {zero_tol}")));
    }
    check_adjacency(adj)?;
    let (pos, neg): (Vec<bool>, Vec<bool>) = match mode {
        NodalMode::Strong => (
            v.iter().map(|&x| x > zero_tol).collect(),
            v.iter().map(|&x| x < -zero_tol).collect(),
        ),
        NodalMode::Weak => (
            v.iter().map(|&x| x >= -zero_tol).collect(),
            v.iter().map(|&x| x <= zero_tol).collect(),
        ),
    };
    let mut domains = components(adj, &pos);
    for comp in components(adj, &neg) {
        if !domains.contains(&comp) {
            domains.push(comp);
        }
    }
    Ok(domains)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodalEntry {
    /// Zero-based position in ascending eigenvalue order.
    pub index: usize,
    pub eigenvalue: f64,
    pub min_abs: f64,
    pub strong: Vec<Vec<usize>>,
    pub weak: Vec<Vec<usize>>,
}

impl NodalEntry {
    pub fn strong_count(&self) -> usize {
        self.strong.len()
    }

    pub fn weak_count(&self) -> usize {
        self.weak.len()
    }

    /// Strong domains are disjoint and each lies inside some weak domain.
    pub fn is_consistent(&self) -> bool {
        let mut owner = std::collections::HashSet::new();
        for d in &self.strong {
            for &i in d {
                if !owner.insert(i) {
                    return false;
                }
            }
        }
        self.strong
            .iter()
            .all(|s| self.weak.iter().any(|w| s.iter().all(|i| w.binary_search(i).is_ok())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodalReport {
    pub zero_tol: f64,
    pub entries: Vec<NodalEntry>,
}

impl NodalReport {
    /// Leading eigenvector has one strong domain and every other has exactly two.
    pub fn two_domain_pattern(&self) -> bool {
        let last = self.entries.len().saturating_sub(1);
        self.entries.iter().all(|e| {
            let expect = if e.index == last { 1 } else { 2 };
            e.strong_count() == expect
        })
    }
}

pub fn nodal_report(adj: &SymmetricMatrix, spectrum: &Spectrum) -> Result<NodalReport> {
    nodal_report_with_tol(adj, spectrum, default_zero_tol(adj.dim()))
}

pub fn nodal_report_with_tol(
    adj: &SymmetricMatrix,
    spectrum: &Spectrum,
    zero_tol: f64,
) -> Result<NodalReport> {
    if spectrum.dim() != adj.dim() {
        return Err(Error::DimensionMismatch {
            expected: adj.dim(),
            actual: spectrum.dim(),
        });
    }
    let mut entries = Vec::with_capacity(adj.dim());
    for (index, v) in spectrum.eigenvectors().enumerate() {
        let entry = NodalEntry {
            index,
            eigenvalue: spectrum.eigenvalues()[index],
            min_abs: min_abs_coordinate(v).map_or(0.0, |(m, _)| m),
            strong: nodal_domains(adj, v, NodalMode::Strong, zero_tol)?,
            weak: nodal_domains(adj, v, NodalMode::Weak, zero_tol)?,
        };
        debug_assert!(entry.is_consistent());
        entries.push(entry);
    }
    Ok(NodalReport { zero_tol, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::eigen_decompose;

    fn k3() -> SymmetricMatrix {
        SymmetricMatrix::from_upper_fn(3, |i, j| if i == j { 0.0 } else { 1.0 })
    }

    fn path3() -> SymmetricMatrix {
        SymmetricMatrix::from_upper_fn(3, |i, j| if j == i + 1 { 1.0 } else { 0.0 })
    }

    #[test]
    fn counts_and_mass() {
        let mut e1 = vec![0.0; 100];
        e1[0] = 1.0;
        assert_eq!(delocalization_count(&e1, 0.5), 1);
        assert_eq!(delocalization_count(&[0.1; 100], 0.05), 100);
        assert!((mass_concentration(&[0.1; 100], 0.3).unwrap() - 0.3).abs() < 1e-12);
        assert_eq!(mass_concentration(&e1, 0.1).unwrap(), 1.0);
        assert!(mass_concentration(&[1.0; 5], 0.1).is_err());
    }

    #[test]
    fn min_abs_examples() {
        assert_eq!(min_abs_coordinate(&[0.6, -0.8]), Some((0.6, 0)));
        assert_eq!(min_abs_coordinate(&[0.3, 0.0, -0.3, 0.0]), Some((0.0, 1)));
        assert_eq!(min_abs_coordinate(&[]), None);
    }

    #[test]
    fn triangle_domains() {
        let s = 1.0 / 3f64.sqrt();
        let strong = nodal_domains(&k3(), &[s, s, s], NodalMode::Strong, 1e-12).unwrap();
        assert_eq!(strong, vec![vec![0, 1, 2]]);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = [h, -h, 0.0];
        let strong = nodal_domains(&k3(), &v, NodalMode::Strong, 1e-12).unwrap();
        assert_eq!(strong, vec![vec![0], vec![1]]);
        let weak = nodal_domains(&k3(), &v, NodalMode::Weak, 1e-12).unwrap();
        assert_eq!(weak, vec![vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn path_alternating() {
        let d = nodal_domains(&path3(), &[1.0, -1.0, 1.0], NodalMode::Strong, 0.0).unwrap();
        assert_eq!(d.len(), 3);
    }

    #[test]
    fn rejects_weighted_graph() {
        let mut a = k3();
        a.set(0, 1, 0.5);
        assert!(matches!(
            nodal_domains(&a, &[1.0, 1.0, 1.0], NodalMode::Strong, 0.0),
            Err(Error::NonBinaryAdjacency { row: 0, col: 1, .. })
        ));
    }

    #[test]
    fn triangle_report() {
        let a = k3();
        let spec = eigen_decompose(&a).unwrap();
        let report = nodal_report(&a, &spec).unwrap();
        assert_eq!(report.entries[2].strong_count(), 1);
        assert_eq!(report.entries[0].strong_count(), 2);
        assert_eq!(report.entries[1].strong_count(), 2);
        assert!(report.two_domain_pattern());
        assert!(report.entries.iter().all(NodalEntry::is_consistent));
    }

    #[test]
    fn empty_graph_report() {
        let a = SymmetricMatrix::zeros(4);
        let spec = eigen_decompose(&a).unwrap();
        let report = nodal_report(&a, &spec).unwrap();
        for e in &report.entries {
            assert_eq!(e.strong_count(), 1);
            assert_eq!(e.strong[0].len(), 1);
        }
    }
}
