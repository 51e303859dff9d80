//! Human-readable summaries and SVG plots of a finished run directory.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use gaplab_core::gap_experiments::{fit_exponent, ExponentFit, TailCurve, TailPoint};
use serde_json::Value;

use crate::config::{Experiment, RunConfig};
use crate::run::write_atomic;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub experiment: Experiment,
    pub text: String,
    /// Fitted log-log slope of a tails run.
    pub fit: Option<ExponentFit>,
    pub checks: Vec<Check>,
    pub plots: Vec<PathBuf>,
}

struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| corrupt(path, "empty file"))?
            .split(',')
            .map(str::to_string)
            .collect::<Vec<_>>();
        let rows = lines
            .filter(|l| !l.is_empty())
            .map(|l| l.split(',').map(str::to_string).collect::<Vec<_>>())
            .collect::<Vec<_>>();
        if rows.iter().any(|r| r.len() != header.len()) {
            return Err(corrupt(path, "ragged row"));
        }
        Ok(Self { header, rows })
    }

    fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    fn get<T: std::str::FromStr>(&self, path: &Path, row: usize, name: &str) -> Result<T, CliError> {
        let c = self
            .column(name)
            .ok_or_else(|| corrupt(path, &format!("missing column `{name}`")))?;
        self.rows[row][c]
            .parse()
            .map_err(|_| corrupt(path, &format!("bad value in column `{name}`, row {}", row + 1)))
    }
}

fn corrupt(path: &Path, reason: &str) -> CliError {
    CliError::Corrupt {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    }
}

fn read_manifest(dir: &Path) -> Result<(Experiment, RunConfig), CliError> {
    let path = dir.join("manifest.json");
    if !path.is_file() {
        return Err(CliError::MissingManifest(dir.to_path_buf()));
    }
    let text = fs::read_to_string(&path).map_err(|e| CliError::Io {
        path: path.clone(),
        source: e,
    })?;
    let value: Value = serde_json::from_str(&text).map_err(|e| corrupt(&path, &e.to_string()))?;
    let experiment: Experiment = serde_json::from_value(value["experiment"].clone())
        .map_err(|e| corrupt(&path, &format!("experiment: {e}")))?;
    let config: RunConfig = serde_json::from_value(value["config"].clone())
        .map_err(|e| corrupt(&path, &format!("config: {e}")))?;
    Ok((experiment, config))
}

/// Reads a tails CSV back into a curve.
pub fn read_tail_curve(path: &Path, config: &RunConfig) -> Result<TailCurve, CliError> {
    let csv = Csv::read(path)?;
    if csv.rows.is_empty() {
        return Err(corrupt(path, "no data rows"));
    }
    let mut points = Vec::with_capacity(csv.rows.len());
    for r in 0..csv.rows.len() {
        points.push(TailPoint::new(
            csv.get(path, r, "delta")?,
            csv.get(path, r, "trials")?,
            csv.get(path, r, "successes")?,
        ));
    }
    Ok(TailCurve {
        n: csv.get(path, 0, "n")?,
        l: csv.get(path, 0, "l")?,
        index_mode: config.index_mode(),
        seed: csv.get(path, 0, "seed")?,
        points,
    })
}

pub fn report(dir: &Path) -> Result<Report, CliError> {
    let (experiment, config) = read_manifest(dir)?;
    let mut rep = Report {
        experiment,
        text: format!("experiment: {experiment} (seed {})\n", config.seed),
        fit: None,
        checks: Vec::new(),
        plots: Vec::new(),
    };
    match experiment {
        Experiment::Tails => tails_report(dir, &config, &mut rep)?,
        Experiment::Mingap => mingap_report(dir, &mut rep)?,
        Experiment::Simple => simple_report(dir, &mut rep)?,
        Experiment::Nodal => nodal_report(dir, &mut rep)?,
        Experiment::Power => power_report(dir, &mut rep)?,
        Experiment::Lcd => count_report(dir, "lcd.csv", "bounded", "true", "vectors with bounded LCD", &mut rep)?,
        Experiment::Smallball => {
            count_report(dir, "smallball.csv", "method", "exact", "exact estimates", &mut rep)?
        }
        Experiment::Sample => {
            let path = dir.join("spectrum.csv");
            let csv = Csv::read(&path)?;
            let _ = writeln!(rep.text, "eigenvalues recorded: {}", csv.rows.len());
        }
        Experiment::Report => {}
    }
    for c in &rep.checks {
        let _ = writeln!(rep.text, "[{}] {}", if c.passed { "PASS" } else { "FAIL" }, c.name);
    }
    Ok(rep)
}

fn tails_report(dir: &Path, config: &RunConfig, rep: &mut Report) -> Result<(), CliError> {
    let path = dir.join("tails.csv");
    let curve = read_tail_curve(&path, config)?;
    let _ = writeln!(
        rep.text,
        "n = {}, l = {}, indices = {}",
        curve.n,
        curve.l,
        curve.index_mode.label()
    );
    let _ = writeln!(rep.text, "{:>8} {:>12} {:>12} {:>24}", "delta", "successes", "p_hat", "95% Wilson CI");
    for p in &curve.points {
        let _ = writeln!(
            rep.text,
            "{:>8} {:>12} {:>12.6} {:>24}",
            p.delta,
            format!("{}/{}", p.successes, p.trials),
            p.p_hat,
            format!("[{:.6}, {:.6}]", p.ci_lo, p.ci_hi)
        );
    }
    let lo = curve.points.first().map_or(0.0, |p| p.delta);
    let hi = curve.points.last().map_or(0.0, |p| p.delta);
    match fit_exponent(&curve, lo, hi) {
        Ok(fit) => {
            let (a, b) = fit.slope_interval();
            let _ = writeln!(
                rep.text,
                "log-log slope: {:.4} (95% CI [{a:.4}, {b:.4}]) from {} points",
                fit.slope,
                fit.used.len()
            );
            let svg = loglog_svg(&curve, &fit);
            write_atomic(dir, "tails.svg", &svg)?;
            rep.plots.push(dir.join("tails.svg"));
            rep.fit = Some(fit);
        }
        Err(e) => {
            let _ = writeln!(rep.text, "log-log slope: unavailable ({e})");
        }
    }
    rep.checks.push(Check {
        name: "p_hat <= 2 delta at every grid point".into(),
        passed: curve.points.iter().all(|p| p.p_hat <= 2.0 * p.delta),
    });
    Ok(())
}

fn mingap_report(dir: &Path, rep: &mut Report) -> Result<(), CliError> {
    let path = dir.join("mingap.csv");
    let csv = Csv::read(&path)?;
    let mut scaled = Vec::with_capacity(csv.rows.len());
    for r in 0..csv.rows.len() {
        scaled.push(csv.get::<f64>(&path, r, "min_gap_scaled")?);
    }
    let above = scaled.iter().filter(|s| **s >= 1.0).count();
    let min = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    let _ = writeln!(
        rep.text,
        "trials: {}, min of n^(3/2) * min_gap: {min:.6}, trials above floor: {above}",
        scaled.len()
    );
    write_atomic(dir, "mingap.svg", &histogram_svg(&scaled, "n^(3/2) * min gap"))?;
    rep.plots.push(dir.join("mingap.svg"));
    rep.checks.push(Check {
        name: "min gap >= n^(-3/2) in every trial".into(),
        passed: above == scaled.len(),
    });
    Ok(())
}

fn simple_report(dir: &Path, rep: &mut Report) -> Result<(), CliError> {
    let path = dir.join("simple.csv");
    let csv = Csv::read(&path)?;
    let mut simple = 0;
    for r in 0..csv.rows.len() {
        if csv.get::<bool>(&path, r, "is_simple")? {
            simple += 1;
        }
    }
    let _ = writeln!(rep.text, "simple spectrum in {simple}/{} trials", csv.rows.len());
    rep.checks.push(Check {
        name: "every sampled spectrum is simple".into(),
        passed: simple == csv.rows.len(),
    });
    Ok(())
}

fn nodal_report(dir: &Path, rep: &mut Report) -> Result<(), CliError> {
    let path = dir.join("nodal.csv");
    let csv = Csv::read(&path)?;
    let mut per_trial: HashMap<u64, (usize, bool)> = HashMap::new();
    let mut min_abs = f64::INFINITY;
    let mut rows = Vec::new();
    for r in 0..csv.rows.len() {
        let trial: u64 = csv.get(&path, r, "trial")?;
        let index: usize = csv.get(&path, r, "eigen_index")?;
        let strong: usize = csv.get(&path, r, "strong_count")?;
        min_abs = min_abs.min(csv.get(&path, r, "min_abs_coord")?);
        let n = per_trial.entry(trial).or_insert((0, true));
        n.0 = n.0.max(index);
        rows.push((trial, index, strong));
    }
    for (trial, index, strong) in rows {
        let entry = per_trial.get_mut(&trial).expect("trial seen");
        let expect = if index == entry.0 { 1 } else { 2 };
        entry.1 &= strong == expect;
    }
    let good = per_trial.values().filter(|(_, ok)| *ok).count();
    let _ = writeln!(
        rep.text,
        "trials with the two-domain pattern: {good}/{}; smallest |v_i|: {min_abs:e}",
        per_trial.len()
    );
    rep.checks.push(Check {
        name: "two strong domains (one for the leading eigenvector) in every trial".into(),
        passed: good == per_trial.len(),
    });
    Ok(())
}

fn power_report(dir: &Path, rep: &mut Report) -> Result<(), CliError> {
    let path = dir.join("power.csv");
    let csv = Csv::read(&path)?;
    let mut converged = 0;
    let mut iters = Vec::new();
    for r in 0..csv.rows.len() {
        if csv.get::<bool>(&path, r, "converged")? {
            converged += 1;
            iters.push(csv.get::<f64>(&path, r, "iterations")?);
        }
    }
    let mean = if iters.is_empty() {
        f64::NAN
    } else {
        iters.iter().sum::<f64>() / iters.len() as f64
    };
    let _ = writeln!(
        rep.text,
        "converged in {converged}/{} seeds, mean iterations when converged: {mean:.1}",
        csv.rows.len()
    );
    Ok(())
}

fn count_report(
    dir: &Path,
    file: &str,
    column: &str,
    value: &str,
    label: &str,
    rep: &mut Report,
) -> Result<(), CliError> {
    let path = dir.join(file);
    let csv = Csv::read(&path)?;
    let c = csv
        .column(column)
        .ok_or_else(|| corrupt(&path, &format!("missing column `{column}`")))?;
    let k = csv.rows.iter().filter(|r| r[c] == value).count();
    let _ = writeln!(rep.text, "{label}: {k}/{}", csv.rows.len());
    Ok(())
}

const W: f64 = 480.0;
const H: f64 = 320.0;
const PAD: f64 = 40.0;

fn scale(v: f64, lo: f64, hi: f64, out_lo: f64, out_hi: f64) -> f64 {
    if hi > lo {
        out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo)
    } else {
        0.5 * (out_lo + out_hi)
    }
}

fn svg_frame(body: &str, title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\">\n\
         <rect x=\"{PAD}\" y=\"{PAD}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n\
         <text x=\"{PAD}\" y=\"{}\" font-size=\"12\">{title}</text>\n{body}</svg>\n",
        W - 2.0 * PAD,
        H - 2.0 * PAD,
        PAD - 10.0
    )
}

fn loglog_svg(curve: &TailCurve, fit: &ExponentFit) -> String {
    let pts: Vec<(f64, f64)> = curve
        .points
        .iter()
        .filter(|p| p.successes > 0)
        .map(|p| (p.delta.ln(), p.p_hat.ln()))
        .collect();
    let (xl, xh) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let (yl, yh) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    let px = |x: f64| scale(x, xl, xh, PAD, W - PAD);
    let py = |y: f64| scale(y, yl, yh, H - PAD, PAD);
    let mut body = String::new();
    for (x, y) in &pts {
        let _ = writeln!(body, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\"/>", px(*x), py(*y));
    }
    let y0 = fit.intercept + fit.slope * xl;
    let y1 = fit.intercept + fit.slope * xh;
    let _ = writeln!(
        body,
        "<path d=\"M {:.2} {:.2} L {:.2} {:.2}\" stroke=\"red\" fill=\"none\"/>",
        px(xl),
        py(y0),
        px(xh),
        py(y1)
    );
    svg_frame(&body, &format!("log p_hat vs log delta, slope {:.3}", fit.slope))
}

fn histogram_svg(values: &[f64], title: &str) -> String {
    const BINS: usize = 20;
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut counts = [0usize; BINS];
    for &v in values {
        let b = if hi > lo { ((v - lo) / (hi - lo) * BINS as f64) as usize } else { 0 };
        counts[b.min(BINS - 1)] += 1;
    }
    let top = counts.iter().copied().max().unwrap_or(1).max(1) as f64;
    let bw = (W - 2.0 * PAD) / BINS as f64;
    let mut body = String::new();
    for (i, &c) in counts.iter().enumerate() {
        let h = c as f64 / top * (H - 2.0 * PAD);
        let _ = writeln!(
            body,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"steelblue\"/>",
            PAD + i as f64 * bw,
            H - PAD - h,
            bw,
            h
        );
    }
    svg_frame(&body, title)
}
