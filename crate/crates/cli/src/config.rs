//! JSON run configuration: parsing, defaults and validation.

use std::fmt;

use gaplab_core::ensembles::{Ensemble, EnsembleSpec, EntryLaw};
use gaplab_core::gap_experiments::IndexMode;
use gaplab_core::smoothed_power::default_sigma;
use gaplab_core::SymmetricMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_TRIALS: u64 = 1000;
pub const DEFAULT_EPSILON: f64 = 0.25;
pub const DEFAULT_DELTA_GRID: [f64; 4] = [0.1, 0.2, 0.4, 0.8];

const KNOWN_FIELDS: &[&str] = &[
    "schema_version",
    "experiment",
    "seed",
    "ensemble",
    "trials",
    "l",
    "delta_grid",
    "index_mode",
    "epsilon",
    "index",
    "tol",
    "max_iter",
    "zero_tol",
    "law",
    "mc_trials",
    "kappa",
    "gamma",
    "theta_max",
    "alpha",
    "c0",
    "c1",
    "budget",
    "vectors",
    "dim",
    "vector_count",
    "output",
    "workers",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Sample,
    Tails,
    Mingap,
    Simple,
    Lcd,
    Smallball,
    Nodal,
    Power,
    Report,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Sample => "sample",
            Experiment::Tails => "tails",
            Experiment::Mingap => "mingap",
            Experiment::Simple => "simple",
            Experiment::Lcd => "lcd",
            Experiment::Smallball => "smallball",
            Experiment::Nodal => "nodal",
            Experiment::Power => "power",
            Experiment::Report => "report",
        }
    }

    fn needs_ensemble(&self) -> bool {
        matches!(
            self,
            Experiment::Sample
                | Experiment::Tails
                | Experiment::Mingap
                | Experiment::Simple
                | Experiment::Nodal
                | Experiment::Power
        )
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MatrixConfig {
    Diagonal(Vec<f64>),
    Rows(Vec<Vec<f64>>),
}

impl MatrixConfig {
    pub fn build(&self) -> gaplab_core::Result<SymmetricMatrix> {
        match self {
            MatrixConfig::Diagonal(d) => Ok(SymmetricMatrix::from_diagonal(d)),
            MatrixConfig::Rows(rows) => SymmetricMatrix::from_rows(rows),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnsembleConfig {
    Wigner {
        n: usize,
        off_diag: EntryLaw,
        #[serde(default)]
        diag: Option<EntryLaw>,
    },
    Adjacency {
        n: usize,
        p: f64,
    },
    Perturbed {
        deterministic: MatrixConfig,
        #[serde(default)]
        noise: Option<EntryLaw>,
        #[serde(default)]
        diag_noise: Option<EntryLaw>,
        #[serde(default)]
        sigma: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexModeName {
    Single,
    BulkAverage,
    AllMin,
}

/// A validated configuration with every default filled in. Serializing it
/// gives the canonical form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub schema_version: u32,
    pub experiment: Experiment,
    pub seed: u64,
    pub ensemble: Option<EnsembleConfig>,
    pub trials: u64,
    pub l: usize,
    pub delta_grid: Vec<f64>,
    pub index_mode: IndexModeName,
    pub epsilon: f64,
    pub index: Option<usize>,
    pub tol: Option<f64>,
    pub max_iter: usize,
    pub zero_tol: Option<f64>,
    pub law: EntryLaw,
    pub mc_trials: u64,
    pub kappa: f64,
    pub gamma: f64,
    pub theta_max: Option<f64>,
    pub alpha: Option<f64>,
    pub c0: f64,
    pub c1: f64,
    pub budget: usize,
    pub vectors: Option<Vec<Vec<f64>>>,
    pub dim: usize,
    pub vector_count: usize,
    pub output: String,
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("malformed JSON: {0}")]
    Malformed(String),
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Violations(Vec<String>),
}

impl ConfigError {
    pub fn violations(&self) -> &[String] {
        match self {
            ConfigError::Violations(v) => v,
            ConfigError::Malformed(_) => &[],
        }
    }
}

struct Reader<'a> {
    obj: &'a Map<String, Value>,
    violations: Vec<String>,
}

impl Reader<'_> {
    fn get<T: DeserializeOwned>(&mut self, key: &str) -> Option<T> {
        let v = self.obj.get(key)?;
        if v.is_null() {
            return None;
        }
        match serde_json::from_value(v.clone()) {
            Ok(t) => Some(t),
            Err(e) => {
                self.violations.push(format!("{key}: {e}"));
                None
            }
        }
    }

    fn fail(&mut self, key: &str, reason: impl fmt::Display) {
        self.violations.push(format!("{key}: {reason}"));
    }
}

/// Parses and validates a configuration. `expected`, when given, fills a
/// missing `experiment` field and must agree with a present one.
pub fn parse_config(text: &str, expected: Option<Experiment>) -> Result<RunConfig, ConfigError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ConfigError::Malformed(e.to_string()))?;
    let Value::Object(obj) = &value else {
        return Err(ConfigError::Malformed("top level must be a JSON object".into()));
    };
    let mut r = Reader {
        obj,
        violations: Vec::new(),
    };
    for key in obj.keys() {
        if !KNOWN_FIELDS.contains(&key.as_str()) {
            r.fail(key, "unknown field");
        }
    }

    let schema_version = r.get::<u32>("schema_version").unwrap_or(SCHEMA_VERSION);
    if schema_version != SCHEMA_VERSION {
        r.fail("schema_version", format!("unsupported version {schema_version}, expected {SCHEMA_VERSION}"));
    }
    let experiment = match (r.get::<Experiment>("experiment"), expected) {
        (Some(e), Some(x)) if e != x => {
            r.fail("experiment", format!("config is for `{e}` but `{x}` was requested"));
            x
        }
        (Some(e), _) | (None, Some(e)) => e,
        (None, None) => {
            if !obj.contains_key("experiment") {
                r.fail("experiment", "missing");
            }
            Experiment::Tails
        }
    };

    let seed = r.get::<u64>("seed").unwrap_or(0);
    let ensemble = r.get::<EnsembleConfig>("ensemble");
    let trials = r.get::<u64>("trials").unwrap_or(DEFAULT_TRIALS);
    let l = r.get::<usize>("l").unwrap_or(1);
    let delta_grid = r.get::<Vec<f64>>("delta_grid").unwrap_or_else(|| DEFAULT_DELTA_GRID.to_vec());
    let index_mode = r.get::<IndexModeName>("index_mode").unwrap_or(IndexModeName::BulkAverage);
    let epsilon = r.get::<f64>("epsilon").unwrap_or(DEFAULT_EPSILON);
    let index = r.get::<usize>("index");
    let tol = r.get::<f64>("tol");
    let max_iter = r.get::<usize>("max_iter").unwrap_or(10_000);
    let zero_tol = r.get::<f64>("zero_tol");
    let law = r.get::<EntryLaw>("law").unwrap_or(EntryLaw::Rademacher);
    let mc_trials = r.get::<u64>("mc_trials").unwrap_or(100_000);
    let kappa = r.get::<f64>("kappa").unwrap_or(0.5);
    let gamma = r.get::<f64>("gamma").unwrap_or(0.25);
    let theta_max = r.get::<f64>("theta_max");
    let alpha = r.get::<f64>("alpha");
    let c0 = r.get::<f64>("c0").unwrap_or(0.5);
    let c1 = r.get::<f64>("c1").unwrap_or(0.5);
    let budget = r.get::<usize>("budget").unwrap_or(20);
    let vectors = r.get::<Vec<Vec<f64>>>("vectors");
    let dim = r.get::<usize>("dim").unwrap_or(10);
    let vector_count = r.get::<usize>("vector_count").unwrap_or(50);
    let output = r.get::<String>("output").unwrap_or_else(|| "out".to_string());
    let workers = r.get::<usize>("workers");

    let mut cfg = RunConfig {
        schema_version,
        experiment,
        seed,
        ensemble,
        trials,
        l,
        delta_grid,
        index_mode,
        epsilon,
        index,
        tol,
        max_iter,
        zero_tol,
        law,
        mc_trials,
        kappa,
        gamma,
        theta_max,
        alpha,
        c0,
        c1,
        budget,
        vectors,
        dim,
        vector_count,
        output,
        workers,
    };
    validate(&mut cfg, &mut r);
    if r.violations.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError::Violations(r.violations))
    }
}

fn open_unit(x: f64) -> bool {
    x > 0.0 && x < 1.0
}

fn validate(cfg: &mut RunConfig, r: &mut Reader<'_>) {
    if cfg.trials == 0 {
        r.fail("trials", "must be at least 1");
    }
    if cfg.delta_grid.is_empty() || cfg.delta_grid.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        r.fail("delta_grid", "must be a non-empty list of positive numbers");
    } else if cfg.delta_grid.windows(2).any(|w| w[0] >= w[1]) {
        r.fail("delta_grid", "must be strictly ascending");
    }
    if !(0.0..0.5).contains(&cfg.epsilon) {
        r.fail("epsilon", format!("must lie in [0, 0.5), got {}", cfg.epsilon));
    }
    if !(cfg.kappa > 0.0 && cfg.kappa.is_finite()) {
        r.fail("kappa", format!("must be positive, got {}", cfg.kappa));
    }
    if !open_unit(cfg.gamma) {
        r.fail("gamma", format!("must lie in (0, 1), got {}", cfg.gamma));
    }
    if let Some(t) = cfg.theta_max {
        if !(t > 0.0 && t.is_finite()) {
            r.fail("theta_max", format!("must be positive, got {t}"));
        }
    }
    if let Some(a) = cfg.alpha {
        if !(a > 0.0 && a <= 1.0) {
            r.fail("alpha", format!("must lie in (0, 1], got {a}"));
        }
    }
    if !open_unit(cfg.c0) {
        r.fail("c0", format!("must lie in (0, 1), got {}", cfg.c0));
    }
    if !open_unit(cfg.c1) {
        r.fail("c1", format!("must lie in (0, 1), got {}", cfg.c1));
    }
    if let Some(t) = cfg.tol {
        if !(t > 0.0 && t.is_finite()) {
            r.fail("tol", format!("must be positive, got {t}"));
        }
    }
    if let Some(z) = cfg.zero_tol {
        if !(z >= 0.0 && z.is_finite()) {
            r.fail("zero_tol", format!("must be non-negative, got {z}"));
        }
    }
    if cfg.mc_trials < 100 {
        r.fail("mc_trials", "must be at least 100");
    }
    if cfg.workers == Some(0) {
        r.fail("workers", "must be at least 1");
    }
    if let Err(e) = cfg.law.validate() {
        r.fail("law", e);
    }
    if let Some(vs) = &cfg.vectors {
        if vs.is_empty() || vs.iter().any(|v| v.is_empty()) {
            r.fail("vectors", "must be a non-empty list of non-empty vectors");
        } else if vs.iter().flatten().any(|x| !x.is_finite()) {
            r.fail("vectors", "entries must be finite");
        }
    }
    if cfg.dim == 0 {
        r.fail("dim", "must be positive");
    }
    if cfg.vector_count == 0 {
        r.fail("vector_count", "must be positive");
    }

    if cfg.experiment.needs_ensemble() && cfg.ensemble.is_none() {
        if !r.obj.contains_key("ensemble") {
            r.fail("ensemble", format!("required for `{}`", cfg.experiment));
        }
        return;
    }
    let n = match fill_ensemble(cfg, r) {
        Some(n) => n,
        None => return,
    };
    let nf = n as f64;
    match cfg.experiment {
        Experiment::Tails => {
            if cfg.l == 0 || cfg.l >= n {
                r.fail("l", format!("must lie in [1, {}], got {}", n - 1, cfg.l));
                return;
            }
            let mode = match cfg.index_mode {
                IndexModeName::Single => match cfg.index {
                    Some(i) => IndexMode::Single(i),
                    None => {
                        r.fail("index", "required when index_mode is `single`");
                        return;
                    }
                },
                IndexModeName::BulkAverage => IndexMode::BulkAverage(cfg.epsilon),
                IndexModeName::AllMin => IndexMode::AllMin,
            };
            if let IndexMode::Single(i) = mode {
                if i == 0 || i + cfg.l > n {
                    r.fail("index", format!("must lie in [1, {}], got {i}", n - cfg.l));
                }
            } else if mode.indices(n, cfg.l).is_empty() {
                r.fail("epsilon", "bulk window contains no indices");
            }
        }
        Experiment::Simple | Experiment::Nodal => {
            if cfg.tol.is_none() && cfg.experiment == Experiment::Simple {
                cfg.tol = Some(1e-10 * nf.sqrt());
            }
            if cfg.zero_tol.is_none() && cfg.experiment == Experiment::Nodal {
                cfg.zero_tol = Some(1e-10 * nf.sqrt());
            }
            if cfg.experiment == Experiment::Nodal
                && !matches!(cfg.ensemble, Some(EnsembleConfig::Adjacency { .. }))
            {
                r.fail("ensemble", "nodal analysis needs an adjacency ensemble");
            }
        }
        Experiment::Power => {
            if cfg.tol.is_none() {
                cfg.tol = Some(1e-6);
            }
            if !matches!(cfg.ensemble, Some(EnsembleConfig::Perturbed { .. })) {
                r.fail("ensemble", "power iteration needs a perturbed ensemble");
            }
        }
        _ => {}
    }
}

// Fills ensemble defaults and returns the dimension (zero when absent).
fn fill_ensemble(cfg: &mut RunConfig, r: &mut Reader<'_>) -> Option<usize> {
    let power = cfg.experiment == Experiment::Power;
    let Some(ens) = cfg.ensemble.as_mut() else {
        return Some(0);
    };
    match ens {
        EnsembleConfig::Wigner { n, off_diag, diag } => {
            if diag.is_none() {
                *diag = Some(*off_diag);
            }
            if *n < 2 {
                r.fail("ensemble.n", format!("must be at least 2, got {n}"));
                return None;
            }
            Some(*n)
        }
        EnsembleConfig::Adjacency { n, p } => {
            if !open_unit(*p) {
                r.fail("ensemble.p", format!("must lie in (0, 1), got {p}"));
            }
            if *n < 2 {
                r.fail("ensemble.n", format!("must be at least 2, got {n}"));
                return None;
            }
            Some(*n)
        }
        EnsembleConfig::Perturbed {
            deterministic,
            noise,
            diag_noise,
            sigma,
        } => {
            let f = match deterministic.build() {
                Ok(f) => f,
                Err(e) => {
                    r.fail("ensemble.deterministic", e);
                    return None;
                }
            };
            let noise = *noise.get_or_insert(EntryLaw::Gaussian);
            diag_noise.get_or_insert(noise);
            match sigma {
                Some(s) if !(*s >= 0.0 && s.is_finite()) => {
                    r.fail("ensemble.sigma", format!("must be non-negative, got {s}"));
                }
                Some(_) => {}
                None => {
                    *sigma = Some(if power {
                        match default_sigma(&f) {
                            Ok(s) => s,
                            Err(e) => {
                                r.fail("ensemble.deterministic", e);
                                return None;
                            }
                        }
                    } else {
                        1.0
                    });
                }
            }
            if f.dim() < 2 {
                r.fail("ensemble.deterministic", "dimension must be at least 2");
                return None;
            }
            Some(f.dim())
        }
    }
}

impl RunConfig {
    /// Canonical JSON: every field present, fixed order, two-space indent.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn ensemble_spec(&self) -> gaplab_core::Result<EnsembleSpec> {
        let ens = self
            .ensemble
            .as_ref()
            .ok_or_else(|| gaplab_core::Error::InvalidConfig("no ensemble configured".into()))?;
        let ensemble = match ens {
            EnsembleConfig::Wigner { n, off_diag, diag } => Ensemble::Wigner {
                n: *n,
                off_diag: *off_diag,
                diag: diag.unwrap_or(*off_diag),
            },
            EnsembleConfig::Adjacency { n, p } => Ensemble::Adjacency { n: *n, p: *p },
            EnsembleConfig::Perturbed {
                deterministic,
                noise,
                diag_noise,
                sigma,
            } => {
                let noise = noise.unwrap_or(EntryLaw::Gaussian);
                Ensemble::Perturbed {
                    deterministic: deterministic.build()?,
                    noise,
                    diag_noise: diag_noise.unwrap_or(noise),
                    scale: sigma.unwrap_or(1.0),
                }
            }
        };
        EnsembleSpec::new(ensemble, self.seed)
    }

    pub fn index_mode(&self) -> IndexMode {
        match self.index_mode {
            IndexModeName::Single => IndexMode::Single(self.index.unwrap_or(1)),
            IndexModeName::BulkAverage => IndexMode::BulkAverage(self.epsilon),
            IndexModeName::AllMin => IndexMode::AllMin,
        }
    }
}
