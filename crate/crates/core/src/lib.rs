//! Random symmetric matrix experiments: ensembles, a dense eigensolver,
//! eigenvalue-gap statistics, anti-concentration tools, eigenvector
//! diagnostics and smoothed power iteration.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eigen;
pub mod eigenvector_analysis;
pub mod ensembles;
pub mod error;
pub mod gap_experiments;
pub mod littlewood_offord;
pub mod matrix;
pub mod rng;
pub mod smoothed_power;
pub mod spectral;
pub mod stats;

pub use eigen::{eigen_decompose, eigenvalues, Spectrum};
pub use ensembles::{Ensemble, EnsembleSpec, EntryLaw};
pub use error::{Error, Result};
pub use matrix::SymmetricMatrix;
