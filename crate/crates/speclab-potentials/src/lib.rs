//! Potential families for the transfer-matrix experiments.
//!
//! Every potential is described by a serializable [`PotentialSpec`] (family,
//! parameters, seed, domain) and compiled into an evaluator implementing
//! [`speclab_core::Potential`]. Random families are counter-based — each site
//! is a pure function of `(seed, n)` — so sequences are reproducible bit for
//! bit across runs and platforms, and evaluation parallelizes trivially.
//!
//! The [`right_limit`] machinery extracts, for `lambda cos(n^beta)`, shifts
//! after which a window of the potential matches a fixed polynomial-phase
//! potential (degree `floor(beta)`), together with the phase coefficients and
//! an independently recomputable window error.

pub mod bernoulli;
pub mod rng;

mod right_limit;
mod spec;

use std::path::PathBuf;

pub use right_limit::{right_limit_search, PolyPhase, RightLimitResult};
pub use spec::{
    cos_power_phase, shift_distance, shift_distance_specs, CompiledPotential, Domain, Family,
    PotentialSpec,
};

/// Errors from spec validation, file loading, or evaluation.
#[derive(Debug, thiserror::Error)]
pub enum PotentialsError {
    #[error("invalid potential spec: {0}")]
    Invalid(String),
    #[error("cannot read potential file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bad number in {path} line {line}: {content:?}")]
    Parse {
        path: PathBuf,
        line: usize,
        content: String,
    },
    #[error(transparent)]
    Eval(#[from] speclab_core::CoreError),
}
