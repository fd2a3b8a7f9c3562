//! Transfer-matrix diagnostics for absolutely continuous spectrum.
//!
//! Everything here watches the same object from different angles: the
//! product `T_E(n)` of one-step transfer matrices. Bounded Cesàro averages
//! of `‖T_E(n)‖²` single out the energies where the whole-line dynamics can
//! carry absolutely continuous measure; subordinacy ratios compare the two
//! boundary solutions; and two quantitative inequalities tie the smoothed
//! boundary density and the solution sums back to those averages, so the
//! transfer route and the spectral route check each other.
//!
//! All sums of squared norms are accumulated in log space — the interesting
//! potentials reach `‖T‖² ~ e^700` long before the diagnostics stop being
//! meaningful.

pub mod bounds;
pub mod cesaro;
pub mod subordinacy;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("invalid diagnostics input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] speclab_core::CoreError),
    #[error(transparent)]
    Oracle(#[from] speclab_oracle::OracleError),
}

pub use bounds::{cesaro_ratio_bound, weyl_cesaro_bound, RatioBound, WeylBound};
pub use cesaro::{
    cesaro_trace, liminf_estimate, lyapunov_estimate, polylog_envelope_scan, scans_to_csv,
    window_norms, CesaroTrace, PolylogScan, Schedule,
};
pub use subordinacy::{subordinacy_trace, SubordinacyTrace};
