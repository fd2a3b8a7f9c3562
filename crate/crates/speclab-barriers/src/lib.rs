//! Barrier machinery on the whole line.
//!
//! A *barrier* is a stretch of potential that forces every generalized
//! eigenfunction at energy `E` to grow while crossing it. This crate provides
//! the pieces needed to certify and audit that mechanism numerically:
//!
//! * [`whole_line_transfer`] — transfer products `T_E(n, m)` for arbitrary
//!   signed indices, with the exact unimodular inverse for reversed windows;
//! * [`gap_certificate`] — a Dirichlet-truncated block on a window together
//!   with a verified spectral gap `(E - delta, E + delta)`, the hypothesis
//!   of the growth inequalities;
//! * [`growth_audit`] — the four universal growth inequalities implied by a
//!   spectral gap (component growth from the origin, growth from the first
//!   three sites, vector-norm growth in every direction, and the lower bound
//!   on the norm of the crossing product), audited row by row in log space
//!   with a double-double recheck of near-tie rows;
//! * [`unbounded_barrier_scan`] — evidence that `limsup |V| = infinity`
//!   forces unbounded one-step norms;
//! * [`sparse_block_evidence`] — window norms across the random blocks of a
//!   sparse composite potential, scored against per-block thresholds.
//!
//! All inequality checks are performed on logarithms (the right sides grow
//! like `(1 + delta^2)^n`) and report margins rather than asserting: a row is
//! `Pass`, `Fail`, `TriviallyPass` (vacuous right side), or `Inconclusive`
//! when the two sides agree to within the numerical trust band.

pub mod audit;
pub mod certificate;
pub mod composite;
pub mod scan;
pub mod whole_line;

use speclab_core::CoreError;
use speclab_oracle::OracleError;
use speclab_potentials::PotentialsError;

pub use audit::{
    direction_rows_for, growth_audit, growth_audit_with_grid, phi_grid, AuditRow, GrowthAudit,
    RowVerdict,
};
pub use certificate::{gap_certificate, GapCertificate};
pub use composite::{sparse_block_evidence, BlockEvidence, SparseBlockReport};
pub use scan::{unbounded_barrier_scan, BarrierScan, BarrierSite};
pub use whole_line::whole_line_transfer;

/// Errors from certificate construction, audits, and scans.
#[derive(Debug, thiserror::Error)]
pub enum BarrierError {
    #[error("invalid barrier input: {0}")]
    Invalid(String),

    #[error("window [{lo}, {hi}] is unusable: {why}")]
    BadWindow { lo: i64, hi: i64, why: String },

    /// The growth inequalities are only theorems under a verified spectral
    /// gap; auditing against an unverified certificate is refused rather
    /// than reported as a failure.
    #[error(
        "gap certificate not verified (min |eig - E| = {min_eig_distance:.6e}, \
         delta = {delta:.6e}, stable = {stable}); growth audit refused"
    )]
    UnverifiedCertificate {
        min_eig_distance: f64,
        delta: f64,
        stable: bool,
    },

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error(transparent)]
    Oracle(#[from] OracleError),

    #[error(transparent)]
    Potentials(#[from] PotentialsError),
}
