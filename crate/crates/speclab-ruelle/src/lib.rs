//! The strongly subordinate direction of a transfer-matrix sequence.
//!
//! For unimodular one-step matrices `A(n)` with norms `a(n)` and running
//! products `T(n) = A(n) ... A(1)` with norms `t(n)`, write the
//! most-contracted input direction of `T(n)` as `u_theta = (cos theta,
//! sin theta)`. The angle sequence `theta_n` moves by at most
//! `(pi/2) a(n+1)^2 / t(n)^2` per step, so when that series is summable the
//! angles converge. The limit direction `u_infty` is the initial condition
//! whose solution is *strongly subordinate*: `||T(n) u_infty|| / ||T(n) v||`
//! tends to zero for every independent `v`. This crate measures that
//! construction:
//!
//! * [`angle_trace`] — the `(theta_n, ln t(n), ln a(n))` sequence of a
//!   potential at a fixed energy (or of an explicit matrix sequence), with
//!   isotropic steps flagged;
//! * [`summability`] — dyadic convergence diagnostics for the three series
//!   that classify the run: the angle-increment series, the weighted tail
//!   series controlling square-summability of the subordinate solution, and
//!   the inverse-norm series whose divergence rules out any square-summable
//!   solution;
//! * [`u_infinity`] — the limit angle with an extrapolated tail radius,
//!   per-`n` angle tail bounds, and growth/subordinacy records along the run;
//! * [`subordinate_envelope_check`] — signed log margins of the subordinate
//!   solution's squared norm against two envelope right sides: the bare
//!   two-term envelope (no one-step norm factors) and the chained envelope
//!   that keeps them;
//! * [`growth_exponent`] — a least-squares growth exponent of
//!   `ln ||T(n) u_infty||` against a caller-chosen scale function, with
//!   limsup/liminf proxies over the top dyadic block.
//!
//! Angle convention: directions here are `u_theta = (cos theta, sin theta)`
//! with `theta` normalized to `[0, pi)`. The core's `BoundaryAngle` writes
//! initial data as `(u(1), u(0)) = (sin theta, cos theta)`, so the two
//! parametrisations are complementary; convert with
//! [`RuelleResult::subordinate_boundary_angle`].
//!
//! All checks report signed margins instead of asserting: right sides that a
//! trace violates are kept as negative margins, because the measurement is
//! the point.

pub mod bound;
pub mod exponent;
pub mod series;
pub mod subordinate;
pub mod trace;

use speclab_core::CoreError;

pub use bound::{
    subordinate_envelope_check, EnvelopeRow, SubordinateEnvelope, ENVELOPE_MARGIN_FLOOR,
};
pub use exponent::{growth_exponent, ExponentFit};
pub use series::{summability, SeriesDiagnostic, SummabilityReport};
pub use subordinate::{
    tail_bound_violations, u_infinity, u_infinity_from_trace, u_infinity_steps, GrowthRecord,
    RatioRecord, RuelleResult,
};
pub use trace::{
    angle_residual, angle_trace, angle_trace_steps, max_increment_ratio, projective_distance,
    projective_signed, AngleTrace,
};

/// Errors from trace construction, the subordinate-direction build, and the
/// downstream checks.
#[derive(Debug, thiserror::Error)]
pub enum RuelleError {
    #[error("invalid input: {0}")]
    Invalid(String),

    /// The inverse-norm series shows a divergent dyadic tail: no
    /// square-summable solution exists at this energy, so there is no
    /// minimal direction to reconstruct and the construction refuses.
    #[error(
        "inverse-norm series diverges (dyadic tail ratio {tail_ratio:.3}); \
         no square-summable direction exists to single out"
    )]
    NoSquareSummableDirection { tail_ratio: f64 },

    /// Checks that are only meaningful against a converged angle limit
    /// refuse unconverged or angle-degenerate input.
    #[error("{check} refused: {why}")]
    NotConverged { check: &'static str, why: String },

    #[error(transparent)]
    Core(#[from] CoreError),
}
