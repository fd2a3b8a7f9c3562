//! Two quantitative inequalities tying solutions and spectral data to the
//! Cesàro transfer average.
//!
//! * The *ratio bound*: the cumulative vector-norm energy of a boundary
//!   solution over that of its orthogonal partner never exceeds `G_L^2`.
//! * The *Weyl bound*: the smoothed boundary density `Im m(E + i/L)` is
//!   controlled by `(5 + sqrt(24))` times the Cesàro average over the
//!   matching window, with the smoothing scale coupled to the length as
//!   `eps = 1/L` exactly.
//!
//! Both sides of each inequality are reported so sweeps can record margins,
//! not just booleans. Right-hand sides are kept in log scale — they reach
//! `e^{2 gamma L}` on hyperbolic energies where the bound is trivially true
//! but not representable linearly.

use num_complex::Complex64;
use serde::Serialize;
use speclab_core::{solution, step, BoundaryAngle, LogSumAcc, Potential, ScaledProduct};
use speclab_oracle::{m_function, Bc};

use crate::DiagnosticsError;

/// `lhs <= rhs` check with both sides in log scale.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RatioBound {
    pub energy: f64,
    pub theta: f64,
    pub l: i64,
    /// `ln` of the solution-energy ratio.
    pub log_lhs: f64,
    /// `ln G_L^2`.
    pub log_rhs: f64,
}

impl RatioBound {
    /// Does `lhs <= rhs (1 + rel_slack)` hold?
    pub fn holds(&self, rel_slack: f64) -> bool {
        self.log_lhs <= self.log_rhs + rel_slack.ln_1p()
    }

    /// `ln(rhs) - ln(lhs)`; nonnegative when the bound holds.
    pub fn log_margin(&self) -> f64 {
        self.log_rhs - self.log_lhs
    }
}

/// Check that the cumulative solution-energy ratio at angle `theta` is
/// bounded by the square of the Cesàro average at length `l`.
pub fn cesaro_ratio_bound<P: Potential>(
    pot: &P,
    e: f64,
    theta: BoundaryAngle,
    l: i64,
) -> Result<RatioBound, DiagnosticsError> {
    if l < 1 {
        return Err(DiagnosticsError::Invalid(format!(
            "ratio bound needs L >= 1, got {l}"
        )));
    }
    let u = solution(pot, e, theta, l)?;
    let v = solution(pot, e, theta.orthogonal(), l)?;
    let mut num = LogSumAcc::new();
    let mut den = LogSumAcc::new();
    let mut prod = ScaledProduct::identity();
    let mut avg = LogSumAcc::new();
    for n in 1..=l {
        num.add_log(u.log_norm_sq(n));
        den.add_log(v.log_norm_sq(n));
        prod.push_left(&step(pot.eval(n)?, e));
        avg.add_log(2.0 * prod.log_opnorm());
    }
    let log_g = avg.log_total() - (l as f64).ln();
    Ok(RatioBound {
        energy: e,
        theta: theta.radians(),
        l,
        log_lhs: num.log_total() - den.log_total(),
        log_rhs: 2.0 * log_g,
    })
}

/// `Im m(E + i/L) <= (5 + sqrt(24)) [L^{-1} sum_{n=0}^{L+1} ||T_E(n)||^2]`
/// with both sides reported; the left side is a plain real, the right side
/// is kept in log scale.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WeylBound {
    pub energy: f64,
    pub l: i64,
    /// `Im m(E + i/L)` (Dirichlet boundary condition).
    pub lhs: f64,
    /// `ln` of the right-hand side.
    pub log_rhs: f64,
}

impl WeylBound {
    /// Does `lhs <= rhs + tol` hold? An overflowing right-hand side
    /// evaluates to `+inf`, i.e. the bound holds trivially — which is the
    /// mathematically correct reading on strongly hyperbolic energies.
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.log_rhs.exp() + tol
    }
}

/// Evaluate the smoothed-density bound at length `l`, smearing coupled as
/// `eps = 1/L`. The sum includes the empty product at `n = 0` (norm 1) and
/// runs through `n = L + 1`, matching the window the bound pairs with the
/// smoothing scale.
pub fn weyl_cesaro_bound<P: Potential>(
    pot: &P,
    e: f64,
    l: i64,
) -> Result<WeylBound, DiagnosticsError> {
    if l < 1 {
        return Err(DiagnosticsError::Invalid(format!(
            "weyl bound needs L >= 1, got {l}"
        )));
    }
    let z = Complex64::new(e, 1.0 / l as f64);
    let m = m_function(pot, z, Bc::Dirichlet)?;
    let mut acc = LogSumAcc::new();
    acc.add_log(0.0); // n = 0: empty product, norm exactly 1
    let mut prod = ScaledProduct::identity();
    for n in 1..=l + 1 {
        prod.push_left(&step(pot.eval(n)?, e));
        acc.add_log(2.0 * prod.log_opnorm());
    }
    let constant = 5.0 + 24.0f64.sqrt();
    Ok(WeylBound {
        energy: e,
        l,
        lhs: m.im,
        log_rhs: constant.ln() + acc.log_total() - (l as f64).ln(),
    })
}
