//! Singular-angle traces of transfer products.
//!
//! For a unimodular product `T(n)` the singular values are `t(n)` and
//! `1/t(n)`; the right singular direction of the smaller one is the input
//! direction most contracted by `T(n)`. Writing it as `u_theta = (cos theta,
//! sin theta)` with `theta` in `[0, pi)` defines the angle sequence
//! `theta_n`, and every input norm decomposes exactly as
//!
//! ```text
//! ||T(n) u_phi||^2 = t(n)^2 sin^2(phi - theta_n) + t(n)^-2 cos^2(phi - theta_n).
//! ```
//!
//! The per-step angle motion obeys
//! `dist(theta_n, theta_n+1) <= (pi/2) a(n+1)^2 / t(n)^2` where `a(n+1)` is
//! the one-step norm; summability of the right side is what makes the angles
//! Cauchy (see [`crate::subordinate`]).
//!
//! Angles are measured from the de-scaled stored matrix, so they are exact
//! to rounding error at any product length. The *residual* certificate
//! `|| |T| u_theta - t^-1 u_theta || <= 1e-8 t^-1`, by contrast, is only
//! resolvable in double precision while `t(n)^2 * eps <= 1e-8`, i.e.
//! `t(n) <~ 7e3`; [`angle_residual`] documents and measures exactly that
//! de-scaled quantity.

use serde::Serialize;
use speclab_core::{step, Mat2, Potential, ScaledProduct};
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use crate::RuelleError;

/// Determinant tolerance for accepting an explicit step matrix as
/// unimodular, relative to its squared Frobenius norm.
const UNIMODULAR_TOL: f64 = 1e-9;

/// The `(theta_n, ln t(n), ln a(n))` sequence of a transfer product.
#[derive(Debug, Clone, Serialize)]
pub struct AngleTrace {
    /// Product lengths, `1..=L`.
    pub n_values: Vec<i64>,
    /// Most-contracted input angle of `T(n)`, in `[0, pi)`. At isotropic
    /// steps the previous angle is carried forward (0 before the first
    /// anisotropic product).
    pub theta_n: Vec<f64>,
    /// `ln t(n) = ln ||T(n)||`.
    pub t_n_log: Vec<f64>,
    /// `ln a(n) = ln ||A(n)||`, the one-step norms.
    pub a_n_log: Vec<f64>,
    /// True where `T(n)` is numerically isotropic (singular values within
    /// `1e-12` relative, which for a unimodular product means
    /// `t(n) - 1 <~ 2.5e-13`) and `theta_n` is carried, not measured.
    pub isotropic: Vec<bool>,
}

impl AngleTrace {
    pub fn len(&self) -> usize {
        self.n_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n_values.is_empty()
    }

    /// CSV export with header `n,theta_n,log_t_n`, 17 significant digits.
    pub fn csv(&self) -> String {
        let mut out = String::with_capacity(32 + 56 * self.n_values.len());
        out.push_str("n,theta_n,log_t_n\n");
        for ((&n, &theta), &t) in self.n_values.iter().zip(&self.theta_n).zip(&self.t_n_log) {
            let _ = writeln!(out, "{n},{theta:.16e},{t:.16e}");
        }
        out
    }
}

/// Signed representative of an angle difference on the projective circle:
/// `d` reduced mod `pi` into `[-pi/2, pi/2]`.
pub fn projective_signed(d: f64) -> f64 {
    d - PI * (d / PI).round()
}

/// Distance between two direction angles, i.e. mod `pi`, in `[0, pi/2]`.
pub fn projective_distance(a: f64, b: f64) -> f64 {
    projective_signed(a - b).abs()
}

fn direction_angle(x: f64, y: f64) -> f64 {
    // The core canonicalises singular directions to the closed right
    // half-plane, so atan2 lands in (-pi/2, pi/2]; fold into [0, pi).
    let th = y.atan2(x);
    if th < 0.0 {
        th + PI
    } else {
        th
    }
}

fn build_trace<I>(steps: I) -> Result<AngleTrace, RuelleError>
where
    I: Iterator<Item = Result<Mat2, RuelleError>>,
{
    let (lo, _) = steps.size_hint();
    let mut trace = AngleTrace {
        n_values: Vec::with_capacity(lo),
        theta_n: Vec::with_capacity(lo),
        t_n_log: Vec::with_capacity(lo),
        a_n_log: Vec::with_capacity(lo),
        isotropic: Vec::with_capacity(lo),
    };
    let mut prod = ScaledProduct::identity();
    let mut theta_prev = 0.0_f64;
    for (i, item) in steps.enumerate() {
        let a = item?;
        let d = a.det();
        if !d.is_finite() || (d - 1.0).abs() > UNIMODULAR_TOL * a.frob_sq().max(1.0) {
            return Err(RuelleError::Invalid(format!(
                "step {} is not unimodular (det = {d:.6e})",
                i + 1
            )));
        }
        prod.push_left(&a);
        let (theta, iso) = match prod.mat.smallest_singular_direction() {
            Some((x, y)) => (direction_angle(x, y), false),
            None => (theta_prev, true),
        };
        theta_prev = theta;
        trace.n_values.push(i as i64 + 1);
        trace.theta_n.push(theta);
        trace.t_n_log.push(prod.log_opnorm());
        trace.a_n_log.push(a.opnorm().ln());
        trace.isotropic.push(iso);
    }
    if trace.is_empty() {
        return Err(RuelleError::Invalid("empty step sequence".into()));
    }
    Ok(trace)
}

/// Angle trace of the transfer products `T(n) = A(n) ... A(1)` of `pot` at
/// energy `e`, over sites `1..=l`.
pub fn angle_trace<P: Potential + ?Sized>(
    pot: &P,
    e: f64,
    l: usize,
) -> Result<AngleTrace, RuelleError> {
    if !e.is_finite() {
        return Err(RuelleError::Invalid(format!("energy must be finite, got {e}")));
    }
    if l == 0 {
        return Err(RuelleError::Invalid("angle trace needs l >= 1".into()));
    }
    build_trace((1..=l as i64).map(|n| {
        let v = pot.eval(n)?;
        Ok(step(v, e))
    }))
}

/// Angle trace of an explicit sequence of unimodular step matrices (the
/// product grows on the left: `T(n) = steps[n-1] ... steps[0]`).
pub fn angle_trace_steps(steps: &[Mat2]) -> Result<AngleTrace, RuelleError> {
    build_trace(steps.iter().map(|m| Ok(*m)))
}

/// Largest ratio of a measured angle increment to its per-step budget
/// `(pi/2) a(n+1)^2 / t(n)^2`, over adjacent non-isotropic pairs, with the
/// `n` where it occurs. `None` when no pair qualifies.
///
/// The ratio is meaningful while the budget stays above the angle-resolution
/// floor (about `1e-13`); on strongly hyperbolic traces the budget collapses
/// below rounding within a few dozen steps and the true increments are
/// unresolvable, so callers should restrict to the regime they can measure.
pub fn max_increment_ratio(trace: &AngleTrace) -> Option<(i64, f64)> {
    let mut worst: Option<(i64, f64)> = None;
    for i in 0..trace.len().saturating_sub(1) {
        if trace.isotropic[i] || trace.isotropic[i + 1] {
            continue;
        }
        let budget = FRAC_PI_2 * (2.0 * (trace.a_n_log[i + 1] - trace.t_n_log[i])).exp();
        let d = projective_distance(trace.theta_n[i], trace.theta_n[i + 1]);
        let ratio = d / budget;
        if worst.is_none_or(|(_, w)| ratio > w) {
            worst = Some((trace.n_values[i], ratio));
        }
    }
    worst
}

/// De-scaled relative residual of the polar eigen-relation
/// `|M| u_theta = sigma_min(M) u_theta`: returns
/// `|| |M| u - sigma_min u || / sigma_min` for the stored (renormalized)
/// matrix of a product, which is scale-free. Uses the closed form
/// `|M| = (M^T M + sigma_max sigma_min I) / (sigma_max + sigma_min)`.
///
/// Resolvable in double precision only while `sigma_max^2 * eps` stays below
/// the target residual; beyond that the reported value measures rounding, not
/// the angle.
pub fn angle_residual(mat: &Mat2, theta: f64) -> f64 {
    let g11 = mat.a * mat.a + mat.c * mat.c;
    let g22 = mat.b * mat.b + mat.d * mat.d;
    let g12 = mat.a * mat.b + mat.c * mat.d;
    let smax = mat.opnorm();
    let smin = mat.min_singular();
    if smin == 0.0 || !smin.is_finite() {
        return f64::INFINITY;
    }
    let u = (theta.cos(), theta.sin());
    let gu = (g11 * u.0 + g12 * u.1, g12 * u.0 + g22 * u.1);
    let denom = smax + smin;
    let cross = smax * smin;
    let absu = ((gu.0 + cross * u.0) / denom, (gu.1 + cross * u.1) / denom);
    let r = (absu.0 - smin * u.0, absu.1 - smin * u.1);
    r.0.hypot(r.1) / smin
}
