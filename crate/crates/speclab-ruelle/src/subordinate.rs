//! The strongly subordinate direction `u_infinity`.
//!
//! When the increment series `sum_n a(n+1)^2 / t(n)^2` converges, the angle
//! sequence `theta_n` of [`crate::trace::AngleTrace`] is Cauchy: each step
//! moves by at most `(pi/2) a(n+1)^2 / t(n)^2`, so
//!
//! ```text
//! dist(theta_n, theta_infty) <= (pi/2) sum_{m >= n} a(m+1)^2 / t(m)^2.
//! ```
//!
//! The limit angle singles out the initial direction whose solution is
//! eventually most contracted — the strongly subordinate one. On a
//! finite-length run the limit is estimated by Richardson extrapolation of
//! `theta_L, theta_{L/2}, theta_{L/4}` and the tail of the increment series
//! beyond `L` by geometric extrapolation of its dyadic blocks; the reported
//! `theta_uncertainty` is `(pi/2)` times that tail estimate.
//!
//! Growth records `||T(n) u_infinity||` are reconstructed from the exact
//! decomposition `t(n)^2 sin^2(delta) + t(n)^-2 cos^2(delta)` with
//! `delta = theta_infty - theta_n`, not by pushing a vector through the
//! product: the forward route carries an absolute rounding floor of order
//! `eps * t(n)` that swamps a decaying solution within a few dozen steps,
//! while the reconstruction stays exact until `t(n)^4` overflows the
//! relative precision of `delta` (around `t ~ 3e7`).

use serde::Serialize;
use speclab_core::{log_add_exp, BoundaryAngle, Mat2, Potential};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::series::{increment_log_terms, log_suffix, summability, SummabilityReport};
use crate::trace::{angle_trace, angle_trace_steps, projective_distance, projective_signed, AngleTrace};
use crate::RuelleError;

/// Richardson step ratios outside this window mean the three probe angles do
/// not look like a geometric approach and extrapolation is skipped.
const RICHARDSON_MIN_RATIO: f64 = 0.05;
const RICHARDSON_MAX_RATIO: f64 = 0.95;

/// One reconstructed norm `||T(n) u_infinity||`, stored as `ln`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GrowthRecord {
    pub n: i64,
    pub log_norm: f64,
}

/// One strong-subordinacy ratio `ln (||T(n) u_infinity|| / ||T(n)||)`,
/// recorded at dyadic `n`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RatioRecord {
    pub n: i64,
    pub log_ratio: f64,
}

/// The limiting contracted direction of a transfer product, with the tail
/// bounds that certify it.
#[derive(Debug, Clone, Serialize)]
pub struct RuelleResult {
    /// Estimated limit angle in `[0, pi)`. On an unconverged run this is the
    /// last recorded angle, reported for inspection only.
    pub theta_infty: f64,
    /// Radius around `theta_infty` accounting for the series tail beyond the
    /// run length: `(pi/2)` times the geometric tail estimate. Infinite on
    /// unconverged runs.
    pub theta_uncertainty: f64,
    /// True when the increment series passed its dyadic convergence test and
    /// a tail estimate exists.
    pub converged: bool,
    /// First recorded `n` whose tail bound drops to `pi/4` or less, the
    /// radius within which the limit direction keeps at least half its
    /// squared overlap with `u_theta_n`.
    pub n0: Option<i64>,
    /// `tail_bounds[i]` bounds `dist(theta_n, theta_infty)` for
    /// `n = i + 1`: `(pi/2)` times (in-data increment suffix + tail
    /// estimate). Infinite on unconverged runs.
    pub tail_bounds: Vec<f64>,
    /// `ln ||T(n) u_infinity||` for every recorded `n`.
    pub growth_records: Vec<GrowthRecord>,
    /// `ln (||T(n) u_infinity|| / t(n))` at dyadic `n`; strong subordinacy
    /// shows as a decreasing sequence.
    pub ratio_records: Vec<RatioRecord>,
    /// Dyadic diagnostics of the three underlying series.
    pub summability: SummabilityReport,
}

impl RuelleResult {
    /// The limit direction expressed as a boundary condition for solution
    /// generators: a product angle `theta` (direction `(cos, sin)` acting on
    /// `(u(n+1), u(n))`) corresponds to the boundary angle
    /// `pi/2 - theta` in the `(sin, cos)` initial-data convention.
    pub fn subordinate_boundary_angle(&self) -> BoundaryAngle {
        BoundaryAngle::new(FRAC_PI_2 - self.theta_infty)
    }
}

fn richardson_theta(theta: &[f64]) -> f64 {
    let l = theta.len();
    let last = theta[l - 1];
    if l < 8 {
        return last;
    }
    let d1 = projective_signed(last - theta[l / 2 - 1]);
    let d2 = projective_signed(theta[l / 2 - 1] - theta[l / 4 - 1]);
    if d2 == 0.0 {
        return last;
    }
    let r = d1 / d2;
    if r <= RICHARDSON_MIN_RATIO || r >= RICHARDSON_MAX_RATIO {
        return last;
    }
    (last + d1 * r / (1.0 - r)).rem_euclid(PI)
}

/// Estimate the limiting contracted direction from a recorded angle trace.
///
/// Refuses with [`RuelleError::NoSquareSummableDirection`] if the increment
/// series converged while the inverse-norm series `sum t(n)^-2` shows a
/// non-summable tail — there is then no square-summable solution to single
/// out. (For genuine transfer steps `a(n) >= 1` forces the increment terms
/// to dominate the inverse-norm terms, so this guard cannot fire on data
/// produced by [`angle_trace`]; it protects hand-built traces.)
pub fn u_infinity_from_trace(trace: &AngleTrace) -> Result<RuelleResult, RuelleError> {
    let report = summability(trace)?;
    let l = trace.len();
    let converged = report.increment.converged && report.increment.remainder.is_some();
    if converged && report.inverse_norm.divergent() {
        return Err(RuelleError::NoSquareSummableDirection {
            tail_ratio: report.inverse_norm.tail_ratio.unwrap_or(f64::INFINITY),
        });
    }

    let (theta_infty, theta_uncertainty, tail_bounds) = if converged {
        let theta = richardson_theta(&trace.theta_n);
        let remainder = report.increment.remainder.expect("converged implies a tail estimate");
        let suffix = log_suffix(&increment_log_terms(trace));
        let bounds: Vec<f64> = (0..l)
            .map(|i| {
                let in_data = suffix.get(i).map_or(0.0, |&s| s.exp());
                FRAC_PI_2 * (in_data + remainder)
            })
            .collect();
        (theta, FRAC_PI_2 * remainder, bounds)
    } else {
        (
            trace.theta_n[l - 1],
            f64::INFINITY,
            vec![f64::INFINITY; l],
        )
    };

    let n0 = tail_bounds
        .iter()
        .position(|&b| b <= FRAC_PI_4)
        .map(|i| trace.n_values[i]);

    let growth_records: Vec<GrowthRecord> = (0..l)
        .map(|i| {
            let delta = projective_signed(theta_infty - trace.theta_n[i]);
            let t = trace.t_n_log[i];
            let log_norm_sq = log_add_exp(
                2.0 * t + 2.0 * delta.sin().abs().ln(),
                -2.0 * t + 2.0 * delta.cos().abs().ln(),
            );
            GrowthRecord {
                n: trace.n_values[i],
                log_norm: 0.5 * log_norm_sq,
            }
        })
        .collect();

    let ratio_records: Vec<RatioRecord> = growth_records
        .iter()
        .filter(|g| (g.n as u64).is_power_of_two() || g.n == l as i64)
        .map(|g| RatioRecord {
            n: g.n,
            log_ratio: g.log_norm - trace.t_n_log[(g.n - 1) as usize],
        })
        .collect();

    Ok(RuelleResult {
        theta_infty,
        theta_uncertainty,
        converged,
        n0,
        tail_bounds,
        growth_records,
        ratio_records,
        summability: report,
    })
}

/// Limiting contracted direction of the transfer products of `pot` at
/// energy `e` over sites `1..=l`.
pub fn u_infinity<P: Potential + ?Sized>(
    pot: &P,
    e: f64,
    l: usize,
) -> Result<RuelleResult, RuelleError> {
    u_infinity_from_trace(&angle_trace(pot, e, l)?)
}

/// Limiting contracted direction of an explicit step-matrix sequence.
pub fn u_infinity_steps(steps: &[Mat2]) -> Result<RuelleResult, RuelleError> {
    u_infinity_from_trace(&angle_trace_steps(steps)?)
}

/// Count the recorded steps at or beyond `from_n` whose measured angle sits
/// strictly outside its tail bound. Isotropic entries carry an unmeasured
/// angle and are skipped. No tolerance is applied: the bounds themselves
/// already contain the extrapolated tail.
pub fn tail_bound_violations(
    result: &RuelleResult,
    trace: &AngleTrace,
    from_n: i64,
) -> Result<usize, RuelleError> {
    if !result.converged {
        return Err(RuelleError::NotConverged {
            check: "tail_bound_violations",
            why: "tail bounds are infinite on an unconverged run".into(),
        });
    }
    if result.tail_bounds.len() != trace.len() {
        return Err(RuelleError::Invalid(format!(
            "result covers {} steps but the trace has {}",
            result.tail_bounds.len(),
            trace.len()
        )));
    }
    Ok((0..trace.len())
        .filter(|&i| trace.n_values[i] >= from_n && !trace.isotropic[i])
        .filter(|&i| {
            projective_distance(trace.theta_n[i], result.theta_infty) > result.tail_bounds[i]
        })
        .count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use speclab_potentials::PotentialSpec;

    #[test]
    fn the_edge_free_subordinate_direction_is_the_constant_solution() {
        // V = 0, E = 2: the contracted angles are pi/4 + 1/(2n) + O(1/n^2),
        // the limit direction (1, 1)/sqrt(2) generates the constant solution
        // with ||T(n) u|| = 1 exactly.
        let pot = PotentialSpec::zero().compile().unwrap();
        let trace = angle_trace(&pot, 2.0, 8192).unwrap();
        let result = u_infinity_from_trace(&trace).unwrap();
        assert!(result.converged);
        assert!((result.theta_infty - FRAC_PI_4).abs() <= 1e-3);
        assert!(result.theta_uncertainty > 0.0 && result.theta_uncertainty < 0.01);
        let n0 = result.n0.expect("tail bounds shrink below pi/4");
        assert!(n0 <= 10, "n0 = {n0}");
        for g in &result.growth_records {
            assert!(
                g.log_norm.abs() <= 0.7,
                "||T({}) u|| drifted: log {}",
                g.n,
                g.log_norm
            );
        }
        for pair in result.ratio_records.windows(2) {
            assert!(pair[1].log_ratio < pair[0].log_ratio);
        }
        let last = result.ratio_records.last().unwrap();
        assert!(last.log_ratio <= -8.1, "final log ratio {}", last.log_ratio);
        assert_eq!(tail_bound_violations(&result, &trace, 1).unwrap(), 0);
        let bc = result.subordinate_boundary_angle();
        assert!(bc.dist(&BoundaryAngle::new(FRAC_PI_4)) <= 1e-3);
    }

    #[test]
    fn the_band_center_run_is_flagged_not_converged() {
        // V = 0, E = 0: every product is a rotation (up to period four), all
        // three series diverge. The run is flagged, not refused: with the
        // increment series divergent there is no candidate angle whose
        // square-summability the inverse-norm series could contradict.
        let pot = PotentialSpec::zero().compile().unwrap();
        let trace = angle_trace(&pot, 0.0, 512).unwrap();
        let result = u_infinity_from_trace(&trace).unwrap();
        assert!(!result.converged);
        assert!(result.theta_uncertainty.is_infinite());
        assert!(result.n0.is_none());
        assert!(result.tail_bounds.iter().all(|b| b.is_infinite()));
        for g in &result.growth_records {
            assert!(g.log_norm.abs() <= 1e-6);
        }
        assert!(result.summability.inverse_norm.divergent());
        let err = tail_bound_violations(&result, &trace, 1).unwrap_err();
        let refused = matches!(err, RuelleError::NotConverged { .. });
        assert!(refused, "{err}");
    }

    #[test]
    fn the_decaying_potential_run_pins_the_frozen_direction() {
        // V(n) = 0.2 n^-2 at E = 2. Frozen values from this implementation;
        // the independently coded prototype agrees on theta to 1.5e-11 and
        // on the increment total to 6e-5.
        let pot = PotentialSpec::power_decay(0.2, 2.0).compile().unwrap();
        let trace = angle_trace(&pot, 2.0, 100_000).unwrap();
        let result = u_infinity_from_trace(&trace).unwrap();
        assert!(result.converged);
        let theta_l = *trace.theta_n.last().unwrap();
        assert!((theta_l - 0.5426881521682496).abs() <= 1e-12, "theta_L {theta_l:.16}");
        assert!(
            (result.theta_infty - 0.5408378782920823).abs() <= 1e-12,
            "theta_infty {:.16}",
            result.theta_infty
        );
        let total = result.summability.increment.total;
        assert!((total - 2.5706).abs() <= 2e-4, "increment total {total:.6}");
        assert!(
            projective_distance(theta_l, result.theta_infty) <= result.theta_uncertainty,
            "last angle outside the reported uncertainty"
        );
        assert!(result.n0.is_some());
        assert_eq!(tail_bound_violations(&result, &trace, 1).unwrap(), 0);
        for pair in result.ratio_records.windows(2) {
            assert!(pair[1].log_ratio < pair[0].log_ratio);
        }
    }

    #[test]
    fn a_stalled_angle_sequence_keeps_the_last_angle() {
        // A repeated diagonal stretch pins the angle bitwise, so the
        // Richardson differences vanish and extrapolation falls back to the
        // recorded angle.
        let step = Mat2::new(2.0, 0.0, 0.0, 0.5);
        let steps = vec![step; 64];
        let result = u_infinity_steps(&steps).unwrap();
        assert!(result.converged);
        assert_eq!(result.theta_infty, FRAC_PI_2);
        assert!(result.theta_uncertainty > 0.0);
        assert!(result.n0.is_some());
        let trace = angle_trace_steps(&steps).unwrap();
        assert_eq!(tail_bound_violations(&result, &trace, 1).unwrap(), 0);
    }

    #[test]
    fn a_summable_angle_with_divergent_inverse_norms_is_refused() {
        // Hand-built trace: increment terms summable while every product
        // norm is 1. Real transfer steps cannot produce this (one-step norms
        // are at least 1), but the guard protects fabricated inputs.
        let l = 64usize;
        let trace = AngleTrace {
            n_values: (1..=l as i64).collect(),
            theta_n: vec![0.3; l],
            t_n_log: vec![0.0; l],
            a_n_log: (0..l).map(|j| -(j as f64)).collect(),
            isotropic: vec![false; l],
        };
        let err = u_infinity_from_trace(&trace).unwrap_err();
        let refused = matches!(err, RuelleError::NoSquareSummableDirection { .. });
        assert!(refused, "{err}");
    }
}
