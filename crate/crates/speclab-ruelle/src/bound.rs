//! Per-step envelopes for the subordinate solution's norm.
//!
//! For the limit direction `u_infinity` the reconstruction identity gives
//! `||T(n) u||^2 = t(n)^2 sin^2(delta_n) + t(n)^-2 cos^2(delta_n)` with
//! `delta_n = theta_infty - theta_n`. Bounding `|delta_n|` produces two
//! closed upper envelopes:
//!
//! * the **bare** envelope replaces `|delta_n|` by
//!   `(pi/2) sum_{m >= n} t(m)^-2`, the tail of the inverse-norm series
//!   alone;
//! * the **chained** envelope replaces it by the recorded tail bound
//!   `(pi/2) sum_{m >= n} a(m+1)^2 / t(m)^2`, which carries the one-step
//!   norms.
//!
//! Both right-hand sides are evaluated here and compared with the
//! reconstructed left side, per step, in log space. The chained envelope is
//! the one the angle increments actually obey; the bare one omits the
//! `a(m+1)^2` factors and can sit *below* the truth whenever the one-step
//! norms are materially larger than 1 — for the free potential at the band
//! edge the two sides differ by `a^4 ~ 34` per term and the bare margin is
//! genuinely negative. The check therefore reports signed margins instead of
//! asserting: a negative bare margin on a run whose chained margin is
//! comfortably positive is the measured size of those missing factors.

use serde::Serialize;
use speclab_core::log_add_exp;
use std::f64::consts::FRAC_PI_2;

use crate::series::log_suffix;
use crate::subordinate::RuelleResult;
use crate::trace::AngleTrace;
use crate::RuelleError;

/// Margin (in log units) below which an envelope is declared violated;
/// absorbs rounding in the log-space comparison.
pub const ENVELOPE_MARGIN_FLOOR: f64 = -1e-6;

/// One step of the envelope comparison, all entries in `ln` units.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnvelopeRow {
    pub n: i64,
    /// `2 ln ||T(n) u_infinity||`, the reconstructed left side.
    pub subordinate_log_sq: f64,
    /// `ln` of `t^-2 + (pi^2/4) t^2 (sum_{m>=n} t(m)^-2)^2`.
    pub bare_rhs_log: f64,
    /// `bare_rhs_log - subordinate_log_sq`; positive where the bare
    /// envelope holds.
    pub bare_margin_log: f64,
    /// `ln` of `t^-2 + t^2 tail_bound(n)^2`.
    pub chained_rhs_log: f64,
    /// `chained_rhs_log - subordinate_log_sq`.
    pub chained_margin_log: f64,
}

/// Signed per-step comparison of the subordinate solution against its two
/// envelopes.
#[derive(Debug, Clone, Serialize)]
pub struct SubordinateEnvelope {
    pub rows: Vec<EnvelopeRow>,
    /// True when every bare margin clears [`ENVELOPE_MARGIN_FLOOR`].
    pub bare_holds: bool,
    /// True when every chained margin clears [`ENVELOPE_MARGIN_FLOOR`].
    pub chained_holds: bool,
    pub bare_worst_margin: f64,
    pub bare_worst_n: i64,
    pub chained_worst_margin: f64,
    pub chained_worst_n: i64,
    /// Geometric tail estimate of the inverse-norm series beyond the run,
    /// added into every bare suffix (zero when the series gave none).
    pub inverse_tail_remainder: f64,
    pub margin_floor_log: f64,
}

impl SubordinateEnvelope {
    /// Worst (bare, chained) margins over rows with `lo <= n <= hi`; `None`
    /// when the window is empty.
    pub fn worst_in(&self, lo: i64, hi: i64) -> Option<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.n >= lo && r.n <= hi)
            .fold(None, |acc, r| {
                let (b, c) = acc.unwrap_or((f64::INFINITY, f64::INFINITY));
                Some((b.min(r.bare_margin_log), c.min(r.chained_margin_log)))
            })
    }
}

/// Compare the reconstructed subordinate norms with the bare and chained
/// envelopes, step by step.
///
/// Refuses on unconverged results (the tail bounds are infinite) and on
/// traces with isotropic entries (their recorded angle is carried, not
/// measured, so the left side is not trustworthy there).
pub fn subordinate_envelope_check(
    result: &RuelleResult,
    trace: &AngleTrace,
) -> Result<SubordinateEnvelope, RuelleError> {
    if !result.converged {
        return Err(RuelleError::NotConverged {
            check: "subordinate_envelope_check",
            why: "no finite tail bounds to build the envelopes from".into(),
        });
    }
    let l = trace.len();
    if result.tail_bounds.len() != l || result.growth_records.len() != l {
        return Err(RuelleError::Invalid(format!(
            "result covers {} steps but the trace has {}",
            result.tail_bounds.len(),
            l
        )));
    }
    if let Some(i) = trace.isotropic.iter().position(|&b| b) {
        return Err(RuelleError::NotConverged {
            check: "subordinate_envelope_check",
            why: format!(
                "step {} is isotropic; its angle is carried, not measured",
                trace.n_values[i]
            ),
        });
    }

    let remainder = result
        .summability
        .inverse_norm
        .remainder
        .unwrap_or(0.0);
    let inv_logs: Vec<f64> = trace.t_n_log.iter().map(|&t| -2.0 * t).collect();
    let suffix_inv = log_suffix(&inv_logs);

    let mut rows = Vec::with_capacity(l);
    let mut bare_worst = (f64::INFINITY, 0i64);
    let mut chained_worst = (f64::INFINITY, 0i64);
    for i in 0..l {
        let t = trace.t_n_log[i];
        let lhs = 2.0 * result.growth_records[i].log_norm;
        let s = suffix_inv[i].exp() + remainder;
        let bare_rhs = log_add_exp(
            -2.0 * t,
            (FRAC_PI_2 * FRAC_PI_2).ln() + 2.0 * t + 2.0 * s.ln(),
        );
        let chained_rhs = log_add_exp(-2.0 * t, 2.0 * t + 2.0 * result.tail_bounds[i].ln());
        let row = EnvelopeRow {
            n: trace.n_values[i],
            subordinate_log_sq: lhs,
            bare_rhs_log: bare_rhs,
            bare_margin_log: bare_rhs - lhs,
            chained_rhs_log: chained_rhs,
            chained_margin_log: chained_rhs - lhs,
        };
        if row.bare_margin_log < bare_worst.0 {
            bare_worst = (row.bare_margin_log, row.n);
        }
        if row.chained_margin_log < chained_worst.0 {
            chained_worst = (row.chained_margin_log, row.n);
        }
        rows.push(row);
    }

    Ok(SubordinateEnvelope {
        rows,
        bare_holds: bare_worst.0 >= ENVELOPE_MARGIN_FLOOR,
        chained_holds: chained_worst.0 >= ENVELOPE_MARGIN_FLOOR,
        bare_worst_margin: bare_worst.0,
        bare_worst_n: bare_worst.1,
        chained_worst_margin: chained_worst.0,
        chained_worst_n: chained_worst.1,
        inverse_tail_remainder: remainder,
        margin_floor_log: ENVELOPE_MARGIN_FLOOR,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subordinate::u_infinity_from_trace;
    use crate::trace::angle_trace;
    use speclab_potentials::PotentialSpec;

    #[test]
    fn the_edge_free_envelope_shows_the_missing_step_norm_factors() {
        // V = 0, E = 2: ||T(n) u_infinity|| = 1 exactly, t(n) ~ 2n, and the
        // one-step norm is a = 1 + sqrt(2). The chained right side tends to
        // 1 + (pi/2)^2 a^4 / 4 while the bare one tends to (pi/2)^2 / 4
        // ~ 0.617 < 1: the bare envelope undercounts by exactly the a^4
        // factor its derivation drops, and its margin is honestly negative
        // even for the free potential.
        let pot = PotentialSpec::zero().compile().unwrap();
        let trace = angle_trace(&pot, 2.0, 4096).unwrap();
        let result = u_infinity_from_trace(&trace).unwrap();
        let env = subordinate_envelope_check(&result, &trace).unwrap();
        assert!(env.chained_holds);
        assert!(
            env.rows.iter().all(|r| r.chained_margin_log >= 0.5),
            "worst chained margin {}",
            env.chained_worst_margin
        );
        assert!(!env.bare_holds);
        assert!(
            env.bare_worst_margin > -0.6 && env.bare_worst_margin < -0.3,
            "bare worst margin {}",
            env.bare_worst_margin
        );
    }

    #[test]
    fn the_decaying_potential_envelope_keeps_chained_margins_positive() {
        // V(n) = 0.2 n^-2 at E = 2, the frozen run. Chained margins stay
        // clearly positive over the full window; bare margins are negative
        // and grow more negative with n as the dropped step-norm factors
        // accumulate.
        let pot = PotentialSpec::power_decay(0.2, 2.0).compile().unwrap();
        let trace = angle_trace(&pot, 2.0, 100_000).unwrap();
        let result = u_infinity_from_trace(&trace).unwrap();
        let env = subordinate_envelope_check(&result, &trace).unwrap();
        assert!(env.chained_holds);
        assert!(
            env.chained_worst_margin >= 0.9,
            "chained worst margin {}",
            env.chained_worst_margin
        );
        assert!(!env.bare_holds);
        assert!(
            env.bare_worst_margin <= -2.0,
            "bare worst margin {}",
            env.bare_worst_margin
        );
        let (bare_w, chained_w) = env.worst_in(100, 10_000).unwrap();
        assert!(chained_w >= 0.9, "windowed chained margin {chained_w}");
        assert!(bare_w <= -2.0, "windowed bare margin {bare_w}");
        assert!(env.worst_in(200_000, 300_000).is_none());
    }

    #[test]
    fn unconverged_or_mismatched_inputs_are_refused() {
        let pot = PotentialSpec::zero().compile().unwrap();
        let trace = angle_trace(&pot, 0.0, 256).unwrap();
        let result = u_infinity_from_trace(&trace).unwrap();
        let err = subordinate_envelope_check(&result, &trace).unwrap_err();
        let refused = matches!(err, RuelleError::NotConverged { .. });
        assert!(refused, "{err}");

        let trace = angle_trace(&pot, 2.0, 512).unwrap();
        let result = u_infinity_from_trace(&trace).unwrap();
        let short = angle_trace(&pot, 2.0, 100).unwrap();
        let err = subordinate_envelope_check(&result, &short).unwrap_err();
        let mismatched = matches!(err, RuelleError::Invalid(_));
        assert!(mismatched, "{err}");
    }

    #[test]
    fn envelope_reports_serialize_with_their_margins() {
        let pot = PotentialSpec::zero().compile().unwrap();
        let trace = angle_trace(&pot, 2.0, 64).unwrap();
        let result = u_infinity_from_trace(&trace).unwrap();
        let env = subordinate_envelope_check(&result, &trace).unwrap();
        let json = serde_json::to_value(&env).unwrap();
        assert!(json["rows"].as_array().unwrap().len() == 64);
        assert!(json["bare_worst_margin"].is_number());
        assert!(json["chained_worst_margin"].is_number());
        assert!(json["rows"][0]["chained_margin_log"].is_number());
    }
}
