//! Dyadic-block convergence diagnostics for the three series that govern
//! the strongly subordinate direction:
//!
//! * the **increment series** `sum_n a(n+1)^2 / t(n)^2`, whose convergence
//!   makes the angle sequence Cauchy;
//! * the **l2 criterion** `sum_m t(m)^2 (sum_{n>=m} a(n+1)^2/t(n)^2)^2`,
//!   whose convergence makes the subordinate solution square-summable;
//! * the **inverse-norm series** `sum_n t(n)^-2`, whose divergence would
//!   contradict the existence of any square-summable direction.
//!
//! Each series is summed in log space and split into dyadic blocks from the
//! top: block 0 holds the terms with index in `(len/2, len]`, block 1 those
//! in `(len/4, len/2]`, and so on. A power-law tail makes the block sums
//! geometric, so the ratio of the top two blocks estimates the tail and the
//! geometric extrapolation `B0 * r / (1 - r)` is exact for pure power laws.

use serde::Serialize;
use speclab_core::{log_add_exp, LogSumAcc};

use crate::trace::AngleTrace;
use crate::RuelleError;

/// A series is declared converged when its top dyadic block carries at most
/// this fraction of the total.
pub const CONVERGED_FRACTION: f64 = 1e-3;

/// A top-block ratio at or above this is treated as a non-summable tail and
/// no remainder is extrapolated.
pub const DIVERGENT_TAIL_RATIO: f64 = 0.97;

/// Convergence diagnostic of one positive series, summed to the trace length.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesDiagnostic {
    /// `ln` of the partial sum.
    pub log_total: f64,
    /// The partial sum itself (may overflow to infinity; `log_total` never
    /// does).
    pub total: f64,
    /// `ln` of the dyadic block sums, outermost block first.
    pub log_blocks: Vec<f64>,
    /// Ratio of the top two block sums, when both exist.
    pub tail_ratio: Option<f64>,
    /// Top block at most [`CONVERGED_FRACTION`] of the total.
    pub converged: bool,
    /// Geometric tail estimate `B0 r / (1 - r)`, absent when the tail ratio
    /// is missing or at least [`DIVERGENT_TAIL_RATIO`].
    pub remainder: Option<f64>,
}

impl SeriesDiagnostic {
    /// Assemble the diagnostic from `ln`-terms, indexed from the first term.
    pub fn from_log_terms(log_terms: &[f64]) -> Self {
        let mut acc = LogSumAcc::new();
        for &t in log_terms {
            acc.add_log(t);
        }
        let log_total = acc.log_total();

        let mut log_blocks = Vec::new();
        let mut hi = log_terms.len();
        while hi > 0 {
            let lo = hi / 2;
            let mut block = LogSumAcc::new();
            for &t in &log_terms[lo..hi] {
                block.add_log(t);
            }
            log_blocks.push(block.log_total());
            hi = lo;
        }

        let tail_ratio = (log_blocks.len() >= 2
            && log_blocks[0].is_finite()
            && log_blocks[1].is_finite())
        .then(|| (log_blocks[0] - log_blocks[1]).exp());
        let converged = log_total.is_finite()
            && !log_blocks.is_empty()
            && log_blocks[0] <= CONVERGED_FRACTION.ln() + log_total;
        let remainder = tail_ratio
            .filter(|&r| r < DIVERGENT_TAIL_RATIO)
            .map(|r| log_blocks[0].exp() * r / (1.0 - r));

        SeriesDiagnostic {
            log_total,
            total: log_total.exp(),
            log_blocks,
            tail_ratio,
            converged,
            remainder,
        }
    }

    /// Assemble the diagnostic from plain positive terms.
    pub fn from_terms(terms: &[f64]) -> Self {
        let logs: Vec<f64> = terms.iter().map(|&t| t.ln()).collect();
        Self::from_log_terms(&logs)
    }

    /// True when the top blocks have stopped shrinking: the tail ratio is at
    /// least [`DIVERGENT_TAIL_RATIO`] (or could not be formed while the
    /// total is infinite).
    pub fn divergent(&self) -> bool {
        match self.tail_ratio {
            Some(r) => r >= DIVERGENT_TAIL_RATIO,
            None => !self.log_total.is_finite(),
        }
    }
}

/// The three series diagnostics of one angle trace.
#[derive(Debug, Clone, Serialize)]
pub struct SummabilityReport {
    /// `sum_n a(n+1)^2 / t(n)^2`.
    pub increment: SeriesDiagnostic,
    /// `sum_m t(m)^2 (sum_{n>=m} a(n+1)^2 / t(n)^2)^2`, with the inner
    /// suffixes corrected by the increment series' tail estimate. Reported
    /// as block-free divergence when the increment tail is not summable
    /// (every true suffix is then infinite).
    pub l2_criterion: SeriesDiagnostic,
    /// `sum_n t(n)^-2`.
    pub inverse_norm: SeriesDiagnostic,
}

/// `ln` of the increment terms `a(n+1)^2 / t(n)^2` for `n = 1..l-1`
/// (0-based: entry `j` pairs `a_n_log[j+1]` with `t_n_log[j]`).
pub(crate) fn increment_log_terms(trace: &AngleTrace) -> Vec<f64> {
    (0..trace.len() - 1)
        .map(|j| 2.0 * (trace.a_n_log[j + 1] - trace.t_n_log[j]))
        .collect()
}

/// Log-space suffix sums: `out[i] = ln sum_{j >= i} exp(log_terms[j])`.
pub(crate) fn log_suffix(log_terms: &[f64]) -> Vec<f64> {
    let mut out = vec![f64::NEG_INFINITY; log_terms.len()];
    let mut acc = f64::NEG_INFINITY;
    for (i, &t) in log_terms.iter().enumerate().rev() {
        acc = log_add_exp(acc, t);
        out[i] = acc;
    }
    out
}

/// Dyadic convergence diagnostics for the increment, l2-criterion, and
/// inverse-norm series of a trace.
///
/// The l2 terms use tail-corrected suffixes: the in-window increment suffix
/// plus the increment series' extrapolated remainder. Without the
/// correction every suffix near the window end is artificially small and
/// the top l2 blocks decay no matter what the true series does. When the
/// increment tail is not summable there is no finite correction — every
/// true suffix is infinite — and the l2 diagnostic reports plain divergence
/// with no blocks.
pub fn summability(trace: &AngleTrace) -> Result<SummabilityReport, RuelleError> {
    if trace.len() < 2 {
        return Err(RuelleError::Invalid(
            "summability needs a trace of length >= 2".into(),
        ));
    }
    let inc = increment_log_terms(trace);
    let increment = SeriesDiagnostic::from_log_terms(&inc);
    let l2_criterion = match increment.remainder {
        Some(rem) => {
            let suffix = log_suffix(&inc);
            let l2: Vec<f64> = (0..inc.len())
                .map(|j| 2.0 * trace.t_n_log[j] + 2.0 * (suffix[j].exp() + rem).ln())
                .collect();
            SeriesDiagnostic::from_log_terms(&l2)
        }
        None => SeriesDiagnostic {
            log_total: f64::INFINITY,
            total: f64::INFINITY,
            log_blocks: Vec::new(),
            tail_ratio: None,
            converged: false,
            remainder: None,
        },
    };
    let inv: Vec<f64> = trace.t_n_log.iter().map(|&t| -2.0 * t).collect();
    Ok(SummabilityReport {
        increment,
        l2_criterion,
        inverse_norm: SeriesDiagnostic::from_log_terms(&inv),
    })
}
