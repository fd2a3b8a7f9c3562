//! Cesàro averages of squared transfer norms and their derived estimators.

use serde::Serialize;
use speclab_core::{step, transfer, LogSumAcc, Potential, ScaledProduct};

use crate::DiagnosticsError;

/// Which lengths a trace records. The averages themselves are computed in a
/// single pass regardless; the schedule only picks the checkpoints kept.
#[derive(Clone, Debug)]
pub enum Schedule {
    /// Powers of two up to `l_max`, plus `l_max` itself.
    Dyadic,
    /// Explicit checkpoints, strictly increasing, within `1..=l_max`.
    Checkpoints(Vec<i64>),
}

impl Schedule {
    pub(crate) fn checkpoints(&self, l_max: i64) -> Result<Vec<i64>, DiagnosticsError> {
        match self {
            Schedule::Dyadic => {
                let mut out = Vec::new();
                let mut l = 2i64;
                while l <= l_max {
                    out.push(l);
                    l *= 2;
                }
                if out.last() != Some(&l_max) {
                    out.push(l_max);
                }
                Ok(out)
            }
            Schedule::Checkpoints(list) => {
                if list.is_empty() {
                    return Err(DiagnosticsError::Invalid("empty checkpoint list".into()));
                }
                for w in list.windows(2) {
                    if w[0] >= w[1] {
                        return Err(DiagnosticsError::Invalid(format!(
                            "checkpoints must increase strictly, got {} then {}",
                            w[0], w[1]
                        )));
                    }
                }
                if list[0] < 1 || *list.last().unwrap() > l_max {
                    return Err(DiagnosticsError::Invalid(format!(
                        "checkpoints must lie in 1..={l_max}"
                    )));
                }
                Ok(list.clone())
            }
        }
    }
}

/// The running average `G_L = L^{-1} sum_{n=1}^{L} ||T_E(n)||^2`, recorded in
/// log scale at a schedule of lengths.
#[derive(Clone, Debug, Serialize)]
pub struct CesaroTrace {
    energy: f64,
    l_values: Vec<i64>,
    log_g_values: Vec<f64>,
}

impl CesaroTrace {
    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn l_values(&self) -> &[i64] {
        &self.l_values
    }

    /// `ln G_L` per checkpoint — the only representation that survives
    /// exponentially growing norms.
    pub fn log_g_values(&self) -> &[f64] {
        &self.log_g_values
    }

    /// Linear-scale `G_L` at checkpoint index `i`; `inf` if it overflows.
    pub fn g_at(&self, i: usize) -> f64 {
        self.log_g_values[i].exp()
    }

    /// CSV rows `E,L,G_L` (linear `G_L`; overflowing values print as `inf`).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("E,L,G_L\n");
        for (l, lg) in self.l_values.iter().zip(&self.log_g_values) {
            out.push_str(&format!(
                "{:.16e},{},{:.16e}\n",
                self.energy,
                l,
                lg.exp()
            ));
        }
        out
    }
}

/// Compute the running Cesàro average of `||T_E(n)||^2` in one pass.
pub fn cesaro_trace<P: Potential>(
    pot: &P,
    e: f64,
    l_max: i64,
    schedule: Schedule,
) -> Result<CesaroTrace, DiagnosticsError> {
    if l_max < 2 {
        return Err(DiagnosticsError::Invalid(format!(
            "cesaro trace needs l_max >= 2, got {l_max}"
        )));
    }
    let checkpoints = schedule.checkpoints(l_max)?;
    let mut prod = ScaledProduct::identity();
    let mut acc = LogSumAcc::new();
    let mut log_g = Vec::with_capacity(checkpoints.len());
    let mut next = 0usize;
    for n in 1..=*checkpoints.last().unwrap() {
        prod.push_left(&step(pot.eval(n)?, e));
        acc.add_log(2.0 * prod.log_opnorm());
        while next < checkpoints.len() && checkpoints[next] == n {
            log_g.push(acc.log_total() - (n as f64).ln());
            next += 1;
        }
    }
    Ok(CesaroTrace {
        energy: e,
        l_values: checkpoints,
        log_g_values: log_g,
    })
}

/// Minimum of `G_L` over the larger-`L` half of the recorded checkpoints.
///
/// A finite-length stand-in for `liminf G_L`: it is an *upper bound* on the
/// true liminf (the minimum over a subset of lengths), never a proof of
/// membership. Returns linear scale; divergent traces give huge or infinite
/// values, which is the honest answer for them.
pub fn liminf_estimate(trace: &CesaroTrace) -> f64 {
    let logs = trace.log_g_values();
    let tail = &logs[logs.len() / 2..];
    tail.iter().copied().fold(f64::INFINITY, f64::min).exp()
}

/// `log ||T_E(m_j, k_j)||` for each requested window.
///
/// Norms are symmetric in the endpoints (`||T(n,m)|| = ||T(m,n)||` for
/// unimodular products), so the order of each pair is a matter of taste.
pub fn window_norms<P: Potential>(
    pot: &P,
    e: f64,
    pairs: &[(i64, i64)],
) -> Result<Vec<f64>, DiagnosticsError> {
    pairs
        .iter()
        .map(|&(m, k)| Ok(transfer(pot, e, m, k)?.log_opnorm()))
        .collect()
}

/// `log ||T_E(L)|| / L` — the finite-length Lyapunov exponent estimate.
pub fn lyapunov_estimate<P: Potential>(
    pot: &P,
    e: f64,
    l: i64,
) -> Result<f64, DiagnosticsError> {
    if l < 1 {
        return Err(DiagnosticsError::Invalid(format!(
            "lyapunov estimate needs L >= 1, got {l}"
        )));
    }
    Ok(transfer(pot, e, l, 0)?.log_opnorm() / l as f64)
}

/// The envelope constant of `G_L` against `(log L)^{1+delta}`.
#[derive(Clone, Debug, Serialize)]
pub struct PolylogScan {
    pub energy: f64,
    pub delta: f64,
    pub l_max: i64,
    /// `ln` of the envelope constant `max_L G_L / (log L)^{1+delta}`.
    pub log_constant: f64,
}

impl PolylogScan {
    /// Linear-scale constant; `inf` when the scan diverges.
    pub fn constant(&self) -> f64 {
        self.log_constant.exp()
    }
}

/// Scan `max_{2 <= L <= l_max} G_L / (log L)^{1+delta}` over every integer
/// length (prefix averages make this a single O(l_max) pass).
///
/// Bounded, doubling-stable constants are the diagnostic for energies whose
/// Cesàro averages grow at most poly-logarithmically; divergence with `l_max`
/// flags the complement.
pub fn polylog_envelope_scan<P: Potential>(
    pot: &P,
    e: f64,
    delta: f64,
    l_max: i64,
) -> Result<PolylogScan, DiagnosticsError> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(DiagnosticsError::Invalid(format!(
            "envelope scan needs delta > 0, got {delta}"
        )));
    }
    if l_max < 4 {
        return Err(DiagnosticsError::Invalid(format!(
            "envelope scan needs l_max >= 4, got {l_max}"
        )));
    }
    let mut prod = ScaledProduct::identity();
    let mut acc = LogSumAcc::new();
    let mut best = f64::NEG_INFINITY;
    for n in 1..=l_max {
        prod.push_left(&step(pot.eval(n)?, e));
        acc.add_log(2.0 * prod.log_opnorm());
        if n >= 2 {
            let nf = n as f64;
            let log_g = acc.log_total() - nf.ln();
            let val = log_g - (1.0 + delta) * nf.ln().ln();
            if val > best {
                best = val;
            }
        }
    }
    Ok(PolylogScan {
        energy: e,
        delta,
        l_max,
        log_constant: best,
    })
}

/// CSV rows `E,C_E` for a batch of envelope scans.
pub fn scans_to_csv(scans: &[PolylogScan]) -> String {
    let mut out = String::from("E,C_E\n");
    for s in scans {
        out.push_str(&format!("{:.16e},{:.16e}\n", s.energy, s.constant()));
    }
    out
}
