//! Subordinacy ratios: cumulative energy of one boundary solution against
//! its orthogonal partner.
//!
//! A solution is subordinate when this ratio tends to zero; the ratio of the
//! orthogonal pair taken the other way round is its exact reciprocal, which
//! makes a cheap definitional cross-check.

use serde::Serialize;
use speclab_core::{solution, BoundaryAngle, LogSumAcc, Potential};

use crate::cesaro::Schedule;
use crate::DiagnosticsError;

/// `sum_{n<=L} u_theta(n)^2 / sum_{n<=L} u_{theta+pi/2}(n)^2` in log scale,
/// recorded at a schedule of lengths.
#[derive(Clone, Debug, Serialize)]
pub struct SubordinacyTrace {
    energy: f64,
    theta: f64,
    l_values: Vec<i64>,
    log_ratio_values: Vec<f64>,
}

impl SubordinacyTrace {
    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn l_values(&self) -> &[i64] {
        &self.l_values
    }

    /// `ln` of the ratio at each checkpoint (always finite: both sums are
    /// positive once L >= 2, since consecutive solution values never vanish
    /// together).
    pub fn log_ratio_values(&self) -> &[f64] {
        &self.log_ratio_values
    }

    /// Least-squares slope of `ln ratio` against `ln L` over the checkpoints
    /// with `L >= l_min` — the decay exponent of the ratio.
    pub fn decay_exponent(&self, l_min: i64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .l_values
            .iter()
            .zip(&self.log_ratio_values)
            .filter(|(&l, _)| l >= l_min)
            .map(|(&l, &r)| ((l as f64).ln(), r))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
    }
}

/// Cumulative squared-component ratio of the `theta` solution against the
/// orthogonal one, at dyadic checkpoints up to `l_max`.
pub fn subordinacy_trace<P: Potential>(
    pot: &P,
    e: f64,
    theta: BoundaryAngle,
    l_max: i64,
) -> Result<SubordinacyTrace, DiagnosticsError> {
    if l_max < 2 {
        return Err(DiagnosticsError::Invalid(format!(
            "subordinacy trace needs l_max >= 2, got {l_max}"
        )));
    }
    let checkpoints = Schedule::Dyadic.checkpoints(l_max)?;
    let u = solution(pot, e, theta, l_max)?;
    let v = solution(pot, e, theta.orthogonal(), l_max)?;
    let mut num = LogSumAcc::new();
    let mut den = LogSumAcc::new();
    let mut ratios = Vec::with_capacity(checkpoints.len());
    let mut next = 0usize;
    for n in 1..=l_max {
        num.add_log(2.0 * u.log_abs(n));
        den.add_log(2.0 * v.log_abs(n));
        while next < checkpoints.len() && checkpoints[next] == n {
            ratios.push(num.log_total() - den.log_total());
            next += 1;
        }
    }
    Ok(SubordinacyTrace {
        energy: e,
        theta: theta.radians(),
        l_values: checkpoints,
        log_ratio_values: ratios,
    })
}
