//! Growth-exponent estimates for the subordinate solution.
//!
//! Given a converged [`crate::subordinate::RuelleResult`] and a log-scale
//! model `f`, the fit regresses `ln ||T(n) u_infinity||` on `f(n)` over the
//! top dyadic window `n > n_max / 2` — the only decade where the asymptotic
//! regime has a chance to dominate — and reports the affine least-squares
//! slope together with max/min ratio proxies for the limsup and liminf of
//! `ln ||T(n) u|| / f(n)`. Typical models: `f(n) = n` for exponential
//! (positive-Lyapunov) runs, `f(n) = ln n` for power-law runs.

use serde::Serialize;

use crate::subordinate::RuelleResult;
use crate::RuelleError;

/// Affine fit of `ln ||T(n) u_infinity||` against a log-scale model over
/// the top dyadic window.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExponentFit {
    /// Least-squares slope of `ln ||T(n) u||` on `f(n)`.
    pub slope: f64,
    /// Largest ratio `ln ||T(n) u|| / f(n)` in the window.
    pub limsup_proxy: f64,
    /// Smallest such ratio.
    pub liminf_proxy: f64,
    /// First and last `n` of the fit window.
    pub n_lo: i64,
    pub n_hi: i64,
    /// Number of records fitted.
    pub samples: usize,
}

/// Fit the growth exponent of the subordinate solution against the model
/// `f`. Refuses unconverged results and models that are non-finite, vanish,
/// or are constant on the fit window.
pub fn growth_exponent(
    result: &RuelleResult,
    f: impl Fn(f64) -> f64,
) -> Result<ExponentFit, RuelleError> {
    if !result.converged {
        return Err(RuelleError::NotConverged {
            check: "growth_exponent",
            why: "growth records on an unconverged run have no limiting direction behind them"
                .into(),
        });
    }
    let n_max = result
        .growth_records
        .last()
        .map(|g| g.n)
        .ok_or_else(|| RuelleError::Invalid("no growth records to fit".into()))?;
    let window: Vec<(f64, f64, i64)> = result
        .growth_records
        .iter()
        .filter(|g| g.n > n_max / 2)
        .map(|g| (f(g.n as f64), g.log_norm, g.n))
        .collect();
    if window.len() < 2 {
        return Err(RuelleError::Invalid(format!(
            "fit window above n = {} holds {} records; need at least 2",
            n_max / 2,
            window.len()
        )));
    }
    for &(x, _, n) in &window {
        if !x.is_finite() {
            return Err(RuelleError::Invalid(format!(
                "model is not finite at n = {n}"
            )));
        }
        if x == 0.0 {
            return Err(RuelleError::Invalid(
                "model vanishes on the fit window".into(),
            ));
        }
    }
    let xs: Vec<f64> = window.iter().map(|&(x, _, _)| x).collect();
    let x_min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let x_max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if x_min == x_max {
        return Err(RuelleError::Invalid(
            "model is constant on the fit window".into(),
        ));
    }

    let m = window.len() as f64;
    let x_bar = xs.iter().sum::<f64>() / m;
    let y_bar = window.iter().map(|&(_, y, _)| y).sum::<f64>() / m;
    let mut num = 0.0;
    let mut den = 0.0;
    for &(x, y, _) in &window {
        num += (x - x_bar) * (y - y_bar);
        den += (x - x_bar) * (x - x_bar);
    }
    let slope = num / den;

    let ratios = window.iter().map(|&(x, y, _)| y / x);
    let limsup_proxy = ratios.clone().fold(f64::NEG_INFINITY, f64::max);
    let liminf_proxy = ratios.fold(f64::INFINITY, f64::min);

    Ok(ExponentFit {
        slope,
        limsup_proxy,
        liminf_proxy,
        n_lo: window.iter().map(|&(_, _, n)| n).min().unwrap_or(n_max),
        n_hi: n_max,
        samples: window.len(),
    })
}
