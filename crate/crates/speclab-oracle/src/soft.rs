//! Averaged transfer-norm bounds against the minimum spectral measure.
//!
//! Take the smoothed Dirichlet and Neumann densities at scale `eps`, their
//! pointwise minimum `mu`, and integrate transfer norms started at seeded
//! random offsets against it. Two flavours:
//!
//! * the plain step norm `||T_E(m + gap, m)||`;
//! * the root-mean-square over the window,
//!   `(gap^{-1} sum ||T_E(m', m)||^2)^{1/2}`.
//!
//! Both integrals stay below an absolute constant (4) for arbitrary bounded
//! potentials — that the machinery reproduces this with slack is a soft but
//! wide-net consistency check across the `m`-function, the minimum measure,
//! and the transfer products. The check uses a configurable slack `tol` on
//! the constant; tightening `tol` toward 0 is reported by the caller, not
//! asserted here.

use speclab_core::{step, LogSumAcc, Potential, ScaledProduct};
use speclab_potentials::rng;

use crate::density::{linspace, min_density, rho_density, DensitySamples};
use crate::tridiag::Bc;
use crate::OracleError;

/// Outcome of one averaged-norm sweep.
#[derive(Clone, Debug)]
pub struct SoftCheckReport {
    /// `4 + tol`.
    pub bound: f64,
    /// Largest integral over the sampled pairs.
    pub worst: f64,
    /// How many pairs exceeded the bound.
    pub violations: usize,
    /// The sampled `(m, gap)` pairs.
    pub pairs: Vec<(i64, i64)>,
    /// The integral for each pair, same order.
    pub integrals: Vec<f64>,
}

/// The standing energy window for these checks.
const WINDOW: (f64, f64) = (-2.0, 2.0);
/// Grid resolution: a fifth of the default smoothing scale.
const GRID_POINTS: usize = 2001;
const PAIR_COUNT: usize = 20;

/// Twenty seeded `(m, gap)` pairs with `m` in `0..=80`, `gap` in `1..=100`.
fn sample_pairs(seed: u64) -> Vec<(i64, i64)> {
    let u01 = |n: u64| (rng::uniform(seed, n) + 1.0) / 2.0;
    (0..PAIR_COUNT as u64)
        .map(|i| {
            let m = ((u01(2 * i + 1) * 81.0).floor() as i64).clamp(0, 80);
            let gap = (1 + (u01(2 * i + 2) * 100.0).floor() as i64).clamp(1, 100);
            (m, gap)
        })
        .collect()
}

/// Pointwise minimum of the smoothed Dirichlet and Neumann densities on the
/// standing window.
pub fn smoothed_min_measure<P: Potential + Sync>(
    pot: &P,
    epsilon: f64,
) -> Result<DensitySamples, OracleError> {
    let grid = linspace(WINDOW.0, WINDOW.1, GRID_POINTS)?;
    let d = rho_density(pot, &grid, epsilon, Bc::Dirichlet)?;
    let n = rho_density(pot, &grid, epsilon, Bc::NeumannPaper)?;
    min_density(&d, &n)
}

fn check_params(epsilon: f64, tol: f64) -> Result<(), OracleError> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(OracleError::Invalid(format!(
            "smoothing scale must be positive, got {epsilon}"
        )));
    }
    if !tol.is_finite() || tol < 0.0 {
        return Err(OracleError::Invalid(format!(
            "slack must be nonnegative, got {tol}"
        )));
    }
    Ok(())
}

/// Integrate `f` (given as `log f` per grid index) against the measure in
/// log space; errors if the result overflows.
fn integrate_log(
    measure: &DensitySamples,
    log_f: &[f64],
) -> Result<f64, OracleError> {
    let grid = measure.grid();
    let h = grid[1] - grid[0];
    let mut acc = LogSumAcc::new();
    for (i, (&mu, &lf)) in measure.values().iter().zip(log_f).enumerate() {
        if mu == 0.0 {
            continue;
        }
        let mut term = lf + mu.ln() + h.ln();
        if i == 0 || i == grid.len() - 1 {
            term += 0.5f64.ln();
        }
        acc.add_log(term);
    }
    let out = acc.log_total().exp();
    if !out.is_finite() {
        return Err(OracleError::Invalid(
            "averaged transfer integral overflows f64".into(),
        ));
    }
    Ok(out)
}

fn run_check<P, F>(
    pot: &P,
    epsilon: f64,
    tol: f64,
    seed: u64,
    log_norm_of_pair: F,
) -> Result<SoftCheckReport, OracleError>
where
    P: Potential + Sync,
    F: Fn(&P, i64, i64, f64) -> Result<f64, OracleError>,
{
    check_params(epsilon, tol)?;
    let measure = smoothed_min_measure(pot, epsilon)?;
    let pairs = sample_pairs(seed);
    let bound = 4.0 + tol;
    let mut integrals = Vec::with_capacity(pairs.len());
    let mut worst = 0.0f64;
    let mut violations = 0usize;
    for &(m, gap) in &pairs {
        let log_f: Vec<f64> = measure
            .grid()
            .iter()
            .map(|&e| log_norm_of_pair(pot, m, gap, e))
            .collect::<Result<_, _>>()?;
        let integral = integrate_log(&measure, &log_f)?;
        if integral > worst {
            worst = integral;
        }
        if integral > bound {
            violations += 1;
        }
        integrals.push(integral);
    }
    Ok(SoftCheckReport {
        bound,
        worst,
        violations,
        pairs,
        integrals,
    })
}

/// Check `integral ||T_E(m + gap, m)|| d mu(E) <= 4 + tol` over seeded pairs.
pub fn averaged_step_norm_check<P: Potential + Sync>(
    pot: &P,
    epsilon: f64,
    tol: f64,
    seed: u64,
) -> Result<SoftCheckReport, OracleError> {
    run_check(pot, epsilon, tol, seed, |pot, m, gap, e| {
        let mut prod = ScaledProduct::identity();
        for k in m + 1..=m + gap {
            prod.push_left(&step(pot.eval(k)?, e));
        }
        Ok(prod.log_opnorm())
    })
}

/// Check
/// `integral (gap^{-1} sum_{m'=m+1}^{m+gap} ||T_E(m', m)||^2)^{1/2} d mu(E)
/// <= 4 + tol` over the same seeded pairs.
pub fn averaged_window_rms_check<P: Potential + Sync>(
    pot: &P,
    epsilon: f64,
    tol: f64,
    seed: u64,
) -> Result<SoftCheckReport, OracleError> {
    run_check(pot, epsilon, tol, seed, |pot, m, gap, e| {
        let mut prod = ScaledProduct::identity();
        let mut acc = LogSumAcc::new();
        for k in m + 1..=m + gap {
            prod.push_left(&step(pot.eval(k)?, e));
            acc.add_log(2.0 * prod.log_opnorm());
        }
        Ok(0.5 * (acc.log_total() - (gap as f64).ln()))
    })
}
