//! Energy-integrated transfer-norm scans and periodic spectra.
//!
//! [`lq_norm_scan`] integrates `||T_E(x)||^p` over an energy interval for a
//! list of cutoffs `x`, entirely in log space — the bounded-versus-divergent
//! behaviour of these integrals as `x` grows separates absolutely continuous
//! spectrum from the rest, and the integrals themselves can dwarf `f64`
//! range long before that distinction is visible.
//!
//! [`discriminant_spectrum`] handles the one case with a closed spectral
//! criterion: for a periodic potential, `E` is in the spectrum iff the
//! monodromy trace lies in `[-2, 2]`.

use rayon::prelude::*;
use serde::Serialize;
use speclab_core::{step, LogSumAcc, Potential, ScaledProduct};
use speclab_potentials::{Family, PotentialSpec};

use crate::density::linspace;
use crate::OracleError;

/// Log-space energy integrals of transfer-norm powers.
#[derive(Clone, Debug, Serialize)]
pub struct LqScan {
    pub p: f64,
    pub interval: (f64, f64),
    pub cutoffs: Vec<i64>,
    /// `ln integral_a^b ||T_E(x_j)||^p dE`, one entry per cutoff.
    pub log_integrals: Vec<f64>,
}

/// Integrate `||T_E(x)||^p` over `[a, b]` (trapezoid on `grid_points`
/// equispaced energies) for each cutoff `x`, sharing one transfer sweep per
/// energy across all cutoffs.
pub fn lq_norm_scan<P: Potential + Sync>(
    pot: &P,
    a: f64,
    b: f64,
    p: f64,
    cutoffs: &[i64],
    grid_points: usize,
) -> Result<LqScan, OracleError> {
    if !p.is_finite() || p < 2.0 {
        return Err(OracleError::Invalid(format!(
            "norm power must be >= 2, got {p}"
        )));
    }
    if cutoffs.is_empty() {
        return Err(OracleError::Invalid("no cutoffs requested".into()));
    }
    for w in cutoffs.windows(2) {
        if w[1] <= w[0] {
            return Err(OracleError::Invalid(
                "cutoffs must be strictly increasing".into(),
            ));
        }
    }
    if cutoffs[0] < 1 {
        return Err(OracleError::Invalid(format!(
            "cutoffs must be >= 1, got {}",
            cutoffs[0]
        )));
    }
    let grid = linspace(a, b, grid_points)?;
    let x_max = *cutoffs.last().expect("non-empty");

    // One sweep per energy, loggin the norm at each cutoff on the way.
    let per_energy: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|&e| {
            let mut prod = ScaledProduct::identity();
            let mut logs = Vec::with_capacity(cutoffs.len());
            let mut next = 0usize;
            for k in 1..=x_max {
                prod.push_left(&step(pot.eval(k)?, e));
                while next < cutoffs.len() && cutoffs[next] == k {
                    logs.push(prod.log_opnorm());
                    next += 1;
                }
            }
            Ok(logs)
        })
        .collect::<Result<_, OracleError>>()?;

    let h = (b - a) / (grid_points - 1) as f64;
    let log_h = h.ln();
    let log_half = 0.5f64.ln();
    let log_integrals = (0..cutoffs.len())
        .map(|j| {
            let mut acc = LogSumAcc::new();
            for (i, logs) in per_energy.iter().enumerate() {
                let mut term = p * logs[j] + log_h;
                if i == 0 || i == grid_points - 1 {
                    term += log_half;
                }
                acc.add_log(term);
            }
            acc.log_total()
        })
        .collect();

    Ok(LqScan {
        p,
        interval: (a, b),
        cutoffs: cutoffs.to_vec(),
        log_integrals,
    })
}

/// Monodromy traces of a periodic potential over an energy grid, and the
/// trace criterion `|tr| <= 2` marking the spectrum.
#[derive(Clone, Debug, Serialize)]
pub struct DiscriminantScan {
    pub period: i64,
    pub grid: Vec<f64>,
    pub traces: Vec<f64>,
    pub in_spectrum: Vec<bool>,
}

impl DiscriminantScan {
    /// Number of maximal runs of in-spectrum grid points — the band count as
    /// resolved by this grid. Never exceeds the period for a fine enough
    /// grid.
    pub fn band_count(&self) -> usize {
        let mut count = 0;
        let mut inside = false;
        for &b in &self.in_spectrum {
            if b && !inside {
                count += 1;
            }
            inside = b;
        }
        count
    }
}

/// Evaluate the discriminant (monodromy trace over one period) across the
/// grid. Only genuinely periodic families are accepted: `zero` and
/// `constant` (period 1) and `periodic` (period = number of values).
pub fn discriminant_spectrum(
    spec: &PotentialSpec,
    grid: &[f64],
) -> Result<DiscriminantScan, OracleError> {
    let period = match &spec.family {
        Family::Zero | Family::Constant { .. } => 1i64,
        Family::Periodic { values } => values.len() as i64,
        other => {
            return Err(OracleError::Invalid(format!(
                "discriminant needs a periodic potential, got {other:?}"
            )))
        }
    };
    if grid.len() < 2 {
        return Err(OracleError::Invalid(
            "discriminant grid needs at least 2 points".into(),
        ));
    }
    let pot = spec.compile()?;
    let mut traces = Vec::with_capacity(grid.len());
    let mut in_spectrum = Vec::with_capacity(grid.len());
    for &e in grid {
        if !e.is_finite() {
            return Err(OracleError::Invalid(format!("non-finite energy {e}")));
        }
        let prod = speclab_core::transfer(&pot, e, period, 0)?;
        let mat = prod.to_mat().ok_or_else(|| {
            OracleError::Invalid(format!(
                "monodromy at E = {e} exceeds f64 range (period {period})"
            ))
        })?;
        let tr = mat.trace();
        traces.push(tr);
        in_spectrum.push(tr.abs() <= 2.0);
    }
    Ok(DiscriminantScan {
        period,
        grid: grid.to_vec(),
        traces,
        in_spectrum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn the_free_cubic_scan_is_bounded_and_stable_in_the_cutoff() {
        let pot = PotentialSpec::zero().compile().unwrap();
        let scan = lq_norm_scan(&pot, -1.0, 1.0, 3.0, &[64, 128, 256, 512], 801).unwrap();
        // Inside the band the free transfer matrices are conjugate rotations:
        // the integrals stay within fixed bounds however long the product.
        for &v in &scan.log_integrals {
            assert!(v.is_finite());
            assert!((0.3..=2.6).contains(&v), "log integral {v}");
        }
        let spread = scan
            .log_integrals
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
            - scan
                .log_integrals
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
        assert!(spread <= 1.0, "spread {spread}");
    }

    #[test]
    fn the_quadratic_integral_obeys_hoelder_against_the_cubic_one() {
        let pot = PotentialSpec::random_decay(0.0, 5).compile().unwrap();
        let (a, b) = (-1.0, 1.0);
        let two = lq_norm_scan(&pot, a, b, 2.0, &[100], 801).unwrap();
        let three = lq_norm_scan(&pot, a, b, 3.0, &[100], 801).unwrap();
        // integral ||T||^2 <= (b-a)^{1/3} (integral ||T||^3)^{2/3}.
        let bound = (b - a).ln() / 3.0 + 2.0 / 3.0 * three.log_integrals[0];
        assert!(
            two.log_integrals[0] <= bound + 1e-9,
            "{} vs {}",
            two.log_integrals[0],
            bound
        );
    }

    #[test]
    fn a_strongly_coupled_quasiperiodic_scan_grows_with_the_cutoff() {
        let pot = PotentialSpec::almost_mathieu(3.0, (5.0f64.sqrt() - 1.0) / 2.0, 0.4)
            .compile()
            .unwrap();
        let scan = lq_norm_scan(&pot, -1.0, 1.0, 3.0, &[32, 64, 128, 256], 401).unwrap();
        for w in scan.log_integrals.windows(2) {
            assert!(w[1] > w[0], "not increasing: {:?}", scan.log_integrals);
        }
        assert!(
            scan.log_integrals[3] - scan.log_integrals[0] >= 3.0,
            "growth too weak: {:?}",
            scan.log_integrals
        );
    }

    #[test]
    fn scan_preconditions_are_enforced() {
        let pot = PotentialSpec::zero().compile().unwrap();
        assert!(lq_norm_scan(&pot, -1.0, 1.0, 1.5, &[8], 11).is_err());
        assert!(lq_norm_scan(&pot, 1.0, -1.0, 3.0, &[8], 11).is_err());
        assert!(lq_norm_scan(&pot, -1.0, 1.0, 3.0, &[], 11).is_err());
        assert!(lq_norm_scan(&pot, -1.0, 1.0, 3.0, &[8, 8], 11).is_err());
        assert!(lq_norm_scan(&pot, -1.0, 1.0, 3.0, &[0, 8], 11).is_err());
    }

    #[test]
    fn the_free_discriminant_marks_exactly_the_band() {
        let spec = PotentialSpec::zero();
        let grid = linspace(-3.0, 3.0, 601).unwrap();
        let scan = discriminant_spectrum(&spec, &grid).unwrap();
        assert_eq!(scan.period, 1);
        for (i, &e) in grid.iter().enumerate() {
            // Period-1 monodromy is the single step [[E, -1], [1, 0]]:
            // trace E, spectrum exactly [-2, 2].
            assert_eq!(scan.traces[i], e);
            assert_eq!(scan.in_spectrum[i], e.abs() <= 2.0, "E = {e}");
        }
        assert_eq!(scan.band_count(), 1);
    }

    #[test]
    fn a_two_periodic_discriminant_matches_the_hand_expanded_trace() {
        let c = 0.8;
        let spec = PotentialSpec::periodic(vec![c, 0.0]);
        let grid = linspace(-2.0, 3.0, 1001).unwrap();
        let scan = discriminant_spectrum(&spec, &grid).unwrap();
        assert_eq!(scan.period, 2);
        for (i, &e) in grid.iter().enumerate() {
            let want = e * (e - c) - 2.0;
            assert!(
                (scan.traces[i] - want).abs() <= 1e-12,
                "E = {e}: {} vs {want}",
                scan.traces[i]
            );
        }
        // Band edges solve E(E-c) = 0 and E(E-c) = 4: two bands for c != 0.
        assert_eq!(scan.band_count(), 2);
        let lower_edge = (c - (c * c + 16.0).sqrt()) / 2.0;
        let upper_edge = (c + (c * c + 16.0).sqrt()) / 2.0;
        for (i, &e) in grid.iter().enumerate() {
            let in_band = (e >= lower_edge - 5e-3 && e <= 5e-3)
                || (e >= c - 5e-3 && e <= upper_edge + 5e-3);
            if scan.in_spectrum[i] {
                assert!(in_band, "E = {e} flagged in-spectrum outside both bands");
            }
        }
    }

    #[test]
    fn aperiodic_families_are_refused() {
        let spec = PotentialSpec::random_decay(0.5, 1);
        let grid = linspace(-1.0, 1.0, 11).unwrap();
        assert!(discriminant_spectrum(&spec, &grid).is_err());
    }
}
