//! Borel transforms (`m`-functions) of the half-line spectral measures.
//!
//! Two routes to the same number. The resolvent matrix element
//! `<delta_1, (H - z)^{-1} delta_1>` of the `N`-site truncation is a finite
//! continued fraction `1/(V(1) - z - 1/(V(2) - z - ...))`; it is also the
//! Borel transform `sum_k w_k / (E_k - z)` of the truncation's spectral data.
//! The two are equal in exact arithmetic, so comparing them checks the
//! diagonaliser against a recursion that never factors anything.
//!
//! Boundary conditions: `m_dirichlet` is the continued fraction from site 1;
//! `m_neumann = z - V(1) + m^(1)` where `m^(1)` starts at site 2, so that
//! `m_dirichlet * m_neumann = -1` identically.
//!
//! The truncation depth for a target distance `eps` from the real axis is
//! `N(eps) = ceil(50 / eps)`: at depth `N` the truncated and half-line
//! functions agree far below every tolerance used here (doubling the depth is
//! the check, see tests).

use num_complex::Complex64;
use speclab_core::Potential;

use crate::tridiag::{Bc, SpectralData};
use crate::OracleError;

/// Truncation size `N(eps) = ceil(50/eps)` paired with the distance `eps`
/// from the real axis.
pub fn truncation_size(epsilon: f64) -> Result<i64, OracleError> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(OracleError::Invalid(format!(
            "distance from the axis must be positive, got {epsilon}"
        )));
    }
    if epsilon < 2.5e-7 {
        return Err(OracleError::Invalid(format!(
            "epsilon = {epsilon} asks for a truncation beyond 2e8 sites"
        )));
    }
    Ok((50.0 / epsilon).ceil() as i64)
}

/// Bottom-up continued fraction over sites `first ..= first + levels - 1`.
/// With `Im z > 0` every denominator has imaginary part below `-Im z`, so the
/// recursion is unconditionally stable and the result is Herglotz.
fn continued_fraction<P: Potential>(
    pot: &P,
    z: Complex64,
    first: i64,
    levels: i64,
) -> Result<Complex64, OracleError> {
    let mut g = Complex64::new(0.0, 0.0);
    for n in (first..first + levels).rev() {
        let v = pot.eval(n)?;
        g = Complex64::new(1.0, 0.0) / (Complex64::new(v, 0.0) - z - g);
    }
    Ok(g)
}

fn check_z(z: Complex64) -> Result<(), OracleError> {
    if !z.re.is_finite() || !z.im.is_finite() || z.im == 0.0 {
        return Err(OracleError::Invalid(format!(
            "m-functions need finite z off the real axis, got {z}"
        )));
    }
    Ok(())
}

/// `m` at explicit truncation depth, continued-fraction route.
///
/// For `Im z < 0` the reflection `m(conj z) = conj(m(z))` is applied, so the
/// symmetry holds exactly.
pub fn m_continued_fraction<P: Potential>(
    pot: &P,
    z: Complex64,
    bc: Bc,
    depth: i64,
) -> Result<Complex64, OracleError> {
    check_z(z)?;
    if z.im < 0.0 {
        return Ok(m_continued_fraction(pot, z.conj(), bc, depth)?.conj());
    }
    if depth < 1 || depth > 200_000_000 {
        return Err(OracleError::Invalid(format!(
            "continued-fraction depth {depth} out of range"
        )));
    }
    match bc {
        Bc::Dirichlet => continued_fraction(pot, z, 1, depth),
        Bc::NeumannPaper => {
            let v1 = pot.eval(1)?;
            Ok(z - v1 + continued_fraction(pot, z, 2, depth)?)
        }
    }
}

/// `m(z)` with the depth chosen from `Im z` via [`truncation_size`].
pub fn m_function<P: Potential>(
    pot: &P,
    z: Complex64,
    bc: Bc,
) -> Result<Complex64, OracleError> {
    check_z(z)?;
    let depth = truncation_size(z.im.abs())?;
    m_continued_fraction(pot, z, bc, depth)
}

/// Borel transform `sum_k w_k / (E_k - z)` of explicit spectral data.
pub fn m_eigensum(data: &SpectralData, z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (&e, &w) in data.eigenvalues().iter().zip(data.weights()) {
        acc += Complex64::new(w, 0.0) / (Complex64::new(e, 0.0) - z);
    }
    acc
}

/// `m` at explicit truncation depth by full diagonalisation — the oracle the
/// continued fraction is validated against. Equal to
/// [`m_continued_fraction`] at the same depth up to rounding.
pub fn m_truncated_oracle<P: Potential>(
    pot: &P,
    z: Complex64,
    bc: Bc,
    depth: i64,
) -> Result<Complex64, OracleError> {
    check_z(z)?;
    if z.im < 0.0 {
        return Ok(m_truncated_oracle(pot, z.conj(), bc, depth)?.conj());
    }
    let data = crate::tridiag::eig(pot, depth, bc)?;
    match bc {
        Bc::Dirichlet => Ok(m_eigensum(&data, z)),
        Bc::NeumannPaper => {
            let v1 = pot.eval(1)?;
            Ok(z - v1 + m_eigensum(&data, z))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use speclab_potentials::PotentialSpec;

    fn free() -> speclab_potentials::CompiledPotential {
        PotentialSpec::zero().compile().unwrap()
    }

    fn random(seed: u64) -> speclab_potentials::CompiledPotential {
        PotentialSpec::random_decay(0.0, seed).compile().unwrap()
    }

    /// Closed form for the free Dirichlet m: the Herglotz root of
    /// `m^2 + z m + 1 = 0`.
    fn free_m(z: Complex64) -> Complex64 {
        let w = (z * z - Complex64::new(4.0, 0.0)).sqrt();
        let a = (-z + w) / 2.0;
        let b = (-z - w) / 2.0;
        if a.im > 0.0 {
            a
        } else {
            b
        }
    }

    #[test]
    fn the_free_m_at_i_is_the_golden_ratio_times_i() {
        let z = Complex64::new(0.0, 1.0);
        let m = m_function(&free(), z, Bc::Dirichlet).unwrap();
        // (-i + i sqrt(5)) / 2 = i (sqrt(5) - 1)/2.
        assert!((m.re).abs() <= 1e-13, "Re m = {}", m.re);
        assert!((m.im - 0.6180339887498948).abs() <= 1e-12, "Im m = {}", m.im);
    }

    #[test]
    fn the_free_m_matches_its_closed_form_off_the_axis() {
        for &re in &[-1.7, -0.3, 0.0, 0.9, 2.4] {
            for &im in &[0.1, 0.5, 2.0] {
                let z = Complex64::new(re, im);
                let m = m_function(&free(), z, Bc::Dirichlet).unwrap();
                let want = free_m(z);
                assert!(
                    (m - want).norm() <= 1e-9,
                    "z = {z}: {m} vs {want}"
                );
            }
        }
    }

    #[test]
    fn dirichlet_and_neumann_m_multiply_to_minus_one() {
        let pot = random(31);
        for &(re, im) in &[(1.0, 0.5), (-0.7, 0.2), (0.0, 1.0)] {
            let z = Complex64::new(re, im);
            let md = m_continued_fraction(&pot, z, Bc::Dirichlet, 100).unwrap();
            let mn = m_continued_fraction(&pot, z, Bc::NeumannPaper, 100).unwrap();
            let prod = md * mn;
            assert!(
                (prod + Complex64::new(1.0, 0.0)).norm() <= 1e-12,
                "z = {z}: product {prod}"
            );
        }
    }

    #[test]
    fn the_continued_fraction_equals_the_eigensum_at_matched_depth() {
        let pot = random(8);
        let z = Complex64::new(0.3, 0.2);
        for bc in [Bc::Dirichlet, Bc::NeumannPaper] {
            let cf = m_continued_fraction(&pot, z, bc, 250).unwrap();
            let es = m_truncated_oracle(&pot, z, bc, 250).unwrap();
            assert!(
                (cf - es).norm() <= 1e-9 * (1.0 + cf.norm()),
                "{bc:?}: cf {cf} vs eigensum {es}"
            );
        }
    }

    #[test]
    fn doubling_the_paired_depth_does_not_move_m() {
        // N(eps) = ceil(50/eps) is calibrated so the truncation error is
        // far below every tolerance in use; doubling the depth is the check.
        let z = Complex64::new(0.4, 0.1);
        let depth = truncation_size(z.im).unwrap();
        assert_eq!(depth, 500);
        for pot in [
            PotentialSpec::zero().compile().unwrap(),
            PotentialSpec::power_decay(0.2, 2.0).compile().unwrap(),
        ] {
            let once = m_continued_fraction(&pot, z, Bc::Dirichlet, depth).unwrap();
            let twice = m_continued_fraction(&pot, z, Bc::Dirichlet, 2 * depth).unwrap();
            assert!(
                (once - twice).norm() <= 1e-8,
                "depth sensitivity {}",
                (once - twice).norm()
            );
        }
    }

    #[test]
    fn m_is_herglotz_and_reflection_symmetric() {
        let pot = random(12);
        for bc in [Bc::Dirichlet, Bc::NeumannPaper] {
            for k in 0..13 {
                let e = -3.0 + 0.5 * k as f64;
                let z = Complex64::new(e, 0.3);
                let m = m_function(&pot, z, bc).unwrap();
                assert!(m.im > 0.0, "{bc:?} at {z}: Im m = {}", m.im);
                let reflected = m_function(&pot, z.conj(), bc).unwrap();
                assert_eq!(reflected, m.conj());
            }
        }
    }

    #[test]
    fn truncation_sizes_follow_the_pairing_rule() {
        assert_eq!(truncation_size(0.1).unwrap(), 500);
        assert_eq!(truncation_size(1e-2).unwrap(), 5000);
        assert_eq!(truncation_size(1e-3).unwrap(), 50_000);
        assert_eq!(truncation_size(0.3).unwrap(), 167);
        assert!(truncation_size(0.0).is_err());
        assert!(truncation_size(-1.0).is_err());
        assert!(truncation_size(1e-9).is_err());
    }

    #[test]
    fn z_on_the_real_axis_is_rejected() {
        let err = m_function(&free(), Complex64::new(1.0, 0.0), Bc::Dirichlet);
        assert!(err.is_err());
    }
}
