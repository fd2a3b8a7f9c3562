//! Property tests for the barrier machinery: the structural identities the
//! audits lean on, checked across randomized potentials and windows.

use proptest::prelude::*;
use speclab_barriers::{
    direction_rows_for, gap_certificate, growth_audit, whole_line_transfer, BarrierError,
    RowVerdict,
};
use speclab_core::{CoreError, Potential, Support};
use speclab_potentials::PotentialSpec;

/// Deterministic bounded whole-line potential parametrised by a seed.
#[derive(Debug, Clone)]
struct Hashed {
    seed: u64,
    amp: f64,
}

impl Potential for Hashed {
    fn eval(&self, n: i64) -> Result<f64, CoreError> {
        let mut z = (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(self.seed);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        Ok(self.amp * (2.0 * ((z >> 11) as f64 / (1u64 << 53) as f64) - 1.0))
    }
    fn support(&self) -> Support {
        Support::WholeLine
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// ||T(n, m)|| = ||T(m, n)||: reversing a window inverts a unimodular
    /// product, and the adjugate inverse has the same singular values.
    #[test]
    fn window_reversal_preserves_norms(
        seed in any::<u64>(),
        e in -3.0f64..3.0,
        n in -300i64..300,
        m in -300i64..300,
    ) {
        let pot = Hashed { seed, amp: 1.0 };
        let fwd = whole_line_transfer(&pot, e, n, m).unwrap();
        let rev = whole_line_transfer(&pot, e, m, n).unwrap();
        let diff = (fwd.log_opnorm() - rev.log_opnorm()).abs();
        prop_assert!(diff <= 1e-10, "log norms differ by {diff} on ({n}, {m})");
    }

    /// Component growth implies direction growth: whenever every
    /// origin-anchored row passes for the solution seeded at a unit
    /// direction phi, the phi rows of the vector-norm inequality must not
    /// fail — the vector norm dominates the component, and an honest
    /// certificate leaves room for the anchor change.
    #[test]
    fn component_growth_implies_direction_growth(
        c in -1.0f64..1.0,
        x in 2.5f64..3.5,
        angle in 0.0f64..std::f64::consts::PI,
        n in 3i64..20,
    ) {
        let pot = PotentialSpec::constant(c).on_whole_line().compile().unwrap();
        let e = c + x;
        let delta = 0.6 * (x - 2.0);
        let cert = gap_certificate(&pot, e, delta, (-60, 60)).unwrap();
        prop_assert!(cert.verified);
        let phi = (angle.cos(), angle.sin());
        let audit = growth_audit(&pot, &cert, n, phi).unwrap();
        let origin_passes = audit
            .origin_growth
            .iter()
            .all(|r| matches!(r.verdict, RowVerdict::Pass | RowVerdict::TriviallyPass));
        if origin_passes {
            let rows = direction_rows_for(&pot, &cert, n, phi).unwrap();
            for row in rows {
                prop_assert!(
                    row.verdict != RowVerdict::Fail,
                    "phi row failed at l = {} with margin {}",
                    row.ell,
                    row.log_margin()
                );
            }
        }
    }

    /// Certificates for energies inside the spectrum refuse to verify, and
    /// the audit refuses to run on them.
    #[test]
    fn in_band_energies_are_refused(
        c in -1.0f64..1.0,
        y in -1.5f64..1.5,
    ) {
        let pot = PotentialSpec::constant(c).on_whole_line().compile().unwrap();
        let cert = gap_certificate(&pot, c + y, 1.0, (-60, 60)).unwrap();
        prop_assert!(!cert.verified);
        prop_assert!(cert.min_eig_distance < 1.0);
        let audit = growth_audit(&pot, &cert, 5, (1.0, 1.0));
        let refused = matches!(audit, Err(BarrierError::UnverifiedCertificate { .. }));
        prop_assert!(refused);
    }
}
