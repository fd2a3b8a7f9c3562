//! Transfer products over signed windows of the line.

use crate::BarrierError;
use speclab_core::{transfer, Potential, ScaledProduct, Support};

/// `T_E(n, m)` for a potential defined on all of `Z`.
///
/// The product maps `(u(m+1), u(m))` to `(u(n+1), u(n))` and satisfies
/// `T(n, m)^{-1} = T(m, n)` and `||T(n, m)|| = ||T(m, n)||` (the inverse of a
/// unimodular 2x2 matrix is its adjugate, which has the same singular
/// values). Indices may have any sign and any order; `n == m` yields the
/// identity.
///
/// Half-line potentials are rejected up front: a window that strays below
/// site 1 has no value to read there, and silently clamping would corrupt
/// the product.
pub fn whole_line_transfer<P: Potential>(
    pot: &P,
    e: f64,
    n: i64,
    m: i64,
) -> Result<ScaledProduct, BarrierError> {
    if pot.support() != Support::WholeLine {
        return Err(BarrierError::Invalid(
            "whole-line transfer needs a potential defined on all of Z \
             (compile the spec with on_whole_line, or use a whole-line family)"
                .into(),
        ));
    }
    Ok(transfer(pot, e, n, m)?)
}
