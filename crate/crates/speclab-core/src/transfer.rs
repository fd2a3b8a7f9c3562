//! One-step matrices and transfer products.
//!
//! Conventions, fixed once here and relied on everywhere else:
//!
//! * one step: `A(k) = [[E - V(k), -1], [1, 0]]`, which maps
//!   `(u(k), u(k-1))` to `(u(k+1), u(k))`;
//! * product: `T_E(n, m) = A(n) A(n-1) ... A(m+1)` for `n > m`, mapping
//!   `(u(m+1), u(m))` to `(u(n+1), u(n))`;
//! * `T_E(m, m) = I`, and `T_E(n, m) = T_E(m, n)^{-1}` for `n < m`;
//! * `T_E(n) := T_E(n, 0)`.
//!
//! Every step matrix has determinant one, so products are unimodular and
//! their operator norms never drop below 1.

use crate::error::{CoreError, Support};
use crate::mat2::Mat2;
use crate::scaled::ScaledProduct;

/// A potential `V(n)`. Implementations decide their own support; the
/// transfer-product functions check it before touching any site.
pub trait Potential {
    /// `V(n)`. Must be finite for every `n` in the support.
    fn eval(&self, n: i64) -> Result<f64, CoreError>;

    /// Which sites `eval` accepts.
    fn support(&self) -> Support;
}

impl<P: Potential + ?Sized> Potential for &P {
    fn eval(&self, n: i64) -> Result<f64, CoreError> {
        (**self).eval(n)
    }
    fn support(&self) -> Support {
        (**self).support()
    }
}

/// The one-step transfer matrix `A = [[e - v, -1], [1, 0]]`.
#[inline]
pub fn step(v: f64, e: f64) -> Mat2 {
    Mat2::new(e - v, -1.0, 1.0, 0.0)
}

/// `T_E(n, m)` as a scaled product. For `n < m` the product is inverted
/// exactly (adjugate; unimodular), so `T(n, m) * T(m, n) = I` holds to
/// rounding error at any distance.
pub fn transfer<P: Potential>(
    pot: &P,
    e: f64,
    n: i64,
    m: i64,
) -> Result<ScaledProduct, CoreError> {
    if pot.support() == Support::HalfLine && n.min(m) < 0 {
        return Err(CoreError::OutsideDomain {
            index: n.min(m),
            support: Support::HalfLine,
        });
    }
    if n == m {
        return Ok(ScaledProduct::identity());
    }
    if n < m {
        // Transfer products are unimodular by construction, so the exact
        // adjugate inverse applies at any scale.
        return Ok(transfer(pot, e, m, n)?.inverse_unimodular());
    }
    let mut p = ScaledProduct::identity();
    for k in (m + 1)..=n {
        p.push_left(&step(pot.eval(k)?, e));
    }
    Ok(p)
}

/// Logs of the norms `ln ||T_E(k, 0)||` for `k = 1..=l`, in one pass.
pub fn norm_trajectory<P: Potential>(
    pot: &P,
    e: f64,
    l: i64,
) -> Result<Vec<f64>, CoreError> {
    if l < 1 {
        return Ok(Vec::new());
    }
    let mut p = ScaledProduct::identity();
    let mut out = Vec::with_capacity(l as usize);
    for k in 1..=l {
        p.push_left(&step(pot.eval(k)?, e));
        out.push(p.log_opnorm());
    }
    Ok(out)
}
