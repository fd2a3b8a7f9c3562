//! Solutions of `u(n+1) + u(n-1) + V(n) u(n) = E u(n)` with per-index
//! logarithmic scales.
//!
//! A single shared scale cannot represent a solution whose two ends behave
//! differently (one end decaying like `exp(-gamma n)` while the other grows
//! like `exp(+gamma n)` is the generic situation at a localised eigenvalue),
//! so each stored sample carries its own `(mantissa, log)` pair. Adjacent
//! samples share scales closely enough that three-term recursion residuals
//! are still checkable to rounding accuracy.

use crate::error::{CoreError, Support};
use crate::logsum::{log_add_exp, LogVal};
use crate::transfer::Potential;

/// A boundary condition angle, normalised to `[0, pi)`.
///
/// The associated initial data is `(u(1), u(0)) = (sin theta, cos theta)`;
/// `theta = pi/2` is the Dirichlet condition `u(0) = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryAngle(f64);

impl BoundaryAngle {
    pub fn new(theta: f64) -> BoundaryAngle {
        BoundaryAngle(theta.rem_euclid(std::f64::consts::PI))
    }

    pub fn dirichlet() -> BoundaryAngle {
        BoundaryAngle(std::f64::consts::FRAC_PI_2)
    }

    pub fn radians(&self) -> f64 {
        self.0
    }

    /// Initial data `(u(1), u(0))` for this angle.
    pub fn initial_data(&self) -> (f64, f64) {
        (self.0.sin(), self.0.cos())
    }

    /// The orthogonal angle (`theta + pi/2` mod `pi`): the complementary
    /// solution's boundary condition.
    pub fn orthogonal(&self) -> BoundaryAngle {
        BoundaryAngle::new(self.0 + std::f64::consts::FRAC_PI_2)
    }

    /// Projective distance to another angle: the distance on the circle of
    /// directions, i.e. modulo `pi`, in `[0, pi/2]`.
    pub fn dist(&self, other: &BoundaryAngle) -> f64 {
        let d = (self.0 - other.0).rem_euclid(std::f64::consts::PI);
        d.min(std::f64::consts::PI - d)
    }
}

/// Rescale a solution pair when its magnitude leaves `[1e-100, 1e100]`.
#[inline]
fn rescale_pair(p: &mut f64, q: &mut f64, s: &mut f64) {
    let m = p.abs().max(q.abs());
    if m > 1e100 || (m > 0.0 && m < 1e-100) {
        *p /= m;
        *q /= m;
        *s += m.ln();
    }
}

/// A half-line (or right-half of a whole-line) solution sampled on
/// `n = 0 ..= n_max + 1`, each sample stored as `val * exp(log)`.
#[derive(Clone, Debug)]
pub struct Solution {
    vals: Vec<f64>,
    logs: Vec<f64>,
}

impl Solution {
    /// Largest sampled index.
    pub fn max_index(&self) -> i64 {
        self.vals.len() as i64 - 1
    }

    /// The sample `u(n)` as a signed log-scaled value.
    pub fn at(&self, n: i64) -> LogVal {
        let i = usize::try_from(n).expect("negative index into half-line solution");
        LogVal::new(self.vals[i], self.logs[i])
    }

    /// `ln |u(n)|`; `-inf` where the solution vanishes.
    pub fn log_abs(&self, n: i64) -> f64 {
        self.at(n).log_abs()
    }

    /// `u(n)` as `f64` when representable.
    pub fn to_f64(&self, n: i64) -> Option<f64> {
        self.at(n).to_f64()
    }

    /// `ln (u(n+1)^2 + u(n)^2)` — the squared norm of the solution's phase
    /// vector at `n`, the quantity subordinacy theory compares.
    pub fn log_norm_sq(&self, n: i64) -> f64 {
        log_add_exp(2.0 * self.log_abs(n + 1), 2.0 * self.log_abs(n))
    }
}

/// Solve forward from the boundary data of `theta` up to `u(n_max + 1)`.
///
/// Works for half-line and whole-line potentials alike (only sites
/// `1 ..= n_max` are evaluated).
pub fn solution<P: Potential>(
    pot: &P,
    e: f64,
    theta: BoundaryAngle,
    n_max: i64,
) -> Result<Solution, CoreError> {
    if n_max < 0 {
        return Err(CoreError::InvalidParameter(format!(
            "solution needs n_max >= 0, got {n_max}"
        )));
    }
    let len = (n_max + 2) as usize;
    let mut vals = Vec::with_capacity(len);
    let mut logs = Vec::with_capacity(len);
    let (u1, u0) = theta.initial_data();
    let (mut p, mut q, mut s) = (u1, u0, 0.0); // p = u(n), q = u(n-1) at scale s
    vals.push(u0);
    logs.push(0.0);
    vals.push(u1);
    logs.push(0.0);
    for n in 1..=n_max {
        let r = (e - pot.eval(n)?) * p - q;
        vals.push(r);
        logs.push(s);
        q = p;
        p = r;
        rescale_pair(&mut p, &mut q, &mut s);
    }
    Ok(Solution { vals, logs })
}

/// A whole-line solution grown in both directions from `(u(1), u(0))`,
/// sampled on `-(n_max+1) ..= n_max+1`.
#[derive(Clone, Debug)]
pub struct WholeLineSolution {
    right: Solution,
    /// Index `j` holds `u(-j)`; `left.vals[0] = u(0)`, `left.vals[1] = u(-1)`, ...
    left: Solution,
}

impl WholeLineSolution {
    /// Grow from the initial pair. Requires a whole-line potential: the
    /// downward recursion `u(n-1) = (E - V(n)) u(n) - u(n+1)` starts at
    /// `V(0)`.
    pub fn grow<P: Potential>(
        pot: &P,
        e: f64,
        u1: f64,
        u0: f64,
        n_max: i64,
    ) -> Result<WholeLineSolution, CoreError> {
        if pot.support() != Support::WholeLine {
            return Err(CoreError::OutsideDomain {
                index: -1,
                support: Support::HalfLine,
            });
        }
        if n_max < 0 {
            return Err(CoreError::InvalidParameter(format!(
                "whole-line solution needs n_max >= 0, got {n_max}"
            )));
        }
        let len = (n_max + 2) as usize;

        // Rightward: identical to the half-line recursion.
        let mut rvals = Vec::with_capacity(len);
        let mut rlogs = Vec::with_capacity(len);
        let (mut p, mut q, mut s) = (u1, u0, 0.0);
        rvals.push(u0);
        rlogs.push(0.0);
        rvals.push(u1);
        rlogs.push(0.0);
        for n in 1..=n_max {
            let r = (e - pot.eval(n)?) * p - q;
            rvals.push(r);
            rlogs.push(s);
            q = p;
            p = r;
            rescale_pair(&mut p, &mut q, &mut s);
        }

        // Leftward: u(n-1) = (E - V(n)) u(n) - u(n+1), starting at n = 0.
        let mut lvals = Vec::with_capacity(len);
        let mut llogs = Vec::with_capacity(len);
        let (mut p, mut q, mut s) = (u0, u1, 0.0); // p = u(n), q = u(n+1)
        lvals.push(u0);
        llogs.push(0.0);
        let mut site = 0i64;
        for _ in 1..=(n_max + 1) {
            let r = (e - pot.eval(site)?) * p - q;
            lvals.push(r);
            llogs.push(s);
            q = p;
            p = r;
            site -= 1;
            rescale_pair(&mut p, &mut q, &mut s);
        }

        Ok(WholeLineSolution {
            right: Solution { vals: rvals, logs: rlogs },
            left: Solution { vals: lvals, logs: llogs },
        })
    }

    /// `u(n)` for any sampled site, positive or negative.
    pub fn at(&self, n: i64) -> LogVal {
        if n >= 0 {
            self.right.at(n)
        } else {
            self.left.at(-n)
        }
    }

    pub fn log_abs(&self, n: i64) -> f64 {
        self.at(n).log_abs()
    }

    pub fn max_index(&self) -> i64 {
        self.right.max_index()
    }
}

/// Wronskian `W(u, v)(n) = u(n+1) v(n) - u(n) v(n+1)`, as a signed
/// log-scaled value. For two solutions of the same equation this is
/// independent of `n`; the spread across `n` is a numerical health check.
pub fn wronskian(u: &Solution, v: &Solution, n: i64) -> LogVal {
    u.at(n + 1).mul(&v.at(n)).sub(&u.at(n).mul(&v.at(n + 1)))
}
