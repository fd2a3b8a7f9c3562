//! Transfer-matrix kernel for half-line and whole-line discrete Schrödinger
//! operators `(Hu)(n) = u(n+1) + u(n-1) + V(n)u(n)`.
//!
//! Everything downstream (spectral oracles, subordinacy diagnostics, barrier
//! audits, contraction-angle traces) is built on three primitives that live
//! here:
//!
//! * [`Mat2`] — plain 2x2 real matrices with closed-form singular values;
//! * [`ScaledProduct`] — a transfer product stored as `matrix * exp(log_scale)`
//!   so that products over 10^7 sites with Lyapunov growth never overflow;
//! * [`Solution`] — a solution of the difference equation stored with a
//!   per-index logarithmic scale, since one end of a solution can decay like
//!   `exp(-gamma n)` while the other grows like `exp(+gamma n)`.
//!
//! The [`dd`] module provides double-double arithmetic for the one place plain
//! `f64` is genuinely insufficient: evaluating phases like `n^beta mod 2*pi`
//! at `n ~ 10^7`, where `f64` alone carries O(1) radians of error.

pub mod dd;
pub mod error;
pub mod logsum;
pub mod mat2;
pub mod scaled;
pub mod solution;
pub mod transfer;

pub use error::{CoreError, Support};
pub use logsum::{log_add_exp, LogSumAcc, LogVal};
pub use mat2::Mat2;
pub use scaled::ScaledProduct;
pub use solution::{solution, wronskian, BoundaryAngle, Solution, WholeLineSolution};
pub use transfer::{norm_trajectory, step, transfer, Potential};
