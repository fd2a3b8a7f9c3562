//! Transfer products with logarithmic scaling.
//!
//! A product of `n` one-step matrices grows like `exp(gamma n)` whenever the
//! Lyapunov exponent `gamma` is positive; at `n = 10^7` that overflows `f64`
//! by thousands of orders of magnitude. A [`ScaledProduct`] stores the
//! product as `mat * exp(log_scale)` and renormalises the matrix leg whenever
//! its entries threaten the representable range.

use crate::error::CoreError;
use crate::mat2::Mat2;

/// Renormalise when the squared Frobenius norm leaves `[2^-120, 2^120]` — a
/// cheap hot-loop test that keeps the stored operator norm inside
/// `[2^-64, 2^64]`. The represented norm of a unimodular product never drops
/// below 1, but the *stored* leg can: renormalising at a norm peak and then
/// passing through a drawdown leaves the stored matrix below 1, so the
/// window needs both triggers.
const RENORM_FROB_SQ_HI: f64 = 1.329_227_995_784_915_9e36; // 2^120
const RENORM_FROB_SQ_LO: f64 = 7.523_163_845_262_64e-37; // 2^-120

/// A 2x2 matrix with a separated logarithmic scale: represents
/// `mat * exp(log_scale)`.
#[derive(Clone, Copy, Debug)]
pub struct ScaledProduct {
    pub mat: Mat2,
    pub log_scale: f64,
}

impl ScaledProduct {
    pub fn identity() -> ScaledProduct {
        ScaledProduct { mat: Mat2::IDENTITY, log_scale: 0.0 }
    }

    pub fn from_mat(mat: Mat2) -> ScaledProduct {
        let mut p = ScaledProduct { mat, log_scale: 0.0 };
        p.renormalize_if_needed();
        p
    }

    #[inline]
    fn renormalize_if_needed(&mut self) {
        let f = self.mat.frob_sq();
        if f > RENORM_FROB_SQ_HI || (f > 0.0 && f < RENORM_FROB_SQ_LO) {
            let s = self.mat.opnorm();
            self.mat = self.mat.scale(1.0 / s);
            self.log_scale += s.ln();
        }
    }

    /// Extend the product by one step on the left: `self <- step * self`.
    #[inline]
    pub fn push_left(&mut self, step: &Mat2) {
        self.mat = step.mul(&self.mat);
        self.renormalize_if_needed();
    }

    /// Full product `self * rhs` with scales added.
    pub fn compose(&self, rhs: &ScaledProduct) -> ScaledProduct {
        let mut p = ScaledProduct {
            mat: self.mat.mul(&rhs.mat),
            log_scale: self.log_scale + rhs.log_scale,
        };
        p.renormalize_if_needed();
        p
    }

    /// `ln` of the operator norm of the represented matrix.
    pub fn log_opnorm(&self) -> f64 {
        self.mat.opnorm().ln() + self.log_scale
    }

    /// `ln` of the smallest singular value of the represented matrix.
    pub fn log_min_singular(&self) -> f64 {
        let s = self.mat.min_singular();
        if s == 0.0 {
            f64::NEG_INFINITY
        } else {
            s.ln() + self.log_scale
        }
    }

    /// Determinant of the *represented* matrix, computed in log space so it
    /// stays finite for arbitrarily large scales: `det(mat) * exp(2 log_scale)`.
    pub fn det_represented(&self) -> f64 {
        let d = self.mat.det();
        if d == 0.0 {
            return 0.0;
        }
        d.signum() * (d.abs().ln() + 2.0 * self.log_scale).exp()
    }

    /// Materialise the represented matrix as a plain `Mat2` when that fits
    /// the `f64` range.
    pub fn to_mat(&self) -> Option<Mat2> {
        let m = self.mat.max_abs_entry();
        if m == 0.0 {
            return Some(Mat2::new(0.0, 0.0, 0.0, 0.0));
        }
        if self.log_scale + m.ln() > 700.0 || self.log_scale + m.ln() < -700.0 {
            return None;
        }
        Some(self.mat.scale(self.log_scale.exp()))
    }

    /// Apply the represented matrix to a vector, returning the image
    /// direction (unit vector) and the log of the image norm.
    pub fn apply_log(&self, v: (f64, f64)) -> ((f64, f64), f64) {
        let w = self.mat.mul_vec(v);
        let n = w.0.hypot(w.1);
        if n == 0.0 {
            ((0.0, 0.0), f64::NEG_INFINITY)
        } else {
            ((w.0 / n, w.1 / n), n.ln() + self.log_scale)
        }
    }

    /// Inverse of a product known to be unimodular (`det T = 1`), via the
    /// exact adjugate: `T^{-1} = exp(log_scale) adj(mat)`.
    ///
    /// This deliberately never touches the *measured* determinant. For a
    /// long hyperbolic product the stored matrix is numerically singular —
    /// `det(mat)` computed in f64 is pure cancellation noise once
    /// `||T||^2 * eps > |det|` — while the adjugate identity remains exact
    /// for the mathematical object. The adjugate of a 2x2 matrix has the
    /// same operator norm as the matrix, so the norm window survives.
    pub fn inverse_unimodular(&self) -> ScaledProduct {
        let adj = self.mat.adjugate();
        let s = adj.opnorm();
        ScaledProduct {
            mat: adj.scale(1.0 / s),
            log_scale: self.log_scale + s.ln(),
        }
    }

    /// General inverse through the measured determinant. Refuses when the
    /// determinant is below the cancellation noise floor
    /// (`~ frob^2 * eps`), where nothing trustworthy can be computed.
    pub fn inverse(&self) -> Result<ScaledProduct, CoreError> {
        let det = self.mat.det();
        let noise_floor = 16.0 * f64::EPSILON * self.mat.frob_sq();
        if !det.is_finite() || det.abs() <= noise_floor {
            return Err(CoreError::Singular { det });
        }
        let adj = self.mat.adjugate();
        let s = adj.opnorm();
        Ok(ScaledProduct {
            mat: adj.scale(det.signum() / s),
            log_scale: -self.log_scale - det.abs().ln() + s.ln(),
        })
    }

    /// Residual of the unimodularity identity `det(T) = 1` for the
    /// represented matrix, evaluated in log space: exactly zero would mean
    /// `det(mat) * exp(2 log_scale) = 1`.
    ///
    /// Only meaningful in the measurable regime `log_opnorm() < ~17`: beyond
    /// that the f64 determinant of the stored matrix is cancellation noise
    /// of size `eps * ||mat||^2` and the residual says nothing about the
    /// product. (`NaN` is returned there rather than a misleading number.)
    pub fn unimodular_residual(&self) -> f64 {
        let d = self.mat.det();
        let noise_floor = 16.0 * f64::EPSILON * self.mat.frob_sq();
        if d.abs() <= noise_floor {
            return f64::NAN;
        }
        if d <= 0.0 {
            return f64::INFINITY;
        }
        (d.ln() + 2.0 * self.log_scale).exp() - 1.0
    }
}
