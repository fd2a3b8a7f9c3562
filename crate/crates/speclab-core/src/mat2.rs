//! Plain 2x2 real matrices with closed-form spectral data.
//!
//! Operator norms come from the exact singular-value formula for the Gram
//! matrix, not from an iterative SVD: for `G = M^T M`,
//! `sigma_max^2 = (tr G + sqrt((G11-G22)^2 + 4 G12^2)) / 2`.

/// Row-major 2x2 matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    #[inline]
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Mat2 {
        Mat2 { a, b, c, d }
    }

    /// Matrix product `self * rhs`.
    #[inline]
    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        Mat2 {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    /// `self * (x, y)^T`.
    #[inline]
    pub fn mul_vec(&self, v: (f64, f64)) -> (f64, f64) {
        (self.a * v.0 + self.b * v.1, self.c * v.0 + self.d * v.1)
    }

    #[inline]
    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    #[inline]
    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    #[inline]
    pub fn frob_sq(&self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    #[inline]
    pub fn scale(&self, k: f64) -> Mat2 {
        Mat2 { a: self.a * k, b: self.b * k, c: self.c * k, d: self.d * k }
    }

    #[inline]
    pub fn sub(&self, rhs: &Mat2) -> Mat2 {
        Mat2 {
            a: self.a - rhs.a,
            b: self.b - rhs.b,
            c: self.c - rhs.c,
            d: self.d - rhs.d,
        }
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2 { a: self.a, b: self.c, c: self.b, d: self.d }
    }

    /// Adjugate: `adj(M) * M = det(M) * I`. For unimodular `M` this is the
    /// exact inverse with no division.
    #[inline]
    pub fn adjugate(&self) -> Mat2 {
        Mat2 { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// Largest singular value (spectral norm), by the closed form on the
    /// Gram matrix. Exact up to a few ulps; no iteration.
    pub fn opnorm(&self) -> f64 {
        let g11 = self.a * self.a + self.c * self.c;
        let g22 = self.b * self.b + self.d * self.d;
        let g12 = self.a * self.b + self.c * self.d;
        let diff = g11 - g22;
        // Tiny negative discriminants from cancellation are clamped to zero.
        let disc = (diff * diff + 4.0 * g12 * g12).max(0.0).sqrt();
        (0.5 * (g11 + g22 + disc)).max(0.0).sqrt()
    }

    /// Smallest singular value: `|det| / sigma_max` (exact for 2x2).
    pub fn min_singular(&self) -> f64 {
        let s = self.opnorm();
        if s == 0.0 {
            0.0
        } else {
            self.det().abs() / s
        }
    }

    /// Unit vector spanning the most-contracted input direction (the right
    /// singular vector for the smallest singular value), canonicalised to the
    /// closed right half-plane. Returns `None` when the matrix is numerically
    /// isotropic (singular values within 1e-12 relative), where the direction
    /// is meaningless.
    pub fn smallest_singular_direction(&self) -> Option<(f64, f64)> {
        let g11 = self.a * self.a + self.c * self.c;
        let g22 = self.b * self.b + self.d * self.d;
        let g12 = self.a * self.b + self.c * self.d;
        let diff = g11 - g22;
        let disc = (diff * diff + 4.0 * g12 * g12).max(0.0).sqrt();
        let lam_max = 0.5 * (g11 + g22 + disc);
        let lam_min = 0.5 * (g11 + g22 - disc);
        if !(lam_max > 0.0) || lam_max - lam_min <= 1e-12 * lam_max {
            return None;
        }
        // (G - lam_min I) v = 0: two candidate rows; keep the better
        // conditioned one.
        let v1 = (g12, lam_min - g11);
        let v2 = (lam_min - g22, g12);
        let n1 = v1.0 * v1.0 + v1.1 * v1.1;
        let n2 = v2.0 * v2.0 + v2.1 * v2.1;
        let (mut x, mut y) = if n1 >= n2 { v1 } else { v2 };
        let n = (x * x + y * y).sqrt();
        if n == 0.0 {
            return None;
        }
        x /= n;
        y /= n;
        if x < 0.0 || (x == 0.0 && y < 0.0) {
            x = -x;
            y = -y;
        }
        Some((x, y))
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }
}
