//! Double-double arithmetic: a value is an unevaluated sum `hi + lo` of two
//! `f64` with `|lo| <= ulp(hi)/2`, giving ~31 significant decimal digits.
//!
//! This exists for one load-bearing purpose: potentials of the form
//! `cos(n^beta)` must be sampled at sites up to `n ~ 10^7`, where
//! `n^beta ~ 3*10^10`. Reducing that phase modulo `2*pi` in plain `f64`
//! leaves an absolute error of about `n^beta * 2^-52 ~ 10^-6..10^0` radians —
//! enough to scramble the sampled value entirely at the upper end. In
//! double-double the reduction error stays below `10^-20` radians across the
//! whole range used anywhere in this workspace.
//!
//! Only the operations actually needed are implemented (add, sub, mul, div,
//! sqrt, exp, ln, powf, remainder by `2*pi`, cosine); each is the textbook
//! error-free-transform construction on top of `f64::mul_add`.

/// `a + b` with exact rounding error: returns `(s, e)` with `s = fl(a+b)`
/// and `s + e == a + b` exactly.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// `two_sum` specialised to `|a| >= |b|`.
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// `a * b` with exact rounding error via fused multiply-add.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// A double-double value `hi + lo`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

// The `hi` legs below are by construction the f64 roundings of the named
// constants; the `lo` legs carry the next 53 bits. Spelling `hi` via
// `std::f64::consts` would hide that the pair is one 106-bit literal.
/// `ln 2` to double-double precision.
#[allow(clippy::approx_constant)]
pub const LN_2: Dd = Dd {
    hi: 0.693_147_180_559_945_3,
    lo: 2.319_046_813_846_299_6e-17,
};

/// `pi` to double-double precision.
#[allow(clippy::approx_constant)]
pub const PI: Dd = Dd {
    hi: 3.141_592_653_589_793,
    lo: 1.224_646_799_147_353_2e-16,
};

/// `2 pi` to double-double precision.
#[allow(clippy::approx_constant)]
pub const TWO_PI: Dd = Dd {
    hi: 6.283_185_307_179_586,
    lo: 2.449_293_598_294_706_4e-16,
};

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    /// Renormalising constructor: the result satisfies the `|lo| <= ulp(hi)/2`
    /// representation invariant even if the arguments overlap.
    #[inline]
    pub fn new(hi: f64, lo: f64) -> Dd {
        let (s, e) = two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact conversion: every `i64` is representable as `hi + lo`.
    pub fn from_i64(n: i64) -> Dd {
        let hi = n as f64;
        let lo = (n as i128 - hi as i128) as f64;
        Dd::new(hi, lo)
    }

    /// Nearest `f64`.
    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            self.neg()
        } else {
            self
        }
    }

    pub fn add(self, rhs: Dd) -> Dd {
        let (s, mut e) = two_sum(self.hi, rhs.hi);
        let (t, f) = two_sum(self.lo, rhs.lo);
        e += t;
        let (s, mut e) = quick_two_sum(s, e);
        e += f;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, rhs: f64) -> Dd {
        self.add(Dd::from_f64(rhs))
    }

    #[inline]
    pub fn sub(self, rhs: Dd) -> Dd {
        self.add(rhs.neg())
    }

    pub fn mul(self, rhs: Dd) -> Dd {
        let (p, mut e) = two_prod(self.hi, rhs.hi);
        e += self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, rhs: f64) -> Dd {
        let (p, mut e) = two_prod(self.hi, rhs);
        e += self.lo * rhs;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    /// Three Newton-ish correction steps on the `f64` quotient.
    pub fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self.sub(rhs.mul_f64(q1));
        let q2 = r.hi / rhs.hi;
        let r = r.sub(rhs.mul_f64(q2));
        let q3 = r.hi / rhs.hi;
        Dd::new(q1, q2).add_f64(q3)
    }

    #[inline]
    pub fn div_f64(self, rhs: f64) -> Dd {
        self.div(Dd::from_f64(rhs))
    }

    /// One double-double Newton step on the `f64` square root.
    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ZERO;
        }
        debug_assert!(self.hi > 0.0, "sqrt of negative double-double");
        let x = self.hi.sqrt();
        let xd = Dd::from_f64(x);
        xd.add(self.div(xd)).mul_f64(0.5)
    }

    /// `exp(self)` by range reduction `self = k ln2 + r`, `|r| <= ln2 / 2`,
    /// followed by a Taylor series in `r` and an exact `2^k` rescale.
    pub fn exp(self) -> Dd {
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -709.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / LN_2.hi).round();
        let r = self.sub(LN_2.mul_f64(k));
        // Taylor: with |r| <= 0.347 the terms drop below 1e-35 by n ~ 30.
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for n in 1..=30 {
            term = term.mul(r).div_f64(n as f64);
            sum = sum.add(term);
            if term.hi.abs() < 1e-35 * sum.hi.abs() {
                break;
            }
        }
        // 2^k is exact; multiplying both legs by it introduces no rounding.
        let scale = (2.0f64).powi(k as i32);
        Dd { hi: sum.hi * scale, lo: sum.lo * scale }
    }

    /// `ln(self)` for positive values: `f64` seed plus one correction from
    /// the double-double `exp` (the residual `r - 1` is O(1e-16), so a short
    /// series in it reaches full double-double precision).
    pub fn ln(self) -> Dd {
        debug_assert!(self.hi > 0.0, "ln of non-positive double-double");
        let y = self.hi.ln();
        let r = self.mul(Dd::from_f64(-y).exp());
        let d = r.sub(Dd::ONE);
        let corr = d.sub(d.mul(d).mul_f64(0.5));
        Dd::from_f64(y).add(corr)
    }

    /// `self^b` for positive `self` via `exp(b ln self)`.
    pub fn powf(self, b: f64) -> Dd {
        self.ln().mul_f64(b).exp()
    }

    /// Remainder modulo `2 pi`, reduced to roughly `[-pi, pi]`.
    ///
    /// Valid while the integer quotient fits exactly in `f64` (i.e. for
    /// arguments below ~2^53, far above anything used here).
    pub fn rem_two_pi(self) -> Dd {
        let q = (self.hi / TWO_PI.hi).round();
        let mut r = self.sub(TWO_PI.mul_f64(q));
        if r.hi > PI.hi {
            r = r.sub(TWO_PI);
        } else if r.hi < -PI.hi {
            r = r.add(TWO_PI);
        }
        r
    }

    /// Cosine, returned at `f64` precision (the double-double argument
    /// reduction is the whole point; the final evaluation is first-order:
    /// `cos(hi + lo) = cos hi - lo sin hi + O(lo^2)`).
    pub fn cos_f64(self) -> f64 {
        let r = self.rem_two_pi();
        r.hi.cos() - r.lo * r.hi.sin()
    }

    /// Fractional part `self - floor(self)` as `f64` in `[0, 1)`.
    pub fn frac_f64(self) -> f64 {
        let f = self.hi - self.hi.floor();
        let mut x = f + self.lo;
        if x < 0.0 {
            x += 1.0;
        }
        if x >= 1.0 {
            x -= 1.0;
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values in the tests below were frozen from an independent
    // 50-digit arbitrary-precision computation.

    fn assert_dd_close(x: Dd, hi: f64, lo: f64, tol: f64) {
        let diff = x.sub(Dd::new(hi, lo));
        assert!(
            diff.to_f64().abs() < tol,
            "dd mismatch: got ({:e}, {:e}), want ({:e}, {:e})",
            x.hi,
            x.lo,
            hi,
            lo
        );
    }

    #[test]
    fn two_sum_is_exact() {
        let (s, e) = two_sum(1.0, 1e-30);
        assert_eq!(s, 1.0);
        assert_eq!(e, 1e-30);
    }

    #[test]
    fn exp_of_one_matches_reference() {
        // e = 2.7182818284590452353602874713526625; the second leg below is
        // e minus the nearest f64.
        let e = Dd::ONE.exp();
        assert!((e.hi - 2.718281828459045).abs() < 1e-15);
        let err = e.sub(Dd::new(2.718281828459045, 1.4456468917292502e-16));
        assert!(err.to_f64().abs() < 1e-30, "e = ({:e},{:e})", e.hi, e.lo);
    }

    #[test]
    fn ln_exp_roundtrip() {
        for &x in &[1e-6, 0.1, 1.0, 3.7, 24.18, 700.0] {
            let y = Dd::from_f64(x).exp().ln();
            assert!((y.to_f64() - x).abs() < 1e-28 * x.max(1.0), "x = {x}");
        }
    }

    #[test]
    fn ln_two_matches_reference() {
        assert_dd_close(Dd::from_f64(2.0).ln(), LN_2.hi, LN_2.lo, 1e-30);
    }

    #[test]
    fn sqrt_squares_back() {
        let s = Dd::from_f64(2.0).sqrt();
        let back = s.mul(s).sub(Dd::from_f64(2.0));
        assert!(back.to_f64().abs() < 1e-30);
    }

    #[test]
    fn powf_matches_integer_powers() {
        let x = Dd::from_i64(7).powf(3.0);
        assert!((x.to_f64() - 343.0).abs() < 1e-26);
    }

    #[test]
    fn rem_two_pi_strips_exact_multiples() {
        let x = TWO_PI.mul_f64(12345.0).add_f64(0.5);
        let r = x.rem_two_pi();
        assert!((r.to_f64() - 0.5).abs() < 1e-25);
    }

    #[test]
    fn from_i64_is_exact_for_large_values() {
        let n = 9_007_199_254_740_995i64; // 2^53 + 3, not representable in f64
        let x = Dd::from_i64(n);
        assert_eq!(x.hi as i128 + x.lo as i128, n as i128);
    }

    /// The acceptance-critical fixtures: `cos(n^beta)` across the full site
    /// range the sparse-potential scanners touch. Plain f64 fails the large-n
    /// cases by O(1).
    #[test]
    fn cos_of_power_phase_fixtures() {
        let cases: &[(i64, f64, f64)] = &[
            (4, 1.5, -0.145_500_033_808_613_525_9),
            (1_000, 1.5, 0.879_945_265_446_522_004_8),
            (1_000_000, 1.5, 0.837_887_181_363_902_334_4),
            (9_999_951, 1.5, -0.989_465_521_199_257_323_6),
            (9_999_975, 1.5, 0.999_298_858_377_795_753_2),
            (10_000_000, 1.5, -0.948_507_696_870_102_137_5),
            (123_456_789, 1.5, 0.820_349_111_940_829_844_7),
            (4, 2.5, 0.834_223_360_506_510_272_2),
            (100_000, 2.5, 0.686_150_190_982_416_028_2),
        ];
        for &(n, beta, want) in cases {
            let got = Dd::from_i64(n).powf(beta).cos_f64();
            assert!(
                (got - want).abs() < 1e-11,
                "cos({n}^{beta}) = {got:.17}, want {want:.17}"
            );
        }
    }
}
