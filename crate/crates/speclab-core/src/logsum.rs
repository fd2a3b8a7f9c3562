//! Log-domain helpers shared across the workspace.
//!
//! Transfer norms routinely reach `exp(1e6)`; every accumulation over them is
//! done on logarithms with max-shifted summation.

/// `ln(exp(a) + exp(b))` without overflow. Either argument may be `-inf`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Streaming log-sum-exp accumulator: feeds in `log x_i`, reads out
/// `ln(sum x_i)` without ever materialising the `x_i`.
#[derive(Clone, Debug)]
pub struct LogSumAcc {
    max: f64,
    sum: f64,
    count: u64,
}

impl Default for LogSumAcc {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSumAcc {
    pub fn new() -> LogSumAcc {
        LogSumAcc { max: f64::NEG_INFINITY, sum: 0.0, count: 0 }
    }

    /// Add a term given as its logarithm.
    pub fn add_log(&mut self, log_term: f64) {
        self.count += 1;
        if log_term == f64::NEG_INFINITY {
            return;
        }
        if log_term <= self.max {
            self.sum += (log_term - self.max).exp();
        } else {
            self.sum = if self.max == f64::NEG_INFINITY {
                1.0
            } else {
                self.sum * (self.max - log_term).exp() + 1.0
            };
            self.max = log_term;
        }
    }

    /// `ln(sum of terms)`; `-inf` when empty or all terms were zero.
    pub fn log_total(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }
}

/// A signed value with a logarithmic magnitude: represents `val * exp(log)`.
///
/// Used wherever a quantity can exceed the f64 range but its sign matters
/// (Wronskians of exponentially growing solutions, matched eigenfunction
/// tails).
#[derive(Clone, Copy, Debug)]
pub struct LogVal {
    /// Mantissa; kept at O(1) by the constructors but not forced to a fixed
    /// window. May be negative or zero.
    pub val: f64,
    /// Logarithmic scale: the represented value is `val * exp(log)`.
    pub log: f64,
}

impl LogVal {
    pub const ZERO: LogVal = LogVal { val: 0.0, log: 0.0 };

    /// Normalising constructor: returns a representation with `|val| = 1`.
    pub fn new(val: f64, log: f64) -> LogVal {
        if val == 0.0 {
            LogVal::ZERO
        } else {
            LogVal { val: val.signum(), log: log + val.abs().ln() }
        }
    }

    pub fn from_f64(x: f64) -> LogVal {
        LogVal::new(x, 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.val == 0.0
    }

    /// `ln |value|`; `-inf` for zero.
    pub fn log_abs(&self) -> f64 {
        if self.val == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.log + self.val.abs().ln()
        }
    }

    pub fn signum(&self) -> f64 {
        self.val.signum()
    }

    /// The value as `f64` if it is representable without overflow.
    pub fn to_f64(&self) -> Option<f64> {
        if self.val == 0.0 {
            return Some(0.0);
        }
        let l = self.log_abs();
        if l > 709.0 {
            None
        } else {
            Some(self.signum() * l.exp())
        }
    }

    /// Difference `self - rhs`, computed at the larger scale.
    pub fn sub(&self, rhs: &LogVal) -> LogVal {
        if self.is_zero() {
            return LogVal::new(-rhs.val, rhs.log);
        }
        if rhs.is_zero() {
            return *self;
        }
        let m = self.log.max(rhs.log);
        let a = self.val * (self.log - m).exp();
        let b = rhs.val * (rhs.log - m).exp();
        LogVal::new(a - b, m)
    }

    /// Product `self * rhs`.
    pub fn mul(&self, rhs: &LogVal) -> LogVal {
        if self.is_zero() || rhs.is_zero() {
            return LogVal::ZERO;
        }
        LogVal::new(self.val * rhs.val, self.log + rhs.log)
    }
}
