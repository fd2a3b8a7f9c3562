//! Declarative potential specifications.
//!
//! A [`PotentialSpec`] is a small serializable value (family + parameters +
//! seed + domain) that fully determines the sequence `V(n)`; [`compile`]
//! validates it and produces an evaluator implementing
//! [`speclab_core::Potential`]. Random families draw each site independently
//! from the counter-based generator in [`crate::rng`], so evaluation is pure,
//! order-independent, and reproducible across platforms.

use serde::{Deserialize, Serialize};
use speclab_core::dd::{Dd, TWO_PI};
use speclab_core::{CoreError, Potential, Support};
use std::path::{Path, PathBuf};

use crate::{bernoulli, rng, PotentialsError};

/// Which half of the lattice the potential lives on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// Sites `n >= 1` (site 0 is the boundary and carries no potential value).
    #[default]
    HalfLine,
    /// All integer sites.
    WholeLine,
}

impl Domain {
    pub fn support(self) -> Support {
        match self {
            Domain::HalfLine => Support::HalfLine,
            Domain::WholeLine => Support::WholeLine,
        }
    }
}

/// Family tag plus family-specific parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `V(n) = 0`.
    Zero,
    /// `V(n) = c`.
    Constant { c: f64 },
    /// `V(n) = c0 * n^(-alpha)`, `alpha > 0`, half-line.
    PowerDecay { c0: f64, alpha: f64 },
    /// `V(n) = lambda * cos(n^beta)`, `beta > 1`, half-line. Phases are
    /// reduced mod `2 pi` in double-double arithmetic; plain `f64` loses
    /// ~8 digits of the phase by `n ~ 10^7`.
    CosPower { lambda: f64, beta: f64 },
    /// `V(n) = lambda * cos(2 pi alpha n + theta0)`.
    AlmostMathieu { lambda: f64, alpha: f64, theta0: f64 },
    /// `V(n) = n^(-alpha) * a_n` with `a_n` i.i.d. uniform on `[-1, 1)`,
    /// `alpha >= 0`, half-line. `alpha = 0` is the bounded i.i.d. case.
    RandomDecay { alpha: f64, seed: u64 },
    /// Alternating zero gaps and power-damped random blocks: the pattern
    /// `gaps[0]` zero sites, then `blocks[0]` sites of `(n - off)^(-alpha) a_n`
    /// (where `off` is the site just before the block starts), then
    /// `gaps[1]`, `blocks[1]`, ..., cycling through both lists. The random
    /// amplitude `a_n` is indexed by the absolute site `n`.
    SparseComposite {
        alpha: f64,
        seed: u64,
        gaps: Vec<u64>,
        blocks: Vec<u64>,
    },
    /// The deterministic 0/1 sequence of [`crate::bernoulli`].
    Bernoulli,
    /// `V(n) = values[(n - 1) mod q]`.
    Periodic { values: Vec<f64> },
    /// `V(n) = base(n + n0)`.
    Shifted { base: Box<PotentialSpec>, n0: i64 },
    /// Values read from a text file, one real per line, 1-indexed.
    FromFile { path: PathBuf },
}

/// A complete, serializable potential description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default)]
    pub domain: Domain,
}

impl PotentialSpec {
    fn on_half_line(family: Family) -> Self {
        PotentialSpec {
            family,
            domain: Domain::HalfLine,
        }
    }

    pub fn zero() -> Self {
        Self::on_half_line(Family::Zero)
    }

    pub fn constant(c: f64) -> Self {
        Self::on_half_line(Family::Constant { c })
    }

    pub fn power_decay(c0: f64, alpha: f64) -> Self {
        Self::on_half_line(Family::PowerDecay { c0, alpha })
    }

    pub fn cos_power(lambda: f64, beta: f64) -> Self {
        Self::on_half_line(Family::CosPower { lambda, beta })
    }

    pub fn almost_mathieu(lambda: f64, alpha: f64, theta0: f64) -> Self {
        Self::on_half_line(Family::AlmostMathieu {
            lambda,
            alpha,
            theta0,
        })
    }

    pub fn random_decay(alpha: f64, seed: u64) -> Self {
        Self::on_half_line(Family::RandomDecay { alpha, seed })
    }

    pub fn sparse_composite(alpha: f64, seed: u64, gaps: Vec<u64>, blocks: Vec<u64>) -> Self {
        Self::on_half_line(Family::SparseComposite {
            alpha,
            seed,
            gaps,
            blocks,
        })
    }

    pub fn bernoulli() -> Self {
        Self::on_half_line(Family::Bernoulli)
    }

    pub fn periodic(values: Vec<f64>) -> Self {
        Self::on_half_line(Family::Periodic { values })
    }

    pub fn shifted(base: PotentialSpec, n0: i64) -> Self {
        let domain = base.domain;
        PotentialSpec {
            family: Family::Shifted {
                base: Box::new(base),
                n0,
            },
            domain,
        }
    }

    pub fn from_file(path: impl Into<PathBuf>) -> Self {
        Self::on_half_line(Family::FromFile { path: path.into() })
    }

    /// Same spec on the whole line (valid only for families defined there).
    pub fn on_whole_line(mut self) -> Self {
        self.domain = Domain::WholeLine;
        self
    }

    /// Validate and build the evaluator.
    pub fn compile(&self) -> Result<CompiledPotential, PotentialsError> {
        compile(self)
    }
}

/// Evaluator for a validated [`PotentialSpec`].
#[derive(Clone, Debug)]
pub struct CompiledPotential {
    kind: Kind,
    support: Support,
    bound: f64,
}

#[derive(Clone, Debug)]
enum Kind {
    Zero,
    Constant(f64),
    PowerDecay {
        c0: f64,
        alpha: f64,
    },
    CosPower {
        lambda: f64,
        beta: f64,
    },
    AlmostMathieu {
        lambda: f64,
        alpha: f64,
        theta0: f64,
    },
    RandomDecay {
        alpha: f64,
        seed: u64,
    },
    SparseComposite {
        alpha: f64,
        seed: u64,
        segments: Vec<(u64, u64)>,
        period: u64,
    },
    Bernoulli,
    Periodic(Vec<f64>),
    Shifted {
        base: Box<CompiledPotential>,
        n0: i64,
    },
    Loaded(Vec<f64>),
}

impl CompiledPotential {
    /// An upper bound for `sup_n |V(n)|` over the potential's domain.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// For file-backed potentials, the number of stored sites.
    pub fn file_len(&self) -> Option<usize> {
        match &self.kind {
            Kind::Loaded(v) => Some(v.len()),
            _ => None,
        }
    }

    fn value(&self, n: i64) -> Result<f64, CoreError> {
        match &self.kind {
            Kind::Zero => Ok(0.0),
            Kind::Constant(c) => Ok(*c),
            Kind::PowerDecay { c0, alpha } => Ok(c0 * (n as f64).powf(-alpha)),
            Kind::CosPower { lambda, beta } => Ok(lambda * cos_power_phase(n, *beta).cos_f64()),
            Kind::AlmostMathieu {
                lambda,
                alpha,
                theta0,
            } => {
                // exact n*alpha in double-double, fractional part, then one
                // f64 cosine: phase error stays O(eps) out to n ~ 10^15
                let turns = Dd::from_i64(n).mul_f64(*alpha).frac_f64();
                Ok(lambda * (TWO_PI.hi * turns + theta0).cos())
            }
            Kind::RandomDecay { alpha, seed } => {
                Ok((n as f64).powf(-alpha) * rng::uniform(*seed, n as u64))
            }
            Kind::SparseComposite {
                alpha,
                seed,
                segments,
                period,
            } => {
                let mut p = (n as u64 - 1) % period;
                for &(gap, block) in segments {
                    if p < gap {
                        return Ok(0.0);
                    }
                    p -= gap;
                    if p < block {
                        let local = (p + 1) as f64; // distance past the gap end
                        return Ok(local.powf(-alpha) * rng::uniform(*seed, n as u64));
                    }
                    p -= block;
                }
                unreachable!("period equals the sum of all segment lengths")
            }
            Kind::Bernoulli => Ok(f64::from(bernoulli::bit_at(n as u64))),
            Kind::Periodic(values) => {
                let q = values.len() as i64;
                Ok(values[(n - 1).rem_euclid(q) as usize])
            }
            Kind::Shifted { base, n0 } => {
                let m = n.checked_add(*n0).ok_or_else(|| {
                    CoreError::InvalidParameter("shifted evaluation overflows i64".into())
                })?;
                base.eval(m)
            }
            Kind::Loaded(values) => {
                if n >= 1 && (n as usize) <= values.len() {
                    Ok(values[n as usize - 1])
                } else {
                    Err(CoreError::OutsideDomain {
                        index: n,
                        support: Support::HalfLine,
                    })
                }
            }
        }
    }
}

impl Potential for CompiledPotential {
    fn eval(&self, n: i64) -> Result<f64, CoreError> {
        if self.support == Support::HalfLine && n < 1 {
            return Err(CoreError::OutsideDomain {
                index: n,
                support: Support::HalfLine,
            });
        }
        self.value(n)
    }

    fn support(&self) -> Support {
        self.support
    }
}

/// `n^beta` as a double-double, for phase reduction mod `2 pi`.
///
/// Half-integer exponents (the ones the experiments use) take the exact
/// `n^k * sqrt(n)` route; other exponents go through `exp(beta ln n)`.
pub fn cos_power_phase(n: i64, beta: f64) -> Dd {
    let x = Dd::from_i64(n);
    let k = beta.floor();
    if beta - k == 0.5 && (0.0..=4.0).contains(&k) {
        let mut p = x.sqrt();
        for _ in 0..k as i64 {
            p = p.mul(x);
        }
        p
    } else {
        x.powf(beta)
    }
}

fn invalid(msg: impl Into<String>) -> PotentialsError {
    PotentialsError::Invalid(msg.into())
}

fn require_finite(name: &str, x: f64) -> Result<(), PotentialsError> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite, got {x}")))
    }
}

/// Families that only make sense for `n >= 1`.
fn half_line_only(family: &Family) -> bool {
    matches!(
        family,
        Family::PowerDecay { .. }
            | Family::CosPower { .. }
            | Family::RandomDecay { .. }
            | Family::SparseComposite { .. }
            | Family::Bernoulli
            | Family::FromFile { .. }
    )
}

fn compile(spec: &PotentialSpec) -> Result<CompiledPotential, PotentialsError> {
    if spec.domain == Domain::WholeLine && half_line_only(&spec.family) {
        return Err(invalid(format!(
            "family {:?} is defined on the half line only",
            family_name(&spec.family)
        )));
    }
    let support = spec.domain.support();
    let (kind, bound) = match &spec.family {
        Family::Zero => (Kind::Zero, 0.0),
        Family::Constant { c } => {
            require_finite("c", *c)?;
            (Kind::Constant(*c), c.abs())
        }
        Family::PowerDecay { c0, alpha } => {
            require_finite("c0", *c0)?;
            require_finite("alpha", *alpha)?;
            if *alpha <= 0.0 {
                return Err(invalid(format!("power_decay needs alpha > 0, got {alpha}")));
            }
            (
                Kind::PowerDecay {
                    c0: *c0,
                    alpha: *alpha,
                },
                c0.abs(),
            )
        }
        Family::CosPower { lambda, beta } => {
            require_finite("lambda", *lambda)?;
            require_finite("beta", *beta)?;
            if *beta <= 1.0 {
                return Err(invalid(format!("cos_power needs beta > 1, got {beta}")));
            }
            (
                Kind::CosPower {
                    lambda: *lambda,
                    beta: *beta,
                },
                lambda.abs(),
            )
        }
        Family::AlmostMathieu {
            lambda,
            alpha,
            theta0,
        } => {
            require_finite("lambda", *lambda)?;
            require_finite("alpha", *alpha)?;
            require_finite("theta0", *theta0)?;
            (
                Kind::AlmostMathieu {
                    lambda: *lambda,
                    alpha: *alpha,
                    theta0: *theta0,
                },
                lambda.abs(),
            )
        }
        Family::RandomDecay { alpha, seed } => {
            require_finite("alpha", *alpha)?;
            if *alpha < 0.0 {
                return Err(invalid(format!(
                    "random_decay needs alpha >= 0, got {alpha}"
                )));
            }
            (
                Kind::RandomDecay {
                    alpha: *alpha,
                    seed: *seed,
                },
                1.0,
            )
        }
        Family::SparseComposite {
            alpha,
            seed,
            gaps,
            blocks,
        } => {
            require_finite("alpha", *alpha)?;
            if !(0.0..0.5).contains(alpha) {
                return Err(invalid(format!(
                    "sparse_composite needs 0 <= alpha < 1/2, got {alpha}"
                )));
            }
            if gaps.len() != blocks.len() {
                return Err(invalid(format!(
                    "sparse_composite needs equally many gaps and blocks, got {} and {}",
                    gaps.len(),
                    blocks.len()
                )));
            }
            if gaps.is_empty() {
                return Err(invalid("sparse_composite needs at least one segment pair"));
            }
            let segments: Vec<(u64, u64)> =
                gaps.iter().copied().zip(blocks.iter().copied()).collect();
            let period: u64 = segments.iter().map(|(g, b)| g + b).sum();
            if period == 0 {
                return Err(invalid("sparse_composite segments must not all be empty"));
            }
            (
                Kind::SparseComposite {
                    alpha: *alpha,
                    seed: *seed,
                    segments,
                    period,
                },
                1.0,
            )
        }
        Family::Bernoulli => (Kind::Bernoulli, 1.0),
        Family::Periodic { values } => {
            if values.is_empty() {
                return Err(invalid("periodic needs at least one value"));
            }
            for (i, v) in values.iter().enumerate() {
                require_finite(&format!("values[{i}]"), *v)?;
            }
            let bound = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            (Kind::Periodic(values.clone()), bound)
        }
        Family::Shifted { base, n0 } => {
            if base.domain != spec.domain {
                return Err(invalid(
                    "shifted potential must declare the same domain as its base",
                ));
            }
            if spec.domain == Domain::HalfLine && *n0 < 0 {
                return Err(invalid(format!(
                    "half-line shift needs n0 >= 0, got {n0}"
                )));
            }
            let base = compile(base)?;
            let bound = base.bound();
            (
                Kind::Shifted {
                    base: Box::new(base),
                    n0: *n0,
                },
                bound,
            )
        }
        Family::FromFile { path } => {
            let values = load_values(path)?;
            let bound = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            (Kind::Loaded(values), bound)
        }
    };
    Ok(CompiledPotential {
        kind,
        support,
        bound,
    })
}

fn family_name(family: &Family) -> &'static str {
    match family {
        Family::Zero => "zero",
        Family::Constant { .. } => "constant",
        Family::PowerDecay { .. } => "power_decay",
        Family::CosPower { .. } => "cos_power",
        Family::AlmostMathieu { .. } => "almost_mathieu",
        Family::RandomDecay { .. } => "random_decay",
        Family::SparseComposite { .. } => "sparse_composite",
        Family::Bernoulli => "bernoulli",
        Family::Periodic { .. } => "periodic",
        Family::Shifted { .. } => "shifted",
        Family::FromFile { .. } => "from_file",
    }
}

fn load_values(path: &Path) -> Result<Vec<f64>, PotentialsError> {
    let text = std::fs::read_to_string(path).map_err(|source| PotentialsError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| PotentialsError::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            content: line.to_string(),
        })?;
        if !v.is_finite() {
            return Err(PotentialsError::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                content: line.to_string(),
            });
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(invalid(format!(
            "potential file {} holds no values",
            path.display()
        )));
    }
    Ok(values)
}

/// `max_{1 <= n <= window} |V(n + n0) - W(n)|`: how far `W` is from the
/// `n0`-shifted tail of `V` over a finite window.
pub fn shift_distance<P: Potential, Q: Potential>(
    v: &P,
    w: &Q,
    n0: i64,
    window: i64,
) -> Result<f64, PotentialsError> {
    if n0 < 0 {
        return Err(invalid(format!("shift must be >= 0, got {n0}")));
    }
    if window < 1 {
        return Err(invalid(format!("window must be >= 1, got {window}")));
    }
    let mut worst = 0.0f64;
    for n in 1..=window {
        let shifted = n
            .checked_add(n0)
            .ok_or_else(|| invalid("shifted site overflows i64"))?;
        let d = (v.eval(shifted)? - w.eval(n)?).abs();
        worst = worst.max(d);
    }
    Ok(worst)
}

/// [`shift_distance`] straight from two specs.
pub fn shift_distance_specs(
    v: &PotentialSpec,
    w: &PotentialSpec,
    n0: i64,
    window: i64,
) -> Result<f64, PotentialsError> {
    shift_distance(&v.compile()?, &w.compile()?, n0, window)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(spec: &PotentialSpec, n: i64) -> f64 {
        spec.compile().unwrap().eval(n).unwrap()
    }

    #[test]
    fn power_decay_example() {
        assert_eq!(eval(&PotentialSpec::power_decay(0.2, 2.0), 2), 0.05);
    }

    #[test]
    fn almost_mathieu_at_origin_gives_full_amplitude() {
        let spec = PotentialSpec::almost_mathieu(3.0, (5.0f64.sqrt() - 1.0) / 2.0, 0.0)
            .on_whole_line();
        assert_eq!(eval(&spec, 0), 3.0);
    }

    #[test]
    fn almost_mathieu_fixtures() {
        // Independently computed with 30-digit arithmetic for the exact f64
        // value of alpha = (sqrt 5 - 1)/2.
        let spec = PotentialSpec::almost_mathieu(3.0, (5.0f64.sqrt() - 1.0) / 2.0, 0.0);
        assert!((eval(&spec, 1) - (-2.2121066342349597)).abs() < 1e-12);
        assert!((eval(&spec, 1_000_000) - 2.9925082492609052).abs() < 1e-9);
    }

    #[test]
    fn cos_power_small_and_large_sites() {
        let spec = PotentialSpec::cos_power(1.0, 1.5);
        assert!((eval(&spec, 4) - 8.0f64.cos()).abs() < 1e-15);
        // large-site fixtures from 30-digit arithmetic; naive f64 phase
        // reduction is off by O(1) radians here
        assert!((eval(&spec, 10_000_000) - (-0.9485076968701021375)).abs() < 1e-11);
        assert!((eval(&spec, 123_456_789) - 0.8203491119408298447).abs() < 1e-11);
        let spec25 = PotentialSpec::cos_power(1.0, 2.5);
        assert!((eval(&spec25, 100_000) - 0.6861501909824160282).abs() < 1e-11);
    }

    #[test]
    fn random_decay_damps_uniform_amplitudes() {
        let spec = PotentialSpec::random_decay(0.8, 11);
        let expect = |n: i64| (n as f64).powf(-0.8) * crate::rng::uniform(11, n as u64);
        for n in [1, 2, 3, 17, 1000] {
            assert_eq!(eval(&spec, n), expect(n));
        }
        // alpha = 0 is exactly the i.i.d. bounded case
        let flat = PotentialSpec::random_decay(0.0, 11);
        assert_eq!(eval(&flat, 3), crate::rng::uniform(11, 3));
    }

    #[test]
    fn sparse_composite_offsets_match_hand_layout() {
        // gaps=(3), blocks=(2): V(1..3)=0, V(4)=1^(-a) a_4, V(5)=2^(-a) a_5,
        // then the pattern repeats: V(6..8)=0, V(9)=1^(-a) a_9.
        let a = 0.25;
        let spec = PotentialSpec::sparse_composite(a, 7, vec![3], vec![2]);
        assert_eq!(eval(&spec, 1), 0.0);
        assert_eq!(eval(&spec, 2), 0.0);
        assert_eq!(eval(&spec, 3), 0.0);
        assert_eq!(eval(&spec, 4), crate::rng::uniform(7, 4));
        assert_eq!(eval(&spec, 5), 2.0f64.powf(-a) * crate::rng::uniform(7, 5));
        assert_eq!(eval(&spec, 8), 0.0);
        assert_eq!(eval(&spec, 9), crate::rng::uniform(7, 9));
    }

    #[test]
    fn sparse_composite_without_gaps_equals_random_decay() {
        let sparse = PotentialSpec::sparse_composite(0.3, 5, vec![0], vec![40]);
        let sparse = sparse.compile().unwrap();
        // local index restarts each cycle, so only the first block matches
        // n^(-alpha) a_n globally; compare within it
        let decay = PotentialSpec::random_decay(0.3, 5).compile().unwrap();
        for n in 1..=40 {
            assert_eq!(sparse.eval(n).unwrap(), decay.eval(n).unwrap());
        }
        // degenerate flat case matches at every site
        let flat_sparse = PotentialSpec::sparse_composite(0.0, 5, vec![0], vec![8])
            .compile()
            .unwrap();
        let flat = PotentialSpec::random_decay(0.0, 5).compile().unwrap();
        for n in 1..=100 {
            assert_eq!(flat_sparse.eval(n).unwrap(), flat.eval(n).unwrap());
        }
    }

    #[test]
    fn periodic_cycles_on_both_domains() {
        let spec = PotentialSpec::periodic(vec![1.5, 0.0, -2.0]);
        assert_eq!(eval(&spec, 1), 1.5);
        assert_eq!(eval(&spec, 2), 0.0);
        assert_eq!(eval(&spec, 3), -2.0);
        assert_eq!(eval(&spec, 4), 1.5);
        let whole = spec.on_whole_line();
        assert_eq!(eval(&whole, 0), -2.0);
        assert_eq!(eval(&whole, -1), 0.0);
        assert_eq!(eval(&whole, -2), 1.5);
        assert_eq!(eval(&whole, -3), -2.0);
    }

    #[test]
    fn shifted_reads_the_base_tail() {
        let base = PotentialSpec::random_decay(0.5, 3);
        let shifted = PotentialSpec::shifted(base.clone(), 10);
        let b = base.compile().unwrap();
        let s = shifted.compile().unwrap();
        for n in 1..=20 {
            assert_eq!(s.eval(n).unwrap(), b.eval(n + 10).unwrap());
        }
    }

    #[test]
    fn shift_distance_examples() {
        let base = PotentialSpec::almost_mathieu(1.0, 0.37, 0.2);
        let moved = PotentialSpec::shifted(base.clone(), 123);
        assert_eq!(shift_distance_specs(&base, &moved, 123, 200).unwrap(), 0.0);
        let zero = PotentialSpec::zero();
        let c = PotentialSpec::constant(-0.7);
        assert_eq!(shift_distance_specs(&zero, &c, 5, 50).unwrap(), 0.7);
    }

    #[test]
    fn half_line_domain_is_enforced() {
        let p = PotentialSpec::power_decay(1.0, 1.0).compile().unwrap();
        assert!(p.eval(0).is_err());
        assert!(p.eval(-3).is_err());
        assert!(p.eval(1).is_ok());
        assert!(matches!(
            PotentialSpec::bernoulli().on_whole_line().compile(),
            Err(PotentialsError::Invalid(_))
        ));
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        assert!(PotentialSpec::power_decay(1.0, 0.0).compile().is_err());
        assert!(PotentialSpec::cos_power(1.0, 1.0).compile().is_err());
        assert!(PotentialSpec::random_decay(-0.1, 1).compile().is_err());
        assert!(PotentialSpec::sparse_composite(0.5, 1, vec![1], vec![1])
            .compile()
            .is_err());
        assert!(PotentialSpec::sparse_composite(0.3, 1, vec![1, 2], vec![1])
            .compile()
            .is_err());
        assert!(PotentialSpec::sparse_composite(0.3, 1, vec![0], vec![0])
            .compile()
            .is_err());
        assert!(PotentialSpec::periodic(vec![]).compile().is_err());
        assert!(PotentialSpec::constant(f64::NAN).compile().is_err());
        let shifted_back = PotentialSpec::shifted(PotentialSpec::bernoulli(), -1);
        assert!(shifted_back.compile().is_err());
        let mismatched = PotentialSpec {
            family: Family::Shifted {
                base: Box::new(PotentialSpec::zero()),
                n0: 0,
            },
            domain: Domain::WholeLine,
        };
        assert!(mismatched.compile().is_err());
    }

    #[test]
    fn bounds_cover_observed_values() {
        let specs = [
            PotentialSpec::zero(),
            PotentialSpec::constant(-3.5),
            PotentialSpec::power_decay(0.2, 2.0),
            PotentialSpec::cos_power(2.0, 1.5),
            PotentialSpec::almost_mathieu(3.0, 0.61, 1.0),
            PotentialSpec::random_decay(0.8, 9),
            PotentialSpec::sparse_composite(0.3, 9, vec![4, 2], vec![3, 8]),
            PotentialSpec::bernoulli(),
            PotentialSpec::periodic(vec![0.5, -1.25]),
        ];
        for spec in &specs {
            let p = spec.compile().unwrap();
            for n in 1..=500 {
                let v = p.eval(n).unwrap();
                assert!(
                    v.abs() <= p.bound() + 1e-15,
                    "{spec:?} at {n}: |{v}| > {}",
                    p.bound()
                );
            }
        }
    }

    #[test]
    fn from_file_round_trips() {
        let dir = std::env::temp_dir();
        let path = dir.join(format!("speclab-pot-{}.txt", std::process::id()));
        std::fs::write(&path, "0.5\n-1.25\n\n3e-2\n").unwrap();
        let spec = PotentialSpec::from_file(&path);
        let p = spec.compile().unwrap();
        assert_eq!(p.file_len(), Some(3));
        assert_eq!(p.eval(1).unwrap(), 0.5);
        assert_eq!(p.eval(2).unwrap(), -1.25);
        assert_eq!(p.eval(3).unwrap(), 0.03);
        assert!(p.eval(4).is_err());
        std::fs::write(&path, "0.5\nnot-a-number\n").unwrap();
        assert!(matches!(
            spec.compile(),
            Err(PotentialsError::Parse { line: 2, .. })
        ));
        std::fs::remove_file(&path).ok();
        assert!(matches!(
            spec.compile(),
            Err(PotentialsError::Io { .. })
        ));
    }
}
