//! Universal growth inequalities under a spectral gap.
//!
//! Given a verified [`GapCertificate`] for `(E, delta)`, every generalized
//! eigenfunction at `E` must climb while crossing the certified window. The
//! audit measures four versions of that claim for the solution grown from
//! seed data `u0 = (u(1), u(0))`:
//!
//! * **origin rows** — `|u(l)|^2 + |u(-l)|^2` against
//!   `delta^2 (1 + delta^2)^{l-1} |u(0)|^2` for `l = 1 ..= n+1`;
//! * **neighborhood rows** — the same left side against
//!   `delta^2 (1 + delta^2)^{l-2} (|u(0)|^2 + |u(1)|^2 + |u(-1)|^2)` for
//!   `l = 2 ..= n+1`;
//! * **direction rows** — `||T(l,0) phi||^2 + ||T(-l,0) phi||^2` against
//!   `delta^2 (1 + delta^2)^{l-1}` for unit `phi` on an angle grid,
//!   reporting the worst angle per `l`, for `l = 1 ..= n`;
//! * **product row** — `||T(-n, n)||` against
//!   `(1/2) delta^2 (1 + delta^2)^{n-1}`.
//!
//! Everything is compared in log space. Rows whose two sides agree to
//! within `10^-3` in the log are recomputed with double-double recursion
//! before they are classified, so a reported verdict never hinges on `f64`
//! accumulation error. Near-tie rows are reported as [`RowVerdict::Inconclusive`]
//! rather than passing.
//!
//! The audit is a measurement, not a proof assistant: with a certificate
//! pushed right up against the measured gap, a `Fail` row is a finding about
//! the displayed constant, not necessarily a bug (see the staggered-potential
//! test at the bottom of this file).

use crate::{BarrierError, GapCertificate};
use serde::Serialize;
use speclab_core::dd::{Dd, LN_2};
use speclab_core::{log_add_exp, step, transfer, Potential, ScaledProduct, Support};

/// Rows whose `|lhs_log - rhs_log|` is below this are recomputed in
/// double-double arithmetic before classification.
const REFINE_LOG_BAND: f64 = 1e-3;

/// Relative margin below which a row fails: `lhs < rhs (1 - 1e-8)`.
const FAIL_REL: f64 = 1e-8;

/// Relative margin above which a row passes: `lhs >= rhs (1 + 1e-6)`.
/// Anything between the two lines is inconclusive.
const PASS_REL: f64 = 1e-6;

/// Verdict for a single audited row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowVerdict {
    /// Left side clears the right side by more than the trust band.
    Pass,
    /// The right side vanishes (zero seed component), so the row is vacuous.
    TriviallyPass,
    /// The two sides agree to within the trust band even after the
    /// double-double recheck; neither verdict would be honest.
    Inconclusive,
    /// Left side is below the right side by more than the trust band.
    Fail,
}

impl RowVerdict {
    fn sign(self) -> i8 {
        match self {
            RowVerdict::Pass | RowVerdict::TriviallyPass => 1,
            RowVerdict::Inconclusive => 0,
            RowVerdict::Fail => -1,
        }
    }
}

/// One audited inequality instance at distance `ell`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AuditRow {
    pub ell: i64,
    /// `ln` of the measured left side.
    pub lhs_log: f64,
    /// `ln` of the theoretical right side (`-inf` when vacuous).
    pub rhs_log: f64,
    /// `+1` pass, `0` inconclusive, `-1` fail.
    pub margin_sign: i8,
    pub verdict: RowVerdict,
    /// True when the row was recomputed in double-double arithmetic.
    pub refined: bool,
}

impl AuditRow {
    /// `lhs_log - rhs_log`; `+inf` for vacuous rows.
    pub fn log_margin(&self) -> f64 {
        if self.rhs_log == f64::NEG_INFINITY {
            f64::INFINITY
        } else {
            self.lhs_log - self.rhs_log
        }
    }
}

fn classify(lhs_log: f64, rhs_log: f64) -> RowVerdict {
    if rhs_log == f64::NEG_INFINITY {
        return RowVerdict::TriviallyPass;
    }
    let margin = lhs_log - rhs_log;
    if margin < (-FAIL_REL).ln_1p() {
        RowVerdict::Fail
    } else if margin >= PASS_REL.ln_1p() {
        RowVerdict::Pass
    } else {
        // Includes NaN margins: refusing a verdict is the safe default.
        RowVerdict::Inconclusive
    }
}

fn make_row(ell: i64, lhs_log: f64, rhs_log: f64, refined: bool) -> AuditRow {
    let verdict = classify(lhs_log, rhs_log);
    AuditRow {
        ell,
        lhs_log,
        rhs_log,
        margin_sign: verdict.sign(),
        verdict,
        refined,
    }
}

/// Full audit report; serializes to JSON with one array per inequality.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthAudit {
    pub e: f64,
    pub delta: f64,
    pub n: i64,
    pub u0: (f64, f64),
    /// Component growth anchored at `|u(0)|^2`, `l = 1 ..= n+1`.
    pub origin_growth: Vec<AuditRow>,
    /// Component growth anchored at the origin's neighborhood mass,
    /// `l = 2 ..= n+1`.
    pub neighborhood_growth: Vec<AuditRow>,
    /// Worst-direction vector growth over the angle grid, `l = 1 ..= n`.
    pub direction_growth: Vec<AuditRow>,
    /// The crossing-product norm bound (single row at `l = n`).
    pub product_norm: Vec<AuditRow>,
}

impl GrowthAudit {
    /// Every row of every inequality.
    pub fn all_rows(&self) -> impl Iterator<Item = &AuditRow> {
        self.origin_growth
            .iter()
            .chain(&self.neighborhood_growth)
            .chain(&self.direction_growth)
            .chain(&self.product_norm)
    }

    /// True when no row failed. Inconclusive rows do not fail the audit,
    /// but they are not reported as passing either.
    pub fn passes(&self) -> bool {
        self.all_rows().all(|r| r.verdict != RowVerdict::Fail)
    }

    /// Smallest log margin over the non-vacuous rows.
    pub fn worst_log_margin(&self) -> f64 {
        self.all_rows()
            .filter(|r| r.rhs_log != f64::NEG_INFINITY)
            .map(AuditRow::log_margin)
            .fold(f64::INFINITY, f64::min)
    }

    /// How many rows needed the double-double recheck.
    pub fn refined_count(&self) -> usize {
        self.all_rows().filter(|r| r.refined).count()
    }
}

/// `count` unit vectors at angles `i pi / count`; directions are projective,
/// so the grid covers `[0, pi)`.
pub fn phi_grid(count: usize) -> Vec<(f64, f64)> {
    (0..count)
        .map(|i| {
            let theta = std::f64::consts::PI * (i as f64) / (count as f64);
            (theta.cos(), theta.sin())
        })
        .collect()
}

/// Per-seed logs along one direction of the line.
struct WalkLogs {
    /// `[seed][l-1]`: `ln ||T(+-l, 0) seed||^2`.
    vec_sq: Vec<Vec<f64>>,
    /// `[seed][l-1]`: `ln |u(+-l)|^2` (second component of the image).
    comp_sq: Vec<Vec<f64>>,
}

/// Grow every seed through `T(l, 0)` (forward) or `T(-l, 0)` (backward)
/// for `l = 1 ..= l_max`, recording log magnitudes.
fn walk_logs<P: Potential>(
    pot: &P,
    e: f64,
    seeds: &[(f64, f64)],
    l_max: i64,
    backward: bool,
) -> Result<WalkLogs, BarrierError> {
    let mut logs = WalkLogs {
        vec_sq: vec![Vec::with_capacity(l_max as usize); seeds.len()],
        comp_sq: vec![Vec::with_capacity(l_max as usize); seeds.len()],
    };
    let mut prod = ScaledProduct::identity();
    for l in 1..=l_max {
        if backward {
            // T(-l, 0) = A(-l+1)^{-1} T(-(l-1), 0); the adjugate of a
            // unimodular step is its exact inverse.
            prod.push_left(&step(pot.eval(-l + 1)?, e).adjugate());
        } else {
            prod.push_left(&step(pot.eval(l)?, e));
        }
        for (i, &seed) in seeds.iter().enumerate() {
            let ((_, comp), log_norm) = prod.apply_log(seed);
            logs.vec_sq[i].push(2.0 * log_norm);
            logs.comp_sq[i].push(if comp == 0.0 {
                f64::NEG_INFINITY
            } else {
                2.0 * (comp.abs().ln() + log_norm)
            });
        }
    }
    Ok(logs)
}

/// Double-double version of [`walk_logs`] for a single seed: per `l`,
/// `(ln ||vec||^2, ln |u|^2)` computed with compensated recursion so that
/// `f64` accumulation error cannot decide a near-tie row.
fn dd_walk_logs<P: Potential>(
    pot: &P,
    e: f64,
    seed: (f64, f64),
    l_max: i64,
    backward: bool,
) -> Result<Vec<(f64, f64)>, BarrierError> {
    const UP: f64 = 1e150;
    const DOWN: f64 = 1e-150;
    let rescale = 2.0f64.powi(500);
    let mut p = Dd::from_f64(seed.0);
    let mut q = Dd::from_f64(seed.1);
    let mut shift: i64 = 0; // net count of 2^500 down-scalings
    let mut out = Vec::with_capacity(l_max as usize);
    for l in 1..=l_max {
        let site = if backward { -l + 1 } else { l };
        let x = Dd::from_f64(e).sub(Dd::from_f64(pot.eval(site)?));
        if backward {
            // (p, q) <- A(site)^{-1} (p, q) = (q, x q - p).
            let new_q = x.mul(q).sub(p);
            p = q;
            q = new_q;
        } else {
            // (p, q) <- A(site) (p, q) = (x p - q, p).
            let new_p = x.mul(p).sub(q);
            q = p;
            p = new_p;
        }
        let mag = p.hi.abs().max(q.hi.abs());
        if mag > UP {
            p = p.mul_f64(1.0 / rescale);
            q = q.mul_f64(1.0 / rescale);
            shift += 1;
        } else if mag < DOWN && mag > 0.0 {
            p = p.mul_f64(rescale);
            q = q.mul_f64(rescale);
            shift -= 1;
        }
        let shift_log = (shift as f64) * 1000.0 * LN_2.hi;
        let comp_sq = if q.hi == 0.0 && q.lo == 0.0 {
            f64::NEG_INFINITY
        } else {
            q.abs().ln().mul_f64(2.0).to_f64() + shift_log
        };
        // ln(p^2 + q^2) without squaring out of range: factor the bigger leg.
        let (big, small) = if p.hi.abs() >= q.hi.abs() { (p, q) } else { (q, p) };
        let vec_sq = if big.hi == 0.0 && big.lo == 0.0 {
            f64::NEG_INFINITY
        } else {
            let r = small.div(big);
            big.abs().ln().mul_f64(2.0).add(Dd::ONE.add(r.mul(r)).ln()).to_f64() + shift_log
        };
        out.push((vec_sq, comp_sq));
    }
    Ok(out)
}

/// `ln ||T(-n, n)||` recomputed in double-double arithmetic.
///
/// Computed on the forward product `T(n, -n)` — the adjugate inverse has
/// identical singular values, so the two norms agree exactly.
fn dd_crossing_norm_log<P: Potential>(pot: &P, e: f64, n: i64) -> Result<f64, BarrierError> {
    const UP: f64 = 1e150;
    let rescale = 2.0f64.powi(500);
    // Entries (a b; c d), starting from the identity.
    let (mut a, mut b, mut c, mut d) = (Dd::ONE, Dd::ZERO, Dd::ZERO, Dd::ONE);
    let mut shift: i64 = 0;
    for site in (-n + 1)..=n {
        let x = Dd::from_f64(e).sub(Dd::from_f64(pot.eval(site)?));
        // Left-multiply by [[x, -1], [1, 0]].
        let (na, nb) = (x.mul(a).sub(c), x.mul(b).sub(d));
        c = a;
        d = b;
        a = na;
        b = nb;
        let mag = a.hi.abs().max(b.hi.abs()).max(c.hi.abs()).max(d.hi.abs());
        if mag > UP {
            a = a.mul_f64(1.0 / rescale);
            b = b.mul_f64(1.0 / rescale);
            c = c.mul_f64(1.0 / rescale);
            d = d.mul_f64(1.0 / rescale);
            shift += 1;
        }
    }
    let frob = a.mul(a).add(b.mul(b)).add(c.mul(c)).add(d.mul(d));
    let det = a.mul(d).sub(b.mul(c));
    // sigma_max^2 = (frob + sqrt(frob^2 - 4 det^2)) / 2, clamped against
    // rounding when the discriminant cancels to nothing.
    let disc = frob.mul(frob).sub(det.mul(det).mul_f64(4.0));
    let disc = if disc.hi <= 0.0 { Dd::ZERO } else { disc.sqrt() };
    let sigma_sq = frob.add(disc).mul_f64(0.5);
    Ok(0.5 * sigma_sq.ln().to_f64() + (shift as f64) * 500.0 * LN_2.hi)
}

fn validate<P: Potential>(
    pot: &P,
    cert: &GapCertificate,
    n: i64,
    u0: (f64, f64),
) -> Result<(), BarrierError> {
    if pot.support() != Support::WholeLine {
        return Err(BarrierError::Invalid(
            "growth audits walk both directions; the potential must be \
             defined on all of Z"
                .into(),
        ));
    }
    if !cert.verified {
        return Err(BarrierError::UnverifiedCertificate {
            min_eig_distance: cert.min_eig_distance,
            delta: cert.delta,
            stable: cert.stable(),
        });
    }
    if n < 1 {
        return Err(BarrierError::Invalid(format!("need n >= 1, got {n}")));
    }
    // The inequalities at distance l touch sites +-(n+1), and the block
    // must agree with the full operator on every cut-off solution, so the
    // window has to cover {-(n+1), ..., n+1}, one past the audited range.
    if !cert.covers(n + 1) {
        return Err(BarrierError::BadWindow {
            lo: cert.window.0,
            hi: cert.window.1,
            why: format!("audit at n = {n} needs the window to cover +-{}", n + 1),
        });
    }
    if !u0.0.is_finite() || !u0.1.is_finite() || (u0.0 == 0.0 && u0.1 == 0.0) {
        return Err(BarrierError::Invalid(format!(
            "seed data must be finite and nonzero, got ({}, {})",
            u0.0, u0.1
        )));
    }
    Ok(())
}

/// Audit the growth inequalities with the default 16-angle direction grid.
pub fn growth_audit<P: Potential>(
    pot: &P,
    cert: &GapCertificate,
    n: i64,
    u0: (f64, f64),
) -> Result<GrowthAudit, BarrierError> {
    growth_audit_with_grid(pot, cert, n, u0, 16)
}

/// Audit the growth inequalities with a caller-chosen direction grid size.
pub fn growth_audit_with_grid<P: Potential>(
    pot: &P,
    cert: &GapCertificate,
    n: i64,
    u0: (f64, f64),
    phi_count: usize,
) -> Result<GrowthAudit, BarrierError> {
    validate(pot, cert, n, u0)?;
    if phi_count == 0 {
        return Err(BarrierError::Invalid("need at least one direction".into()));
    }
    let (e, delta) = (cert.e, cert.delta);
    let ln_d2 = 2.0 * delta.ln();
    let ln1p_d2 = (delta * delta).ln_1p();

    let mut seeds = vec![u0];
    let phis = phi_grid(phi_count);
    seeds.extend(&phis);
    let fwd = walk_logs(pot, e, &seeds, n + 1, false)?;
    let bwd = walk_logs(pot, e, &seeds, n + 1, true)?;

    // Anchors: |u(0)|^2, |u(1)|^2 exactly from the seed, |u(-1)|^2 walked.
    let u0_sq_log = if u0.1 == 0.0 { f64::NEG_INFINITY } else { 2.0 * u0.1.abs().ln() };
    let u1_sq_log = if u0.0 == 0.0 { f64::NEG_INFINITY } else { 2.0 * u0.0.abs().ln() };
    let neighborhood_log = log_add_exp(log_add_exp(u0_sq_log, u1_sq_log), bwd.comp_sq[0][0]);

    let mut origin_growth = Vec::with_capacity(n as usize + 1);
    let mut neighborhood_growth = Vec::with_capacity(n as usize);
    for l in 1..=n + 1 {
        let idx = (l - 1) as usize;
        let lhs = log_add_exp(fwd.comp_sq[0][idx], bwd.comp_sq[0][idx]);
        let rhs = ln_d2 + ((l - 1) as f64) * ln1p_d2 + u0_sq_log;
        origin_growth.push(make_row(l, lhs, rhs, false));
        if l >= 2 {
            let rhs = ln_d2 + ((l - 2) as f64) * ln1p_d2 + neighborhood_log;
            neighborhood_growth.push(make_row(l, lhs, rhs, false));
        }
    }

    let mut direction_growth = Vec::with_capacity(n as usize);
    for l in 1..=n {
        let idx = (l - 1) as usize;
        let lhs = (1..seeds.len())
            .map(|i| log_add_exp(fwd.vec_sq[i][idx], bwd.vec_sq[i][idx]))
            .fold(f64::INFINITY, f64::min);
        let rhs = ln_d2 + ((l - 1) as f64) * ln1p_d2;
        direction_growth.push(make_row(l, lhs, rhs, false));
    }

    let crossing = transfer(pot, e, -n, 0)?
        .compose(&transfer(pot, e, n, 0)?.inverse_unimodular());
    let product_rhs = 0.5f64.ln() + ln_d2 + ((n - 1) as f64) * ln1p_d2;
    let product_norm = vec![make_row(n, crossing.log_opnorm(), product_rhs, false)];

    let mut audit = GrowthAudit {
        e,
        delta,
        n,
        u0,
        origin_growth,
        neighborhood_growth,
        direction_growth,
        product_norm,
    };
    refine_near_ties(pot, &mut audit, &phis)?;
    Ok(audit)
}

/// True when the two sides are close enough that `f64` accumulation error
/// could decide the verdict.
fn near_tie(lhs_log: f64, rhs_log: f64) -> bool {
    rhs_log != f64::NEG_INFINITY && (lhs_log - rhs_log).abs() < REFINE_LOG_BAND
}

/// Recompute every near-tie row in double-double arithmetic and reclassify.
fn refine_near_ties<P: Potential>(
    pot: &P,
    audit: &mut GrowthAudit,
    phis: &[(f64, f64)],
) -> Result<(), BarrierError> {
    let near = |row: &AuditRow| near_tie(row.lhs_log, row.rhs_log);
    let (e, delta, n, u0) = (audit.e, audit.delta, audit.n, audit.u0);
    let ln_d2 = 2.0 * delta.ln();
    let ln1p_d2 = (delta * delta).ln_1p();

    let component_rows_flagged = audit
        .origin_growth
        .iter()
        .chain(&audit.neighborhood_growth)
        .any(near);
    if component_rows_flagged {
        let fwd = dd_walk_logs(pot, e, u0, n + 1, false)?;
        let bwd = dd_walk_logs(pot, e, u0, n + 1, true)?;
        let u0_sq_log = if u0.1 == 0.0 { f64::NEG_INFINITY } else { 2.0 * u0.1.abs().ln() };
        let u1_sq_log = if u0.0 == 0.0 { f64::NEG_INFINITY } else { 2.0 * u0.0.abs().ln() };
        let neighborhood_log = log_add_exp(log_add_exp(u0_sq_log, u1_sq_log), bwd[0].1);
        for row in audit.origin_growth.iter_mut().filter(|r| near(r)) {
            let idx = (row.ell - 1) as usize;
            let lhs = log_add_exp(fwd[idx].1, bwd[idx].1);
            *row = make_row(row.ell, lhs, row.rhs_log, true);
        }
        for row in audit.neighborhood_growth.iter_mut().filter(|r| near(r)) {
            let idx = (row.ell - 1) as usize;
            let lhs = log_add_exp(fwd[idx].1, bwd[idx].1);
            let rhs = ln_d2 + ((row.ell - 2) as f64) * ln1p_d2 + neighborhood_log;
            *row = make_row(row.ell, lhs, rhs, true);
        }
    }

    if audit.direction_growth.iter().any(near) {
        let mut fwd = Vec::with_capacity(phis.len());
        let mut bwd = Vec::with_capacity(phis.len());
        for &phi in phis {
            fwd.push(dd_walk_logs(pot, e, phi, n, false)?);
            bwd.push(dd_walk_logs(pot, e, phi, n, true)?);
        }
        for row in audit.direction_growth.iter_mut().filter(|r| near(r)) {
            let idx = (row.ell - 1) as usize;
            let lhs = (0..phis.len())
                .map(|i| log_add_exp(fwd[i][idx].0, bwd[i][idx].0))
                .fold(f64::INFINITY, f64::min);
            *row = make_row(row.ell, lhs, row.rhs_log, true);
        }
    }

    if near(&audit.product_norm[0]) {
        let lhs = dd_crossing_norm_log(pot, e, n)?;
        let rhs = audit.product_norm[0].rhs_log;
        audit.product_norm[0] = make_row(n, lhs, rhs, true);
    }
    Ok(())
}

/// Direction rows for one specific unit direction `phi` (rather than the
/// worst angle of a grid). Used to cross-check that a passing origin row
/// stays passing when upgraded to the vector-norm inequality seeded at the
/// same direction.
pub fn direction_rows_for<P: Potential>(
    pot: &P,
    cert: &GapCertificate,
    n: i64,
    phi: (f64, f64),
) -> Result<Vec<AuditRow>, BarrierError> {
    validate(pot, cert, n, phi)?;
    let norm = phi.0.hypot(phi.1);
    let unit = (phi.0 / norm, phi.1 / norm);
    let (e, delta) = (cert.e, cert.delta);
    let ln_d2 = 2.0 * delta.ln();
    let ln1p_d2 = (delta * delta).ln_1p();

    let fwd = walk_logs(pot, e, &[unit], n, false)?;
    let bwd = walk_logs(pot, e, &[unit], n, true)?;
    let mut rows = Vec::with_capacity(n as usize);
    for l in 1..=n {
        let idx = (l - 1) as usize;
        let lhs = log_add_exp(fwd.vec_sq[0][idx], bwd.vec_sq[0][idx]);
        let rhs = ln_d2 + ((l - 1) as f64) * ln1p_d2;
        rows.push(make_row(l, lhs, rhs, false));
    }
    // Same near-tie policy as the full audit.
    let need: Vec<i64> = rows
        .iter()
        .filter(|r| (r.lhs_log - r.rhs_log).abs() < REFINE_LOG_BAND)
        .map(|r| r.ell)
        .collect();
    if !need.is_empty() {
        let dfwd = dd_walk_logs(pot, e, unit, n, false)?;
        let dbwd = dd_walk_logs(pot, e, unit, n, true)?;
        for row in rows.iter_mut().filter(|r| need.contains(&r.ell)) {
            let idx = (row.ell - 1) as usize;
            let lhs = log_add_exp(dfwd[idx].0, dbwd[idx].0);
            *row = make_row(row.ell, lhs, row.rhs_log, true);
        }
    }
    Ok(rows)
}
