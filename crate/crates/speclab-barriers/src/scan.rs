//! Scans for unbounded-potential barriers.
//!
//! A site where `|V|` is huge forces a huge one-step transfer norm at every
//! energy at once: `||A(n)|| >= |E - V(n)| / sqrt(2)` from the Frobenius
//! norm. A sequence of such sites acts as a chain of barriers, and the scan
//! reports the record sites of `|V|` together with the *worst-case* (minimum
//! over the energy grid) one-step norm at each, so divergence is witnessed
//! uniformly in the energy rather than pointwise.

use crate::BarrierError;
use serde::Serialize;
use speclab_core::{step, Potential};

/// How many `|V|`-record sites the report keeps (the latest, i.e. largest).
const KEPT_RECORDS: usize = 32;

/// Additive margin on `max |V|` between the two halves of the scan before
/// the report claims evidence of unboundedness. A bounded potential with
/// i.i.d. noise keeps setting hair-width records forever, so "a new record
/// exists" is not evidence; a genuinely divergent `V` — even one as slow as
/// `log n`, which gains `ln 2 ~ 0.69` per doubling — clears an `O(1)`
/// hurdle on every doubling.
const EVIDENCE_MARGIN: f64 = 0.1;

/// One `|V|`-record site and the one-step norm it forces.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BarrierSite {
    pub site: i64,
    pub v_abs: f64,
    /// `min` over the energy grid of `||A(site)||`.
    pub min_one_step_norm: f64,
}

/// Report of a record scan over `1 ..= n_max`.
#[derive(Clone, Debug, Serialize)]
pub struct BarrierScan {
    pub n_max: i64,
    pub e_grid: Vec<f64>,
    /// `max |V|` over sites `<= n_max / 2`.
    pub first_half_max_v: f64,
    /// `max |V|` over sites `> n_max / 2`.
    pub second_half_max_v: f64,
    /// The latest (largest) running records of `|V|`, oldest first.
    pub records: Vec<BarrierSite>,
    /// True when the second half of the scan pushed `max |V|` up by more
    /// than [`EVIDENCE_MARGIN`] — consistent with `limsup |V| = inf`,
    /// never a proof of it.
    pub unbounded_evidence: bool,
}

/// Scan `V(1) ..= V(n_max)` for running records of `|V|` and measure the
/// one-step transfer norm each record forces across the energy grid.
pub fn unbounded_barrier_scan<P: Potential>(
    pot: &P,
    e_grid: &[f64],
    n_max: i64,
) -> Result<BarrierScan, BarrierError> {
    if e_grid.is_empty() || e_grid.iter().any(|e| !e.is_finite()) {
        return Err(BarrierError::Invalid(
            "the energy grid must be non-empty and finite".into(),
        ));
    }
    if n_max < 2 {
        return Err(BarrierError::Invalid(format!("need n_max >= 2, got {n_max}")));
    }
    let min_step_norm = |v: f64| {
        e_grid
            .iter()
            .map(|&e| step(v, e).opnorm())
            .fold(f64::INFINITY, f64::min)
    };

    let half = n_max / 2;
    let mut first_half_max_v = f64::NEG_INFINITY;
    let mut second_half_max_v = f64::NEG_INFINITY;
    let mut best = f64::NEG_INFINITY;
    let mut records: Vec<(i64, f64)> = Vec::new();
    for site in 1..=n_max {
        let v = pot.eval(site)?;
        let v_abs = v.abs();
        if site <= half {
            first_half_max_v = first_half_max_v.max(v_abs);
        } else {
            second_half_max_v = second_half_max_v.max(v_abs);
        }
        if v_abs > best {
            best = v_abs;
            records.push((site, v));
        }
    }
    let tail = records.len().saturating_sub(KEPT_RECORDS);
    let records = records[tail..]
        .iter()
        .map(|&(site, v)| BarrierSite {
            site,
            v_abs: v.abs(),
            min_one_step_norm: min_step_norm(v),
        })
        .collect();

    Ok(BarrierScan {
        n_max,
        e_grid: e_grid.to_vec(),
        first_half_max_v,
        second_half_max_v,
        records,
        unbounded_evidence: second_half_max_v >= first_half_max_v + EVIDENCE_MARGIN,
    })
}
