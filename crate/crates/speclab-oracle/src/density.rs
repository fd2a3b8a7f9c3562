//! Smoothed spectral densities on energy grids.
//!
//! Three independent samplers produce the same kind of object:
//!
//! * [`rho_density`] — `(1/pi) Im m(E + i eps)`, the Poisson-smoothed
//!   spectral measure, from the continued fraction;
//! * [`carmona_density`] — `1 / (pi ||T_E(L) u_theta||^2)`, the
//!   transfer-norm reciprocal that converges weakly to the boundary-angle
//!   spectral measure;
//! * [`histogram_density`] — a box-kernel estimate from explicit
//!   eigenvalue/weight data.
//!
//! Each sample set carries provenance in its [`DensityMeta`], and
//! [`min_density`] takes the pointwise minimum of two samplings on the same
//! grid — the standing lower bound used by the averaged-transfer checks. The
//! minimum of two smoothed densities is a proxy: it bounds the absolutely
//! continuous parts, while point masses survive smoothing at scale `eps`.

use serde::Serialize;
use speclab_core::{solution, BoundaryAngle, Potential};

use crate::mfunction::{m_continued_fraction, truncation_size};
use crate::tridiag::{Bc, SpectralData};
use crate::OracleError;

/// Where a set of density samples came from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensityMeta {
    /// `(1/pi) Im m(E + i eps)` at the stated smoothing scale.
    Stieltjes { epsilon: f64, bc: Bc },
    /// `1/(pi ||T_E(length) u_theta||^2)`, `theta` in radians.
    Carmona { length: i64, theta: f64 },
    /// Box-kernel histogram of explicit spectral data.
    Histogram { states: usize, half_width: f64 },
    /// Pointwise minimum of two samplings.
    PointwiseMin,
}

/// Density values over a strictly increasing energy grid.
#[derive(Clone, Debug, Serialize)]
pub struct DensitySamples {
    grid: Vec<f64>,
    values: Vec<f64>,
    meta: DensityMeta,
}

impl DensitySamples {
    fn from_parts(
        grid: Vec<f64>,
        values: Vec<f64>,
        meta: DensityMeta,
    ) -> Result<DensitySamples, OracleError> {
        validate_grid(&grid)?;
        if grid.len() != values.len() {
            return Err(OracleError::Invalid(format!(
                "{} grid points but {} values",
                grid.len(),
                values.len()
            )));
        }
        for (&e, &v) in grid.iter().zip(&values) {
            if !v.is_finite() || v < 0.0 {
                return Err(OracleError::Invalid(format!(
                    "density value {v} at E = {e}"
                )));
            }
        }
        Ok(DensitySamples { grid, values, meta })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn meta(&self) -> DensityMeta {
        self.meta
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Trapezoid mass of the samples over their grid.
    pub fn mass(&self) -> f64 {
        trapezoid(&self.grid, &self.values).expect("validated at construction")
    }
}

fn validate_grid(grid: &[f64]) -> Result<(), OracleError> {
    if grid.len() < 2 {
        return Err(OracleError::Invalid(format!(
            "energy grid needs at least 2 points, got {}",
            grid.len()
        )));
    }
    for pair in grid.windows(2) {
        if !pair[0].is_finite() || !(pair[1] > pair[0]) {
            return Err(OracleError::Invalid(format!(
                "energy grid must be finite and strictly increasing; saw {} then {}",
                pair[0], pair[1]
            )));
        }
    }
    if !grid[grid.len() - 1].is_finite() {
        return Err(OracleError::Invalid("non-finite grid endpoint".into()));
    }
    Ok(())
}

/// `count` evenly spaced points from `a` to `b` inclusive, endpoints exact.
pub fn linspace(a: f64, b: f64, count: usize) -> Result<Vec<f64>, OracleError> {
    if !a.is_finite() || !b.is_finite() || !(a < b) {
        return Err(OracleError::Invalid(format!(
            "linspace needs finite a < b, got [{a}, {b}]"
        )));
    }
    if count < 2 {
        return Err(OracleError::Invalid(format!(
            "linspace needs at least 2 points, got {count}"
        )));
    }
    let step = (b - a) / (count - 1) as f64;
    let mut grid: Vec<f64> = (0..count).map(|i| a + step * i as f64).collect();
    grid[count - 1] = b;
    Ok(grid)
}

/// Composite trapezoid rule over an arbitrary strictly increasing grid.
pub fn trapezoid(grid: &[f64], values: &[f64]) -> Result<f64, OracleError> {
    validate_grid(grid)?;
    if grid.len() != values.len() {
        return Err(OracleError::Invalid(format!(
            "{} grid points but {} values",
            grid.len(),
            values.len()
        )));
    }
    let mut acc = 0.0;
    for i in 0..grid.len() - 1 {
        acc += 0.5 * (values[i] + values[i + 1]) * (grid[i + 1] - grid[i]);
    }
    Ok(acc)
}

/// The free half-line density `sqrt(4 - E^2) / (2 pi)` on `[-2, 2]`.
pub fn free_density_value(e: f64) -> f64 {
    if e.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - e * e).sqrt() / (2.0 * std::f64::consts::PI)
    }
}

/// `(1/pi) Im m(E + i eps)` over the grid, continued fraction at the paired
/// depth `N(eps)`.
///
/// For `NeumannPaper` this is literally `(1/pi) Im m_N`; the affine part of
/// `m_N` contributes a flat `eps/pi`, which is kept, not subtracted.
pub fn rho_density<P: Potential + Sync>(
    pot: &P,
    grid: &[f64],
    epsilon: f64,
    bc: Bc,
) -> Result<DensitySamples, OracleError> {
    validate_grid(grid)?;
    let depth = truncation_size(epsilon)?;
    use rayon::prelude::*;
    let values = grid
        .par_iter()
        .map(|&e| {
            let z = num_complex::Complex64::new(e, epsilon);
            m_continued_fraction(pot, z, bc, depth).map(|m| m.im / std::f64::consts::PI)
        })
        .collect::<Result<Vec<f64>, _>>()?;
    DensitySamples::from_parts(grid.to_vec(), values, DensityMeta::Stieltjes { epsilon, bc })
}

/// `1 / (pi ||T_E(length) u_theta||^2)` over the grid, evaluated in log
/// space. Errors with [`OracleError::DensityOverflow`] if the transfer norm
/// at some energy is so small that the value exceeds `f64` range.
pub fn carmona_density<P: Potential>(
    pot: &P,
    grid: &[f64],
    length: i64,
    theta: BoundaryAngle,
) -> Result<DensitySamples, OracleError> {
    validate_grid(grid)?;
    if length < 1 {
        return Err(OracleError::Invalid(format!(
            "carmona density needs length >= 1, got {length}"
        )));
    }
    let ln_pi = std::f64::consts::PI.ln();
    let mut values = Vec::with_capacity(grid.len());
    for &e in grid {
        let u = solution(pot, e, theta, length)?;
        let log_value = -(ln_pi + u.log_norm_sq(length));
        if log_value > 700.0 {
            return Err(OracleError::DensityOverflow { energy: e });
        }
        values.push(log_value.exp());
    }
    DensitySamples::from_parts(
        grid.to_vec(),
        values,
        DensityMeta::Carmona {
            length,
            theta: theta.radians(),
        },
    )
}

/// Box-kernel density: mass of `data` within `half_width` of each grid
/// point, divided by the window width.
pub fn histogram_density(
    data: &SpectralData,
    grid: &[f64],
    half_width: f64,
) -> Result<DensitySamples, OracleError> {
    validate_grid(grid)?;
    if !half_width.is_finite() || half_width <= 0.0 {
        return Err(OracleError::Invalid(format!(
            "histogram half-width must be positive, got {half_width}"
        )));
    }
    let evs = data.eigenvalues();
    let ws = data.weights();
    let values = grid
        .iter()
        .map(|&e| {
            let lo = evs.partition_point(|&x| x < e - half_width);
            let hi = evs.partition_point(|&x| x <= e + half_width);
            let mass: f64 = ws[lo..hi].iter().sum();
            mass / (2.0 * half_width)
        })
        .collect();
    DensitySamples::from_parts(
        grid.to_vec(),
        values,
        DensityMeta::Histogram {
            states: data.len(),
            half_width,
        },
    )
}

/// Pointwise minimum of two samplings on the identical grid.
pub fn min_density(
    a: &DensitySamples,
    b: &DensitySamples,
) -> Result<DensitySamples, OracleError> {
    if a.len() != b.len() {
        return Err(OracleError::GridMismatch(format!(
            "{} vs {} points",
            a.len(),
            b.len()
        )));
    }
    if let Some(i) = (0..a.len()).find(|&i| a.grid[i] != b.grid[i]) {
        return Err(OracleError::GridMismatch(format!(
            "grids differ at index {i}: {} vs {}",
            a.grid[i], b.grid[i]
        )));
    }
    let values = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(&x, &y)| x.min(y))
        .collect();
    DensitySamples::from_parts(a.grid.clone(), values, DensityMeta::PointwiseMin)
}
