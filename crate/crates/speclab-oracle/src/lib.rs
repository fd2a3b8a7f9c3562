//! Spectral oracles for half-line discrete Schrödinger operators.
//!
//! Everything here answers one question two independent ways. Truncate the
//! operator to `N` sites and you can diagonalise it exactly — eigenvalues by
//! Sturm bisection, weights by inverse iteration ([`tridiag`]). Alternatively,
//! run the resolvent's continued fraction or a transfer-matrix recursion down
//! the half line ([`mfunction`], [`density`]). The two routes share nothing
//! but the potential, so their agreement is a real check and their
//! disagreement localises bugs.
//!
//! The main objects:
//!
//! * [`SpectralData`] — eigenvalue/weight pairs of a truncation, i.e. a finite
//!   spectral measure;
//! * [`m_function`] — the Borel transform of the half-line spectral measure
//!   for either boundary condition, with `m_dirichlet * m_neumann = -1`;
//! * [`DensitySamples`] — smoothed densities on an energy grid, whether from
//!   `Im m`, from a transfer-norm reciprocal, or from an eigenvalue histogram;
//! * [`parseval_check`] — completeness of transfer-recursed eigenfunctions
//!   against diagonalisation, site by site.

pub mod density;
pub mod mfunction;
pub mod parseval;
pub mod scan;
pub mod soft;
pub mod tridiag;

use speclab_core::CoreError;
use speclab_potentials::PotentialsError;

pub use density::{
    carmona_density, free_density_value, histogram_density, linspace, min_density, rho_density,
    trapezoid, DensityMeta, DensitySamples,
};
pub use mfunction::{
    m_continued_fraction, m_eigensum, m_function, m_truncated_oracle, truncation_size,
};
pub use parseval::{parseval_check, ParsevalReport};
pub use scan::{discriminant_spectrum, lq_norm_scan, DiscriminantScan, LqScan};
pub use soft::{averaged_step_norm_check, averaged_window_rms_check, SoftCheckReport};
pub use tridiag::{
    boundary_angle_eig, eig, free_spectral_data, Bc, SpectralData, TruncatedOperator,
};

/// Errors from spectral computations.
#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    /// A parameter fails a documented precondition.
    #[error("invalid parameter: {0}")]
    Invalid(String),

    /// Two density samplings were combined but live on different grids.
    #[error("energy grids differ: {0}")]
    GridMismatch(String),

    /// Two eigenvalues of a truncation coincide to machine precision, so
    /// weights cannot be attributed to either one individually.
    #[error("eigenvalues {index} and {} coincide at {value:e} (gap below machine resolution)", index + 1)]
    DegenerateSpectrum { index: usize, value: f64 },

    /// A density value exceeds the representable range; the transfer norm at
    /// this energy is too small for the requested length.
    #[error("density overflows f64 at E = {energy}; reduce the length")]
    DensityOverflow { energy: f64 },

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error(transparent)]
    Potentials(#[from] PotentialsError),
}
