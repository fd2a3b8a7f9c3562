use thiserror::Error;

/// Index support of a potential: half-line potentials are defined for
/// `n >= 1`, whole-line potentials for every integer `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Support {
    HalfLine,
    WholeLine,
}

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("potential undefined at site {index} (support: {support:?})")]
    OutsideDomain { index: i64, support: Support },

    #[error("matrix is numerically singular (|det| = {det:e})")]
    Singular { det: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
