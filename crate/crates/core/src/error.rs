//! Error type shared by every module of the crate.

/// Crate-wide error enum. Variants are grouped by how a caller should react:
/// bad inputs ([`Error::DimensionMismatch`], [`Error::InvalidParameter`],
/// [`Error::InvalidSpec`]), refusal to exceed a resource guard
/// ([`Error::GuardExceeded`]), and numerical trouble
/// ([`Error::NotUnitary`], [`Error::NotCptp`], [`Error::Numerical`]).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("matrix is not unitary (max |U U^dag - I| = {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("map is not CPTP: {reason}")]
    NotCptp { reason: String },

    #[error("{what} exceeds its guard: limit {limit}, requested {requested}")]
    GuardExceeded {
        what: &'static str,
        limit: usize,
        requested: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid class spec `{0}`")]
    InvalidSpec(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization failure: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
