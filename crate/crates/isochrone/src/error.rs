//! Crate-wide error type.

use thiserror::Error;

/// Errors shared by the series kernel, the potential families and the
/// numerical engines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("series truncation orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),

    #[error("series has zero constant term and is not invertible")]
    NonInvertibleSeries,

    #[error("inner series of a composition must have zero constant term")]
    CompositionConstant,

    #[error("series is not reversible (needs f(0) = 0, f'(0) = 1)")]
    NotReversible,

    #[error("series is not a normalized restoring force (needs g(0) = 0, g'(0) = 1)")]
    NotNormalized,

    #[error("series order {0} too small: {1}")]
    OrderTooSmall(usize, &'static str),

    #[error("invalid coefficient index {0}: {1}")]
    BadCoefficientIndex(usize, &'static str),

    #[error("invalid family parameter: {0}")]
    InvalidFamily(String),

    #[error("cannot parse family spec `{0}`: {1}")]
    ParseSpec(String, String),

    #[error("energy {c} outside the admissible range (0, {c_max})")]
    EnergyOutOfRange { c: f64, c_max: f64 },

    #[error("x = {x} outside the potential domain ({lo}, {hi})")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("no conjugate point below the critical energy for x = {x} (G(x) = {energy}, critical {c_bar})")]
    InvolutionRange { x: f64, energy: f64, c_bar: f64 },

    #[error("root finding failed: {0}")]
    RootFailure(String),

    #[error("simulation exceeded max_time = {0}")]
    MaxTimeExceeded(f64),

    #[error("insufficient smoothness data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
