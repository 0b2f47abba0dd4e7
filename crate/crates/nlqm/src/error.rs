//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised by construction, evaluation, and integration routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Two objects that must live in the same space have different dimensions.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// Two state vectors refer to different bases.
    #[error("basis mismatch: `{left}` vs `{right}`")]
    BasisMismatch { left: String, right: String },

    /// An input matrix fails the Hermiticity acceptance test.
    #[error("matrix is not Hermitian: max |M - M\u{2020}| = {deviation:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    /// An input is degenerate in a way that makes the operation undefined
    /// (e.g. a zero-norm pair handed to the density matrix).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A caller broke a documented precondition.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// A named constraint on a solution spec is violated beyond tolerance.
    #[error("constraint `{constraint}` violated: residual {residual:.3e} exceeds {tolerance:.3e}")]
    ConstraintViolation {
        constraint: String,
        residual: f64,
        tolerance: f64,
    },

    /// Time stepping failed (step-size underflow or non-finite values).
    #[error("integration failed at t = {last_good_time}: {reason}")]
    IntegrationFailure { last_good_time: f64, reason: String },

    /// The complex-coupling single-vector norm law was requested outside the
    /// window 2b(t - t0) < 0 on which it exists.
    #[error(
        "norm law exists only while 2b(t - t0) < 0; got 2b(t - t0) = {value} \
         (b = {b}, t0 = {t0}, t = {t})"
    )]
    ExistenceWindow { b: f64, t0: f64, t: f64, value: f64 },

    /// The operation applies to a different coupling case (real vs complex g).
    #[error("wrong coupling case: {0}")]
    WrongCase(String),
}

pub type Result<T> = std::result::Result<T, Error>;
