//! Error type shared across the engine.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Inversion of a series whose constant term is zero.
    #[error("series is not invertible (zero constant term)")]
    NonInvertible,

    /// A first-order solve hit a nonzero coefficient in its resonant slot.
    /// This is meaningful output: it certifies nonexistence of a solution.
    #[error("obstruction at degree {degree}: coefficient {value}")]
    Obstruction { degree: usize, value: String },

    /// A computation needed coefficients beyond the truncation order.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    /// `solve_shift` target outside `b·Ξ_λ^{(j)}`.
    #[error("element is not in the image space: {0}")]
    NotInImage(String),

    /// A generated module fails the structure checks of a theme.
    #[error("generated module is not a theme: {0}")]
    NotATheme(String),

    /// Twist parameter too small for the twisted dual to stay geometric.
    #[error("twist parameter {delta} must exceed {bound}")]
    DeltaTooSmall { delta: String, bound: String },

    /// Tensor shift would leave the geometric range.
    #[error("shift {delta} drives lambda_1 to {new_lambda1}, below the valid range")]
    ShiftTooNegative { delta: String, new_lambda1: String },

    /// Operation defined only for a specific rank.
    #[error("wrong rank: {0}")]
    WrongRank(String),

    /// A point of a parametric family left the expected rank stratum.
    #[error("rank jump at parameter point {0}")]
    RankJump(String),

    /// Expression parse failure, with byte position.
    #[error("parse error at position {pos}: {msg}")]
    ParseError { pos: usize, msg: String },

    /// A log-term without factorial marker admits two readings; neither is
    /// silently chosen.
    #[error("ambiguous normalization: {0}")]
    AmbiguousNormalization(String),

    /// Input data violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
