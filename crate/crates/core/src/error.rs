use num::BigInt;
use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("coefficient index {index} out of range for a finite stream of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("needed {needed} coefficients but the stream provides only {available}")]
    StreamExhausted { needed: usize, available: usize },

    #[error("coefficient access budget exhausted")]
    BudgetExhausted,

    #[error("an eventually periodic stream needs a non-empty period")]
    EmptyPeriod,

    #[error("0/0 is not an extended rational")]
    ZeroOverZero,

    // Boxed so the whole enum (and with it every `Result` in the crate)
    // stays pointer-sized-ish instead of carrying four inline matrix
    // entries.
    #[error(
        "matrix [{}, {}; {}, {}] has determinant {det}, expected 1",
        entries[0], entries[1], entries[2], entries[3]
    )]
    NotUnimodular {
        entries: Box<[BigInt; 4]>,
        det: BigInt,
    },

    #[error("coefficient b_{position} = {value} breaks the |b| >= 2 requirement")]
    CoefficientTooSmall { position: usize, value: BigInt },

    #[error("operation needs a finite stream")]
    NotFinite,

    #[error("operation needs an eventually periodic stream")]
    NotEventuallyPeriodic,

    #[error("coefficients from position {tail_start} onward are not all {expected}")]
    TailMismatch { tail_start: usize, expected: BigInt },

    #[error("a geodesic needs two distinct vertices")]
    DegenerateGeodesic,

    #[error("viewport needs xmin < xmax, positive height and non-zero pixel sizes")]
    DegenerateViewport,
}

pub type Result<T> = std::result::Result<T, Error>;
