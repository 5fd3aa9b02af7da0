use thiserror::Error;

/// Errors produced by construction, parsing and the algebraic operations.
///
/// Everything here is a hard input or usage error. Analyses that merely fail
/// to decide something do not error; they return `Verdict::Unknown` instead.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),

    #[error("variable registry mismatch")]
    RegistryMismatch,

    #[error("invalid registry: {0}")]
    InvalidRegistry(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} {index} out of range for length {len}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("minor size {k} out of range for a {rows}x{cols} matrix")]
    MinorSize { k: usize, rows: usize, cols: usize },

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("denominator vanishes at t = 0; no jet expansion")]
    DenominatorVanishesAtZero,

    #[error("jet expansion requires numerator and denominator in the curve subring (t and parameters only)")]
    NotCurvePolynomial,

    #[error("substitution misses occurring variable `{0}`")]
    UnmappedVariable(String),

    #[error("expected a polynomial in the base ring (no primed variables, no t)")]
    NotBaseRing,

    #[error("curve substitution for `{var}` does not vanish at t = 0")]
    CurveNotCentered { var: String },

    #[error("curve must substitute every space and primed variable exactly once")]
    CurveIncomplete,

    #[error("module has generic rank 0; saturation membership is not defined")]
    RankZero,

    #[error("lemma requires a structurally principal minor ideal (got {0} generators); pass an explicit principality assertion to override")]
    PrincipalityRequired(usize),

    #[error("lemma requires a free module presentation: column count {cols} must equal the generic rank {rank}")]
    NotFree { cols: usize, rank: usize },

    #[error("ideal is not monomial")]
    NotMonomial,

    #[error("computation exceeds the configured size cap: {0}")]
    TooLarge(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal consistency violation: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
