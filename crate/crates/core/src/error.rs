use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unsupported characteristic {0}: need an odd prime below 65536")]
    UnsupportedCharacteristic(u64),

    #[error("extension degree must be at least 1")]
    ZeroDegree,

    #[error("incompatible extension: degree {src} does not divide degree {dst}")]
    IncompatibleExtension { src: usize, dst: usize },

    #[error("operands live in different fields")]
    FieldMismatch,

    #[error("division by zero")]
    DivisionByZero,

    #[error("zero polynomial where a nonzero one is required")]
    ZeroPolynomial,

    #[error("target field too small for factors of degree {0:?}")]
    TargetTooSmall(Vec<usize>),

    #[error("resultant undefined: both inputs have b-degree 0")]
    DegenerateResultant,

    #[error("curve is singular: defining polynomial has a repeated root")]
    SingularCurve,

    #[error("defining polynomial of degree {0} does not describe a curve of positive genus")]
    BadDegree(usize),

    #[error("branch set has {0} points; an even number is required")]
    OddBranchSet(usize),

    #[error("partition does not match the branch set of the curve")]
    PartitionMismatch,

    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),

    #[error("degenerate Möbius image: {0}")]
    DegenerateImage(String),

    #[error("point set is not closed under the group action")]
    ClosureViolation,

    #[error("eliminant vanishes identically; the system is not zero-dimensional")]
    PositiveDimension,

    #[error("brute-force scan of {0} pairs exceeds the limit")]
    ScanTooLarge(u128),

    #[error("multiplicity did not stabilize by degree {cap}; Hilbert-Samuel values {trace:?}")]
    NoStabilization { cap: usize, trace: Vec<usize> },

    #[error("local structure not supported: {0}")]
    UnsupportedLocalStructure(String),

    #[error("prime {0} exceeds the configured guard {1}")]
    PrimeTooLarge(u32, u32),

    #[error("unknown format: {0}")]
    UnknownFormat(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("census block j = {j}, point {point}: {source}")]
    AtPoint { j: String, point: String, source: Box<Error> },

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
