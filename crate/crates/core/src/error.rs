use thiserror::Error;

/// Invalid instance data.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("an instance needs at least 3 cities, got {0}")]
    TooFewCities(usize),
    #[error("coordinates given for an EXPLICIT instance")]
    CoordsForExplicit,
    #[error("coordinate of city {0} is not finite")]
    NonFiniteCoordinate(usize),
    #[error("matrix row {row} has {len} entries, expected {n}")]
    RaggedMatrix { row: usize, len: usize, n: usize },
    #[error("matrix diagonal entry {0} is not zero")]
    NonZeroDiagonal(usize),
    #[error("matrix is not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("city index {index} out of range for {n} cities")]
    CityOutOfRange { index: usize, n: usize },
}

/// What went wrong while reading a TSPLIB file.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("missing {0}")]
    Missing(&'static str),
    #[error("unsupported {field}: {value}")]
    Unsupported { field: &'static str, value: String },
    #[error("expected {expected} entries, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("not a number: {0:?}")]
    NotANumber(String),
    #[error("node id {0} out of range or repeated")]
    BadNodeId(i64),
    #[error("invalid tour: {0}")]
    InvalidTour(#[from] TourError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// A TSPLIB parse failure; `line` is 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub(crate) fn new(line: usize, kind: impl Into<ParseErrorKind>) -> Self {
        Self { line, kind: kind.into() }
    }
}

/// A city sequence that is not a permutation of `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TourError {
    #[error("tour has {found} cities, expected {expected}")]
    WrongLength { expected: usize, found: usize },
    #[error("city {0} out of range")]
    OutOfRange(usize),
    #[error("city {0} appears more than once")]
    Duplicate(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CrossoverError {
    #[error("parents have different lengths ({0} and {1})")]
    LengthMismatch(usize, usize),
    #[error("cut {cut} out of range 0..={n}")]
    CutOutOfRange { cut: usize, n: usize },
    #[error("invalid cut pair ({0}, {1}) for {2} cities")]
    InvalidCutPair(usize, usize, usize),
}

/// Rejected GA configuration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("population size must be at least 4, got {0}")]
    PopulationTooSmall(usize),
    #[error("{name} must lie in [0, 1], got {value}")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },
    #[error("max_generations must be at least 1")]
    NoGenerations,
    #[error("operator pool is empty")]
    EmptyPool,
    #[error("operator {0} appears more than once in the pool")]
    DuplicateInPool(String),
    #[error("unknown {what} {value:?}")]
    Unknown { what: &'static str, value: String },
}
