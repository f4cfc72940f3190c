use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Failures raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A value that must be strictly positive (e.g. before a log transform) was not.
    NonPositiveValue {
        index: usize,
        value: f64,
    },
    /// A value was NaN or infinite.
    NonFiniteValue {
        index: usize,
    },
    /// Population standard deviation is zero; the vector cannot be standardized.
    ZeroVariance,
    LengthMismatch {
        expected: usize,
        found: usize,
    },
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    TooFewObservations {
        required: usize,
        found: usize,
    },
    DuplicateId(alloc::string::String),
    NonPositiveDistance {
        i: usize,
        j: usize,
        value: f64,
    },
    AsymmetricDistance {
        i: usize,
        j: usize,
        relative_gap: f64,
    },
    /// The contiguity matrix has no positive mass to normalize.
    ZeroMatrix,
    LagOutOfRange {
        lag: usize,
        n: usize,
    },
    /// The explanatory variable of a one-variable regression is constant.
    DegenerateRegression,
    /// Design matrix smallest/largest singular value ratio fell below the rank threshold.
    RankDeficient {
        condition_ratio: f64,
    },
    InsufficientData {
        observations: usize,
        parameters: usize,
    },
    /// Total sum of squares of the response is zero.
    DegenerateVariance,
    /// The 2x2 correlation system has a (relatively) vanishing determinant.
    SingularSystem {
        q: f64,
    },
    ZeroDenominator(&'static str),
    TooFewPermutations {
        requested: usize,
        minimum: usize,
    },
    InvalidParameter(&'static str),
}

impl Error {
    /// `true` for failures of the numerics rather than of the supplied data layout.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ZeroVariance
                | Error::ZeroMatrix
                | Error::DegenerateRegression
                | Error::RankDeficient { .. }
                | Error::DegenerateVariance
                | Error::SingularSystem { .. }
                | Error::ZeroDenominator(_)
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonPositiveValue { index, value } => {
                write!(f, "value {value} at position {index} is not strictly positive")
            }
            Error::NonFiniteValue { index } => write!(f, "non-finite value at position {index}"),
            Error::ZeroVariance => f.write_str("zero variance: vector cannot be standardized"),
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::TooFewObservations { required, found } => {
                write!(f, "at least {required} observations required, found {found}")
            }
            Error::DuplicateId(id) => write!(f, "duplicate unit id `{id}`"),
            Error::NonPositiveDistance { i, j, value } => {
                write!(f, "distance between units {i} and {j} is {value}; must be > 0")
            }
            Error::AsymmetricDistance { i, j, relative_gap } => write!(
                f,
                "distance matrix asymmetric at ({i}, {j}): relative gap {relative_gap:e}"
            ),
            Error::ZeroMatrix => f.write_str("contiguity matrix sums to zero"),
            Error::LagOutOfRange { lag, n } => {
                write!(f, "lag {lag} out of range for series of length {n}")
            }
            Error::DegenerateRegression => f.write_str("explanatory variable is constant"),
            Error::RankDeficient { condition_ratio } => write!(
                f,
                "design matrix is rank deficient (singular value ratio {condition_ratio:e})"
            ),
            Error::InsufficientData {
                observations,
                parameters,
            } => write!(f, "{observations} observations cannot identify {parameters} parameters"),
            Error::DegenerateVariance => f.write_str("response has zero total sum of squares"),
            Error::SingularSystem { q } => {
                write!(f, "correlation system is singular (Q = {q:e}); terms are collinear")
            }
            Error::ZeroDenominator(what) => write!(f, "zero denominator: {what}"),
            Error::TooFewPermutations { requested, minimum } => {
                write!(f, "{requested} permutations requested, minimum is {minimum}")
            }
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
        }
    }
}

impl core::error::Error for Error {}
