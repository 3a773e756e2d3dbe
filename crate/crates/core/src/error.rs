use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the numerical routines.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// A column failed its construction checks (too short, non-finite entries).
    InvalidColumn { label: String, reason: &'static str },
    /// Columns of different lengths were combined.
    DimensionMismatch { label: String, expected: usize, found: usize },
    /// Two columns in one matrix share a label.
    DuplicateLabel(String),
    /// The named column is (numerically) in the span of the columns before it.
    RankDeficient { column: String },
    /// The named column is constant, or vanishes after residualization.
    ZeroVariance { column: String },
    /// The baseline correlation between `x` and `y` is zero, so its sign is undefined.
    DegenerateBaseline,
    /// A scalar argument lies outside the domain of the operation.
    Domain { what: &'static str, value: f64 },
    /// Exhaustive enumeration was asked for more covariates than allowed.
    SubsetCeilingExceeded { k: usize, ceiling: usize },
    /// A (category, population) cell of a categorical study has no rows.
    EmptyCell { category: usize, population: u8 },
    /// A categorical study violates its encoding rules.
    InvalidStudy(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidColumn { label, reason } => write!(f, "invalid column {label:?}: {reason}"),
            Error::DimensionMismatch { label, expected, found } => write!(
                f,
                "column {label:?} has {found} rows, expected {expected}"
            ),
            Error::DuplicateLabel(label) => write!(f, "duplicate column label {label:?}"),
            Error::RankDeficient { column } => {
                write!(f, "column {column:?} is linearly dependent on the preceding columns")
            }
            Error::ZeroVariance { column } => write!(f, "column {column:?} has zero variance"),
            Error::DegenerateBaseline => {
                write!(f, "baseline correlation between x and y is zero; its sign is undefined")
            }
            Error::Domain { what, value } => write!(f, "{what} out of domain: {value}"),
            Error::SubsetCeilingExceeded { k, ceiling } => write!(
                f,
                "{k} candidate covariates exceed the enumeration ceiling of {ceiling}"
            ),
            Error::EmptyCell { category, population } => write!(
                f,
                "category {category} has no rows for population {population}"
            ),
            Error::InvalidStudy(reason) => write!(f, "invalid categorical study: {reason}"),
        }
    }
}

impl core::error::Error for Error {}
