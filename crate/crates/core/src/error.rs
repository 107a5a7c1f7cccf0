//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("exponent overflow at byte {offset}")]
    ExponentOverflow { offset: usize },
    #[error("variable index 0 at byte {offset} (indices start at 1)")]
    ZeroVariableIndex { offset: usize },

    #[error("invalid rational: {0}")]
    InvalidRational(String),

    #[error("invalid covariance spec: {0}")]
    InvalidSpec(String),
    #[error("zero-beyond-head tails are rejected: the covariance operator must have trivial kernel")]
    ZeroTailRejected,
    #[error("tail value b_{0} is irrational under this tail model; exact marginals need rational entries")]
    IrrationalTailValue(u32),
    #[error("monomial degree {degree} exceeds the Wick cap {cap}")]
    WickCapExceeded { degree: u64, cap: u64 },
    #[error("covariance block is numerically singular after float conversion")]
    NumericallySingular,

    #[error("index set must be nonempty")]
    EmptyIndexSet,
    #[error("monomial mentions variable x{0} outside the index set")]
    MonomialOutsideIndexSet(u32),
    #[error("index x{0} lies outside the backend's declared support")]
    OutsideSupport(u32),
    #[error("invalid box: {0}")]
    InvalidBox(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("{0} is not supported by this backend")]
    Unsupported(String),
    #[error("F must be a subset of G")]
    NotSubset,
    #[error("cylinder measure carries no certified seminorm")]
    NoSeminorm,
    #[error("seminorm certification failed for t = {t}: L(t^2) = {lhs} > q(t)^2 = {rhs}")]
    SeminormNotDominating { t: String, lhs: String, rhs: String },
    #[error("expected a polynomial of degree 1 in the basis variables, got {0}")]
    NotDegreeOne(String),

    #[error("moment table has no unit entry L(1) = 1")]
    TableNotNormalized,
    #[error("monomial {0} is outside the table's declared range")]
    OutsideTable(String),
    #[error("even moment L(t^{power}) = {value} is negative; the backend is not positive")]
    NegativeEvenMoment { power: u64, value: String },
    #[error("Hankel matrix of the input moments is not positive definite (pivot {pivot} at step {step})")]
    HankelNotPositiveDefinite { step: usize, pivot: String },
    #[error("quadrature nodes {0} and {1} are closer than 1e-9; the moment data is ill-conditioned")]
    NodesTooClose(f64, f64),
    #[error("moment list must have even length 2n with n >= 1, got {0}")]
    BadMomentCount(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable machine-readable code for report objects.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "syntax",
            Error::ExponentOverflow { .. } => "exponent_overflow",
            Error::ZeroVariableIndex { .. } => "zero_variable_index",
            Error::InvalidRational(_) => "invalid_rational",
            Error::InvalidSpec(_) => "invalid_spec",
            Error::ZeroTailRejected => "zero_tail_rejected",
            Error::IrrationalTailValue(_) => "irrational_tail_value",
            Error::WickCapExceeded { .. } => "wick_cap_exceeded",
            Error::NumericallySingular => "numerically_singular",
            Error::EmptyIndexSet => "empty_index_set",
            Error::MonomialOutsideIndexSet(_) => "monomial_outside_index_set",
            Error::OutsideSupport(_) => "outside_support",
            Error::InvalidBox(_) => "invalid_box",
            Error::InvalidPartition(_) => "invalid_partition",
            Error::Unsupported(_) => "unsupported",
            Error::NotSubset => "not_subset",
            Error::NoSeminorm => "no_seminorm",
            Error::SeminormNotDominating { .. } => "seminorm_not_dominating",
            Error::NotDegreeOne(_) => "not_degree_one",
            Error::TableNotNormalized => "table_not_normalized",
            Error::OutsideTable(_) => "outside_table",
            Error::NegativeEvenMoment { .. } => "negative_even_moment",
            Error::HankelNotPositiveDefinite { .. } => "hankel_not_positive_definite",
            Error::NodesTooClose(_, _) => "nodes_too_close",
            Error::BadMomentCount(_) => "bad_moment_count",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::InvalidInput(_) => "invalid_input",
        }
    }
}
