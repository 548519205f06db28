use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in this crate.
///
/// Variants split into input errors (bad arguments, malformed files) and
/// compute errors (a value turned out non-invertible mid-computation); see
/// [`Error::is_input_error`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not an odd prime below 2^63")]
    NotPrime(u64),
    #[error("inverse of zero")]
    ZeroInversion,
    #[error("elements from different fields (moduli {left} and {right})")]
    ContextMismatch { left: u64, right: u64 },
    #[error("dimension mismatch ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },
    #[error("ratio q must be nonzero")]
    ZeroRatio,
    #[error("index {k} out of range for n = {n}")]
    IndexOutOfRange { n: u64, k: u64 },
    #[error("non-invertible denominator at step {0}")]
    NonInvertibleDenominator(u64),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("leading coefficient is the zero polynomial")]
    ZeroLeadingCoefficient,
    #[error("leading coefficient vanishes identically after specialization")]
    DegenerateLeading,
    #[error("leading coefficient vanishes at step k = {0}")]
    SingularLeading(u64),
    #[error("indices must be strictly increasing")]
    UnsortedIndices,
    #[error("{count} indices exceed the bound sqrt({max_index})")]
    TooManyIndices { count: usize, max_index: u64 },
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),
    #[error("q-bracket [{0}]_q is not invertible")]
    NonInvertibleBracket(u64),
    #[error("prime {p} rejected: {reason}")]
    BadPrime { p: u64, reason: String },
    #[error("denominator vanishes at step k = {0}")]
    PoleHit(u64),
    #[error("cyclotomic index {0} is not prime")]
    CompositeN(u64),
    #[error("parse error at {context}: {message}")]
    Parse { context: String, message: String },
}

impl Error {
    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse { context: context.into(), message: message.into() }
    }

    /// True when the caller supplied something invalid, false when a
    /// well-formed computation hit a zero divisor.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::ZeroInversion
                | Error::NonInvertibleDenominator(_)
                | Error::DegenerateLeading
                | Error::SingularLeading(_)
                | Error::NonInvertibleBracket(_)
                | Error::BadPrime { .. }
                | Error::PoleHit(_)
        )
    }
}
