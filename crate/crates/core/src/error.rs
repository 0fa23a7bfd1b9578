use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// No polynomial degree up to the cap met the interpolation budget.
    DegreeExhausted { max_degree: usize, best_error: f64 },
    /// The dense-grid check of a fitted neuron did not come in under ε.
    CertificationFailed { max_abs_error: f64, epsilon: f64 },
    /// An enumeration index decodes to a polynomial too large to materialize.
    DegreeTooLarge { bits: u64 },
    /// A decomposition's measured slack exceeds the half-budget it may use.
    SlackTooLarge { measured: f64, allowed: f64 },
    MissingFeature(String),
    OutOfDomain { value: f64, lo: f64, hi: f64 },
    InvalidArgument(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegreeExhausted { max_degree, best_error } => write!(
                f,
                "no polynomial of degree <= {max_degree} met the budget (best grid error {best_error:e})"
            ),
            Error::CertificationFailed { max_abs_error, epsilon } => write!(
                f,
                "certified error {max_abs_error:e} is not below epsilon {epsilon:e}"
            ),
            Error::DegreeTooLarge { bits } => {
                write!(f, "index decodes to a polynomial degree with {bits} bits")
            }
            Error::SlackTooLarge { measured, allowed } => write!(
                f,
                "decomposition slack {measured:e} exceeds allowed {allowed:e}"
            ),
            Error::MissingFeature(name) => write!(f, "unknown feature `{name}`"),
            Error::OutOfDomain { value, lo, hi } => {
                write!(f, "{value} lies outside [{lo}, {hi}]")
            }
            Error::InvalidArgument(msg) => f.write_str(msg),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
