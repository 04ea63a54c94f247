use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    InvalidArgument(String),
    /// Exponential type exceeds π.
    NotInEp {
        type_bound: f64,
    },
    /// Spectrum is not contained in the half-line required by the half-plane.
    NotHardy {
        support: (f64, f64),
    },
    /// Bergman weight exponent must exceed -1.
    InvalidWeight {
        alpha: f64,
    },
    /// A norm integral does not converge.
    Diverges(String),
    /// The Cayley transform is singular at `-i`.
    Pole,
    /// Point outside the domain of the operation.
    Domain(String),
    /// No decomposition over the dictionary reaches the residual tolerance.
    NoDecomposition {
        best_residual: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::NotInEp { type_bound } => {
                write!(f, "not in E^p: exponential type {type_bound} exceeds π")
            }
            Error::NotHardy { support } => write!(
                f,
                "not a half-plane Hardy section: spectrum [{}, {}] crosses 0",
                support.0, support.1
            ),
            Error::InvalidWeight { alpha } => {
                write!(f, "invalid weight exponent {alpha}: must exceed -1")
            }
            Error::Diverges(msg) => write!(f, "integral diverges: {msg}"),
            Error::Pole => write!(f, "pole of the Cayley transform at z = -i"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::NoDecomposition { best_residual } => write!(
                f,
                "no decomposition reaches the residual tolerance (best residual {best_residual:e})"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
