use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    /// An error-curve value too small to be distinguished from rounding noise.
    #[error("value {value:e} at t = {t:e} is at the noise floor")]
    NoiseFloor { t: f64, value: f64 },
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
}

impl Error {
    /// Stable kebab-case name, used by the CLI in diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::DegenerateData(_) => "degenerate-data",
            Error::PreconditionViolation(_) => "precondition-violation",
            Error::NoiseFloor { .. } => "noise-floor",
            Error::UnsupportedDimension(_) => "unsupported-dimension",
        }
    }
}

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidArgument(alloc::format!($($arg)*))
    };
}
pub(crate) use invalid;
