use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coupling matrix is not symmetric: a[{0}][{1}] != a[{1}][{0}]")]
    NonSymmetricCoupling(usize, usize),
    #[error("coupling a[{0}][{1}] = {2} is not positive")]
    NonPositiveCoupling(usize, usize, f64),
    #[error("exponent p = {p} outside the window ({lower}, {upper})")]
    ExponentOutOfRange { p: f64, lower: f64, upper: f64 },
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("(alpha, beta) = ({0}, {1}) is not admissible")]
    InadmissibleAlphaBeta(f64, f64),
    #[error("2 alpha + N beta vanishes for (alpha, beta) = ({0}, {1})")]
    DegenerateAlphaBeta(f64, f64),
    #[error("field is identically zero")]
    ZeroField,
    #[error("degenerate field: {0}")]
    DegenerateField(&'static str),
    #[error("dilated profile leaves the domain (tail mass fraction {0:.3e})")]
    SupportOverflow(f64),
    #[error("field contains NaN or infinite samples")]
    PoisonedState,
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("operation requires a {0} grid")]
    WrongGrid(&'static str),
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("iteration collapsed to the zero state")]
    CollapseToZero,
    #[error("negative chemical potential omega = {0}")]
    NegativeOmega(f64),
    #[error("shooting bracket could not be established")]
    BracketFailure,
    #[error("trace has {0} uniformly spaced rows; at least 5 are required")]
    InsufficientRows(usize),
    #[error("K signs disagree across the (alpha, beta) test set below the well")]
    SignDisagreement,
    #[error("format error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonSymmetricCoupling(..) => "NonSymmetricCoupling",
            Error::NonPositiveCoupling(..) => "NonPositiveCoupling",
            Error::ExponentOutOfRange { .. } => "ExponentOutOfRange",
            Error::UnsupportedDimension(_) => "UnsupportedDimension",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::InadmissibleAlphaBeta(..) => "InadmissibleAlphaBeta",
            Error::DegenerateAlphaBeta(..) => "DegenerateAlphaBeta",
            Error::ZeroField => "ZeroField",
            Error::DegenerateField(_) => "DegenerateField",
            Error::SupportOverflow(_) => "SupportOverflow",
            Error::PoisonedState => "PoisonedState",
            Error::GridMismatch => "GridMismatch",
            Error::WrongGrid(_) => "WrongGrid",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::CollapseToZero => "CollapseToZero",
            Error::NegativeOmega(_) => "NegativeOmega",
            Error::BracketFailure => "BracketFailure",
            Error::InsufficientRows(_) => "InsufficientRows",
            Error::SignDisagreement => "SignDisagreement",
            Error::Format(_) => "Format",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
