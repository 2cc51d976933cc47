use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: expected {expected}")]
    Syntax { offset: usize, expected: String },

    #[error("empty potential expression")]
    EmptyInput,

    #[error("family {0} has no printed deformation rule")]
    UnsupportedFamily(String),

    #[error("gauge requires positive coefficients, got {what} = {value}")]
    NegativeGauge { what: &'static str, value: f64 },

    #[error("potential is not quasi-exactly solvable: b = {b}, closest admissible b = {closest_root} (distance {distance})")]
    NotQuasiExactlySolvable {
        b: f64,
        closest_root: f64,
        distance: f64,
    },

    #[error("no bound state in this gauge: {0}")]
    NoBoundState(String),

    #[error("polynomial degree {0} is not supported analytically")]
    UnsupportedDegree(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("tolerance not met: value {value}, estimated error {est_error}")]
    ToleranceNotMet { value: f64, est_error: f64 },

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("domain too narrow: boundary mass {mass:e} above {threshold:e}")]
    DomainTooNarrow { mass: f64, threshold: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// Short machine-readable tag used in per-line error columns.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "SyntaxError",
            Error::EmptyInput => "EmptyInput",
            Error::UnsupportedFamily(_) => "UnsupportedFamily",
            Error::NegativeGauge { .. } => "NegativeGauge",
            Error::NotQuasiExactlySolvable { .. } => "NotQuasiExactlySolvable",
            Error::NoBoundState(_) => "NoBoundState",
            Error::UnsupportedDegree(_) => "UnsupportedDegree",
            Error::Domain(_) => "DomainError",
            Error::ToleranceNotMet { .. } => "ToleranceNotMet",
            Error::Quadrature(_) => "QuadratureFailure",
            Error::GridTooCoarse(_) => "GridTooCoarse",
            Error::DomainTooNarrow { .. } => "DomainTooNarrow",
            Error::Invalid(_) => "Invalid",
        }
    }
}
