use std::fmt;

/// Syntax error in a function definition.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    /// Byte offset into the source where parsing stopped.
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at byte {}: expected {}, found {}",
            self.offset,
            self.expected.join(" or "),
            self.found
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("evaluation error at byte {offset}: {reason}")]
    Eval { offset: usize, reason: String },
    #[error("point matches an override value, which carries no derivative")]
    OverrideNotDifferentiable,
    #[error("series did not converge within {terms} terms (partial value {partial})")]
    NonConvergent { partial: f64, terms: usize },
    #[error("no sign change of g on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("derivative order {order} exceeds the maximum {max}")]
    OrderTooHigh { order: usize, max: usize },
    #[error("(b - a)/h = {ratio} is not an integer")]
    NotOnLattice { ratio: f64 },
    #[error("no mean value witness found: {0}")]
    NoWitness(String),
    #[error("endpoints are not lattice compatible: {0}")]
    LatticeMismatch(String),
    #[error("{0} is not a point of the time scale")]
    NotInScale(f64),
    #[error("{0} lies outside the admissible derivative domain of the time scale")]
    BoundaryExcluded(f64),
    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),
    #[error("boundary condition violated: {0}")]
    BoundaryViolation(String),
    #[error("inadmissible variation: {0}")]
    InadmissibleVariation(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn eval(offset: usize, reason: impl Into<String>) -> Self {
        Error::Eval {
            offset,
            reason: reason.into(),
        }
    }

    pub(crate) fn invalid(reason: impl Into<String>) -> Self {
        Error::InvalidInput(reason.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
