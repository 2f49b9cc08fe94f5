use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("iterate diverged (value {value:e})")]
    Divergence { value: f64 },
    #[error("derivative estimate is singular")]
    SingularDerivative,
    #[error("jacobian estimate is singular (condition {condition:e})")]
    SingularJacobian { condition: f64 },

    #[error("stencil abscissas must be strictly increasing")]
    NonMonotone,
    #[error("degenerate stencil: {0}")]
    DegenerateStencil(&'static str),
    #[error("pole of the arctan chart: 1 + x_i x_j vanishes")]
    PoleOfChart,
    #[error("mesh map hits the chart pole (1 - xi5 x = 0)")]
    ChartPole,
    #[error("abscissas must be strictly positive")]
    NonPositiveAbscissa,
    #[error("consecutive ordinates coincide; cross ratio undefined")]
    DegenerateOrdinates,
    #[error("differential invariant undefined: {0}")]
    DomainError(&'static str),
    #[error("group action undefined on this stencil: {0}")]
    UndefinedAction(&'static str),

    #[error("negative radicand ({value:e})")]
    NegativeRadicand { value: f64 },
    #[error("no real root for the next ordinate (discriminant {discriminant:e})")]
    NoRealRoot { discriminant: f64 },
    #[error("negative base under fractional power (J1 = {value:e})")]
    NegativeBase { value: f64 },
    #[error("fractional-linear denominator vanishes (next value {value:e})")]
    PoleDenominator { value: f64 },

    #[error("step size underflow at x = {x}")]
    StepUnderflow { x: f64 },
    #[error("x = {x} outside the solved range [{start}, {end}]")]
    OutOfRange { x: f64, start: f64, end: f64 },
    #[error("unsupported ODE order {0}")]
    UnsupportedOrder(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("need at least two successful rows to estimate an order")]
    InsufficientRows,

    #[error("node {index} (x = {x}): {source}")]
    AtNode {
        index: usize,
        x: f64,
        #[source]
        source: Box<Error>,
    },
    #[error("run with h = {h}: {source}")]
    AtResolution {
        h: f64,
        #[source]
        source: Box<Error>,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Output { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn at_node(self, index: usize, x: f64) -> Self {
        Error::AtNode {
            index,
            x,
            source: Box::new(self),
        }
    }

    pub(crate) fn at_resolution(self, h: f64) -> Self {
        Error::AtResolution {
            h,
            source: Box::new(self),
        }
    }

    /// True for errors caused by bad input rather than by a numerical failure.
    pub fn is_spec_error(&self) -> bool {
        matches!(
            self.root_cause(),
            Error::InvalidConfig(_) | Error::InsufficientRows | Error::UnsupportedOrder(_)
        )
    }

    /// Strips any `AtNode` / `AtResolution` wrappers.
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::AtNode { source, .. } | Error::AtResolution { source, .. } => source.root_cause(),
            other => other,
        }
    }
}
