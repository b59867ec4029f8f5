use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("point ({x}, {y}) lies outside the domain of the metric")]
    OutsideDomain { x: f64, y: f64 },

    #[error("polyline segment {index} meets the domain boundary")]
    SegmentNotClear { index: usize },

    #[error("grid window contains no point of the domain")]
    EmptyVertexSet,

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("negative edge weight {weight} on edge {u} -> {v}")]
    NegativeWeight { u: usize, v: usize, weight: f64 },

    #[error("no path from vertex {from} to vertex {to}")]
    NoPath { from: usize, to: usize },

    #[error("no path point lies off the bisector, the arc error is undefined")]
    EmptyArcSet,

    #[error("hypergeometric parameter c = {0} is a non-positive integer")]
    HypergeometricPole(f64),

    #[error("hypergeometric series did not converge at |z| = {modulus} after {terms} terms")]
    SeriesDivergence { modulus: f64, terms: usize },

    #[error("quadrature did not converge: estimated error {estimate:e} after {evaluations} evaluations")]
    Quadrature { estimate: f64, evaluations: usize },

    #[error("integration contour would pass within {distance:e} of the singular point {point}")]
    ContourFailure { point: f64, distance: f64 },

    #[error("inverse map did not converge for w = ({x}, {y}), best residual {residual:e}")]
    Inversion { x: f64, y: f64, residual: f64 },

    #[error("inverse map failed at grid vertex {vertex}: {source}")]
    VertexInversion {
        vertex: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("scenario error at {pointer}: {reason}")]
    Scenario { pointer: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn scenario(pointer: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Scenario {
            pointer: pointer.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by numerical procedures (quadrature, series, Newton).
    pub fn is_numeric(&self) -> bool {
        match self {
            Error::SeriesDivergence { .. }
            | Error::Quadrature { .. }
            | Error::ContourFailure { .. }
            | Error::Inversion { .. } => true,
            Error::VertexInversion { source, .. } => source.is_numeric(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
