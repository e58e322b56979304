use thiserror::Error;

use crate::analysis::Diagnostic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported element: {0}")]
    UnsupportedElement(String),

    #[error("point {x} lies outside the domain [0, {length}]")]
    OutOfDomain { x: f64, length: f64 },

    #[error("operation requires a primal space")]
    PrimalRequired,

    #[error("shape error: expected {expected} values, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("space kind error: {0}")]
    SpaceKind(String),

    #[error("mesh mismatch: {0}")]
    MeshMismatch(String),

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("not interpolable: {0}")]
    NotInterpolable(String),

    #[error("arity error: {0}")]
    Arity(String),

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("unknown evaluator `{0}`")]
    UnknownEvaluator(String),

    #[error("coefficient `{0}` carries no values")]
    MissingValues(String),

    #[error("quadrature degree {requested} exceeds the supported maximum {max}")]
    Degree { requested: u32, max: u32 },

    #[error("contraction error: {0}")]
    Contract(String),

    #[error("cycle: {0}")]
    Cycle(String),

    #[error("ill-formed form: {}", summarize(.0))]
    InvalidForm(Vec<Diagnostic>),
}

fn summarize(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    /// Stable code used by the command-line front end.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "INVALID_ARGUMENT",
            Error::UnsupportedElement(_) => "UNSUPPORTED_ELEMENT",
            Error::OutOfDomain { .. } => "OUT_OF_DOMAIN",
            Error::PrimalRequired => "PRIMAL_REQUIRED",
            Error::Shape { .. } => "SHAPE_ERROR",
            Error::SpaceKind(_) => "SPACE_KIND",
            Error::MeshMismatch(_) => "MESH_MISMATCH",
            Error::SignatureMismatch(_) => "SIGNATURE_MISMATCH",
            Error::NotInterpolable(_) => "NOT_INTERPOLABLE",
            Error::Arity(_) => "ARITY",
            Error::SpaceMismatch(_) => "SPACE_MISMATCH",
            Error::UnknownEvaluator(_) => "UNKNOWN_EVALUATOR",
            Error::MissingValues(_) => "MISSING_VALUES",
            Error::Degree { .. } => "DEGREE",
            Error::Contract(_) => "CONTRACT",
            Error::Cycle(_) => "CYCLE",
            Error::InvalidForm(diags) => diags.first().map_or("INVALID_FORM", |d| d.code.as_str()),
        }
    }
}
