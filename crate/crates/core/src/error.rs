use thiserror::Error;

use crate::validate::ValidationReport;

/// Errors produced by k-graph construction and analysis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum KGraphError {
    /// The spec document is not syntactically valid.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// The skeleton does not describe a well-formed colored graph (dangling ids,
    /// duplicates, unknown colors).
    #[error("malformed skeleton at {location}: {message}")]
    MalformedSkeleton { location: String, message: String },

    /// The skeleton is well formed but violates the factorisation property or the
    /// standing assumption.
    #[error("skeleton failed validation with {} violation(s)", .0.violations.len())]
    ValidationFailure(ValidationReport),

    #[error("enumeration of {what} would produce {count} items, cap is {cap}")]
    BoundExceeded { what: String, count: String, cap: u64 },

    #[error("morphisms are not composable: source {source_vertex} != range {range_vertex}")]
    NotComposable {
        source_vertex: String,
        range_vertex: String,
    },

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error("rank mismatch: {0} != {1}")]
    RankMismatch(usize, usize),

    #[error("k-graph is not irreducible")]
    NotIrreducible,

    #[error("no entrywise positive sum of vertex matrices found up to degree {0}")]
    NoPositiveCombination(String),

    #[error("power iteration did not reach tolerance {tol:e} (residual {residual:e})")]
    NotConverged { tol: f64, residual: f64 },

    #[error("data belongs to a different k-graph: {0}")]
    GraphMismatch(String),

    #[error("shift by {shift} exhausts a window of radius {radius}")]
    RadiusExhausted { shift: String, radius: usize },

    #[error("windows have different radii: {0} != {1}")]
    RadiusMismatch(usize, usize),

    #[error("bracket undefined: central vertices differ")]
    NotBracketable,

    #[error("coordinate {coord} lies outside the window box of radius {radius}")]
    OutOfBox { coord: String, radius: usize },

    #[error("k-graph is not primitive within the search bound")]
    NotPrimitive,

    #[error("groupoid elements are not composable: {0}")]
    NotComposableInGroupoid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = KGraphError> = std::result::Result<T, E>;
