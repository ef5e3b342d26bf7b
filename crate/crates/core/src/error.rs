use std::path::PathBuf;

use crate::forward::SolverReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what}: expected length {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("malformed file {}: line {line}: {message}", path.display())]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("node {0} is not a boundary node")]
    NotBoundaryNode(usize),

    #[error("linear solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    LinearSolver { iterations: usize, residual: f64 },

    #[error("Newton iteration failed: {reason} (after {} iterations)", report.iterations)]
    Newton {
        reason: String,
        report: Box<SolverReport>,
    },

    #[error("coefficient {field} out of bounds at node {node}: {value}")]
    CoefficientBounds {
        field: &'static str,
        node: usize,
        value: f64,
    },

    #[error("field below positivity floor {floor:e} at {} node(s), first {:?}", nodes.len(), nodes.first())]
    BelowPositivityFloor { nodes: Vec<usize>, floor: f64 },

    #[error("source {index} is not strictly positive on the boundary (min {min})")]
    NonPositiveSource { index: usize, min: f64 },

    #[error("ill-conditioned boundary trace at node {node}: |g2| - |g1| = {gap:e}")]
    IllConditionedTrace { node: usize, gap: f64 },

    #[error("no well-conditioned node available for fallback")]
    NoWellConditionedNode,

    #[error("forward solve for source {index} failed: {source}")]
    Source {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("reference field has zero norm")]
    ZeroNorm,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn malformed(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Malformed {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                what,
                expected,
                found,
            })
        }
    }
}
