use thiserror::Error;

use crate::report::InequalityReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A Newton-type solver did not reach its tolerance. For a valid metric
    /// this points at a non-convex or non-smooth norm.
    #[error("{operation} did not converge (residual {residual:.3e})")]
    NonConvergence { operation: &'static str, residual: f64 },

    /// Same as [`Error::NonConvergence`], located at a grid cell.
    #[error("solver failed at cell {cell}: {source}")]
    CellNonConvergence {
        cell: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid metric spec: {0}")]
    InvalidSpec(String),

    #[error("metric is not of Minkowski type")]
    NotMinkowski,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("domain has an empty interior")]
    DegenerateDomain,

    #[error("integration over an empty mask")]
    EmptyMask,

    #[error("cell {cell} has too few neighbours for a finite-difference stencil")]
    MaskTooThin { cell: usize },

    #[error("test function is not compactly supported in the mask ({0})")]
    UnsupportedPhi(String),

    #[error("fields live on different grids or masks")]
    GridMismatch,

    #[error("hypothesis `{hypothesis}` violated")]
    HypothesisViolated {
        hypothesis: String,
        report: Box<InequalityReport>,
    },

    #[error("reversibility constant is infinite")]
    InfiniteReversibility,

    #[error("bad exponent: {0}")]
    BadExponent(String),

    #[error("inconsistent exponents: {0}")]
    ExponentInconsistent(String),

    #[error("curvature hypotheses not declared: {0}")]
    CurvatureUnverified(String),

    #[error("domain does not match the theorem: {0}")]
    DomainMismatch(String),

    #[error("denominator of the quotient vanishes")]
    ZeroDenominator,

    #[error("compact set is empty or not inside the outer ball")]
    DegenerateK,

    #[error("battery member {member} has vanishing differential")]
    ConstantField { member: usize },
}

impl Error {
    /// True for errors caused by a solver failing to converge.
    pub fn is_non_convergence(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::CellNonConvergence { .. }
        )
    }
}
