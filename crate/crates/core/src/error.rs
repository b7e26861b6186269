use thiserror::Error;

pub type Result<T, E = EigenError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    /// The endpoints of a homotopy are real-linearly dependent.
    #[error("degenerate great-circle arc: endpoints are real-linearly dependent (angle {angle:e})")]
    DegenerateArc { angle: f64 },

    /// The reduced operator at the current point is singular to working precision.
    #[error("ill-posed point: reduced operator is singular ({0})")]
    IllPosed(String),

    #[error("path following failed at step {step} (s = {s:e}): {reason}")]
    PathFailure { step: u64, s: f64, reason: String },

    #[error("budget exceeded: {what} limit {limit} reached")]
    BudgetExceeded { what: &'static str, limit: u64 },

    #[error("no convergence after {iterations} iterations: {reason}")]
    NonConvergence { iterations: u32, reason: String },

    #[error("reference eigensolver failed: {0}")]
    OracleFailure(String),

    #[error("path crosses the discriminant variety between s = {s_lo:e} and s = {s_hi:e}")]
    SigmaCrossing { s_lo: f64, s_hi: f64 },
}

impl EigenError {
    pub(crate) fn shape(op: &'static str, left: (usize, usize), right: (usize, usize)) -> Self {
        Self::ShapeMismatch { op, left, right }
    }

    /// Stable machine-readable tag, used by the CLI error report.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Argument(_) => "argument",
            Self::ShapeMismatch { .. } => "shape_mismatch",
            Self::DegenerateArc { .. } => "degenerate_arc",
            Self::IllPosed(_) => "ill_posed",
            Self::PathFailure { .. } => "path_failure",
            Self::BudgetExceeded { .. } => "budget_exceeded",
            Self::NonConvergence { .. } => "non_convergence",
            Self::OracleFailure(_) => "oracle_failure",
            Self::SigmaCrossing { .. } => "sigma_crossing",
        }
    }
}
