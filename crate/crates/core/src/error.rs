use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is singular to tolerance (smallest singular value {sigma_min:.3e}, norm {norm:.3e})")]
    Singular { sigma_min: f64, norm: f64 },

    #[error("matrix is not Hermitian (‖M − M*‖ = {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is not normal (‖MM* − M*M‖ = {defect:.3e})")]
    NotNormal { defect: f64 },

    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("contour encloses {found} eigenvalue(s), expected {expected}")]
    ContourEnclosure { expected: usize, found: f64 },

    #[error("no convergence after {iterations} iterations: {what}")]
    Convergence { iterations: usize, what: String },

    #[error("spectral gap collapsed to {gap:.3e} at t = {time:.4}")]
    GapCollapse { gap: f64, time: f64 },

    #[error("integrator drift {drift:.3e} exceeds tolerance; refine the time grid")]
    StepSize { drift: f64 },

    #[error("tracking lost: overlap {overlap:.3e} at t = {time:.4}")]
    TrackingLoss { overlap: f64, time: f64 },

    #[error("error budget {budget:.3e} is not below 1: {detail}")]
    BudgetExceeded { budget: f64, detail: String },

    #[error("enumeration guard exceeded: {count} > {limit}")]
    EnumerationGuard { count: f64, limit: f64 },

    #[error("diagram is not a tree: {0}")]
    NotATree(String),

    #[error("commutation violated: ‖UM − MU‖ = {defect:.3e}")]
    NotCommuting { defect: f64 },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

impl Error {
    /// Stable machine-readable identifier, used by the CLI for exit codes and reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonSquare { .. } => "non_square",
            Error::ShapeMismatch(_) => "shape_mismatch",
            Error::Singular { .. } => "singular",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::NotNormal { .. } => "not_normal",
            Error::NotPositiveDefinite { .. } => "not_positive_definite",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::ContourEnclosure { .. } => "contour_enclosure",
            Error::Convergence { .. } => "convergence",
            Error::GapCollapse { .. } => "gap_collapse",
            Error::StepSize { .. } => "step_size",
            Error::TrackingLoss { .. } => "tracking_loss",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::EnumerationGuard { .. } => "enumeration_guard",
            Error::NotATree(_) => "not_a_tree",
            Error::NotCommuting { .. } => "not_commuting",
            Error::Parse { .. } => "parse",
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
