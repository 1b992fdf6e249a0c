use thiserror::Error;

pub type Result<T> = std::result::Result<T, FockError>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FockError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operator is not symmetric (asymmetry norm {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("operator is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    /// The real part of an exponent exceeded the representable range.
    #[error("exponent out of range (Re = {exponent:e})")]
    Range { exponent: f64 },

    #[error("divergent Gaussian integral: {0}")]
    Divergent(String),

    #[error("operation requires A to preserve the real subspace")]
    RequiresRealForm,

    #[error("unsupported function form: {0}")]
    UnsupportedForm(String),

    #[error("quadrature budget exceeded: {nodes} nodes requested (limit {limit})")]
    QuadratureBudget { nodes: u128, limit: u128 },

    #[error("integrand returned a non-finite value at node {index}")]
    NonFinite { index: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl FockError {
    /// Stable machine-readable identifier, used in CLI error objects and FFI codes.
    pub fn kind(&self) -> &'static str {
        match self {
            FockError::DimensionMismatch { .. } => "dimension_mismatch",
            FockError::NotSymmetric { .. } => "not_symmetric",
            FockError::NotPositiveDefinite { .. } => "not_positive_definite",
            FockError::NumericalBreakdown(_) => "numerical_breakdown",
            FockError::Range { .. } => "range",
            FockError::Divergent(_) => "divergent",
            FockError::RequiresRealForm => "requires_real_form",
            FockError::UnsupportedForm(_) => "unsupported_form",
            FockError::QuadratureBudget { .. } => "quadrature_budget",
            FockError::NonFinite { .. } => "non_finite",
            FockError::InvalidInput(_) => "invalid_input",
        }
    }
}
