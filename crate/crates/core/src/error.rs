use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },

    #[error("index ({row}, {col}) out of range for dimension {dim}")]
    IndexOutOfRange { row: usize, col: usize, dim: usize },

    #[error("{context}: entry ({row}, {col}) is not finite")]
    NonFinite { context: String, row: usize, col: usize },

    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is not a projection: {reason}")]
    NotProjection { reason: String },

    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },

    #[error("initial state is not a density matrix: {reason}")]
    NotDensity { reason: String },

    #[error("operator word is empty")]
    EmptyWord,

    #[error("summation needs {required:e} terms, budget is {budget:e}")]
    BudgetExceeded { required: f64, budget: f64 },

    #[error("channel is not unital (defect {defect:e})")]
    NotUnital { defect: f64 },

    #[error("channel is not completely positive (min Choi eigenvalue {min_eigenvalue:e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("recurrence undefined: initial weight of projection is {phi_e:e}")]
    UndefinedRecurrence { phi_e: f64 },

    #[error("degenerate normalization: Tr(E(e (x) id)) = {trace:e}")]
    DegenerateTrace { trace: f64 },
}

impl Error {
    pub(crate) fn dims(context: &str, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            context: context.to_string(),
            expected,
            found,
        }
    }

    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
