use thiserror::Error;

/// Errors produced by the solver stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("gamma pole: x = {0} is a non-positive integer")]
    GammaPole(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parameter condition violated: {0}")]
    ParameterCondition(String),

    #[error("singular triangular solve in column {col}: pivot magnitude {pivot:e}")]
    SingularColumn { col: usize, pivot: f64 },

    #[error("zero recurrence pivot B[{row},{col}]")]
    ZeroPivot { row: usize, col: usize },

    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("evaluation at a basis singularity: {0}")]
    Singularity(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("internal assertion failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
