use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("variable `{tag}` has unusable bounds [{lower}, {upper}]")]
    InvalidBounds { tag: String, lower: f64, upper: f64 },
    #[error("binary variable `{tag}` has bounds outside [0, 1]")]
    BinaryBounds { tag: String },
    #[error("`{tag}` contains a non-finite coefficient or right-hand side")]
    NonFinite { tag: String },
    #[error("`{tag}` references unknown variable x{var}")]
    UnknownVariable { tag: String, var: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid model: {0}")]
    Model(#[from] ModelError),
    #[error("invalid solver options: {0}")]
    Options(String),
    #[error("unknown solver backend `{0}`")]
    UnknownBackend(String),
}
