use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The binomial-to-uniform coupling needs `K > 3 ln n`.
    #[error("coupling infeasible: K = {k} must exceed 3 ln n = {bound:.6}")]
    InfeasibleCoupling { k: u64, bound: f64 },

    /// Poissonization needs `E[Y] > 1` so that the Poisson mean is positive.
    #[error("degenerate regime: E[Y] = {expected_y:.6} must exceed 1")]
    DegenerateRegime { expected_y: f64 },

    #[error("brute-force oracle refused: n = {n} exceeds the limit of {limit} nodes")]
    OracleTooLarge { n: usize, limit: usize },
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(LabError::InvalidInput(msg.into()))
}
