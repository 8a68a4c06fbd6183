use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Model(#[from] crate::error::Error),

    #[error("run diverged at t = {t}: {reason}")]
    Divergence { t: f64, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("reference samples do not line up with the run: {0}")]
    Alignment(String),

    #[error("convergence regression is degenerate: {reason}")]
    DegenerateRegression { reason: String, excluded: Vec<f64> },

    #[error("malformed trajectory file: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
