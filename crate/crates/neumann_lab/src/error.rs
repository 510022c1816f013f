use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("time parameter must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("points lie in different half-spaces")]
    MixedHalfSpaces,
    #[error("kernel is singular at x = y")]
    Singular,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("half-space mean {mean:e} on the {half} side is not zero")]
    NonZeroHalfMean { half: &'static str, mean: f64 },
    #[error("cannot place the companion ball inside the box: {0}")]
    Placement(String),
    #[error("residual stopped contracting at level {level} (ratio {ratio:.4})")]
    NonContracting {
        level: usize,
        ratio: f64,
        ledger: Box<crate::factorization::FactorizationLedger>,
    },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;
