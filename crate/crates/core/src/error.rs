use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid problem: {0}")]
    InvalidSpec(String),
    #[error("matrix is rank deficient: numerical rank {rank} < {cols} columns")]
    RankDeficient { rank: usize, cols: usize },
    #[error("eigenvalue iteration did not converge")]
    ConvergenceFailure,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("subset enumeration capped at {max} users, got {k}")]
    TooManyUsers { k: usize, max: usize },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("requires K >= 3, got K = {0}")]
    BadK(usize),
    #[error("operation requires equal antenna counts at every user")]
    AsymmetricSpec,
    #[error("channel H[{0},{1}] is singular")]
    SingularChannel(usize, usize),
    #[error("product matrix lacks a full set of independent eigenvectors")]
    DefectiveB,
    #[error("instance is infeasible: {0}")]
    InfeasibleInput(String),
    #[error("kernel too small for construction: {0}")]
    DegenerateKernel(String),
    #[error("dimension mismatch: strategy dimension {dim} != codimension {codim}")]
    DimensionMismatch { dim: i64, codim: i64 },
    #[error("term budget of {0} exceeded")]
    ResourceLimit(usize),
    #[error("existence witness failed: {0}")]
    WitnessFailed(String),
    #[error("no convergence after {restarts} restarts (best residual {best_residual:e})")]
    NoConvergence { restarts: usize, best_residual: f64 },
    #[error("leading block of basis {0} is singular")]
    PivotSingular(String),
    #[error("channel set has no direct channels")]
    MissingDirectChannels,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable variant name, used by the CLI when reporting failures.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::RankDeficient { .. } => "RankDeficient",
            Error::ConvergenceFailure => "ConvergenceFailure",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::TooManyUsers { .. } => "TooManyUsers",
            Error::HypothesisViolated(_) => "HypothesisViolated",
            Error::BadK(_) => "BadK",
            Error::AsymmetricSpec => "AsymmetricSpec",
            Error::SingularChannel(..) => "SingularChannel",
            Error::DefectiveB => "DefectiveB",
            Error::InfeasibleInput(_) => "InfeasibleInput",
            Error::DegenerateKernel(_) => "DegenerateKernel",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::ResourceLimit(_) => "ResourceLimit",
            Error::WitnessFailed(_) => "WitnessFailed",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::PivotSingular(_) => "PivotSingular",
            Error::MissingDirectChannels => "MissingDirectChannels",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }
}
