use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown path label `{0}`")]
    UnknownPath(String),
    #[error("path index {0} is not declared in this layout")]
    PathOutOfRange(usize),
    #[error("the loss path cannot be routed into an optical element")]
    LossPathRouted,
    #[error("spin index {qubit} out of range for {n_spins} spins")]
    SpinOutOfRange { qubit: usize, n_spins: usize },
    #[error("state layouts differ")]
    LayoutMismatch,
    #[error("output path `{0}` already carries amplitude")]
    PathOccupied(String),
    #[error("root index m must be >= 1, got {0}")]
    InvalidRoot(i64),
    #[error("invalid emitter parameters: {0}")]
    InvalidParams(String),
    #[error("input spin state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("input spin state has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{0}")]
    InvalidSpec(String),
    #[error("quadrature needs at least 8 points per angle, got {0}")]
    QuadratureTooCoarse(usize),
    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),
    #[error("checkpoint tracing is only defined for ideal scattering")]
    TraceRequiresIdeal,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
