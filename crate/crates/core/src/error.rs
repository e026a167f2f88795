use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("exponent p = {0} must lie in [1, inf]")]
    InvalidExponent(f64),

    #[error("invalid covering parameter: {0}")]
    InvalidCovering(String),

    #[error("grid too coarse for covering: {0}")]
    GridTooCoarse(String),

    #[error("unknown piece id {0}")]
    UnknownPiece(usize),

    #[error("alpha mismatch: covering has {covering}, norm spec asks for {spec}")]
    AlphaMismatch { covering: f64, spec: f64 },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("input is not orthonormal (defect {0:.3e})")]
    NotOrthonormal(f64),

    #[error("non-finite values in {0}")]
    NonFinite(&'static str),

    #[error("division floor violated: |phi_QQ'| = {value:.3e} < {floor:.1e} on the cutoff support")]
    DivisionFloor { value: f64, floor: f64 },

    #[error("piece spectrum leaks outside Q x Q' ({0:.3e} of its mass)")]
    PieceNotLocalized(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
