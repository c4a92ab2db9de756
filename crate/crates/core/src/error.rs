use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid atom: {0}")]
    InvalidAtom(String),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("invalid density: {0}")]
    InvalidDensity(String),
    #[error("map leaves the target domain at {0:?}")]
    MapOutOfDomain([f64; 2]),
    #[error("invalid grid parameters: {0}")]
    InvalidParams(String),
    #[error("scale {k} outside window [{k_min}, {k_max}]")]
    ScaleOutOfWindow { k: i32, k_min: i32, k_max: i32 },
    #[error("grid is not admissible for the measures: {0}")]
    Inadmissible(String),
    #[error("atoms at {0} and {1} are not separated by the finest scale")]
    Unresolved(f64, f64),
    #[error("function has {got} values but the measure has {expected} atoms")]
    LengthMismatch { expected: usize, got: usize },
    #[error("kernel is singular: {0}")]
    Singular(String),
    #[error("power iteration did not converge after {iterations} iterations (best estimate {best})")]
    NoConvergence { best: f64, iterations: usize },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("pair collection not admissible: {0}")]
    InadmissibleCollection(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("root finding failed: {0}")]
    RootFinding(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
