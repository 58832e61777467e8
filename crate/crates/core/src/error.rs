use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported overlap factor K={0} for the Mirabbasi-Martin filter (supported: 3, 4)")]
    UnsupportedFilterOrder(usize),
    #[error("EGF spreading factor {alpha} outside supported range [{min}, {max}]")]
    UnsupportedSpreading { alpha: f64, min: f64, max: f64 },
    #[error("prototype filter has zero energy")]
    DegenerateFilter,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("index out of range: {0}")]
    Index(String),
    #[error("invalid constellation: {0}")]
    Constellation(String),
    #[error("enumeration needs {required} offsets, budget is {budget}")]
    EnumerationBudgetExceeded { required: u128, budget: u64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("pulse support out of signal range: {0}")]
    Range(String),
    #[error("grid mismatch: {0}")]
    Grid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
