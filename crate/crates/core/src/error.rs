use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("value {value} at position {index} is not strictly positive; the log transform needs positive data")]
    NonPositiveValue { index: usize, value: f64 },

    #[error("value at position {index} is not finite")]
    NonFiniteValue { index: usize },

    #[error("sample has {n} values, at least 3 are required")]
    TooSmall { n: usize },

    #[error("k = {k} is outside [2, {max}] for a sample of size {n}", max = n.saturating_sub(1))]
    KOutOfRange { k: usize, n: usize },

    #[error("least-squares design is degenerate at k = {k}")]
    DegenerateDesign { k: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("return-level horizon implies tail probability {p}, which is not in (0, 1)")]
    InvalidHorizon { p: f64 },

    #[error("empty k grid [{k_min}, {k_max}]")]
    EmptyGrid { k_min: usize, k_max: usize },

    #[error("rate function b vanishes at log(n); no finite k follows")]
    ZeroBias,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid distribution spec `{0}`")]
    InvalidSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Whether the error comes from the filesystem rather than from the data or flags.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io(_) => true,
            Error::Csv(e) => e.is_io_error(),
            Error::Json(e) => e.is_io(),
            _ => false,
        }
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonPositiveValue { .. } => "NonPositiveValue",
            Error::NonFiniteValue { .. } => "NonFiniteValue",
            Error::TooSmall { .. } => "TooSmall",
            Error::KOutOfRange { .. } => "KOutOfRange",
            Error::DegenerateDesign { .. } => "DegenerateDesign",
            Error::Domain(_) => "DomainError",
            Error::InvalidHorizon { .. } => "InvalidHorizon",
            Error::EmptyGrid { .. } => "EmptyGrid",
            Error::ZeroBias => "ZeroBias",
            Error::Parse { .. } => "ParseError",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::Io(_) => "IoError",
            Error::Csv(_) => "CsvError",
            Error::Json(_) => "JsonError",
        }
    }
}
