use thiserror::Error;

/// Errors shared by all analysis modules.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    #[error("composition must have at least 2 parts, got {0}")]
    TooFewParts(usize),

    #[error("non-positive value {value} in part '{part}' of firm '{firm}'")]
    NonPositiveCell {
        firm: String,
        part: String,
        value: f64,
    },

    #[error("negative value {value} in part '{part}' of firm '{firm}'")]
    NegativeCell {
        firm: String,
        part: String,
        value: f64,
    },

    #[error("unknown part '{0}'")]
    UnknownPart(String),

    #[error("duplicate part name '{0}'")]
    DuplicatePart(String),

    #[error("duplicate firm identifier '{0}'")]
    DuplicateFirm(String),

    #[error("empty group")]
    EmptyGroup,

    #[error("unknown column '{0}'")]
    UnknownColumn(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("log-ratio numerator and denominator must differ, both are '{0}'")]
    DegenerateRatio(String),

    #[error("invalid partition matrix: {0}")]
    InvalidSbp(String),

    #[error("invalid log-ratio graph: {0}")]
    InvalidGraph(String),

    #[error("degenerate: {0}")]
    Degenerate(String),

    #[error("cluster count {k} out of range for {n} observations (need 2 <= k <= n-1)")]
    ClusterCountOutOfRange { k: usize, n: usize },

    #[error("part '{part}' has no positive observations")]
    AllZeroPart { part: String },

    #[error("parts exceed the zero-fraction threshold: {0}")]
    FlaggedZeros(String),

    #[error("replacement fraction must lie in (0,1), got {0}")]
    BadFraction(f64),

    #[error("design matrix is rank deficient; column '{0}' is collinear with earlier columns")]
    RankDeficient(String),

    #[error("need more observations than parameters: n={n}, p={p}")]
    NotEnoughRows { n: usize, p: usize },

    #[error("link between '{0}' and '{1}' is too short to define a direction")]
    LinkTooShort(String, String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
