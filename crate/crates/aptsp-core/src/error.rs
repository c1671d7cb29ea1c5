use thiserror::Error;

/// Errors shared across the crate.
///
/// Exhaustive enumerations and LP solves have hard budgets; exceeding one is
/// an error, never a silent approximation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("distance to empty set is undefined")]
    EmptySet,

    #[error("{op}: size {actual} exceeds limit {limit}")]
    SizeLimit {
        op: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("{op}: combinatorial budget exceeded ({detail})")]
    BudgetExceeded { op: &'static str, detail: String },

    #[error("instance has no depot but {op} requires one")]
    DepotRequired { op: &'static str },

    #[error("depot {depot} not contained in master set")]
    DepotNotInSet { depot: usize },

    #[error("{what}")]
    InvalidInput { what: String },

    #[error("normalization infeasible: {detail}")]
    NormalizationInfeasible { detail: String },

    #[error("linear program is infeasible")]
    LpInfeasible,

    #[error("linear program is unbounded")]
    LpUnbounded,

    #[error("LP solver failed: {0}")]
    LpNumerical(String),

    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(what: impl Into<String>) -> Self {
        Error::InvalidInput { what: what.into() }
    }
}
