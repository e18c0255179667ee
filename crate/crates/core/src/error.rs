use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid root system {family}{rank}: {reason}")]
    InvalidRootSystem {
        family: String,
        rank: usize,
        reason: String,
    },

    #[error("unknown space label `{label}`{}", suggestion_suffix(.suggestions))]
    UnknownLabel {
        label: String,
        suggestions: Vec<String>,
    },

    #[error("parameter out of range for {label}: {reason}")]
    ParameterOutOfRange { label: String, reason: String },

    #[error("malformed label `{0}`")]
    MalformedLabel(String),

    #[error("{0} is not a Hermitian symmetric space")]
    NotHermitian(String),

    #[error("vector is zero")]
    ZeroVector,

    #[error("point lies outside the open polytope: |{root}(x)| = {value} >= pi/2")]
    OutsideDomain { root: String, value: f64 },

    #[error("adapted block is singular at z = {re} + {im}i for lambda = {lambda}")]
    SingularPoint { lambda: f64, re: f64, im: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("oracle diagnostic: {0}")]
    Oracle(String),

    #[error("data file {file}: {reason}")]
    Data { file: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn suggestion_suffix(s: &[String]) -> String {
    if s.is_empty() {
        String::new()
    } else {
        format!(" (did you mean: {})", s.join(", "))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
