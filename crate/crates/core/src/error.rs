use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("Bianchi trace constraint violated: tr A = {trace_a}, tr C = {trace_c}")]
    BianchiViolation { trace_a: f64, trace_c: f64 },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("expected unit vectors, got |u| = {norm_u}, |v| = {norm_v}")]
    NotUnit { norm_u: f64, norm_v: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("{name} = {value} is out of range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("theorem violation: {reason}; operator {operator}")]
    TheoremViolation { reason: String, operator: String },
}

pub type Result<T> = std::result::Result<T, Error>;
