use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("invalid rational literal `{0}`")]
    Rational(String),
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("malformed {what}: {detail}")]
    Malformed { what: &'static str, detail: String },
    #[error("relation text parse error at byte {pos}: {detail}")]
    Relation { pos: usize, detail: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("genus mismatch: {0} vs {1}")]
    GenusMismatch(u32, u32),
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("color index {color} out of range for genus {genus}")]
    ColorOutOfRange { color: usize, genus: u32 },
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("dvec has length {got}, expected {expected}")]
    DvecLength { expected: usize, got: usize },
    #[error("truncation overflow: d_n = {d_n} exceeds bound {bound}")]
    Truncation { d_n: u32, bound: u32 },
    #[error("domain violation: {op} requires an element of H_{level}, found a generator of layer {found}")]
    Domain { op: String, level: usize, found: usize },
    #[error("not computable in model: {0}")]
    NotComputable(String),
    #[error("in sub-expression {path}: {source}")]
    InExpr { path: String, source: Box<Error> },
    #[error("malformed grid: {0}")]
    MalformedGrid(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
