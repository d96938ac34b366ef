use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FsaError {
    #[error("sequence period must be at least 1 (got an empty {side} period)")]
    EmptyPeriod { side: &'static str },
    #[error("interval {lo}..={hi} is empty")]
    EmptyInterval { lo: i64, hi: i64 },
    #[error("cannot compress an operator on {from} to {to}")]
    IncompatibleCompression { from: String, to: String },
    #[error("operation requires an operator on the full line, got {0}")]
    NotFullLine(String),
    #[error("domains differ: {0} vs {1}")]
    DomainMismatch(String, String),
    #[error("exponents differ: p={0} vs p={1}")]
    ExponentMismatch(String, String),
    #[error("semi-infinite embedding needs an operator on 1.., got {0}")]
    EmbedDomain(String),
    #[error("embedding constant must be real and positive, got {0}")]
    EmbedConstant(String),
    #[error("bandwidth {bandwidth} exceeds the cap {cap}")]
    BandwidthCap { bandwidth: i64, cap: i64 },
    #[error("modulus {modulus} is not a multiple of the tail period {period}")]
    IncompatibleModulus { modulus: u64, period: u64 },
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("section index must be at least 1, got {0}")]
    SectionIndex(u64),
    #[error("unsupported exponent: {0}")]
    UnsupportedExponent(String),
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix shapes do not match: {0}")]
    ShapeMismatch(String),
    #[error("empty expression node: {0}")]
    EmptyExpression(&'static str),
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),
    #[error("point set is empty")]
    EmptyPointSet,
    #[error("need at least {need} sets, got {got}")]
    TooFewSets { need: usize, got: usize },
    #[error("empty n range {start}..={end}")]
    EmptyRange { start: u64, end: u64 },
    #[error("unknown operator reference '{0}'")]
    UnknownOperator(String),
    #[error("invalid description at {path}: {message}")]
    Format { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, FsaError>;
