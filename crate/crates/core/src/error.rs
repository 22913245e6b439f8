use thiserror::Error;

#[derive(Debug, Error)]
pub enum HeError {
    #[error("operands belong to different contexts")]
    ContextMismatch,
    #[error("slot count mismatch: expected {expected}, got {got}")]
    SlotCountMismatch { expected: usize, got: usize },
    #[error("fixed-point overflow: magnitude {magnitude:.6e} exceeds 2^{int_bits}")]
    Overflow { magnitude: f64, int_bits: u32 },
    #[error("multiplicative depth {depth} exceeds budget {budget}")]
    DepthBudgetExceeded { depth: u32, budget: u32 },
    #[error("{0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("value {value} outside domain [0, {n})")]
    OutOfRange { value: usize, n: usize },
    #[error("category not found in class map")]
    UnknownCategory,
    #[error("basis product {product} is smaller than n = {n}")]
    BasisTooSmall { product: u64, n: u64 },
    #[error("moduli {0} and {1} are not coprime")]
    NotCoprime(u64, u64),
    #[error("hierarchy too deep: modulus {0} cannot be split further")]
    HierarchyTooDeep(u64),
    #[error("inconsistent hierarchical representation: {0}")]
    InconsistentTree(String),
    #[error("invalid tile shape: {0}")]
    InvalidTileShape(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, HeError>;
