use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("a partition type needs at least one level")]
    EmptyType,
    #[error("level sizes must be positive")]
    ZeroLevel,
    #[error("leaf count {leaves} exceeds the bound {bound}")]
    TooLarge { leaves: u128, bound: u64 },
    #[error("level {level} out of range for depth {depth}")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("the root point has no projection")]
    ProjectRoot,
    #[error("partition types differ: {left} vs {right}")]
    TypeMismatch { left: String, right: String },
    #[error("point {point} is invalid for this type")]
    InvalidPoint { point: String },
    #[error("point {point} is not at level {expected}")]
    WrongLevel { point: String, expected: usize },
    #[error("local map at {anchor} has size {got}, expected {expected}")]
    LocalMapSize {
        anchor: String,
        got: usize,
        expected: usize,
    },
    #[error("missing local map at {anchor}")]
    MissingLocalMap { anchor: String },
    #[error("duplicate local map at {anchor}")]
    DuplicateLocalMap { anchor: String },
    #[error("map entry {value} out of range 1..={max}")]
    EntryOutOfRange { value: u32, max: u32 },
    #[error("image table of length {len} is not a permutation")]
    NotAPermutation { len: usize },
    #[error("endomorphism is not invertible at level {level}")]
    NotInvertible { level: usize },
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("unsupported construction: level {level} has size {size} < 3")]
    UnsupportedConstruction { level: usize, size: u32 },
    #[error("orders {left} and {right} are not coprime")]
    NotCoprime { left: u64, right: u64 },
    #[error("position {position} is moved by the top permutation")]
    PositionMoved { position: usize },
    #[error("element order must be odd, got {order}")]
    OrderNotOdd { order: u64 },
    #[error("element order must be 2, got {order}")]
    OrderNotTwo { order: u64 },
    #[error("degree must be at least {need}, got {got}")]
    DegreeTooSmall { need: usize, got: usize },
    #[error("closure bound {bound} exceeded after {reached} elements")]
    ClosureBound { bound: u64, reached: u64 },
    #[error("instance too large: {what} = {size} exceeds bound {bound}")]
    Infeasible {
        what: String,
        size: u128,
        bound: u128,
    },
    #[error("group order overflows u128")]
    OrderOverflow,
    #[error("the supplied subset is not closed under the product")]
    NotClosed,
    #[error("malformed nested partition: {0}")]
    MalformedPartition(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
