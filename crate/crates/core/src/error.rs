use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("group spec is empty")]
    EmptySpec,
    #[error("invalid group spec at column {column}: {message}")]
    SpecSyntax { column: usize, message: String },
    #[error("cyclic order {0} is below 2")]
    OrderTooSmall(u64),
    #[error("group order overflows the supported cap of {cap}")]
    OrderOverflow { cap: usize },
    #[error("{what}: n = {n} exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, n: usize, cap: usize },
    #[error("group has odd order {0}, so it has no index-2 subgroup")]
    NoIndexTwoSubgroup(usize),
    #[error("element index {index} is outside a group of order {n}")]
    ElementOutOfRange { index: usize, n: usize },
    #[error("wrong group type: {0}")]
    WrongType(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("set is not {0}")]
    NotFree(&'static str),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("construction would emit {count} sets, above the cap of {cap}")]
    FamilyTooLarge { count: u128, cap: usize },
    #[error("internal invariant broken: {0}")]
    Internal(String),
    #[error("graph parse error at line {line}, column {column}: {message}")]
    GraphSyntax { line: usize, column: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
