use thiserror::Error;

/// Errors raised by group constructions and the closure machinery.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("image list is not a bijection on 0..{degree}")]
    NotBijection { degree: usize },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("permutation does not fix the point set setwise")]
    NotSetwiseFixed,
    #[error("point set is not a union of orbits")]
    NotUnionOfOrbits,
    #[error("invalid group table: {0}")]
    InvalidGroupTable(String),
    #[error("{what} exceeds cap {cap}")]
    CapExceeded { what: &'static str, cap: usize },
    #[error("group is not transitive")]
    NotTransitive,
    #[error("not a partition into equal cells: {0}")]
    NotPartition(String),
    #[error("partition is not a block system of the group")]
    NotBlockSystem,
    #[error("block system is not normal")]
    NotNormal,
    #[error("block index {index} out of range ({count} blocks)")]
    BlockOutOfRange { index: usize, count: usize },
    #[error("element is not in the group")]
    NotMember,
    #[error("degree {degree} exceeds the limit {limit}")]
    DegreeTooLarge { degree: usize, limit: usize },
    #[error("{k}-closure is not supported (only k = 1, 2 or 3)")]
    UnsupportedArity { k: usize },
    #[error("invalid primary key: {0}")]
    InvalidKey(String),
    #[error("{0} is not an odd prime")]
    InvalidPrime(u64),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("invalid tuple system: {0}")]
    InvalidTupleSystem(String),
    #[error("connection residue {0} is zero modulo n")]
    ZeroResidue(i64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
