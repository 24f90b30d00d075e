use thiserror::Error;

/// Errors raised by the algebra, optics and analysis layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mode {0} is not part of the transform basis")]
    UnknownMode(String),
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("duplicate port `{0}`")]
    DuplicatePort(String),
    #[error("hybrid beam splitter needs exactly two internal labels, found {0}")]
    InternalSetNotBinary(usize),
    #[error("output ports {outputs:?} do not match input ports {inputs:?}")]
    PortSetMismatch {
        inputs: Vec<String>,
        outputs: Vec<String>,
    },
    #[error("routing is incomplete: no output assigned to `{0}`")]
    IncompleteRouting(String),
    #[error("relabeling is not a bijection: {0}")]
    NotBijective(String),
    #[error("transform basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("measurement partitions overlap on mode {0}")]
    OverlappingPartitions(String),
    #[error("coincidence table carries no probability mass")]
    ZeroCoincidenceMass,
    #[error("sign map has no entry for bin `{0}`")]
    MissingSign(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
