use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("value {value} does not fit in {width} bits")]
    ValueOutOfRange { value: u64, width: u32 },
    #[error("read of {width} bits at offset {offset} exceeds length {len}")]
    OutOfBounds { offset: usize, width: u32, len: usize },
    #[error("node {node} out of range for n = {n}")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("input graph contains a directed cycle")]
    Cyclic,
    #[error("bipartite budget violated: {a}*{alpha} + {b}*{beta} <= {a}*{b}")]
    Budget { a: usize, b: usize, alpha: usize, beta: usize },
    #[error("labels do not belong to the same encoding: {0}")]
    Mismatch(String),
    #[error("malformed label: {0}")]
    Malformed(String),
    #[error("label file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
