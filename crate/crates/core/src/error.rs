use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("spin index {index} out of range for {n} spins")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("term support repeats spin {0}")]
    DuplicateSpin(usize),

    #[error("enumeration over {n} spins refused: limit is {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("index sets overlap or do not cover all spins: {0}")]
    Partition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("gadget validity violated: {0}")]
    Validity(String),

    #[error("inductance matrix is not passive: {0}")]
    Passivity(String),

    #[error("matrix is singular")]
    Singular,

    #[error("coupler is bistable: {0} local minima of the coupler phase")]
    Bistable(usize),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
