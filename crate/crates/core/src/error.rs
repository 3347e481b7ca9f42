use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the engine.
///
/// Most variants are input validation failures. [`Error::is_numeric_contract`]
/// singles out the ones that mean a computed quantity broke one of its
/// guaranteed bounds.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),
    #[error("{what} violates the `{constraint}` constraint (residual {residual:e})")]
    Constraint {
        what: &'static str,
        constraint: &'static str,
        residual: f64,
    },
    #[error("event with probability {0:e} cannot be conditioned on")]
    ZeroProbability(f64),
    #[error("duplicate index {0} in event union")]
    DuplicateIndex(usize),
    #[error("empty family")]
    EmptyFamily,
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("time ordering violated: {from} -> {to}")]
    TimeOrder { from: f64, to: f64 },
    #[error("incomplete prospect lattice: {0}")]
    IncompleteLattice(String),
    #[error("degenerate prospect lattice: total probability {0:e}")]
    DegenerateLattice(f64),
    #[error("invalid interference distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("numeric contract violated: {quantity} = {value:e} outside {bound}")]
    NumericContract {
        quantity: &'static str,
        value: f64,
        bound: &'static str,
    },
}

impl Error {
    pub(crate) fn constraint(what: &'static str, constraint: &'static str, residual: f64) -> Self {
        Error::Constraint {
            what,
            constraint,
            residual,
        }
    }

    pub(crate) fn mismatch(expected: usize, actual: usize) -> Self {
        Error::DimensionMismatch { expected, actual }
    }

    /// True when the error reports a broken numerical guarantee rather than
    /// bad input.
    pub fn is_numeric_contract(&self) -> bool {
        matches!(self, Error::NumericContract { .. })
    }
}
