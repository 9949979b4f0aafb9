use alloc::string::String;

/// Failures raised by the solvers. Instance-level rule violations are not
/// errors; see [`crate::model::validate`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("{what} index {index} out of range (len {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },
    #[error("{what} has length {found}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid contract: {0}")]
    InvalidContract(String),
    #[error("linear contracts require nonnegative rewards, outcome {outcome} is negative")]
    NegativeReward { outcome: usize },
    #[error("profile assigns a final action to terminated state {0}")]
    TerminatedState(usize),
    #[error("profile has no final action at state {0}")]
    MissingFinal(usize),
    #[error("enumeration cap exceeded: {what} = {count} > {cap}")]
    CapExceeded {
        what: &'static str,
        count: u128,
        cap: u128,
    },
    #[error("instance is not a tree process")]
    NotTree,
    #[error("instance is not a deterministic first-stage process")]
    NotDeterministic,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed linear program: {0}")]
    MalformedLp(String),
    #[error("cannot parse number {0:?}")]
    ParseNumber(String),
}
