use thiserror::Error;

/// Errors raised by the simulator and the two-party computation layers.
///
/// Protocol aborts and detected cheating are *not* errors; they are modeled
/// outcomes returned in the regular result types.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit index {qubit} out of range for a {num_qubits}-qubit state")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },

    #[error("gate targets must be distinct (got {0:?})")]
    DuplicateTargets(Vec<usize>),

    #[error("unsupported qubit count {0} (supported: 1..={max})", max = crate::kernel::MAX_QUBITS)]
    QubitCount(usize),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("partial trace needs a nonempty set of kept qubits")]
    EmptyKeepSet,

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("insufficient resources: need {needed} {what}, have {available}")]
    InsufficientResources {
        what: &'static str,
        needed: usize,
        available: usize,
    },

    #[error("probability {name}={value} outside [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("strategy misconfigured: {0}")]
    Strategy(String),

    #[error("invalid check configuration: {0}")]
    CheckConfig(String),

    #[error("combination group {group} mixes Bob inputs")]
    MixedGroup { group: usize },

    #[error("invalid table selection: {0}")]
    TableSelection(String),

    #[error("one-time table {0} was already consumed")]
    TableReuse(u64),

    #[error("malformed circuit at line {line}: {msg}")]
    MalformedCircuit { line: usize, msg: String },

    #[error("invalid circuit input: {0}")]
    CircuitInput(String),

    #[error("reveal has {got} bits, commitment has {expected}")]
    RevealLength { expected: usize, got: usize },

    #[error("commitment needs a nonzero Bob input string")]
    ZeroCommitmentInput,

    #[error("T gates are handled by the gadget round, not by key update")]
    TGateInKeyUpdate,

    #[error("gadget resources already consumed")]
    ResourceReuse,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
