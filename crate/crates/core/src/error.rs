use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit label {label} out of range 1..={n}")]
    LabelOutOfRange { label: usize, n: usize },
    #[error("qubit label {0} listed more than once")]
    DuplicateLabel(usize),
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitCountMismatch { left: usize, right: usize },
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("state contains a non-finite amplitude")]
    NonFinite,
    #[error("permutation is not an involution")]
    NotInvolution,
    #[error("gate acts twice on qubit {0}")]
    IndexClash(usize),
    #[error("ops in one layer overlap on qubit {0}")]
    OverlappingSupport(usize),
    #[error("excitation weight {k} out of range for {n} qubits")]
    WeightOutOfRange { k: usize, n: usize },
    #[error("expected every term to have weight {expected}")]
    WrongWeight { expected: usize },
    #[error("matrix is not a single-qubit Clifford element mod phase")]
    NotClifford,
    #[error("Clifford index ({0}, {1}) out of range")]
    CliffordIndex(usize, usize),
    #[error("row width n = {0} is not supported here: {1}")]
    IncompatibleRowWidth(usize, &'static str),
    #[error("no gamma-power correction turns the resonant core into a Hadamard at n = {0}")]
    NoCalibration(usize),
    #[error("logical registers overlap")]
    RegisterOverlap,
    #[error("logical register {q} out of range 1..={count}")]
    RegisterOutOfRange { q: usize, count: usize },
    #[error("dimension {0} exceeds the dense linear-algebra limit")]
    DimensionOverflow(usize),
    #[error("scalar must have unit modulus, got |z| = {0}")]
    NotUnitModulus(f64),
    #[error("invalid argument: {0}")]
    Invalid(String),
}
