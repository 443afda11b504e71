use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("terms {0} and {1} do not commute")]
    NonCommuting(usize, usize),
    #[error("algebras {0} and {1} do not commute")]
    NonCommutingAlgebras(usize, usize),
    #[error("{0} is not an eigenvalue of term {1}")]
    NotAnEigenvalue(f64, usize),
    #[error("girth {girth} does not exceed {needed}")]
    Girth { girth: String, needed: usize },
    #[error("requires branch migration (out of scope): target 0-cell {0}")]
    BranchMigration(usize),
    #[error("counterexample regime: {0}")]
    Counterexample(String),
    #[error("unsupported regime: {0}")]
    Unsupported(String),
    #[error("not frustration-free: {0}")]
    Frustrated(String),
    #[error("inconsistent cut classification: {0}")]
    Inconsistent(String),
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("gate supports overlap in round {0}")]
    OverlappingGates(usize),
    #[error("gate {gate} in round {round} is not unitary (residual {residual:e})")]
    NotUnitary { round: usize, gate: usize, residual: f64 },
    #[error("gate {gate} in round {round} is not Clifford")]
    NotClifford { round: usize, gate: usize },
}
