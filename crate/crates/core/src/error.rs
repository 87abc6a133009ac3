use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension must be at least {min}, got {got}")]
    Dimension { min: usize, got: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("matrix is not a valid density operator: {0}")]
    InvalidDensity(String),
    #[error("vectors are not orthonormal (Gram deviation {0:.3e})")]
    NotOrthonormal(f64),
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("invalid probabilities: {0}")]
    InvalidProbabilities(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("POVM has no elements")]
    EmptyPovm,
    #[error(
        "POVM fails validation: completeness deficit {completeness_deficit:.3e}, \
         positivity violation {positivity_violation:.3e}"
    )]
    InvalidPovm {
        completeness_deficit: f64,
        positivity_violation: f64,
    },
    #[error("operation requires a qubit, got dimension {0}")]
    NotQubit(usize),
    #[error("POVM element {index} is not rank-one (second eigenvalue {second_eigenvalue:.3e})")]
    NotRankOne {
        index: usize,
        second_eigenvalue: f64,
    },
    #[error("sum of amplitudes vanishes, reconstruction is undefined")]
    UpsilonVanishes,
    #[error("coupling strength must be nonzero")]
    ZeroCoupling,
    #[error("expectation data carries no signal")]
    NoSignal,
    #[error("quadrature grid too coarse: completeness deficit {0:.3e}")]
    GridTooCoarse(f64),
    #[error("outcome has zero likelihood for every particle")]
    ZeroPosterior,
    #[error("outcome not present in POVM")]
    UnknownOutcome,
    #[error("input is empty")]
    Empty,
    #[error("{what} cross-check failed: discrepancy {discrepancy:.3e}")]
    CrossCheck { what: &'static str, discrepancy: f64 },
}
