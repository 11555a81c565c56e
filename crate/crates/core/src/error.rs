use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NonHermitian(f64),
    #[error("eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("bit-string length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid density operator: {0}")]
    InvalidDensity(String),
    #[error("invalid interpretation: {0}")]
    InvalidInterpretation(String),
    #[error("polynomial {modulus:#x} is not an irreducible modulus of degree {m}")]
    ReducibleModulus { m: u32, modulus: u32 },
    #[error("family index must be a nonzero field element")]
    ZeroIndex,
    #[error("index {0} is outside the family index set")]
    BadIndex(u32),
    #[error("key {key} does not fit in {bits} bits")]
    BadKey { key: u32, bits: u32 },
    #[error("domain width {0} is too large for exhaustive verification")]
    DomainTooLarge(u32),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("min-entropy too low: max weight {max_weight} exceeds 2^-{t}")]
    EntropyTooLow { max_weight: f64, t: u32 },
    #[error("weights sum to {0}, not 1")]
    MassNotNormalized(f64),
    #[error("adversary outcome labels do not cover the function range: {0}")]
    LabelMismatch(String),
    #[error("no predicate mask reaches the required gap {required}")]
    NoWitness { required: f64 },
    #[error("predicate is constant on the interpretation support")]
    ConstantPredicate,
    #[error("parse error: {0}")]
    Parse(String),
}
