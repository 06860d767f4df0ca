use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vector norm {0:e} is too small to define a direction")]
    ZeroVector(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("rejection sampler stalled: {attempts} attempts without an accepted point")]
    RejectionStall { attempts: u64 },

    #[error("target scaled strength {target} is outside the attainable range [{min}, {max}]")]
    Unreachable { target: f64, min: f64, max: f64 },

    #[error("length mismatch: secret string has {expected} bits, realization has {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("{n} qubits exceeds the full state-vector limit of {max}")]
    TooManyQubits { n: usize, max: usize },

    #[error("every sampled success probability was exactly zero")]
    AllZero,

    #[error("fit needs at least {needed} distinct points in [0, 1], got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("normal equations are singular")]
    SingularJacobian,

    #[error("least squares did not converge after {0} iterations")]
    NotConverged(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
