//! Bernstein-Vazirani success probabilities under quenched Hadamard-gate
//! disorder, with matched classical baselines and response-curve fits.

pub mod disorder;
pub mod engine;
pub mod error;
pub mod fit;
pub mod geometry;
mod numeric;
pub mod quench;
pub mod stats;

pub use disorder::{
    classical_mean_and_strength, classical_param_for_strength, quantum_param_for_strength,
    quantum_strength, sample_classical, sample_quantum, ClassicalDisorder, ClassicalKind,
    QuantumDisorder, QuantumKind, StrengthReport,
};
pub use engine::{
    classical_success, statevector_success_probability, success_probability, NoiseRealization,
    SecretString,
};
pub use error::{Error, Result};
pub use fit::{fit, FitModel, FitResult};
pub use geometry::{from_cartesian, rotate_pole_to_x, to_cartesian, BlochAngles, UnitVector3};
pub use quench::{
    advantage_curve, analytic_uniform_special, lnp_statistics, quenched_average, LnPStats,
    QuenchEstimate, StoppingRule, UniformSpecialCase,
};
pub use stats::derive_seed;
