//! Quantum (Bloch sphere) and classical (bit-flip) disorder families.

mod classical;
mod quantum;

pub use classical::*;
pub use quantum::*;

/// Raw strength of a disorder together with the largest strength its
/// family can reach.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrengthReport {
    pub sigma: f64,
    pub sigma_max: f64,
    pub sigma_bar: f64,
}

impl StrengthReport {
    pub(crate) fn new(sigma: f64, sigma_max: f64) -> Self {
        StrengthReport {
            sigma,
            sigma_max,
            sigma_bar: sigma / sigma_max,
        }
    }
}
