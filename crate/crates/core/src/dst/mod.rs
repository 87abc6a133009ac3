//! Direct state tomography with a qubit meter: interaction unitaries,
//! meter Kraus operators, overall POVMs, conditional meter statistics,
//! postselection equivalence, and reconstruction formulas.

mod kraus;
mod povm;
mod recon;
mod stats;

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use kraus::{interaction_unitary, meter_kraus, meter_kraus_x, meter_kraus_y, meter_kraus_z};
pub use povm::{dst_povm, dst_povm_closed_form, dst_povm_from_kraus};
pub use recon::{reconstruct_exact_augmented, reconstruct_weak, WeakMode};
pub use stats::{
    conditional_stats, conditional_stats_circuit, conditional_stats_closed_form,
    joint_probabilities_circuit,
    postselection_shift, ConditionalStats,
};

/// Meter-measurement probabilities (σx, σy, σz) of the original protocol.
pub const ORIGINAL_METER_PROBS: [f64; 3] = [0.0, 0.5, 0.5];
/// Augmented protocol with equal meter probabilities.
pub const AUGMENTED_EQUAL_METER_PROBS: [f64; 3] = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];
/// Augmented protocol with σz chosen half the time.
pub const AUGMENTED_HALF_Z_METER_PROBS: [f64; 3] = [0.25, 0.25, 0.5];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DstConfig {
    pub dim: usize,
    /// Coupling strength of exp(−iφ|n⟩⟨n|⊗σz), in [0, π/2].
    pub phi_c: f64,
    /// Probabilities of measuring the meter along (x, y, z).
    pub meter_probs: [f64; 3],
    /// Probability of coupling to each |n⟩.
    pub basis_probs: Vec<f64>,
    /// Keep only conjugate outcome `m`, merging the rest into a discard element.
    pub postselect: Option<usize>,
}

impl DstConfig {
    pub fn new(dim: usize, phi_c: f64, meter_probs: [f64; 3]) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Dimension { min: 2, got: dim });
        }
        let config = Self {
            dim,
            phi_c,
            meter_probs,
            basis_probs: vec![1.0 / dim as f64; dim],
            postselect: None,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn original(dim: usize, phi_c: f64) -> Result<Self> {
        Self::new(dim, phi_c, ORIGINAL_METER_PROBS)
    }

    pub fn augmented_equal(dim: usize, phi_c: f64) -> Result<Self> {
        Self::new(dim, phi_c, AUGMENTED_EQUAL_METER_PROBS)
    }

    pub fn augmented_half_z(dim: usize, phi_c: f64) -> Result<Self> {
        Self::new(dim, phi_c, AUGMENTED_HALF_Z_METER_PROBS)
    }

    pub fn with_basis_probs(mut self, basis_probs: Vec<f64>) -> Result<Self> {
        self.basis_probs = basis_probs;
        self.validate()?;
        Ok(self)
    }

    pub fn with_postselection(mut self, m: usize) -> Result<Self> {
        self.postselect = Some(m);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        check_distribution("meter", &self.meter_probs)?;
        check_distribution("basis", &self.basis_probs)?;
        if self.basis_probs.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: self.basis_probs.len(),
            });
        }
        if !(0.0..=FRAC_PI_2).contains(&self.phi_c) {
            return Err(Error::InvalidParameter(format!(
                "coupling strength {} outside [0, π/2]",
                self.phi_c
            )));
        }
        if let Some(m) = self.postselect {
            if m >= self.dim {
                return Err(Error::IndexOutOfRange {
                    index: m,
                    dim: self.dim,
                });
            }
        }
        Ok(())
    }
}

fn check_distribution(what: &str, probs: &[f64]) -> Result<()> {
    let total: f64 = probs.iter().sum();
    if probs.iter().any(|p| !(*p >= 0.0)) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidProbabilities(format!(
            "{what} probabilities must be nonnegative and sum to 1 (sum {total})"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(DstConfig::original(2, 0.3).is_ok());
        assert!(DstConfig::new(2, 0.3, [0.5, 0.5, 0.5]).is_err());
        assert!(DstConfig::new(2, 0.3, [-0.1, 0.6, 0.5]).is_err());
        assert!(DstConfig::original(2, 1.6).is_err());
        assert!(DstConfig::original(1, 0.3).is_err());
        let c = DstConfig::original(3, 0.3).unwrap();
        assert!(c.clone().with_basis_probs(vec![0.5, 0.5]).is_err());
        assert!(c.clone().with_postselection(3).is_err());
        assert!(c.with_postselection(2).is_ok());
    }
}
