use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::povm::{MeterAxis, Sign};
use crate::qcore::linalg::{self, c, CVector};
use crate::qcore::PureState;

use super::{check_epsilon, povm_density, PovmDensitySample};

/// One simulated Das–Arvind record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DaOutcome {
    pub q1: f64,
    pub q2: f64,
    pub sign: Sign,
}

impl DaOutcome {
    /// Bloch direction of the effect this record corresponds to.
    pub fn density(&self, epsilon: f64) -> Result<PovmDensitySample> {
        povm_density(self.q1, self.q2, epsilon)
    }
}

/// ⟨ψ|σ|ψ⟩ for the Pauli `axis`.
fn expectation(psi: &CVector, axis: MeterAxis) -> f64 {
    let sigma = &linalg::paulis()[axis.index()];
    psi.dotc(&(sigma * psi)).re
}

/// Read one meter coupled to σ_axis and return (q, post-measurement state).
///
/// K(q)†K(q) integrates against the state to the mixture
/// ((1+⟨σ⟩)/2) N(+1, 1/ε) + ((1−⟨σ⟩)/2) N(−1, 1/ε), so q is drawn exactly by
/// picking the branch first.
fn read_meter<R: Rng + ?Sized>(
    psi: &CVector,
    axis: MeterAxis,
    epsilon: f64,
    rng: &mut R,
) -> (f64, CVector) {
    let up = (1.0 + expectation(psi, axis)) / 2.0;
    let centre = if rng.random::<f64>() < up { 1.0 } else { -1.0 };
    let noise: f64 = rng.sample(StandardNormal);
    let q = centre + noise / epsilon.sqrt();
    let h = epsilon * q / 2.0;
    let sigma = &linalg::paulis()[axis.index()];
    let next = psi * c(h.cosh(), 0.0) + (sigma * psi) * c(h.sinh(), 0.0);
    let norm = next.norm();
    (q, next / c(norm, 0.0))
}

/// Simulate the z-meter, the x-meter and the final σy measurement on one
/// copy of `state`.
pub fn sample_measurement<R: Rng + ?Sized>(
    state: &PureState,
    epsilon: f64,
    rng: &mut R,
) -> Result<DaOutcome> {
    if state.dim() != 2 {
        return Err(Error::NotQubit(state.dim()));
    }
    check_epsilon(epsilon)?;
    let psi = state.amplitudes().clone();
    let (q1, psi) = read_meter(&psi, MeterAxis::Z, epsilon, rng);
    let (q2, psi) = read_meter(&psi, MeterAxis::X, epsilon, rng);
    let up = (1.0 + expectation(&psi, MeterAxis::Y)) / 2.0;
    let sign = if rng.random::<f64>() < up {
        Sign::Plus
    } else {
        Sign::Minus
    };
    Ok(DaOutcome { q1, q2, sign })
}
