use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::povm::{pauli_basis, MeterAxis, Sign};
use crate::qcore::linalg::{c, CVector, C64};
use crate::qcore::{conjugate_basis, omega_pow, PureState};

use super::kraus::interaction_unitary;

const CIRCUIT_AGREEMENT: f64 = 1e-10;
const UPSILON_FLOOR: f64 = 1e-12;
/// Conditional expectations are reported as 0 below this postselection probability.
const PROBABILITY_FLOOR: f64 = 1e-13;

/// Conditional meter statistics for every coupling n and conjugate outcome
/// c_m. All tables are indexed `[n][m]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalStats {
    pub dim: usize,
    pub phi_c: f64,
    /// Υ = Σ_n ψ_n under the phase convention that makes it real and
    /// nonnegative; `None` when the statistics did not come from a known state.
    pub upsilon: Option<f64>,
    pub exp_x: Vec<Vec<f64>>,
    pub exp_y: Vec<Vec<f64>>,
    pub exp_z: Vec<Vec<f64>>,
    /// Pr(c_m | U_{φ,n}, ψ).
    pub prob_cm: Vec<Vec<f64>>,
    /// Joint frequency of meter σx result − together with c_m.
    pub x_minus_joint: Vec<Vec<f64>>,
}

impl ConditionalStats {
    /// Build from joint probabilities `joint(n, axis, sign, m)` of a meter
    /// result and conjugate outcome given coupling n. The conjugate-outcome
    /// probability is taken from the σz readout.
    pub fn from_joint<F>(dim: usize, phi_c: f64, joint: F) -> Self
    where
        F: Fn(usize, MeterAxis, Sign, usize) -> f64,
    {
        let table = |f: &dyn Fn(usize, usize) -> f64| -> Vec<Vec<f64>> {
            (0..dim).map(|n| (0..dim).map(|m| f(n, m)).collect()).collect()
        };
        let prob = |n, m| joint(n, MeterAxis::Z, Sign::Plus, m) + joint(n, MeterAxis::Z, Sign::Minus, m);
        let expectation = |axis: MeterAxis| {
            table(&|n, m| {
                let plus = joint(n, axis, Sign::Plus, m);
                let minus = joint(n, axis, Sign::Minus, m);
                let total = plus + minus;
                if total > PROBABILITY_FLOOR {
                    (plus - minus) / total
                } else {
                    0.0
                }
            })
        };
        ConditionalStats {
            dim,
            phi_c,
            upsilon: None,
            exp_x: expectation(MeterAxis::X),
            exp_y: expectation(MeterAxis::Y),
            exp_z: expectation(MeterAxis::Z),
            prob_cm: table(&prob),
            x_minus_joint: table(&|n, m| joint(n, MeterAxis::X, Sign::Minus, m)),
        }
    }

    /// Largest absolute difference across all tables.
    pub fn max_difference(&self, other: &ConditionalStats) -> f64 {
        let pairs = [
            (&self.exp_x, &other.exp_x),
            (&self.exp_y, &other.exp_y),
            (&self.exp_z, &other.exp_z),
            (&self.prob_cm, &other.prob_cm),
            (&self.x_minus_joint, &other.x_minus_joint),
        ];
        pairs
            .iter()
            .flat_map(|(a, b)| {
                a.iter()
                    .flatten()
                    .zip(b.iter().flatten())
                    .map(|(x, y)| (x - y).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Z^{−m}|ψ⟩ = Σ_n ω^{−mn} ψ_n |n⟩. Postselecting on c_m with input ψ is the
/// same as postselecting on c_0 with this state.
pub fn postselection_shift(state: &PureState, m: usize) -> PureState {
    let d = state.dim();
    let shifted = CVector::from_fn(d, |n, _| {
        omega_pow(d, -((m * n) as i64)) * state.amplitude(n)
    });
    PureState::new(shifted).expect("phases preserve the norm")
}

/// Rephase so Υ is real and nonnegative; rejects Υ ≈ 0.
fn phase_fixed(state: &PureState) -> Result<(PureState, f64)> {
    let upsilon: C64 = state.amplitudes().iter().sum();
    let magnitude = upsilon.norm();
    if magnitude < UPSILON_FLOOR {
        return Err(Error::UpsilonVanishes);
    }
    Ok((state.rephase(upsilon.conj() / magnitude), magnitude))
}

/// Closed-form statistics for one (n, c_m) cell, evaluated on the shifted
/// state ψ' = Z^{−m}ψ so that only the c_0 formulas are needed.
struct Cell {
    prob: f64,
    exp_y: f64,
    exp_z: f64,
    x_minus: f64,
}

fn closed_form_cell(shifted: &PureState, phi: f64, n: usize) -> Cell {
    let d = shifted.dim() as f64;
    let upsilon: C64 = shifted.amplitudes().iter().sum();
    let psi_n = shifted.amplitude(n);
    let cross = psi_n * upsilon.conj();
    let abs2 = psi_n.norm_sqr();
    let prob = (upsilon.norm_sqr() + 2.0 * (phi.cos() - 1.0) * (cross.re - abs2)) / d;
    let x_minus = phi.sin().powi(2) * abs2 / d;
    if prob <= PROBABILITY_FLOOR {
        return Cell {
            prob: prob.max(0.0),
            exp_y: 0.0,
            exp_z: 0.0,
            x_minus: 0.0,
        };
    }
    Cell {
        prob,
        exp_y: (2.0 * phi.sin() * cross.re + ((2.0 * phi).sin() - 2.0 * phi.sin()) * abs2)
            / (d * prob),
        exp_z: 2.0 * phi.sin() * cross.im / (d * prob),
        x_minus,
    }
}

fn closed_form_stats(state: &PureState, phi_c: f64, upsilon: f64) -> ConditionalStats {
    let d = state.dim();
    let mut stats = ConditionalStats {
        dim: d,
        phi_c,
        upsilon: Some(upsilon),
        exp_x: vec![vec![0.0; d]; d],
        exp_y: vec![vec![0.0; d]; d],
        exp_z: vec![vec![0.0; d]; d],
        prob_cm: vec![vec![0.0; d]; d],
        x_minus_joint: vec![vec![0.0; d]; d],
    };
    for m in 0..d {
        let shifted = postselection_shift(state, m);
        for n in 0..d {
            let cell = closed_form_cell(&shifted, phi_c, n);
            stats.prob_cm[n][m] = cell.prob;
            stats.exp_y[n][m] = cell.exp_y;
            stats.exp_z[n][m] = cell.exp_z;
            stats.x_minus_joint[n][m] = cell.x_minus;
            stats.exp_x[n][m] = if cell.prob > PROBABILITY_FLOOR {
                1.0 - 2.0 * cell.x_minus / cell.prob
            } else {
                0.0
            };
        }
    }
    stats
}

/// Joint probabilities Pr(meter = sign along axis, system = c_m) for coupling
/// n, by evolving |ψ⟩⊗|+⟩ under the interaction unitary and projecting.
/// Returned as `[sign][m]` with sign order (+, −).
pub fn joint_probabilities_circuit(
    state: &PureState,
    phi_c: f64,
    n: usize,
    axis: MeterAxis,
) -> Result<[Vec<f64>; 2]> {
    let d = state.dim();
    let u = interaction_unitary(phi_c, n, d)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let meter_plus = CVector::from_column_slice(&[c(h, 0.0), c(h, 0.0)]);
    let input = CVector::from_fn(2 * d, |k, _| state.amplitude(k / 2) * meter_plus[k % 2]);
    let output = u * input;
    let conj = conjugate_basis(d)?;
    let meter = pauli_basis(axis);
    let mut out = [vec![0.0; d], vec![0.0; d]];
    for (s, e) in meter.vectors().iter().enumerate() {
        for m in 0..d {
            let cm = conj.vector(m).amplitudes();
            let mut amp = C64::new(0.0, 0.0);
            for k in 0..2 * d {
                amp += (cm[k / 2] * e.amplitude(k % 2)).conj() * output[k];
            }
            out[s][m] = amp.norm_sqr();
        }
    }
    Ok(out)
}

/// Statistics from the brute-force system ⊗ meter simulation.
pub fn conditional_stats_circuit(state: &PureState, phi_c: f64) -> Result<ConditionalStats> {
    let d = state.dim();
    let mut tables = Vec::with_capacity(d);
    for n in 0..d {
        let mut per_axis = Vec::with_capacity(3);
        for axis in MeterAxis::ALL {
            per_axis.push(joint_probabilities_circuit(state, phi_c, n, axis)?);
        }
        tables.push(per_axis);
    }
    let (_, upsilon) = phase_fixed(state).map_or((state.clone(), None), |(s, u)| (s, Some(u)));
    let mut stats = ConditionalStats::from_joint(d, phi_c, |n, axis, sign, m| {
        let s = match sign {
            Sign::Plus => 0,
            Sign::Minus => 1,
        };
        tables[n][axis.index()][s][m]
    });
    stats.upsilon = upsilon;
    Ok(stats)
}

/// Closed-form statistics alone, in the Υ-real phase convention.
pub fn conditional_stats_closed_form(state: &PureState, phi_c: f64) -> Result<ConditionalStats> {
    if state.dim() < 2 {
        return Err(Error::Dimension {
            min: 2,
            got: state.dim(),
        });
    }
    let (fixed, upsilon) = phase_fixed(state)?;
    Ok(closed_form_stats(&fixed, phi_c, upsilon))
}

/// Conditional expectations ⟨σx⟩, ⟨σy⟩, ⟨σz⟩ and Pr(c_m) for every (n, m),
/// from the closed-form expressions with the Z-shift for m ≠ 0. The result
/// is cross-checked against [`conditional_stats_circuit`].
pub fn conditional_stats(state: &PureState, phi_c: f64) -> Result<ConditionalStats> {
    let closed = conditional_stats_closed_form(state, phi_c)?;
    let (fixed, _) = phase_fixed(state)?;
    let circuit = conditional_stats_circuit(&fixed, phi_c)?;
    let discrepancy = closed.max_difference(&circuit);
    if discrepancy > CIRCUIT_AGREEMENT {
        return Err(Error::CrossCheck {
            what: "conditional statistics",
            discrepancy,
        });
    }
    Ok(closed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::haar_random_pure;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn real_amplitudes_give_zero_sigma_z() {
        let psi = PureState::normalized(CVector::from_column_slice(&[
            c(0.3, 0.0),
            c(0.5, 0.0),
            c(-0.2, 0.0),
        ]))
        .unwrap();
        let stats = conditional_stats(&psi, 0.4).unwrap();
        for n in 0..3 {
            assert!(stats.exp_z[n][0].abs() < 1e-15);
        }
    }

    #[test]
    fn conjugate_state_without_coupling() {
        let c0 = conjugate_basis(2).unwrap().vector(0).clone();
        let stats = conditional_stats(&c0, 0.0).unwrap();
        assert!((stats.prob_cm[0][0] - 1.0).abs() < 1e-15);
        assert!((stats.prob_cm[1][0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn vanishing_upsilon_is_flagged() {
        let c1 = conjugate_basis(2).unwrap().vector(1).clone();
        assert_eq!(conditional_stats(&c1, 0.3), Err(Error::UpsilonVanishes));
    }

    #[test]
    fn probability_identity_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let psi = haar_random_pure(3, &mut rng).unwrap();
            let (fixed, upsilon) = phase_fixed(&psi).unwrap();
            let phi = 0.77;
            let stats = conditional_stats(&fixed, phi).unwrap();
            for n in 0..3 {
                let psi_n = fixed.amplitude(n);
                let cross = psi_n * upsilon;
                let residual = 3.0 * stats.prob_cm[n][0]
                    - upsilon * upsilon
                    - 2.0 * (phi.cos() - 1.0) * (cross.re - psi_n.norm_sqr());
                assert!(residual.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shift_by_zero_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let psi = haar_random_pure(4, &mut rng).unwrap();
        assert_eq!(postselection_shift(&psi, 0), psi);
    }

    #[test]
    fn postselection_equivalence() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for d in [2, 3] {
            for _ in 0..100 {
                let psi = haar_random_pure(d, &mut rng).unwrap();
                let phi = 0.35;
                let all = conditional_stats_circuit(&psi, phi).unwrap();
                for m in 0..d {
                    let shifted = conditional_stats_circuit(&postselection_shift(&psi, m), phi)
                        .unwrap();
                    for n in 0..d {
                        assert!((all.exp_y[n][m] - shifted.exp_y[n][0]).abs() < 1e-10);
                        assert!((all.exp_z[n][m] - shifted.exp_z[n][0]).abs() < 1e-10);
                        assert!((all.prob_cm[n][m] - shifted.prob_cm[n][0]).abs() < 1e-12);
                    }
                }
            }
        }
    }
}
