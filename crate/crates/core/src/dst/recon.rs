use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::linalg::{c, CVector, C64};
use crate::qcore::{omega_pow, PureState};

use super::ConditionalStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeakMode {
    /// Use only the c_0 outcome, as in the original proposal.
    PostselectedC0,
    /// Rephase each c_m estimate by ω^{mn} and average all d of them.
    AllOutcomes,
}

/// Fix the global phase so that Σ ψ̂_n is real and positive.
fn upsilon_convention(state: PureState) -> PureState {
    let sum: C64 = state.amplitudes().iter().sum();
    if sum.norm() > 1e-12 {
        state.rephase(sum.conj() / sum.norm())
    } else {
        state.canonical()
    }
}

fn weak_vector(stats: &ConditionalStats, m: usize) -> CVector {
    let d = stats.dim;
    CVector::from_fn(d, |n, _| {
        omega_pow(d, (m * n) as i64) * c(stats.exp_y[n][m], stats.exp_z[n][m])
    })
}

/// Weak-limit estimate ψ̂_n ∝ ⟨σy⟩ + i⟨σz⟩.
///
/// Υ is not estimated separately: the estimate is normalized and then
/// rephased so its amplitudes sum to a positive real. The estimate carries an
/// O(φ²) bias in the amplitudes.
pub fn reconstruct_weak(stats: &ConditionalStats, mode: WeakMode) -> Result<PureState> {
    let d = stats.dim;
    match mode {
        WeakMode::PostselectedC0 => {
            let v = weak_vector(stats, 0);
            if v.norm() < 1e-300 {
                return Err(Error::NoSignal);
            }
            Ok(upsilon_convention(PureState::normalized(v)?))
        }
        WeakMode::AllOutcomes => {
            let estimates: Vec<CVector> = (0..d)
                .filter(|&m| stats.prob_cm.iter().all(|row| row[m] > 0.0))
                .map(|m| weak_vector(stats, m))
                .filter(|v| v.norm() > 1e-300)
                .map(|v| v.unscale(v.norm()))
                .collect();
            let Some(reference) = estimates.first().cloned() else {
                return Err(Error::NoSignal);
            };
            let mut total = CVector::zeros(d);
            for v in &estimates {
                let overlap = v.dotc(&reference);
                let phase = if overlap.norm() > 1e-300 {
                    overlap / overlap.norm()
                } else {
                    c(1.0, 0.0)
                };
                total += v * phase;
            }
            Ok(upsilon_convention(PureState::normalized(total)?))
        }
    }
}

/// Exact inversion using the additional σx meter data.
///
/// The (−x, c_m) frequency equals sin²φ |ψ_n|²/d, which removes the
/// second-order term from the σy expectation:
///
/// Re(ψ_nΥ) = [d Pr(c_0) ⟨σy⟩ − (sin2φ − 2 sinφ)|ψ_n|²] / (2 sinφ)
/// Im(ψ_nΥ) = d Pr(c_0) ⟨σz⟩ / (2 sinφ)
///
/// and Υ² = Σ_n Re(ψ_nΥ) under the real-Υ convention.
pub fn reconstruct_exact_augmented(stats: &ConditionalStats) -> Result<PureState> {
    let phi = stats.phi_c;
    let sin = phi.sin();
    if sin.abs() < 1e-12 {
        return Err(Error::ZeroCoupling);
    }
    let d = stats.dim;
    let df = d as f64;
    let mut cross = CVector::zeros(d);
    for n in 0..d {
        let abs2 = df * stats.x_minus_joint[n][0] / (sin * sin);
        let weight = df * stats.prob_cm[n][0];
        let re = (weight * stats.exp_y[n][0] - ((2.0 * phi).sin() - 2.0 * sin) * abs2) / (2.0 * sin);
        let im = weight * stats.exp_z[n][0] / (2.0 * sin);
        cross[n] = c(re, im);
    }
    let upsilon_sq: f64 = cross.iter().map(|z| z.re).sum();
    if upsilon_sq <= 1e-24 {
        return Err(Error::UpsilonVanishes);
    }
    let upsilon = upsilon_sq.sqrt();
    Ok(upsilon_convention(PureState::normalized(cross.unscale(upsilon))?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dst::conditional_stats;
    use crate::qcore::{haar_random_pure, DensityOperator};
    use crate::qcore::fidelity;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn infidelity(a: &PureState, b: &PureState) -> f64 {
        1.0 - fidelity(a, &DensityOperator::from(b)).unwrap()
    }

    fn sample_state(seed: u64, d: usize) -> PureState {
        haar_random_pure(d, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    #[test]
    fn weak_limit_is_accurate() {
        let psi = sample_state(1, 2);
        let stats = conditional_stats(&psi, 0.01).unwrap();
        let est = reconstruct_weak(&stats, WeakMode::PostselectedC0).unwrap();
        assert!(infidelity(&psi, &est) < 1e-3);
    }

    #[test]
    fn strong_coupling_biases_weak_formula() {
        let mut values = Vec::new();
        for seed in 0..200 {
            let psi = sample_state(seed, 2);
            let weak = conditional_stats(&psi, 0.01).unwrap();
            let strong = conditional_stats(&psi, 0.89).unwrap();
            values.push((
                infidelity(&psi, &reconstruct_weak(&weak, WeakMode::PostselectedC0).unwrap()),
                infidelity(&psi, &reconstruct_weak(&strong, WeakMode::PostselectedC0).unwrap()),
            ));
        }
        let mean = |f: fn(&(f64, f64)) -> f64| values.iter().map(f).sum::<f64>() / values.len() as f64;
        assert!(mean(|v| v.0) < 1e-6);
        assert!(mean(|v| v.1) > 1e-2);
    }

    #[test]
    fn all_outcomes_agree_with_c0_in_the_weak_limit() {
        for seed in 0..10 {
            let psi = sample_state(100 + seed, 3);
            let stats = conditional_stats(&psi, 1e-6).unwrap();
            let c0 = reconstruct_weak(&stats, WeakMode::PostselectedC0).unwrap();
            let all = reconstruct_weak(&stats, WeakMode::AllOutcomes).unwrap();
            assert!(infidelity(&c0, &all) < 1e-10);
        }
    }

    #[test]
    fn infidelity_scales_as_fourth_power() {
        let psi = sample_state(7, 2);
        let phis = [0.02f64, 0.04, 0.08];
        let inf: Vec<f64> = phis
            .iter()
            .map(|&phi| {
                let stats = conditional_stats(&psi, phi).unwrap();
                infidelity(&psi, &reconstruct_weak(&stats, WeakMode::PostselectedC0).unwrap())
            })
            .collect();
        let slope = (inf[2].ln() - inf[0].ln()) / (phis[2].ln() - phis[0].ln());
        assert!((slope - 4.0).abs() < 0.2, "slope {slope}");
    }

    #[test]
    fn augmented_inversion_is_exact() {
        for &phi in &[0.05, 0.5, 1.25, std::f64::consts::FRAC_PI_2] {
            for seed in 0..20 {
                let psi = sample_state(seed, 2);
                let stats = conditional_stats(&psi, phi).unwrap();
                let est = reconstruct_exact_augmented(&stats).unwrap();
                assert!(infidelity(&psi, &est) < 1e-10, "phi {phi} seed {seed}");
            }
        }
        let psi = sample_state(3, 4);
        let stats = conditional_stats(&psi, 0.9).unwrap();
        assert!(infidelity(&psi, &reconstruct_exact_augmented(&stats).unwrap()) < 1e-10);
    }

    #[test]
    fn basis_state_minus_x_frequency() {
        for &phi in &[0.1, 0.8, 1.5] {
            let psi = PureState::basis(1, 3).unwrap();
            let stats = conditional_stats(&psi, phi).unwrap();
            assert!((stats.x_minus_joint[1][0] - phi.sin().powi(2) / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_coupling_rejected() {
        let stats = conditional_stats(&sample_state(2, 2), 0.0).unwrap();
        assert_eq!(reconstruct_exact_augmented(&stats), Err(Error::ZeroCoupling));
        let mut blank = stats.clone();
        blank.exp_y = vec![vec![0.0; 2]; 2];
        blank.exp_z = vec![vec![0.0; 2]; 2];
        assert_eq!(reconstruct_weak(&blank, WeakMode::PostselectedC0), Err(Error::NoSignal));
    }
}
