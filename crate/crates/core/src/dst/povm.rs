use std::f64::consts::{FRAC_PI_4, SQRT_2};

use crate::error::{Error, Result};
use crate::povm::{
    compose_kraus, mixture, DiscretePovm, KrausFactor, MeterAxis, Outcome, PovmElement, Sign,
};
use crate::qcore::linalg::{self, c, CVector, C64};
use crate::qcore::{conjugate_basis, omega_pow};
use crate::tolerance::Tolerances;

use super::kraus::meter_kraus;
use super::DstConfig;

const CLOSED_FORM_AGREEMENT: f64 = 1e-12;

/// The vector v with E = v v† for one (axis, sign, n, m) branch, scaled so
/// that ‖v‖² is the branch weight α:
///
/// - σy: (|c_m⟩ + (√2 s± − 1) ω^{mn}/√d |n⟩)/√2, α±⁽ʸ⁾ = (1 − 1/d + 2s±²/d)/2
/// - σx, +: |c_m⟩ + (cosφ − 1) ω^{mn}/√d |n⟩, α₊⁽ˣ⁾ = 1 − sin²φ/d
/// - σx, −: √α₋⁽ˣ⁾ ω^{mn}|n⟩, α₋⁽ˣ⁾ = sin²φ/d
/// - σz: K±†|c_m⟩ = (|c_m⟩ + (e^{±iφ} − 1) ω^{mn}/√d |n⟩)/√2, α = 1/2
fn branch_vector(axis: MeterAxis, sign: Sign, phi: f64, n: usize, m: usize, d: usize) -> CVector {
    let root_d = (d as f64).sqrt();
    let phase = omega_pow(d, (m * n) as i64) / root_d;
    let mut v = conjugate_basis(d).expect("d ≥ 2").vector(m).amplitudes().clone();
    let e_n = linalg::basis_vector(n, d);
    match axis {
        MeterAxis::Y => {
            let s = match sign {
                Sign::Plus => (phi + FRAC_PI_4).sin(),
                Sign::Minus => -(phi - FRAC_PI_4).sin(),
            };
            let alpha = 0.5 * (1.0 - 1.0 / d as f64 + 2.0 * s * s / d as f64);
            let b = (v + e_n * (phase * (SQRT_2 * s - 1.0))) / c((2.0 * alpha).sqrt(), 0.0);
            b * c(alpha.sqrt(), 0.0)
        }
        MeterAxis::X => match sign {
            Sign::Plus => {
                let alpha = 1.0 - phi.sin().powi(2) / d as f64;
                let b = (v + e_n * (phase * (phi.cos() - 1.0))) / c(alpha.sqrt(), 0.0);
                b * c(alpha.sqrt(), 0.0)
            }
            Sign::Minus => {
                let alpha = phi.sin().powi(2) / d as f64;
                e_n * (omega_pow(d, (m * n) as i64) * alpha.sqrt())
            }
        },
        MeterAxis::Z => {
            let shift = match sign {
                Sign::Plus => C64::from_polar(1.0, phi),
                Sign::Minus => C64::from_polar(1.0, -phi),
            };
            v += e_n * (phase * (shift - c(1.0, 0.0)));
            v * c(1.0 / SQRT_2, 0.0)
        }
    }
}

fn closed_form_elements(config: &DstConfig) -> Vec<PovmElement> {
    let d = config.dim;
    let mut elements = Vec::new();
    for n in 0..d {
        let p_n = config.basis_probs[n];
        if p_n == 0.0 {
            continue;
        }
        for axis in MeterAxis::ALL {
            let p_axis = config.meter_probs[axis.index()];
            if p_axis == 0.0 {
                continue;
            }
            for sign in Sign::BOTH {
                for m in 0..d {
                    let v = branch_vector(axis, sign, config.phi_c, n, m, d);
                    elements.push(PovmElement::new(
                        Outcome::Dst { n, axis, sign, m },
                        linalg::projector(&v) * c(p_axis * p_n, 0.0),
                    ));
                }
            }
        }
    }
    elements
}

/// The same POVM built by composing meter Kraus factors with the
/// conjugate-basis projectors, one family per (n, axis), then mixing.
/// No postselection is applied.
pub fn dst_povm_from_kraus(config: &DstConfig, tol: &Tolerances) -> Result<DiscretePovm> {
    config.validate()?;
    let d = config.dim;
    let basis = conjugate_basis(d)?;
    let strong: Vec<KrausFactor> = (0..d)
        .map(|m| {
            KrausFactor::new(
                linalg::projector(basis.vector(m).amplitudes()),
                Outcome::Conjugate { m },
            )
        })
        .collect();
    let mut parts = Vec::new();
    for n in 0..d {
        for axis in MeterAxis::ALL {
            let w = config.basis_probs[n] * config.meter_probs[axis.index()];
            if w == 0.0 {
                continue;
            }
            let weak = meter_kraus(axis, config.phi_c, n, d)?.to_vec();
            let family = compose_kraus(&[weak, strong.clone()], tol)?;
            let relabeled = family
                .into_elements()
                .into_iter()
                .map(|e| PovmElement::new(relabel(e.label), e.operator))
                .collect();
            parts.push((w, DiscretePovm::new(relabeled)?));
        }
    }
    let total: f64 = parts.iter().map(|(w, _)| w).sum();
    for part in &mut parts {
        part.0 /= total;
    }
    mixture(&parts)
}

fn relabel(label: Outcome) -> Outcome {
    match label {
        Outcome::Path { steps } => match steps.as_slice() {
            [Outcome::Meter { n, axis, sign }, Outcome::Conjugate { m }] => Outcome::Dst {
                n: *n,
                axis: *axis,
                sign: *sign,
                m: *m,
            },
            _ => Outcome::Path { steps },
        },
        other => other,
    }
}

/// The closed-form elements alone, without the Kraus cross-check or
/// postselection.
pub fn dst_povm_closed_form(config: &DstConfig) -> Result<DiscretePovm> {
    config.validate()?;
    DiscretePovm::new(closed_form_elements(config))
}

/// Overall DST POVM: coupling n and meter axis chosen at random, meter
/// result ±, then the system is measured in the conjugate basis.
///
/// Elements come from the closed forms and are checked against the Kraus
/// composition. With postselection on c_m, every other outcome is merged
/// into one discard element.
pub fn dst_povm(config: &DstConfig) -> Result<DiscretePovm> {
    let closed = dst_povm_closed_form(config)?;
    let composed = dst_povm_from_kraus(config, &Tolerances::DEFAULT)?;
    if closed.len() != composed.len() {
        return Err(Error::CrossCheck {
            what: "DST closed form",
            discrepancy: f64::INFINITY,
        });
    }
    let mut worst: f64 = 0.0;
    for (a, b) in closed.elements().iter().zip(composed.elements()) {
        if a.label != b.label {
            return Err(Error::CrossCheck {
                what: "DST element ordering",
                discrepancy: f64::INFINITY,
            });
        }
        worst = worst.max(linalg::max_abs_diff(&a.operator, &b.operator));
    }
    if worst > CLOSED_FORM_AGREEMENT {
        return Err(Error::CrossCheck {
            what: "DST closed form",
            discrepancy: worst,
        });
    }
    match config.postselect {
        None => Ok(closed),
        Some(keep) => Ok(closed.merge_discarded(|l| matches!(l, Outcome::Dst { m, .. } if *m == keep))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::{random_odop_decomposition, OdopVerdict};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_coupling_sigma_y_is_conjugate_basis_measurement() {
        let config = DstConfig::new(2, 0.0, [0.0, 1.0, 0.0]).unwrap();
        let povm = dst_povm(&config).unwrap();
        let basis = conjugate_basis(2).unwrap();
        for e in povm.elements() {
            let Outcome::Dst { m, .. } = e.label else {
                panic!()
            };
            let expected =
                linalg::projector(basis.vector(m).amplitudes()) * c(0.5 * 0.5, 0.0);
            assert!(linalg::max_abs_diff(&e.operator, &expected) < 1e-15);
        }
    }

    #[test]
    fn x_branch_weights_sum_to_one() {
        for &phi in &[0.1, 0.7, 1.3] {
            for d in [2, 3] {
                let config = DstConfig::new(d, phi, [1.0, 0.0, 0.0])
                    .unwrap()
                    .with_basis_probs({
                        let mut p = vec![0.0; d];
                        p[0] = 1.0;
                        p
                    })
                    .unwrap();
                let povm = dst_povm(&config).unwrap();
                let alpha = |sign| {
                    povm.elements()
                        .iter()
                        .filter(|e| matches!(e.label, Outcome::Dst { sign: s, m: 0, .. } if s == sign))
                        .map(|e| e.weight())
                        .sum::<f64>()
                };
                let minus = alpha(Sign::Minus);
                assert!((minus - phi.sin().powi(2) / d as f64).abs() < 1e-14);
                assert!((alpha(Sign::Plus) + minus - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn random_configs_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            let d = rng.random_range(2..5);
            let mut meter: [f64; 3] = [rng.random(), rng.random(), rng.random()];
            let s: f64 = meter.iter().sum();
            meter.iter_mut().for_each(|p| *p /= s);
            let mut basis: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            let s: f64 = basis.iter().sum();
            basis.iter_mut().for_each(|p| *p /= s);
            let config = DstConfig::new(d, rng.random_range(0.0..1.5), meter)
                .unwrap()
                .with_basis_probs(basis)
                .unwrap();
            let povm = dst_povm(&config).unwrap();
            assert!(povm.validate(&Tolerances::DEFAULT).passes);
        }
    }

    #[test]
    fn postselection_merges_into_discard() {
        let config = DstConfig::original(3, 0.4).unwrap().with_postselection(0).unwrap();
        let povm = dst_povm(&config).unwrap();
        // 3 couplings × 2 axes × 2 signs kept, plus the discard element.
        assert_eq!(povm.len(), 13);
        assert_eq!(povm.elements().last().unwrap().label, Outcome::Discard);
        assert!(povm.validate(&Tolerances::DEFAULT).passes);
    }

    #[test]
    fn sigma_z_branch_is_random_odop() {
        for &phi in &[0.2, 0.89, 1.4] {
            let config = DstConfig::new(2, phi, [0.0, 0.0, 1.0]).unwrap();
            let verdict =
                random_odop_decomposition(&dst_povm(&config).unwrap(), &Tolerances::DEFAULT)
                    .unwrap();
            let OdopVerdict::Decomposable(d) = verdict else {
                panic!("σz branch should be a random ODOP at φ = {phi}");
            };
            assert_eq!(d.pairs.len(), 4);
            assert!((d.total_weight() - 1.0).abs() < 1e-12);
        }
    }
}
