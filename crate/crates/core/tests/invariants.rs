use proptest::prelude::*;

use weaktomo::dasarvind::{
    basis_distribution, fold_to_positive_y, povm_density, uniformity_metric, BlochPoint, DaConfig,
    HEMISPHERE_CELLS,
};
use weaktomo::dst::{conditional_stats, reconstruct_exact_augmented, dst_povm, DstConfig};
use weaktomo::estimate::{resample, ParticleEnsemble};
use weaktomo::fisher::fisher_information;
use weaktomo::povm::tetrahedron_povm;
use weaktomo::qcore::linalg::{c, CVector};
use weaktomo::qcore::{bloch_to_state, fidelity, state_to_bloch, BlochAngles, PureState};
use weaktomo::Tolerances;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn state(d: usize) -> impl Strategy<Value = PureState> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d)
        .prop_filter("nonzero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(|v| {
            PureState::normalized(CVector::from_iterator(v.len(), v.iter().map(|&(a, b)| c(a, b))))
                .unwrap()
        })
}

fn any_state() -> impl Strategy<Value = PureState> {
    (2usize..=4).prop_flat_map(state)
}

fn unit_vector() -> impl Strategy<Value = [f64; 3]> {
    (-1.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(z, a)| {
        let rho = (1.0 - z * z).sqrt();
        [rho * a.cos(), rho * a.sin(), z]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dst_povms_are_valid(d in 2usize..=4, phi in 0.0f64..=std::f64::consts::FRAC_PI_2, variant in 0usize..3) {
        let config = match variant {
            0 => DstConfig::original(d, phi),
            1 => DstConfig::augmented_equal(d, phi),
            _ => DstConfig::augmented_half_z(d, phi),
        }.unwrap();
        let report = dst_povm(&config).unwrap().validate(&Tolerances::DEFAULT);
        prop_assert!(report.passes, "{report:?}");
    }

    #[test]
    fn conditional_stats_are_bounded(s in any_state(), phi in 0.0f64..=std::f64::consts::FRAC_PI_2) {
        let stats = conditional_stats(&s, phi).unwrap();
        for n in 0..stats.dim {
            let total: f64 = stats.prob_cm[n].iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            for m in 0..stats.dim {
                for e in [stats.exp_x[n][m], stats.exp_y[n][m], stats.exp_z[n][m]] {
                    prop_assert!(e.abs() <= 1.0 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn exact_reconstruction_recovers_the_state(s in any_state(), phi in 0.02f64..=1.5) {
        let upsilon: f64 = s.amplitudes().iter().sum::<weaktomo::qcore::linalg::C64>().norm();
        prop_assume!(upsilon > 0.1);
        let stats = conditional_stats(&s, phi).unwrap();
        let estimate = reconstruct_exact_augmented(&stats).unwrap();
        let f = fidelity(&s, &estimate.projector()).unwrap();
        prop_assert!(1.0 - f < 1e-9, "infidelity {}", 1.0 - f);
    }

    #[test]
    fn bloch_round_trip(r in unit_vector()) {
        let angles = BlochAngles::from_vector(r).unwrap();
        let back = state_to_bloch(&bloch_to_state(angles)).unwrap().vector();
        for k in 0..3 {
            prop_assert!((back[k] - r[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn das_arvind_density_axes(q1 in -20.0f64..20.0, q2 in -20.0f64..20.0, eps in 0.05f64..2.0) {
        let s = povm_density(q1, q2, eps).unwrap();
        prop_assert!(s.g >= 0.0);
        for n in [s.n_plus, s.n_minus] {
            let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
            prop_assert!((norm - 1.0).abs() < 1e-12);
        }
        let mirror = povm_density(-q1, -q2, eps).unwrap();
        prop_assert!((mirror.g - s.g).abs() <= 1e-14 * s.g.max(1e-300));
        for k in 0..3 {
            prop_assert!((s.n_minus[k] + mirror.n_plus[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn uniformity_metric_is_bounded(points in prop::collection::vec((unit_vector(), 0.01f64..1.0), 1..200)) {
        let total: f64 = points.iter().map(|(_, w)| w).sum();
        let points: Vec<BlochPoint> = points
            .into_iter()
            .map(|(n, w)| BlochPoint { n, weight: w / total })
            .collect();
        let m = uniformity_metric(&points).unwrap();
        prop_assert!((0.0..=2.0 * (1.0 - 1.0 / HEMISPHERE_CELLS as f64) + 1e-12).contains(&m));
        for p in &points {
            prop_assert!(fold_to_positive_y(p.n)[1] >= 0.0);
        }
    }

    #[test]
    fn fisher_information_is_positive(r in unit_vector()) {
        let f = fisher_information(&tetrahedron_povm(), BlochAngles::from_vector(r).unwrap()).unwrap();
        prop_assert!(f.j_theta >= 0.0 && f.j_phi >= 0.0);
        prop_assert!(f.j_cross * f.j_cross <= f.j_theta * f.j_phi * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn resampling_keeps_particles_on_the_sphere(seed in any::<u64>(), bias in unit_vector()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let particles: Vec<[f64; 3]> = (0..200)
            .map(|_| {
                let z: [f64; 3] = rand_distr::Distribution::sample(&rand_distr::UnitSphere, &mut rng);
                z
            })
            .collect();
        let weights = particles
            .iter()
            .map(|r| (1.0 + bias[0] * r[0] + bias[1] * r[1] + bias[2] * r[2]).powi(4))
            .collect();
        let ensemble = ParticleEnsemble::new(particles, weights).unwrap();
        let next = resample(&ensemble, &mut rng);
        prop_assert_eq!(next.len(), 200);
        for r in next.particles() {
            let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
            prop_assert!((norm - 1.0).abs() < 1e-12);
        }
        let w = next.weights();
        prop_assert!(w.iter().all(|&x| (x - w[0]).abs() < 1e-15));
    }
}

#[test]
fn basis_distribution_mass_is_one() {
    for eps in [0.1, 0.575, 1.0] {
        let points = basis_distribution(&DaConfig::new(eps).unwrap()).unwrap();
        let total: f64 = points.iter().map(|p| p.weight).sum();
        assert!((total - 1.0).abs() < 1e-6);
    }
}
