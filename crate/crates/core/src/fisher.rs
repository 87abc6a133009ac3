//! Fisher information of Bloch-parameterized pure qubit states and the
//! Cramér–Rao constant C in F ≃ 1 − C/N.
//!
//! Every qubit POVM element is written E = (t + v·σ)/2, so an outcome has
//! probability p = (t + v·r)/2 and derivative ∂p = v·∂r/2 for the Bloch vector
//! r(θ, φ_az). This covers rank-one and higher-rank elements alike.
//!
//! C is (1/4)·Tr(G J⁻¹) averaged over the Haar (uniform-sphere) prior, with
//! G = diag(1, sin²θ) the round metric. When J has no θφ cross term this
//! reduces to (1/4)(1/J_θ + sin²θ/J_φ); the cross term is kept because it is
//! nonzero for most POVMs of interest, including the Pauli MUB.

use std::f64::consts::PI;

use nalgebra::{Matrix3, SymmetricEigen};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::povm::{haar_odop_povm, DiscretePovm};
use crate::protocol::{ProtocolKind, ProtocolSpec};
use crate::qcore::linalg::{self, dot3};
use crate::qcore::BlochAngles;
use crate::quadrature::gauss_legendre;

/// Probabilities below this are treated as exactly zero.
const ZERO_PROBABILITY: f64 = 1e-14;
/// |∂p| allowed at a zero-probability outcome. p ≥ 0 is smooth, so an exact
/// zero is a minimum where ∂p vanishes; anything below this is round-off.
const ZERO_PROBABILITY_SLOPE: f64 = 1e-7;
/// Running-integral level at which C is declared divergent.
pub const DIVERGENCE_LEVEL: f64 = 1e6;
/// Relative frame eigenvalue below which a Bloch direction is unobserved.
const FRAME_RANK_TOLERANCE: f64 = 1e-10;

/// A qubit POVM in Bloch form: (t_k, v_k) per element.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochEffects {
    effects: Vec<(f64, [f64; 3])>,
}

impl BlochEffects {
    pub fn from_povm(povm: &DiscretePovm) -> Result<Self> {
        if povm.dim() != 2 {
            return Err(Error::NotQubit(povm.dim()));
        }
        let effects = povm
            .elements()
            .iter()
            .map(|e| linalg::qubit_components(&e.operator))
            .filter(|(t, _)| *t > 0.0)
            .collect();
        Ok(Self { effects })
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    /// Σ_k v_k v_kᵀ / t_k. A zero eigenvalue marks a Bloch direction the
    /// POVM never probes.
    pub fn frame(&self) -> Matrix3<f64> {
        self.effects.iter().fold(Matrix3::zeros(), |acc, (t, v)| {
            let v = nalgebra::Vector3::from(*v);
            acc + v * v.transpose() / *t
        })
    }

    /// Unobserved Bloch direction, if any.
    pub fn blind_direction(&self) -> Option<[f64; 3]> {
        let eig = SymmetricEigen::new(self.frame());
        let (imin, min) = eig.eigenvalues.argmin();
        let max = eig.eigenvalues.max();
        if max <= 0.0 || min <= FRAME_RANK_TOLERANCE * max {
            let u = eig.eigenvectors.column(imin);
            Some([u[0], u[1], u[2]])
        } else {
            None
        }
    }

    /// Fisher matrix entries in an orthonormal tangent frame (e1, e2) at r.
    fn tangent_fisher(&self, r: &[f64; 3], e1: &[f64; 3], e2: &[f64; 3]) -> TangentFisher {
        let mut out = TangentFisher::default();
        for (t, v) in &self.effects {
            let p = 0.5 * (t + dot3(v, r));
            let d1 = 0.5 * dot3(v, e1);
            let d2 = 0.5 * dot3(v, e2);
            if p <= ZERO_PROBABILITY {
                if d1.abs().max(d2.abs()) > ZERO_PROBABILITY_SLOPE {
                    out.singular = true;
                }
                continue;
            }
            out.a += d1 * d1 / p;
            out.b += d2 * d2 / p;
            out.x += d1 * d2 / p;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct TangentFisher {
    a: f64,
    b: f64,
    x: f64,
    singular: bool,
}

impl TangentFisher {
    /// (1/4)·Tr(J⁻¹) in the orthonormal frame; infinite when J is singular.
    fn crb_integrand(&self) -> f64 {
        let det = self.a * self.b - self.x * self.x;
        let scale = (self.a + self.b).powi(2);
        if !(det > 1e-14 * scale) || scale == 0.0 {
            return f64::INFINITY;
        }
        0.25 * (self.a + self.b) / det
    }
}

/// Fisher information for the polar and azimuthal angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherPair {
    pub j_theta: f64,
    pub j_phi: f64,
    /// Off-diagonal entry J_θφ.
    pub j_cross: f64,
    /// Some outcome has p = 0 but ∂p ≠ 0.
    pub singular: bool,
}

fn tangent_frame(angles: &BlochAngles) -> ([f64; 3], [f64; 3], [f64; 3]) {
    let (sp, cp) = angles.phi_az().sin_cos();
    (angles.vector(), angles.d_theta(), [-sp, cp, 0.0])
}

/// J_α = Σ_k (∂p_k/∂α)²/p_k at the given angles.
pub fn fisher_information(povm: &DiscretePovm, angles: BlochAngles) -> Result<FisherPair> {
    Ok(fisher_from_effects(&BlochEffects::from_povm(povm)?, angles))
}

pub fn fisher_from_effects(effects: &BlochEffects, angles: BlochAngles) -> FisherPair {
    let (r, e1, e2) = tangent_frame(&angles);
    let f = effects.tangent_fisher(&r, &e1, &e2);
    let st = angles.theta().sin();
    FisherPair {
        j_theta: f.a,
        j_phi: st * st * f.b,
        j_cross: st * f.x,
        singular: f.singular,
    }
}

/// Product rule on the sphere: Gauss–Legendre in cosθ times the periodic
/// trapezoid rule in φ_az. Neither family of nodes touches the poles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereRule {
    pub cos_theta_nodes: usize,
    pub azimuth_nodes: usize,
}

impl Default for SphereRule {
    fn default() -> Self {
        Self {
            cos_theta_nodes: 64,
            azimuth_nodes: 128,
        }
    }
}

impl SphereRule {
    fn azimuths(&self) -> Vec<f64> {
        let n = self.azimuth_nodes as f64;
        (0..self.azimuth_nodes)
            .map(|j| 2.0 * PI * (j as f64 + 0.5) / n)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrbResult {
    /// C, or `DIVERGENCE_LEVEL` when `divergent`.
    pub c_value: f64,
    pub divergent: bool,
    /// Bloch direction carrying no information, when that is the cause of
    /// divergence.
    pub certificate: Option<[f64; 3]>,
    pub integrand_max: f64,
    pub integrand_argmax: BlochAngles,
    /// Quadrature nodes where some outcome had p = 0 with ∂p ≠ 0.
    pub singular_nodes: usize,
    pub rule: SphereRule,
}

/// Per-row partial sums, reduced in row order.
struct Row {
    sum: f64,
    max: f64,
    argmax: (f64, f64),
    singular: usize,
}

pub fn crb_povm(povm: &DiscretePovm, rule: SphereRule) -> Result<CrbResult> {
    crb_effects(&BlochEffects::from_povm(povm)?, rule)
}

pub fn crb_effects(effects: &BlochEffects, rule: SphereRule) -> Result<CrbResult> {
    if rule.cos_theta_nodes < 2 || rule.azimuth_nodes < 1 {
        return Err(Error::InvalidParameter("sphere rule too small".into()));
    }
    let cos_rule = gauss_legendre(rule.cos_theta_nodes)?;
    let azimuths = rule.azimuths();
    let dphi = 2.0 * PI / rule.azimuth_nodes as f64;
    let rows: Vec<Row> = cos_rule
        .par_iter()
        .map(|&(ct, w)| {
            let theta = ct.acos();
            let mut row = Row {
                sum: 0.0,
                max: f64::NEG_INFINITY,
                argmax: (theta, 0.0),
                singular: 0,
            };
            for &phi in &azimuths {
                let angles = BlochAngles::new(theta, phi).expect("nodes lie on the sphere");
                let (r, e1, e2) = tangent_frame(&angles);
                let f = effects.tangent_fisher(&r, &e1, &e2);
                let value = f.crb_integrand();
                row.singular += usize::from(f.singular);
                row.sum += value;
                if value > row.max {
                    row.max = value;
                    row.argmax = (theta, phi);
                }
            }
            row.sum *= w * dphi / (4.0 * PI);
            row
        })
        .collect();

    let mut c_value = 0.0;
    let mut integrand_max = f64::NEG_INFINITY;
    let mut argmax = (0.0, 0.0);
    let mut singular_nodes = 0;
    let mut runaway = false;
    for row in &rows {
        c_value += row.sum;
        runaway |= !(c_value <= DIVERGENCE_LEVEL);
        singular_nodes += row.singular;
        if row.max > integrand_max {
            integrand_max = row.max;
            argmax = row.argmax;
        }
    }
    let certificate = effects.blind_direction();
    let divergent = runaway || certificate.is_some();
    if divergent {
        c_value = DIVERGENCE_LEVEL;
    }
    Ok(CrbResult {
        c_value,
        divergent,
        certificate,
        integrand_max,
        integrand_argmax: BlochAngles::new(argmax.0, argmax.1)?,
        singular_nodes,
        rule,
    })
}

/// C for a protocol at its embedded strength, on the default sphere rule.
pub fn crb(spec: &ProtocolSpec) -> Result<CrbResult> {
    crb_povm(&spec.povm()?, SphereRule::default())
}

/// C for an equal-weight mixture of `n_bases` Haar-random projective
/// measurements.
pub fn crb_haar_odop<R: Rng + ?Sized>(n_bases: usize, rng: &mut R) -> Result<CrbResult> {
    if n_bases < 100 {
        return Err(Error::InvalidParameter(format!(
            "need at least 100 bases, got {n_bases}"
        )));
    }
    crb_povm(&haar_odop_povm(n_bases, rng)?, SphereRule::default())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrbScan {
    pub kind: ProtocolKind,
    pub points: Vec<(f64, CrbResult)>,
}

impl CrbScan {
    /// Strength with the smallest finite C.
    pub fn argmin(&self) -> Option<(f64, f64)> {
        self.points
            .iter()
            .filter(|(_, r)| !r.divergent)
            .map(|(s, r)| (*s, r.c_value))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// C over a grid of coupling strengths.
pub fn scan_crb(kind: ProtocolKind, strengths: &[f64], rule: SphereRule) -> Result<CrbScan> {
    if !kind.has_strength() {
        return Err(Error::InvalidParameter(format!(
            "{kind} has no strength parameter to scan"
        )));
    }
    let points = strengths
        .iter()
        .map(|&s| Ok((s, crb_povm(&kind.with_strength(s).povm()?, rule)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CrbScan { kind, points })
}

/// F ≃ 1 − C/N.
pub fn asymptotic_fidelity(c_value: f64, n_copies: u64) -> Result<f64> {
    if n_copies == 0 {
        return Err(Error::InvalidParameter("need at least one copy".into()));
    }
    Ok(1.0 - c_value / n_copies as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::{
        mub_povm, odop_mixture, pauli_projectors, tetrahedron_povm, MeterAxis,
    };
    use crate::qcore::{bloch_to_state, Basis, DensityOperator};
    use nalgebra::Rotation3;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    fn probabilities(povm: &DiscretePovm, theta: f64, phi: f64) -> Vec<f64> {
        let state = bloch_to_state(BlochAngles::new(theta, phi).unwrap());
        povm.outcome_probabilities(&DensityOperator::from(&state)).unwrap()
    }

    /// Central finite differences of the full likelihood.
    fn fisher_fd(povm: &DiscretePovm, theta: f64, phi: f64) -> (f64, f64) {
        let h = 1e-5;
        let p = probabilities(povm, theta, phi);
        let (tp, tm) = (probabilities(povm, theta + h, phi), probabilities(povm, theta - h, phi));
        let (pp, pm) = (probabilities(povm, theta, phi + h), probabilities(povm, theta, phi - h));
        let mut jt = 0.0;
        let mut jp = 0.0;
        for k in 0..p.len() {
            let dt = (tp[k] - tm[k]) / (2.0 * h);
            let dp = (pp[k] - pm[k]) / (2.0 * h);
            jt += dt * dt / p[k];
            jp += dp * dp / p[k];
        }
        (jt, jp)
    }

    #[test]
    fn sigma_z_projector_at_equator() {
        let f = fisher_information(
            &pauli_projectors(MeterAxis::Z),
            BlochAngles::new(FRAC_PI_2, 0.3).unwrap(),
        )
        .unwrap();
        assert!((f.j_theta - 1.0).abs() < 1e-12);
        assert!(f.j_phi.abs() < 1e-12);
        assert!(!f.singular);
    }

    #[test]
    fn analytic_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut povms = vec![mub_povm(), tetrahedron_povm()];
        for _ in 0..8 {
            povms.push(haar_odop_povm(3, &mut rng).unwrap());
        }
        let mut checked = 0;
        while checked < 200 {
            let povm = &povms[checked % povms.len()];
            let theta = rng.random_range(0.1..PI - 0.1);
            let phi = rng.random_range(0.0..2.0 * PI);
            if probabilities(povm, theta, phi).iter().any(|p| *p <= 1e-6) {
                continue;
            }
            let f = fisher_information(povm, BlochAngles::new(theta, phi).unwrap()).unwrap();
            let (jt, jp) = fisher_fd(povm, theta, phi);
            assert!((f.j_theta - jt).abs() <= 1e-6 * jt.max(1e-3), "{} {jt}", f.j_theta);
            assert!((f.j_phi - jp).abs() <= 1e-6 * jp.max(1e-3), "{} {jp}", f.j_phi);
            checked += 1;
        }
    }

    #[test]
    fn tetrahedron_threefold_symmetry() {
        // A 2π/3 rotation about (1,1,1) permutes the vertices.
        let axis = nalgebra::Unit::new_normalize(nalgebra::Vector3::new(1.0, 1.0, 1.0));
        let rot = Rotation3::from_axis_angle(&axis, 2.0 * FRAC_PI_3);
        let povm = tetrahedron_povm();
        let effects = BlochEffects::from_povm(&povm).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let angles = BlochAngles::new(rng.random_range(0.1..3.0), rng.random_range(0.0..6.0)).unwrap();
            let r = nalgebra::Vector3::from(angles.vector());
            let rotated = BlochAngles::from_vector((rot * r).into()).unwrap();
            let a = fisher_from_effects(&effects, angles);
            let b = fisher_from_effects(&effects, rotated);
            // The trace of the metric-normalised Fisher matrix is invariant.
            let ta = a.j_theta + a.j_phi / angles.theta().sin().powi(2);
            let tb = b.j_theta + b.j_phi / rotated.theta().sin().powi(2);
            assert!((ta - tb).abs() < 1e-10, "{ta} {tb}");
        }
    }

    #[test]
    fn mub_constant_is_thirteen_twelfths() {
        let r = crb_povm(&mub_povm(), SphereRule::default()).unwrap();
        assert!(!r.divergent);
        assert!((r.c_value - 13.0 / 12.0).abs() < 0.01 * 13.0 / 12.0, "{}", r.c_value);
    }

    #[test]
    fn rotation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u = crate::qcore::haar_random_pure(2, &mut rng).unwrap();
        let unitary = {
            let a = u.amplitudes();
            let b = nalgebra::DVector::from_vec(vec![-a[1].conj(), a[0].conj()]);
            crate::qcore::linalg::CMatrix::from_columns(&[a.clone(), b])
        };
        let rotated: Vec<(f64, Basis)> = [MeterAxis::X, MeterAxis::Y, MeterAxis::Z]
            .iter()
            .map(|&axis| {
                let basis = crate::povm::pauli_basis(axis);
                let vectors = basis
                    .vectors()
                    .iter()
                    .map(|v| crate::qcore::PureState::new(&unitary * v.amplitudes()).unwrap())
                    .collect();
                (1.0 / 3.0, Basis::new(vectors).unwrap())
            })
            .collect();
        let a = crb_povm(&mub_povm(), SphereRule::default()).unwrap().c_value;
        let b = crb_povm(&odop_mixture(&rotated).unwrap(), SphereRule::default())
            .unwrap()
            .c_value;
        assert!((a - b).abs() < 1e-3 * a, "{a} {b}");
    }

    #[test]
    fn tetrahedron_constant() {
        let r = crb_povm(&tetrahedron_povm(), SphereRule::default()).unwrap();
        assert!((r.c_value - 1.25).abs() < 1e-3, "{}", r.c_value);
    }

    #[test]
    fn non_informationally_complete_povm_diverges() {
        let xy = odop_mixture(&[
            (0.5, crate::povm::pauli_basis(MeterAxis::X)),
            (0.5, crate::povm::pauli_basis(MeterAxis::Y)),
        ])
        .unwrap();
        let r = crb_povm(&xy, SphereRule::default()).unwrap();
        assert!(r.divergent);
        let m = r.certificate.unwrap();
        assert!((m[2].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn haar_odop_approaches_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let r = crb_haar_odop(2000, &mut rng).unwrap();
        assert!((r.c_value - 1.0).abs() < 0.02, "{}", r.c_value);
        assert!(crb_haar_odop(10, &mut rng).is_err());
    }

    #[test]
    fn parallel_reduction_is_reproducible() {
        let a = crb_povm(&tetrahedron_povm(), SphereRule::default()).unwrap();
        let b = crb_povm(&tetrahedron_povm(), SphereRule::default()).unwrap();
        assert_eq!(a.c_value.to_bits(), b.c_value.to_bits());
    }

    #[test]
    fn asymptotic_fidelity_arithmetic() {
        assert!((asymptotic_fidelity(1.0, 100).unwrap() - 0.99).abs() < 1e-15);
        assert!(
            (asymptotic_fidelity(13.0 / 12.0, 1000).unwrap() - (1.0 - 13.0 / 12000.0)).abs()
                < 1e-15
        );
        assert!(asymptotic_fidelity(1.0, 0).is_err());
        assert!(asymptotic_fidelity(1.0, 10).unwrap() < asymptotic_fidelity(1.0, 11).unwrap());
    }

    #[test]
    fn scan_rejects_strengthless_families() {
        assert!(scan_crb(ProtocolKind::Mub, &[0.5], SphereRule::default()).is_err());
    }
}
