//! States, Bloch parameterization, fidelity, and the reconstruction and
//! conjugate bases.

pub mod linalg;

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;
use linalg::{c, CMatrix, CVector, C64, ONE};

/// A normalized state vector in the reconstruction basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        Self::with_tolerance(amplitudes, Tolerances::DEFAULT.normalization)
    }

    pub fn with_tolerance(amplitudes: CVector, tol: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Dimension { min: 1, got: 0 });
        }
        let n2 = amplitudes.norm_squared();
        if (n2 - 1.0).abs() > tol {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes `amplitudes`; fails only for the zero vector.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() {
            return Err(Error::Dimension { min: 1, got: 0 });
        }
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm * norm));
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
        })
    }

    pub fn from_slice(amplitudes: &[C64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(amplitudes))
    }

    /// |n⟩ of the reconstruction basis.
    pub fn basis(n: usize, d: usize) -> Result<Self> {
        if n >= d {
            return Err(Error::IndexOutOfRange { index: n, dim: d });
        }
        Ok(Self {
            amplitudes: linalg::basis_vector(n, d),
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, n: usize) -> C64 {
        self.amplitudes[n]
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn projector(&self) -> DensityOperator {
        DensityOperator {
            matrix: linalg::projector(&self.amplitudes),
        }
    }

    /// Multiply by a global phase.
    pub fn rephase(&self, phase: C64) -> PureState {
        PureState {
            amplitudes: self.amplitudes.map(|a| a * phase),
        }
    }

    /// Global phase fixed so the first amplitude with modulus above 1e-12 is
    /// real and positive.
    pub fn canonical(&self) -> PureState {
        match self.amplitudes.iter().find(|a| a.norm() > 1e-12) {
            Some(a) => self.rephase(a.conj() / a.norm()),
            None => self.clone(),
        }
    }

    /// max_n |ψ_n − φ_n| after canonicalizing both phases.
    pub fn distance_up_to_phase(&self, other: &PureState) -> f64 {
        let a = self.canonical();
        let b = other.canonical();
        a.amplitudes
            .iter()
            .zip(b.amplitudes.iter())
            .fold(0.0, |m, (x, y)| m.max((x - y).norm()))
    }

    /// Bloch vector ⟨σ⟩ of a qubit state.
    pub fn bloch_vector(&self) -> Result<[f64; 3]> {
        if self.dim() != 2 {
            return Err(Error::NotQubit(self.dim()));
        }
        let a = self.amplitudes[0];
        let b = self.amplitudes[1];
        let ab = a.conj() * b;
        Ok([2.0 * ab.re, 2.0 * ab.im, a.norm_sqr() - b.norm_sqr()])
    }
}

/// Unit-trace positive semidefinite Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let tol = Tolerances::DEFAULT;
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidDensity("matrix must be square and nonempty".into()));
        }
        let herm = linalg::hermiticity_defect(&matrix);
        if herm > tol.hermiticity {
            return Err(Error::InvalidDensity(format!("Hermiticity defect {herm:.3e}")));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > tol.normalization {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let min = linalg::hermitian_eigenvalues(&matrix)[0];
        if min < -tol.positivity {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { matrix })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            matrix: linalg::identity(d) * c(1.0 / d as f64, 0.0),
        }
    }

    /// (1 + r·σ)/2 for |r| ≤ 1.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        if linalg::norm3(&r) > 1.0 + 1e-12 {
            return Err(Error::InvalidDensity("Bloch vector longer than 1".into()));
        }
        Ok(Self {
            matrix: linalg::qubit_operator(1.0, r),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// a ρ₁ + (1 − a) ρ₂ for a ∈ [0, 1].
    pub fn mix(&self, other: &DensityOperator, a: f64) -> Result<DensityOperator> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::InvalidParameter(format!("mixing weight {a} outside [0, 1]")));
        }
        Ok(DensityOperator {
            matrix: &self.matrix * c(a, 0.0) + &other.matrix * c(1.0 - a, 0.0),
        })
    }
}

impl From<&PureState> for DensityOperator {
    fn from(psi: &PureState) -> Self {
        psi.projector()
    }
}

/// Polar and azimuthal Bloch-sphere angles. The azimuth is called `phi_az`
/// throughout to keep it apart from the DST coupling strength `phi_c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochAngles {
    theta: f64,
    phi_az: f64,
}

impl BlochAngles {
    /// `theta` must lie in [0, π]; `phi_az` is wrapped into [0, 2π).
    pub fn new(theta: f64, phi_az: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidParameter(format!("polar angle {theta} outside [0, π]")));
        }
        if !phi_az.is_finite() {
            return Err(Error::InvalidParameter("azimuth is not finite".into()));
        }
        Ok(Self {
            theta,
            phi_az: phi_az.rem_euclid(2.0 * PI),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi_az(&self) -> f64 {
        self.phi_az
    }

    pub fn from_vector(r: [f64; 3]) -> Result<Self> {
        let norm = linalg::norm3(&r);
        if norm == 0.0 {
            return Err(Error::InvalidParameter("zero Bloch vector has no direction".into()));
        }
        let theta = (r[2] / norm).clamp(-1.0, 1.0).acos();
        Self::new(theta, r[1].atan2(r[0]))
    }

    /// (sinθ cosφ, sinθ sinφ, cosθ)
    pub fn vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi_az.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn d_theta(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi_az.sin_cos();
        [ct * cp, ct * sp, -st]
    }

    pub fn d_phi(&self) -> [f64; 3] {
        let st = self.theta.sin();
        let (sp, cp) = self.phi_az.sin_cos();
        [-st * sp, st * cp, 0.0]
    }
}

/// An ordered orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    vectors: Vec<PureState>,
}

impl Basis {
    pub fn new(vectors: Vec<PureState>) -> Result<Self> {
        let Some(first) = vectors.first() else {
            return Err(Error::Empty);
        };
        let d = first.dim();
        if vectors.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: vectors.len(),
            });
        }
        if let Some(v) = vectors.iter().find(|v| v.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.dim(),
            });
        }
        let basis = Self { vectors };
        let defect = linalg::identity_defect(&basis.gram());
        if defect > Tolerances::DEFAULT.orthonormality {
            return Err(Error::NotOrthonormal(defect));
        }
        Ok(basis)
    }

    /// The reconstruction basis {|n⟩}.
    pub fn computational(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Dimension { min: 1, got: 0 });
        }
        Ok(Self {
            vectors: (0..d)
                .map(|n| PureState {
                    amplitudes: linalg::basis_vector(n, d),
                })
                .collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[PureState] {
        &self.vectors
    }

    pub fn vector(&self, j: usize) -> &PureState {
        &self.vectors[j]
    }

    /// Matrix whose j-th column is the j-th basis vector.
    pub fn matrix(&self) -> CMatrix {
        let d = self.dim();
        CMatrix::from_fn(d, d, |n, j| self.vectors[j].amplitudes[n])
    }

    pub fn gram(&self) -> CMatrix {
        let u = self.matrix();
        u.adjoint() * u
    }
}

/// ω = e^{2πi/d}
pub fn root_of_unity(d: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI / d as f64)
}

/// ω^k computed from the reduced exponent so large k stays accurate.
pub fn omega_pow(d: usize, k: i64) -> C64 {
    let r = k.rem_euclid(d as i64);
    C64::from_polar(1.0, 2.0 * PI * r as f64 / d as f64)
}

/// The discrete-Fourier dual of the reconstruction basis,
/// ⟨n|c_j⟩ = ω^{nj}/√d.
pub fn conjugate_basis(d: usize) -> Result<Basis> {
    if d == 0 {
        return Err(Error::Dimension { min: 1, got: 0 });
    }
    let scale = 1.0 / (d as f64).sqrt();
    let vectors = (0..d)
        .map(|j| PureState {
            amplitudes: CVector::from_fn(d, |n, _| omega_pow(d, (n * j) as i64) * scale),
        })
        .collect();
    Ok(Basis { vectors })
}

/// (cos(θ/2), e^{iφ} sin(θ/2))
pub fn bloch_to_state(angles: BlochAngles) -> PureState {
    let half = 0.5 * angles.theta;
    PureState {
        amplitudes: CVector::from_column_slice(&[
            c(half.cos(), 0.0),
            C64::from_polar(half.sin(), angles.phi_az),
        ]),
    }
}

/// Inverse of [`bloch_to_state`] up to global phase.
pub fn state_to_bloch(state: &PureState) -> Result<BlochAngles> {
    let r = state.bloch_vector()?;
    let theta = r[2].clamp(-1.0, 1.0).acos();
    let phi = if r[0].hypot(r[1]) < 1e-15 {
        0.0
    } else {
        r[1].atan2(r[0])
    };
    BlochAngles::new(theta, phi)
}

/// ⟨ψ|ρ̂|ψ⟩
pub fn fidelity(true_state: &PureState, estimate: &DensityOperator) -> Result<f64> {
    if true_state.dim() != estimate.dim() {
        return Err(Error::DimensionMismatch {
            expected: true_state.dim(),
            found: estimate.dim(),
        });
    }
    let psi = true_state.amplitudes();
    let value = psi.dotc(&(estimate.matrix() * psi)).re;
    Ok(value.clamp(0.0, 1.0))
}

/// Sample from the unitarily invariant measure by normalizing a vector of
/// i.i.d. complex Gaussians.
pub fn haar_random_pure<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<PureState> {
    if d < 2 {
        return Err(Error::Dimension { min: 2, got: d });
    }
    loop {
        let v = CVector::from_fn(d, |_, _| {
            c(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let norm = v.norm();
        if norm > 1e-300 {
            return Ok(PureState {
                amplitudes: v.unscale(norm),
            });
        }
    }
}

/// The Z operator: Z|n⟩ = ωⁿ|n⟩, so Z|c_j⟩ = |c_{j+1}⟩.
pub fn clock_operator(d: usize) -> CMatrix {
    let mut z = CMatrix::zeros(d, d);
    for n in 0..d {
        z[(n, n)] = omega_pow(d, n as i64);
    }
    z
}
