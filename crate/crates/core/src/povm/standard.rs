//! Reference measurements: Pauli projectors, MUB, tetrahedron, and random ODOPs.

use rand::Rng;

use crate::error::{Error, Result};
use crate::qcore::linalg::{self, c, CVector};
use crate::qcore::{haar_random_pure, Basis, PureState};

use super::{DiscretePovm, MeterAxis, Outcome, PovmElement, Sign};

/// Eigenbasis of σ_axis ordered (+, −).
pub fn pauli_basis(axis: MeterAxis) -> Basis {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (plus, minus) = match axis {
        MeterAxis::X => ([c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]),
        MeterAxis::Y => ([c(h, 0.0), c(0.0, h)], [c(h, 0.0), c(0.0, -h)]),
        MeterAxis::Z => ([c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]),
    };
    Basis::new(vec![
        PureState::from_slice(&plus).expect("normalized"),
        PureState::from_slice(&minus).expect("normalized"),
    ])
    .expect("orthonormal")
}

/// Projective σ_axis measurement with [`Outcome::Pauli`] labels.
pub fn pauli_projectors(axis: MeterAxis) -> DiscretePovm {
    let basis = pauli_basis(axis);
    let elements = Sign::BOTH
        .iter()
        .zip(basis.vectors())
        .map(|(&sign, v)| {
            PovmElement::new(Outcome::Pauli { axis, sign }, linalg::projector(v.amplitudes()))
        })
        .collect();
    DiscretePovm::new(elements).expect("nonempty")
}

/// Projective measurement in `basis`, labeled as basis number `basis_index`.
pub fn projective_povm(basis: &Basis, basis_index: usize) -> DiscretePovm {
    let elements = basis
        .vectors()
        .iter()
        .enumerate()
        .map(|(index, v)| {
            PovmElement::new(
                Outcome::Projector {
                    basis: basis_index,
                    index,
                },
                linalg::projector(v.amplitudes()),
            )
        })
        .collect();
    DiscretePovm::new(elements).expect("nonempty")
}

/// Random ODOP: basis k chosen with probability w_k, then measured projectively.
pub fn odop_mixture(bases: &[(f64, Basis)]) -> Result<DiscretePovm> {
    let parts: Vec<(f64, DiscretePovm)> = bases
        .iter()
        .enumerate()
        .map(|(k, (w, b))| (*w, projective_povm(b, k)))
        .collect();
    super::mixture(&parts)
}

/// σx, σy, σz projectors, each basis chosen with probability 1/3.
pub fn mub_povm() -> DiscretePovm {
    let parts: Vec<(f64, DiscretePovm)> = MeterAxis::ALL
        .iter()
        .map(|&axis| (1.0 / 3.0, pauli_projectors(axis)))
        .collect();
    super::mixture(&parts).expect("weights sum to one")
}

/// Equal-weight mixture of `n_bases` Haar-random qubit bases.
pub fn haar_odop_povm<R: Rng + ?Sized>(n_bases: usize, rng: &mut R) -> Result<DiscretePovm> {
    if n_bases == 0 {
        return Err(Error::InvalidParameter("need at least one basis".into()));
    }
    let w = 1.0 / n_bases as f64;
    let mut elements = Vec::with_capacity(2 * n_bases);
    for k in 0..n_bases {
        let psi = haar_random_pure(2, rng)?;
        let a = psi.amplitude(0);
        let b = psi.amplitude(1);
        let perp = CVector::from_column_slice(&[-b.conj(), a.conj()]);
        for (index, v) in [psi.amplitudes().clone(), perp].iter().enumerate() {
            elements.push(PovmElement::new(
                Outcome::Projector { basis: k, index },
                linalg::projector(v) * c(w, 0.0),
            ));
        }
    }
    DiscretePovm::new(elements)
}

/// Tetrahedral Bloch directions (±1, ±1, ±1)/√3 with an even number of minus signs.
pub const TETRAHEDRON_VERTICES: [[f64; 3]; 4] = {
    const S: f64 = 0.577_350_269_189_625_8;
    [[S, S, S], [S, -S, -S], [-S, S, -S], [-S, -S, S]]
};

/// Four elements (1/4)(1 + n̂_k·σ).
pub fn tetrahedron_povm() -> DiscretePovm {
    let elements = TETRAHEDRON_VERTICES
        .iter()
        .enumerate()
        .map(|(index, n)| {
            PovmElement::new(
                Outcome::Index { index },
                linalg::qubit_operator(0.5, [0.5 * n[0], 0.5 * n[1], 0.5 * n[2]]),
            )
        })
        .collect();
    DiscretePovm::new(elements).expect("nonempty")
}
