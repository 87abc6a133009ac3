//! Dense complex linear algebra helpers sized for d ≤ 8.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn sigma_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn sigma_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

pub fn paulis() -> [CMatrix; 3] {
    [sigma_x(), sigma_y(), sigma_z()]
}

/// |a⟩⟨b|
pub fn outer(a: &CVector, b: &CVector) -> CMatrix {
    a * b.adjoint()
}

pub fn projector(v: &CVector) -> CMatrix {
    outer(v, v)
}

/// |n⟩⟨n| in dimension d.
pub fn basis_projector(n: usize, d: usize) -> CMatrix {
    let mut p = CMatrix::zeros(d, d);
    p[(n, n)] = ONE;
    p
}

pub fn basis_vector(n: usize, d: usize) -> CVector {
    let mut v = CVector::zeros(d);
    v[n] = ONE;
    v
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn trace(a: &CMatrix) -> C64 {
    a.trace()
}

/// Tr(A B) without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let d = a.nrows();
    let mut acc = ZERO;
    for i in 0..d {
        for k in 0..d {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Largest elementwise |A − A†|.
pub fn hermiticity_defect(a: &CMatrix) -> f64 {
    let d = a.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Ascending eigenvalues of the Hermitian part of `a`.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let h = hermitian_part(a);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigen-decomposition of the Hermitian part, sorted by descending eigenvalue.
pub fn hermitian_eigen(a: &CMatrix) -> Vec<(f64, CVector)> {
    let h = hermitian_part(a);
    let eig = h.symmetric_eigen();
    let mut pairs: Vec<(f64, CVector)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &lambda)| (lambda, eig.eigenvectors.column(k).into_owned()))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs
}

pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * c(0.5, 0.0)
}

/// Spectral norm of a Hermitian matrix.
pub fn hermitian_norm(a: &CMatrix) -> f64 {
    hermitian_eigenvalues(a)
        .into_iter()
        .fold(0.0, |m, x| m.max(x.abs()))
}

/// Max elementwise deviation of `a` from the identity.
pub fn identity_defect(a: &CMatrix) -> f64 {
    let d = a.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((a[(i, j)] - target).norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Write a qubit operator as (t·1 + v·σ)/2 and return (t, v).
pub fn qubit_components(a: &CMatrix) -> (f64, [f64; 3]) {
    debug_assert_eq!(a.nrows(), 2);
    let t = (a[(0, 0)] + a[(1, 1)]).re;
    let vx = (a[(0, 1)] + a[(1, 0)]).re;
    let vy = (a[(1, 0)] - a[(0, 1)]).im;
    let vz = (a[(0, 0)] - a[(1, 1)]).re;
    (t, [vx, vy, vz])
}

/// (t·1 + v·σ)/2
pub fn qubit_operator(t: f64, v: [f64; 3]) -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[
            c(0.5 * (t + v[2]), 0.0),
            c(0.5 * v[0], -0.5 * v[1]),
            c(0.5 * v[0], 0.5 * v[1]),
            c(0.5 * (t - v[2]), 0.0),
        ],
    )
}

pub fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}
