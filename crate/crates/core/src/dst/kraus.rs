use std::f64::consts::{FRAC_PI_4, SQRT_2};

use crate::error::{Error, Result};
use crate::povm::{KrausFactor, MeterAxis, Outcome, Sign};
use crate::qcore::linalg::{c, CMatrix, C64};

fn check_index(n: usize, d: usize) -> Result<()> {
    if n >= d {
        Err(Error::IndexOutOfRange { index: n, dim: d })
    } else {
        Ok(())
    }
}

/// exp(−iφ|n⟩⟨n| ⊗ σz) on system ⊗ meter, basis index `2·s + meter`.
pub fn interaction_unitary(phi_c: f64, n: usize, d: usize) -> Result<CMatrix> {
    check_index(n, d)?;
    let mut u = CMatrix::identity(2 * d, 2 * d);
    u[(2 * n, 2 * n)] = C64::from_polar(1.0, -phi_c);
    u[(2 * n + 1, 2 * n + 1)] = C64::from_polar(1.0, phi_c);
    Ok(u)
}

/// 1 + (λ − 1)|n⟩⟨n|, scaled by `scale`.
fn diagonal_kraus(d: usize, n: usize, lambda: C64, scale: f64) -> CMatrix {
    let mut k = CMatrix::identity(d, d);
    k[(n, n)] = lambda;
    k * c(scale, 0.0)
}

fn factor(op: CMatrix, n: usize, axis: MeterAxis, sign: Sign) -> KrausFactor {
    KrausFactor::new(op, Outcome::Meter { n, axis, sign })
}

/// ⟨±y|U|+⟩ = (1/√2)(1 + (√2 s_± − 1)|n⟩⟨n|), s_± = ±sin(φ ± π/4).
pub fn meter_kraus_y(phi_c: f64, n: usize, d: usize) -> Result<[KrausFactor; 2]> {
    check_index(n, d)?;
    let s_plus = (phi_c + FRAC_PI_4).sin();
    let s_minus = -(phi_c - FRAC_PI_4).sin();
    let scale = 1.0 / SQRT_2;
    Ok([
        factor(
            diagonal_kraus(d, n, c(SQRT_2 * s_plus, 0.0), scale),
            n,
            MeterAxis::Y,
            Sign::Plus,
        ),
        factor(
            diagonal_kraus(d, n, c(SQRT_2 * s_minus, 0.0), scale),
            n,
            MeterAxis::Y,
            Sign::Minus,
        ),
    ])
}

/// K₊ = 1 + (cosφ − 1)|n⟩⟨n|, K₋ = sinφ |n⟩⟨n|.
pub fn meter_kraus_x(phi_c: f64, n: usize, d: usize) -> Result<[KrausFactor; 2]> {
    check_index(n, d)?;
    let mut minus = CMatrix::zeros(d, d);
    minus[(n, n)] = c(phi_c.sin(), 0.0);
    Ok([
        factor(
            diagonal_kraus(d, n, c(phi_c.cos(), 0.0), 1.0),
            n,
            MeterAxis::X,
            Sign::Plus,
        ),
        factor(minus, n, MeterAxis::X, Sign::Minus),
    ])
}

/// K± = (1/√2) exp(∓iφ|n⟩⟨n|): a fair coin selecting one of two phase shifts.
pub fn meter_kraus_z(phi_c: f64, n: usize, d: usize) -> Result<[KrausFactor; 2]> {
    check_index(n, d)?;
    let scale = 1.0 / SQRT_2;
    Ok([
        factor(
            diagonal_kraus(d, n, C64::from_polar(1.0, -phi_c), scale),
            n,
            MeterAxis::Z,
            Sign::Plus,
        ),
        factor(
            diagonal_kraus(d, n, C64::from_polar(1.0, phi_c), scale),
            n,
            MeterAxis::Z,
            Sign::Minus,
        ),
    ])
}

pub fn meter_kraus(axis: MeterAxis, phi_c: f64, n: usize, d: usize) -> Result<[KrausFactor; 2]> {
    match axis {
        MeterAxis::X => meter_kraus_x(phi_c, n, d),
        MeterAxis::Y => meter_kraus_y(phi_c, n, d),
        MeterAxis::Z => meter_kraus_z(phi_c, n, d),
    }
}
