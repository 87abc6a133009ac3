use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{povm_density, DaConfig};

/// Number of cells in the equal-area partition of the +y hemisphere.
pub const HEMISPHERE_CELLS: usize = 128;
const BANDS: usize = 8;
const SECTORS: usize = HEMISPHERE_CELLS / BANDS;

/// A weighted measurement axis on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochPoint {
    pub n: [f64; 3],
    pub weight: f64,
}

/// n̂ → −n̂ when n̂·ŷ < 0. An axis and its antipode describe the same basis.
pub fn fold_to_positive_y(n: [f64; 3]) -> [f64; 3] {
    if n[1] < 0.0 {
        [-n[0], -n[1], -n[2]]
    } else {
        n
    }
}

/// Effective distribution over measurement bases: one point per quadrature
/// cell, at n̂_+ folded to the +y hemisphere, weighted by G times the cell's
/// quadrature weight.
///
/// The n̂_− elements carry no extra information: n̂_−(q) = −n̂_+(−q) with the
/// same weight, so they fold onto the same distribution.
pub fn basis_distribution(config: &DaConfig) -> Result<Vec<BlochPoint>> {
    let rule = config.rule()?;
    let mut points = Vec::with_capacity(rule.len() * rule.len());
    for &(q1, w1) in &rule {
        for &(q2, w2) in &rule {
            let s = povm_density(q1, q2, config.epsilon)?;
            points.push(BlochPoint {
                n: fold_to_positive_y(s.n_plus),
                weight: s.g * w1 * w2,
            });
        }
    }
    Ok(points)
}

/// Cell of the +y hemisphere partition containing `n` (folded first).
///
/// Cells are 8 bands of equal width in n_y, which have equal area by
/// Archimedes' hat-box theorem, times 16 equal sectors of the azimuth about ŷ
/// measured from x̂ toward ẑ.
pub fn hemisphere_cell(n: [f64; 3]) -> usize {
    let n = fold_to_positive_y(n);
    let band = ((n[1] * BANDS as f64) as usize).min(BANDS - 1);
    let azimuth = n[2].atan2(n[0]) + PI;
    let sector = ((azimuth / (2.0 * PI) * SECTORS as f64) as usize).min(SECTORS - 1);
    band * SECTORS + sector
}

/// Σ_cells |p_cell − 1/128|: the L1 distance between the weighted points'
/// cell masses and the uniform distribution on the same partition.
///
/// Ranges from 0 (uniform on the partition) to 2(1 − 1/128) (all mass in one
/// cell).
pub fn uniformity_metric(points: &[BlochPoint]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Empty);
    }
    let mut mass = [0.0; HEMISPHERE_CELLS];
    let mut total = 0.0;
    for p in points {
        if !(p.weight >= 0.0) {
            return Err(Error::InvalidProbabilities(format!(
                "negative point weight {}",
                p.weight
            )));
        }
        mass[hemisphere_cell(p.n)] += p.weight;
        total += p.weight;
    }
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidProbabilities(format!(
            "point weights sum to {total}"
        )));
    }
    let uniform = 1.0 / HEMISPHERE_CELLS as f64;
    Ok(mass.iter().map(|m| (m - uniform).abs()).sum())
}
