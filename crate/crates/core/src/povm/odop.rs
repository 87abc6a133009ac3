//! Decomposition of a qubit POVM into equally weighted orthogonal projector
//! pairs, i.e. a random ODOP.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::linalg::{self, CMatrix};
use crate::tolerance::Tolerances;

use super::DiscretePovm;

/// One basis of the random ODOP: selected with probability `weight`,
/// projectors (1 ± n̂·σ)/2 with n̂ = `direction`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdopPair {
    pub weight: f64,
    pub direction: [f64; 3],
    /// Element indices in the source POVM, (+n̂ member, −n̂ member).
    pub members: (usize, usize),
}

impl OdopPair {
    pub fn projector(&self) -> CMatrix {
        linalg::qubit_operator(1.0, self.direction)
    }

    pub fn complement(&self) -> CMatrix {
        let [x, y, z] = self.direction;
        linalg::qubit_operator(1.0, [-x, -y, -z])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdopDecomposition {
    pub pairs: Vec<OdopPair>,
}

impl OdopDecomposition {
    pub fn total_weight(&self) -> f64 {
        self.pairs.iter().map(|p| p.weight).sum()
    }

    /// Σ_k w_k (P_k + (1 − P_k))
    pub fn reconstruct(&self) -> CMatrix {
        self.pairs.iter().fold(CMatrix::zeros(2, 2), |acc, p| {
            acc + (p.projector() + p.complement()) * linalg::c(p.weight, 0.0)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum OdopVerdict {
    Decomposable(OdopDecomposition),
    /// Element indices that found no partner.
    NotDecomposable { unmatched: Vec<usize> },
}

impl OdopVerdict {
    pub fn is_decomposable(&self) -> bool {
        matches!(self, OdopVerdict::Decomposable(_))
    }
}

struct Candidate {
    index: usize,
    weight: f64,
    direction: [f64; 3],
}

/// Greedy antipode matching. Elements are written as a·(1 + n̂·σ)/2, sorted
/// by descending weight a (ties broken lexicographically on n̂), and each
/// unmatched element is paired with the closest-to-antipodal unmatched
/// element of equal weight. Elements with weight below
/// `tol.negligible_weight` are dropped first.
pub fn random_odop_decomposition(povm: &DiscretePovm, tol: &Tolerances) -> Result<OdopVerdict> {
    if povm.dim() != 2 {
        return Err(Error::NotQubit(povm.dim()));
    }
    let mut candidates = Vec::with_capacity(povm.len());
    for (index, e) in povm.elements().iter().enumerate() {
        let (t, v) = linalg::qubit_components(&e.operator);
        if t < tol.negligible_weight {
            continue;
        }
        let r = linalg::norm3(&v);
        let second_eigenvalue = 0.5 * (t - r);
        if second_eigenvalue > tol.rank_one * t {
            return Err(Error::NotRankOne {
                index,
                second_eigenvalue,
            });
        }
        candidates.push(Candidate {
            index,
            weight: t,
            direction: [v[0] / r, v[1] / r, v[2] / r],
        });
    }
    candidates.sort_by(|a, b| {
        b.weight.total_cmp(&a.weight).then_with(|| {
            a.direction
                .iter()
                .zip(&b.direction)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });

    let mut matched = vec![false; candidates.len()];
    let mut pairs = Vec::new();
    let mut unmatched = Vec::new();
    for i in 0..candidates.len() {
        if matched[i] {
            continue;
        }
        let ci = &candidates[i];
        let floor = ci.weight * (1.0 - tol.odop_weight);
        let mut best: Option<(usize, f64)> = None;
        for (j, cj) in candidates.iter().enumerate().skip(i + 1) {
            if cj.weight < floor {
                break;
            }
            if matched[j] {
                continue;
            }
            let gap = linalg::norm3(&[
                ci.direction[0] + cj.direction[0],
                ci.direction[1] + cj.direction[1],
                ci.direction[2] + cj.direction[2],
            ]);
            if gap <= tol.odop_antipode && best.is_none_or(|(_, g)| gap < g) {
                best = Some((j, gap));
            }
        }
        match best {
            Some((j, _)) => {
                matched[i] = true;
                matched[j] = true;
                let cj = &candidates[j];
                pairs.push(OdopPair {
                    weight: 0.5 * (ci.weight + cj.weight),
                    direction: ci.direction,
                    members: (ci.index, cj.index),
                });
            }
            None => unmatched.push(ci.index),
        }
    }
    if unmatched.is_empty() {
        Ok(OdopVerdict::Decomposable(OdopDecomposition { pairs }))
    } else {
        unmatched.sort_unstable();
        Ok(OdopVerdict::NotDecomposable { unmatched })
    }
}
