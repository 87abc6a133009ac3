use crate::error::{Error, Result};
use crate::qcore::linalg::{c, CMatrix};
use crate::tolerance::Tolerances;

use super::{DiscretePovm, Outcome, PovmElement};

/// One measurement branch: operator K, its outcome tag, and the probability
/// with which the branch family is selected.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausFactor {
    pub operator: CMatrix,
    pub label: Outcome,
    pub weight: f64,
}

impl KrausFactor {
    pub fn new(operator: CMatrix, label: Outcome) -> Self {
        Self {
            operator,
            label,
            weight: 1.0,
        }
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    /// weight · K†K
    pub fn effect(&self) -> CMatrix {
        self.operator.adjoint() * &self.operator * c(self.weight, 0.0)
    }
}

/// Compose measurement stages applied in order (first stage first).
///
/// Every path through the stages becomes one element
/// `(Π weights) · K_total† K_total` with `K_total = K_last ⋯ K_first`. Labels
/// of multi-stage paths are [`Outcome::Path`]. The result must be complete;
/// otherwise the deficit is reported.
pub fn compose_kraus(stages: &[Vec<KrausFactor>], tol: &Tolerances) -> Result<DiscretePovm> {
    let povm = compose_unchecked(stages)?;
    let report = povm.validate(tol);
    if !report.passes {
        return Err(Error::InvalidPovm {
            completeness_deficit: report.completeness_deficit,
            positivity_violation: report.positivity_violation,
        });
    }
    Ok(povm)
}

pub(crate) fn compose_unchecked(stages: &[Vec<KrausFactor>]) -> Result<DiscretePovm> {
    let Some(first) = stages.first() else {
        return Err(Error::EmptyPovm);
    };
    let Some(dim) = first.first().map(|k| k.operator.ncols()) else {
        return Err(Error::EmptyPovm);
    };
    // (operator, weight, labels)
    let mut paths: Vec<(CMatrix, f64, Vec<Outcome>)> =
        vec![(CMatrix::identity(dim, dim), 1.0, Vec::new())];
    for stage in stages {
        if stage.is_empty() {
            return Err(Error::EmptyPovm);
        }
        let mut next = Vec::with_capacity(paths.len() * stage.len());
        for (op, w, labels) in &paths {
            for factor in stage {
                if factor.operator.ncols() != op.nrows() {
                    return Err(Error::DimensionMismatch {
                        expected: op.nrows(),
                        found: factor.operator.ncols(),
                    });
                }
                let mut labels = labels.clone();
                labels.push(factor.label.clone());
                next.push((&factor.operator * op, w * factor.weight, labels));
            }
        }
        paths = next;
    }
    let elements = paths
        .into_iter()
        .map(|(op, w, mut labels)| {
            let label = if labels.len() == 1 {
                labels.pop().unwrap()
            } else {
                Outcome::Path { steps: labels }
            };
            PovmElement::new(label, op.adjoint() * &op * c(w, 0.0))
        })
        .collect();
    DiscretePovm::new(elements)
}
