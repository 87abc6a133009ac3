//! POVM construction, validation, outcome statistics and sampling, Kraus
//! composition, convex mixing, and random-ODOP decomposition.

mod json;
mod kraus;
mod label;
mod odop;
pub mod standard;

use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::linalg::{self, c, CMatrix};
use crate::qcore::DensityOperator;
use crate::tolerance::Tolerances;

pub use json::PovmDocument;
pub use kraus::{compose_kraus, KrausFactor};
pub use label::{MeterAxis, Outcome, Sign};
pub use odop::{random_odop_decomposition, OdopDecomposition, OdopPair, OdopVerdict};
pub use standard::{
    haar_odop_povm, mub_povm, odop_mixture, pauli_basis, pauli_projectors, projective_povm,
    tetrahedron_povm,
};

#[derive(Debug, Clone, PartialEq)]
pub struct PovmElement {
    pub label: Outcome,
    pub operator: CMatrix,
}

impl PovmElement {
    pub fn new(label: Outcome, operator: CMatrix) -> Self {
        Self { label, operator }
    }

    pub fn weight(&self) -> f64 {
        self.operator.trace().re
    }
}

/// Outcome of [`DiscretePovm::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Spectral norm of ΣE − 1.
    pub completeness_deficit: f64,
    /// max(0, −λ_min) over all elements.
    pub positivity_violation: f64,
    pub hermiticity_defect: f64,
    pub passes: bool,
}

/// A finite list of labeled positive operators.
#[derive(Debug, Clone)]
pub struct DiscretePovm {
    dim: usize,
    elements: Vec<PovmElement>,
    report: OnceLock<ValidationReport>,
}

impl PartialEq for DiscretePovm {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.elements == other.elements
    }
}

impl DiscretePovm {
    /// Checks only shape; completeness and positivity are left to
    /// [`validate`](Self::validate).
    pub fn new(elements: Vec<PovmElement>) -> Result<Self> {
        let Some(first) = elements.first() else {
            return Err(Error::EmptyPovm);
        };
        let dim = first.operator.nrows();
        for e in &elements {
            if !e.operator.is_square() || e.operator.nrows() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: e.operator.nrows(),
                });
            }
        }
        Ok(Self {
            dim,
            elements,
            report: OnceLock::new(),
        })
    }

    /// Like [`new`](Self::new) but also requires validation to pass.
    pub fn checked(elements: Vec<PovmElement>, tol: &Tolerances) -> Result<Self> {
        let povm = Self::new(elements)?;
        let report = povm.validate(tol);
        if !report.passes {
            return Err(Error::InvalidPovm {
                completeness_deficit: report.completeness_deficit,
                positivity_violation: report.positivity_violation,
            });
        }
        Ok(povm)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<PovmElement> {
        self.elements
    }

    pub fn labels(&self) -> impl Iterator<Item = &Outcome> {
        self.elements.iter().map(|e| &e.label)
    }

    pub fn position(&self, label: &Outcome) -> Option<usize> {
        self.elements.iter().position(|e| &e.label == label)
    }

    pub fn element_sum(&self) -> CMatrix {
        self.elements
            .iter()
            .fold(CMatrix::zeros(self.dim, self.dim), |acc, e| acc + &e.operator)
    }

    pub fn validate(&self, tol: &Tolerances) -> ValidationReport {
        let sum = self.element_sum();
        let completeness_deficit = linalg::hermitian_norm(&(sum - linalg::identity(self.dim)));
        let mut positivity_violation: f64 = 0.0;
        let mut hermiticity_defect: f64 = 0.0;
        for e in &self.elements {
            hermiticity_defect = hermiticity_defect.max(linalg::hermiticity_defect(&e.operator));
            let min = if self.dim == 2 {
                let (t, v) = linalg::qubit_components(&e.operator);
                0.5 * (t - linalg::norm3(&v))
            } else {
                linalg::hermitian_eigenvalues(&e.operator)[0]
            };
            positivity_violation = positivity_violation.max(-min);
        }
        ValidationReport {
            completeness_deficit,
            positivity_violation,
            hermiticity_defect,
            passes: completeness_deficit <= tol.completeness
                && positivity_violation <= tol.positivity
                && hermiticity_defect <= tol.hermiticity,
        }
    }

    /// Validation at default tolerances, computed once.
    pub fn default_report(&self) -> ValidationReport {
        *self
            .report
            .get_or_init(|| self.validate(&Tolerances::DEFAULT))
    }

    fn ensure_valid(&self) -> Result<()> {
        let report = self.default_report();
        if report.passes {
            Ok(())
        } else {
            Err(Error::InvalidPovm {
                completeness_deficit: report.completeness_deficit,
                positivity_violation: report.positivity_violation,
            })
        }
    }

    /// p_χ = Tr(ρ E_χ), with round-off negatives clamped to zero.
    pub fn outcome_probabilities(&self, state: &DensityOperator) -> Result<Vec<f64>> {
        if state.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: state.dim(),
            });
        }
        self.ensure_valid()?;
        Ok(self.probabilities_unchecked(state.matrix()))
    }

    pub(crate) fn probabilities_unchecked(&self, rho: &CMatrix) -> Vec<f64> {
        self.elements
            .iter()
            .map(|e| linalg::trace_product(rho, &e.operator).re.max(0.0))
            .collect()
    }

    pub fn sample_outcome<R: Rng + ?Sized>(
        &self,
        state: &DensityOperator,
        rng: &mut R,
    ) -> Result<&Outcome> {
        let probs = self.outcome_probabilities(state)?;
        let total: f64 = probs.iter().sum();
        let u = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut last_nonzero = 0;
        for (k, p) in probs.iter().enumerate() {
            if *p > 0.0 {
                last_nonzero = k;
            }
            acc += p;
            if u < acc {
                return Ok(&self.elements[k].label);
            }
        }
        Ok(&self.elements[last_nonzero].label)
    }

    /// Multiply every element by `w`.
    pub fn scaled(&self, w: f64) -> DiscretePovm {
        DiscretePovm {
            dim: self.dim,
            elements: self
                .elements
                .iter()
                .map(|e| PovmElement::new(e.label.clone(), &e.operator * c(w, 0.0)))
                .collect(),
            report: OnceLock::new(),
        }
    }

    /// Keep elements satisfying `keep`, merging the rest into one
    /// [`Outcome::Discard`] element.
    pub fn merge_discarded<F: Fn(&Outcome) -> bool>(&self, keep: F) -> DiscretePovm {
        let mut kept = Vec::new();
        let mut discard = CMatrix::zeros(self.dim, self.dim);
        for e in &self.elements {
            if keep(&e.label) {
                kept.push(e.clone());
            } else {
                discard += &e.operator;
            }
        }
        kept.push(PovmElement::new(Outcome::Discard, discard));
        DiscretePovm {
            dim: self.dim,
            elements: kept,
            report: OnceLock::new(),
        }
    }
}

/// Convex combination Σ w_k · POVM_k; weights must be nonnegative and sum to 1.
pub fn mixture(parts: &[(f64, DiscretePovm)]) -> Result<DiscretePovm> {
    if parts.is_empty() {
        return Err(Error::EmptyPovm);
    }
    let total: f64 = parts.iter().map(|(w, _)| w).sum();
    if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidProbabilities(format!(
            "mixture weights must be nonnegative and sum to 1 (sum {total})"
        )));
    }
    let mut elements = Vec::new();
    for (w, povm) in parts {
        if povm.dim() != parts[0].1.dim() {
            return Err(Error::DimensionMismatch {
                expected: parts[0].1.dim(),
                found: povm.dim(),
            });
        }
        if *w > 0.0 {
            elements.extend(povm.scaled(*w).into_elements());
        }
    }
    DiscretePovm::new(elements)
}
