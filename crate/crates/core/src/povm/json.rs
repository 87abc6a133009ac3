use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::linalg::{c, CMatrix};

use super::{DiscretePovm, Outcome, PovmElement};

/// JSON form of a [`DiscretePovm`]: labels plus row-major matrices of
/// `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PovmDocument {
    pub dim: usize,
    pub elements: Vec<ElementDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementDocument {
    pub label: Outcome,
    pub operator: Vec<Vec<[f64; 2]>>,
}

impl From<&DiscretePovm> for PovmDocument {
    fn from(povm: &DiscretePovm) -> Self {
        let d = povm.dim();
        PovmDocument {
            dim: d,
            elements: povm
                .elements()
                .iter()
                .map(|e| ElementDocument {
                    label: e.label.clone(),
                    operator: (0..d)
                        .map(|i| {
                            (0..d)
                                .map(|j| [e.operator[(i, j)].re, e.operator[(i, j)].im])
                                .collect()
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl PovmDocument {
    pub fn into_povm(self) -> Result<DiscretePovm> {
        let d = self.dim;
        let mut elements = Vec::with_capacity(self.elements.len());
        for e in self.elements {
            if e.operator.len() != d || e.operator.iter().any(|row| row.len() != d) {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: e.operator.len(),
                });
            }
            let op = CMatrix::from_fn(d, d, |i, j| {
                let [re, im] = e.operator[i][j];
                c(re, im)
            });
            elements.push(PovmElement::new(e.label, op));
        }
        DiscretePovm::new(elements)
    }
}

impl DiscretePovm {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&PovmDocument::from(self)).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PovmDocument = serde_json::from_str(text)
            .map_err(|e| Error::InvalidParameter(format!("malformed POVM document: {e}")))?;
        doc.into_povm()
    }
}
