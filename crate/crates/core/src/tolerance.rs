use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by every validation routine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// |‖ψ‖² − 1| for pure states.
    pub normalization: f64,
    /// Max elementwise |A − A†|.
    pub hermiticity: f64,
    /// Smallest admissible eigenvalue is `-positivity`.
    pub positivity: f64,
    /// Spectral norm of ΣE − 1.
    pub completeness: f64,
    /// Max elementwise deviation of a Gram matrix from the identity.
    pub orthonormality: f64,
    /// Relative weight mismatch allowed when pairing ODOP partners.
    pub odop_weight: f64,
    /// ‖n̂ + n̂'‖ allowed when pairing ODOP partners.
    pub odop_antipode: f64,
    /// Relative size of the second eigenvalue below which an element counts as rank-one.
    pub rank_one: f64,
    /// Elements with trace below this are ignored by the ODOP decomposition.
    pub negligible_weight: f64,
    /// Slightly negative probabilities above `-probability_clamp` are clamped to 0.
    pub probability_clamp: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        normalization: 1e-12,
        hermiticity: 1e-12,
        positivity: 1e-10,
        completeness: 1e-10,
        orthonormality: 1e-12,
        odop_weight: 1e-8,
        odop_antipode: 1e-8,
        rank_one: 1e-9,
        negligible_weight: 1e-14,
        probability_clamp: 1e-12,
    };

    pub fn with_completeness(self, completeness: f64) -> Self {
        Self {
            completeness,
            ..self
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
