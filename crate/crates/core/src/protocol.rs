//! Named, parameterized qubit measurement families.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dasarvind::{discretize, DaConfig};
use crate::dst::{dst_povm, DstConfig};
use crate::error::{Error, Result};
use crate::povm::{haar_odop_povm, mub_povm, tetrahedron_povm, DiscretePovm};

/// Measurement family without its strength parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    DstOriginal,
    DstAugmentedEqual,
    DstAugmentedHalfZ,
    DasArvind,
    Mub,
    HaarOdop,
    Tetrahedron,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 7] = [
        ProtocolKind::DstOriginal,
        ProtocolKind::DstAugmentedEqual,
        ProtocolKind::DstAugmentedHalfZ,
        ProtocolKind::DasArvind,
        ProtocolKind::Mub,
        ProtocolKind::HaarOdop,
        ProtocolKind::Tetrahedron,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::DstOriginal => "dst-original",
            ProtocolKind::DstAugmentedEqual => "dst-augmented-equal",
            ProtocolKind::DstAugmentedHalfZ => "dst-augmented-half-z",
            ProtocolKind::DasArvind => "das-arvind",
            ProtocolKind::Mub => "mub",
            ProtocolKind::HaarOdop => "haar-odop",
            ProtocolKind::Tetrahedron => "tetrahedron",
        }
    }

    /// Whether the family has a coupling strength (φ_c or ε).
    pub fn has_strength(self) -> bool {
        matches!(
            self,
            ProtocolKind::DstOriginal
                | ProtocolKind::DstAugmentedEqual
                | ProtocolKind::DstAugmentedHalfZ
                | ProtocolKind::DasArvind
        )
    }

    pub fn is_dst(self) -> bool {
        matches!(
            self,
            ProtocolKind::DstOriginal
                | ProtocolKind::DstAugmentedEqual
                | ProtocolKind::DstAugmentedHalfZ
        )
    }

    /// Attach a strength. Families without one ignore it.
    pub fn with_strength(self, strength: f64) -> ProtocolSpec {
        match self {
            ProtocolKind::DstOriginal => ProtocolSpec::DstOriginal { phi_c: strength },
            ProtocolKind::DstAugmentedEqual => ProtocolSpec::DstAugmentedEqual { phi_c: strength },
            ProtocolKind::DstAugmentedHalfZ => ProtocolSpec::DstAugmentedHalfZ { phi_c: strength },
            ProtocolKind::DasArvind => ProtocolSpec::DasArvind { epsilon: strength },
            ProtocolKind::Mub => ProtocolSpec::Mub,
            ProtocolKind::HaarOdop => ProtocolSpec::HaarOdop,
            ProtocolKind::Tetrahedron => ProtocolSpec::Tetrahedron,
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "dst-augmented" {
            return Ok(ProtocolKind::DstAugmentedEqual);
        }
        ProtocolKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown protocol '{s}'")))
    }
}

/// A measurement family with its parameter. Every family acts on a qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "kebab-case")]
pub enum ProtocolSpec {
    /// Meter σy or σz with probability 1/2 each.
    DstOriginal { phi_c: f64 },
    /// Meter σx, σy, σz with probability 1/3 each.
    DstAugmentedEqual { phi_c: f64 },
    /// Meter σz with probability 1/2, σx and σy with 1/4 each.
    DstAugmentedHalfZ { phi_c: f64 },
    DasArvind { epsilon: f64 },
    /// Pauli x, y, z projective measurements with probability 1/3 each.
    Mub,
    /// A Haar-random basis for every copy.
    HaarOdop,
    /// The symmetric informationally complete tetrahedron POVM.
    Tetrahedron,
}

impl ProtocolSpec {
    pub fn kind(&self) -> ProtocolKind {
        match self {
            ProtocolSpec::DstOriginal { .. } => ProtocolKind::DstOriginal,
            ProtocolSpec::DstAugmentedEqual { .. } => ProtocolKind::DstAugmentedEqual,
            ProtocolSpec::DstAugmentedHalfZ { .. } => ProtocolKind::DstAugmentedHalfZ,
            ProtocolSpec::DasArvind { .. } => ProtocolKind::DasArvind,
            ProtocolSpec::Mub => ProtocolKind::Mub,
            ProtocolSpec::HaarOdop => ProtocolKind::HaarOdop,
            ProtocolSpec::Tetrahedron => ProtocolKind::Tetrahedron,
        }
    }

    pub fn strength(&self) -> Option<f64> {
        match *self {
            ProtocolSpec::DstOriginal { phi_c }
            | ProtocolSpec::DstAugmentedEqual { phi_c }
            | ProtocolSpec::DstAugmentedHalfZ { phi_c } => Some(phi_c),
            ProtocolSpec::DasArvind { epsilon } => Some(epsilon),
            _ => None,
        }
    }

    pub fn dst_config(&self) -> Option<Result<DstConfig>> {
        match *self {
            ProtocolSpec::DstOriginal { phi_c } => Some(DstConfig::original(2, phi_c)),
            ProtocolSpec::DstAugmentedEqual { phi_c } => Some(DstConfig::augmented_equal(2, phi_c)),
            ProtocolSpec::DstAugmentedHalfZ { phi_c } => {
                Some(DstConfig::augmented_half_z(2, phi_c))
            }
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(config) = self.dst_config() {
            config?;
        }
        if let ProtocolSpec::DasArvind { epsilon } = *self {
            DaConfig::new(epsilon)?;
        }
        Ok(())
    }

    /// The overall qubit POVM of the family.
    ///
    /// Das–Arvind uses the default quadrature grid. Haar-ODOP has no finite
    /// POVM and is approximated here by `HAAR_POVM_BASES` random bases drawn
    /// from a fixed seed; simulations sample a fresh basis per copy instead.
    pub fn povm(&self) -> Result<DiscretePovm> {
        if let Some(config) = self.dst_config() {
            return dst_povm(&config?);
        }
        match *self {
            ProtocolSpec::DasArvind { epsilon } => discretize(&DaConfig::new(epsilon)?),
            ProtocolSpec::Mub => Ok(mub_povm()),
            ProtocolSpec::HaarOdop => {
                let mut rng = ChaCha8Rng::seed_from_u64(HAAR_POVM_SEED);
                haar_odop_povm(HAAR_POVM_BASES, &mut rng)
            }
            ProtocolSpec::Tetrahedron => Ok(tetrahedron_povm()),
            _ => unreachable!("DST handled above"),
        }
    }
}

/// Basis count of the fixed finite stand-in for the Haar-ODOP POVM.
pub const HAAR_POVM_BASES: usize = 10_000;
const HAAR_POVM_SEED: u64 = 0x5eed;

impl fmt::Display for ProtocolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.strength() {
            Some(s) => write!(f, "{}({s})", self.kind()),
            None => write!(f, "{}", self.kind()),
        }
    }
}
