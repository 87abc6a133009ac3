use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeterAxis {
    X,
    Y,
    Z,
}

impl MeterAxis {
    pub const ALL: [MeterAxis; 3] = [MeterAxis::X, MeterAxis::Y, MeterAxis::Z];

    pub fn index(self) -> usize {
        match self {
            MeterAxis::X => 0,
            MeterAxis::Y => 1,
            MeterAxis::Z => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Structured outcome tag carried by POVM elements and Kraus factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    /// Plain enumerated outcome.
    Index { index: usize },
    /// Element `index` of measurement basis `basis` in a random ODOP.
    Projector { basis: usize, index: usize },
    /// Qubit projector onto the ± eigenstate of a Pauli axis.
    Pauli { axis: MeterAxis, sign: Sign },
    /// DST: coupled to |n⟩, meter measured along `axis` with result `sign`,
    /// system found in |c_m⟩.
    Dst {
        n: usize,
        axis: MeterAxis,
        sign: Sign,
        m: usize,
    },
    /// DST coupling to |n⟩ with meter result only (first Kraus stage).
    Meter { n: usize, axis: MeterAxis, sign: Sign },
    /// Conjugate-basis outcome c_m.
    Conjugate { m: usize },
    /// Everything dropped by postselection, merged into one element.
    Discard,
    /// Das–Arvind quadrature cell (i1, i2) with final σy result `sign`.
    DasArvind { i1: usize, i2: usize, sign: Sign },
    /// Composite label produced by Kraus composition, first stage first.
    Path { steps: Vec<Outcome> },
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |sign: &Sign| match sign {
            Sign::Plus => '+',
            Sign::Minus => '-',
        };
        let a = |axis: &MeterAxis| match axis {
            MeterAxis::X => 'x',
            MeterAxis::Y => 'y',
            MeterAxis::Z => 'z',
        };
        match self {
            Outcome::Index { index } => write!(f, "#{index}"),
            Outcome::Projector { basis, index } => write!(f, "basis {basis} / {index}"),
            Outcome::Pauli { axis, sign } => write!(f, "{}{}", s(sign), a(axis)),
            Outcome::Dst { n, axis, sign, m } => {
                write!(f, "n={n} {}{} c{m}", s(sign), a(axis))
            }
            Outcome::Meter { n, axis, sign } => write!(f, "n={n} {}{}", s(sign), a(axis)),
            Outcome::Conjugate { m } => write!(f, "c{m}"),
            Outcome::Discard => write!(f, "discard"),
            Outcome::DasArvind { i1, i2, sign } => write!(f, "q[{i1},{i2}] {}y", s(sign)),
            Outcome::Path { steps } => {
                for (k, step) in steps.iter().enumerate() {
                    if k > 0 {
                        write!(f, " -> ")?;
                    }
                    write!(f, "{step}")?;
                }
                Ok(())
            }
        }
    }
}
