//! The Das–Arvind protocol: two Gaussian meters couple weakly to σz and then
//! σx of a qubit, after which σy is measured projectively.
//!
//! The continuous POVM is dE_± = dq1 dq2 G(q1,q2) (1 + n̂_±·σ)/2, which is
//! discretized here by tensor Gauss–Legendre quadrature.

mod hemisphere;
mod sample;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::povm::{
    pauli_projectors, DiscretePovm, KrausFactor, MeterAxis, Outcome, PovmElement, Sign,
};
use crate::povm::compose_kraus;
use crate::qcore::linalg::{self, c, CMatrix};
use crate::quadrature::symmetric_rule;
use crate::tolerance::Tolerances;

pub use hemisphere::{
    basis_distribution, fold_to_positive_y, hemisphere_cell, uniformity_metric, BlochPoint,
    HEMISPHERE_CELLS,
};
pub use sample::{sample_measurement, DaOutcome};

/// Completeness deficit above which a grid is rejected outright.
pub const GRID_REJECT_DEFICIT: f64 = 1e-4;
/// Completeness the discretized POVM is expected to reach.
pub const GRID_COMPLETENESS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DaConfig {
    /// ε = 1/Δq², the inverse meter variance.
    pub epsilon: f64,
    /// Gauss–Legendre nodes per meter axis.
    pub nodes: usize,
    /// Half-width of the integration range in units of 1/√ε.
    pub range_sd: f64,
}

impl DaConfig {
    pub const DEFAULT_NODES: usize = 41;
    pub const DEFAULT_RANGE_SD: f64 = 8.0;

    pub fn new(epsilon: f64) -> Result<Self> {
        Self::with_grid(epsilon, Self::DEFAULT_NODES, Self::DEFAULT_RANGE_SD)
    }

    pub fn with_grid(epsilon: f64, nodes: usize, range_sd: f64) -> Result<Self> {
        let config = Self {
            epsilon,
            nodes,
            range_sd,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        check_epsilon(self.epsilon)?;
        if self.nodes < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 nodes per axis, got {}",
                self.nodes
            )));
        }
        if !(self.range_sd > 0.0 && self.range_sd.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "range {} must be positive",
                self.range_sd
            )));
        }
        Ok(())
    }

    /// Integration range |q| ≤ range_sd/√ε.
    pub fn half_width(&self) -> f64 {
        self.range_sd / self.epsilon.sqrt()
    }

    /// (q, weight) pairs of the per-axis rule.
    pub fn rule(&self) -> Result<Vec<(f64, f64)>> {
        self.validate()?;
        symmetric_rule(self.nodes, self.half_width())
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "ε must be positive, got {epsilon}"
        )));
    }
    Ok(())
}

/// K(q)/√dq = (ε/2π)^{1/4} e^{−ε(q²+1)/4} (cosh(εq/2) + σ_j sinh(εq/2)).
pub fn meter_kraus(axis: MeterAxis, q: f64, epsilon: f64) -> Result<CMatrix> {
    check_epsilon(epsilon)?;
    let sigma = linalg::paulis()[axis.index()].clone();
    let scale = (epsilon / (2.0 * std::f64::consts::PI)).powf(0.25)
        * (-epsilon * (q * q + 1.0) / 4.0).exp();
    let h = epsilon * q / 2.0;
    Ok((CMatrix::identity(2, 2) * c(h.cosh(), 0.0) + sigma * c(h.sinh(), 0.0)) * c(scale, 0.0))
}

/// Quadrature-weighted Kraus factors of one meter, labeled by node index.
pub fn meter_stage(axis: MeterAxis, config: &DaConfig) -> Result<Vec<KrausFactor>> {
    config
        .rule()?
        .into_iter()
        .enumerate()
        .map(|(index, (q, w))| {
            Ok(KrausFactor::new(
                meter_kraus(axis, q, config.epsilon)?,
                Outcome::Index { index },
            )
            .with_weight(w))
        })
        .collect()
}

/// G and n̂_± at one meter-outcome pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PovmDensitySample {
    pub q1: f64,
    pub q2: f64,
    pub g: f64,
    pub n_plus: [f64; 3],
    pub n_minus: [f64; 3],
}

impl PovmDensitySample {
    pub fn direction(&self, sign: Sign) -> [f64; 3] {
        match sign {
            Sign::Plus => self.n_plus,
            Sign::Minus => self.n_minus,
        }
    }
}

/// G = (ε/2π) e^{−ε(q1²+q2²+2)/2} cosh εq1 cosh εq2 and
/// n̂_± = (x̂ sinh εq2 ± ŷ + ẑ sinh εq1 cosh εq2)/(cosh εq1 cosh εq2).
pub fn povm_density(q1: f64, q2: f64, epsilon: f64) -> Result<PovmDensitySample> {
    check_epsilon(epsilon)?;
    let (a, b) = (epsilon * q1, epsilon * q2);
    let g = epsilon / (2.0 * std::f64::consts::PI)
        * (-epsilon * (q1 * q1 + q2 * q2 + 2.0) / 2.0).exp()
        * a.cosh()
        * b.cosh();
    let nx = b.tanh() / a.cosh();
    let ny = 1.0 / (a.cosh() * b.cosh());
    let nz = a.tanh();
    Ok(PovmDensitySample {
        q1,
        q2,
        g,
        n_plus: [nx, ny, nz],
        n_minus: [nx, -ny, nz],
    })
}

/// Tensor-quadrature POVM with elements ordered (i1, i2, +/−).
///
/// Rejects the grid with [`Error::GridTooCoarse`] when the completeness
/// deficit exceeds [`GRID_REJECT_DEFICIT`].
pub fn discretize(config: &DaConfig) -> Result<DiscretePovm> {
    let rule = config.rule()?;
    let mut elements = Vec::with_capacity(2 * rule.len() * rule.len());
    for (i1, &(q1, w1)) in rule.iter().enumerate() {
        for (i2, &(q2, w2)) in rule.iter().enumerate() {
            let s = povm_density(q1, q2, config.epsilon)?;
            let t = s.g * w1 * w2;
            for sign in Sign::BOTH {
                let n = s.direction(sign);
                elements.push(PovmElement::new(
                    Outcome::DasArvind { i1, i2, sign },
                    linalg::qubit_operator(t, [t * n[0], t * n[1], t * n[2]]),
                ));
            }
        }
    }
    let povm = DiscretePovm::new(elements)?;
    let report = povm.validate(&Tolerances::DEFAULT.with_completeness(GRID_REJECT_DEFICIT));
    if report.completeness_deficit > GRID_REJECT_DEFICIT {
        return Err(Error::GridTooCoarse(report.completeness_deficit));
    }
    if !report.passes {
        return Err(Error::InvalidPovm {
            completeness_deficit: report.completeness_deficit,
            positivity_violation: report.positivity_violation,
        });
    }
    Ok(povm)
}

/// The same quadrature built by composing z-meter, x-meter and σy-projector
/// Kraus operators. Used to cross-check [`discretize`].
pub fn discretize_from_kraus(config: &DaConfig) -> Result<DiscretePovm> {
    let y = pauli_projectors(MeterAxis::Y)
        .elements()
        .iter()
        .map(|e| KrausFactor::new(e.operator.clone(), e.label.clone()))
        .collect();
    let stages = [
        meter_stage(MeterAxis::Z, config)?,
        meter_stage(MeterAxis::X, config)?,
        y,
    ];
    compose_kraus(
        &stages,
        &Tolerances::DEFAULT.with_completeness(GRID_REJECT_DEFICIT),
    )
}
