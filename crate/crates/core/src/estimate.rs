//! Sequential Monte Carlo Bayesian estimation of pure qubit states and
//! average-fidelity experiments.
//!
//! Particles are stored as Bloch unit vectors. Every likelihood used here has
//! the form (t + v·r)/2, so a Bayes update is one dot product per particle.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, UnitSphere};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use nalgebra::{Matrix3, SymmetricEigen, Vector3};

use crate::dasarvind::sample_measurement;
use crate::error::{Error, Result};
use crate::povm::{DiscretePovm, Outcome};
use crate::protocol::ProtocolSpec;
use crate::qcore::linalg::{self, dot3, norm3};
use crate::qcore::{bloch_to_state, BlochAngles, DensityOperator, PureState};

pub const MIN_PARTICLES: usize = 100;
/// Liu–West shrinkage.
pub const LIU_WEST_A: f64 = 0.98;
/// Resample when the effective sample size drops below this fraction.
pub const RESAMPLE_THRESHOLD: f64 = 0.5;
/// Posterior mean Bloch norm below which the top eigenvalue is degenerate.
const DEGENERATE_MEAN: f64 = 1e-9;

/// Weighted pure-state particles representing a posterior.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleEnsemble {
    particles: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl ParticleEnsemble {
    /// Bloch unit vectors with nonnegative weights, renormalized to sum 1.
    pub fn new(particles: Vec<[f64; 3]>, weights: Vec<f64>) -> Result<Self> {
        if particles.len() < MIN_PARTICLES {
            return Err(Error::InvalidParameter(format!(
                "need at least {MIN_PARTICLES} particles, got {}",
                particles.len()
            )));
        }
        if weights.len() != particles.len() {
            return Err(Error::DimensionMismatch {
                expected: particles.len(),
                found: weights.len(),
            });
        }
        if let Some(r) = particles.iter().find(|r| (norm3(r) - 1.0).abs() > 1e-9) {
            return Err(Error::NotNormalized(norm3(r)));
        }
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidProbabilities("weights must be nonnegative".into()));
        }
        let mut ensemble = Self { particles, weights };
        ensemble.normalize()?;
        Ok(ensemble)
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn particles(&self) -> &[[f64; 3]] {
        &self.particles
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> Vec<PureState> {
        self.particles
            .iter()
            .map(|r| bloch_to_state(BlochAngles::from_vector(*r).expect("unit vector")))
            .collect()
    }

    /// 1/Σw².
    pub fn effective_sample_size(&self) -> f64 {
        1.0 / self.weights.iter().map(|w| w * w).sum::<f64>()
    }

    /// Σ w_i r_i.
    pub fn mean_bloch(&self) -> [f64; 3] {
        let mut m = [0.0; 3];
        for (r, w) in self.particles.iter().zip(&self.weights) {
            for k in 0..3 {
                m[k] += w * r[k];
            }
        }
        m
    }

    /// Posterior mean Σ w_i |ψ_i⟩⟨ψ_i| as a density operator.
    pub fn mean_state(&self) -> DensityOperator {
        let m = self.mean_bloch();
        let n = norm3(&m);
        let m = if n > 1.0 { m.map(|x| x / n) } else { m };
        DensityOperator::from_bloch(m).expect("mean of unit vectors lies in the ball")
    }

    fn normalize(&mut self) -> Result<()> {
        let total: f64 = self.weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::ZeroPosterior);
        }
        self.weights.iter_mut().for_each(|w| *w /= total);
        Ok(())
    }

    /// Multiply weights by (t + v·r)/2 and renormalize.
    pub fn update_with_effect(&mut self, t: f64, v: &[f64; 3]) -> Result<()> {
        for (r, w) in self.particles.iter().zip(self.weights.iter_mut()) {
            *w *= (0.5 * (t + dot3(v, r))).max(0.0);
        }
        self.normalize()
    }

    pub fn needs_resampling(&self) -> bool {
        self.effective_sample_size() < RESAMPLE_THRESHOLD * self.len() as f64
    }

    /// Resample if the effective sample size is below threshold.
    pub fn maybe_resample<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        if self.needs_resampling() {
            *self = resample(self, rng);
        }
    }
}

/// Haar-uniform particles with uniform weights.
pub fn init_prior<R: Rng + ?Sized>(n_particles: usize, rng: &mut R) -> Result<ParticleEnsemble> {
    let particles = (0..n_particles).map(|_| UnitSphere.sample(rng)).collect();
    ParticleEnsemble::new(particles, vec![1.0; n_particles])
}

/// Bayes rule for the element labeled `outcome`, followed by resampling when
/// the effective sample size falls below half the particle count.
pub fn bayes_update<R: Rng + ?Sized>(
    ensemble: &ParticleEnsemble,
    povm: &DiscretePovm,
    outcome: &Outcome,
    rng: &mut R,
) -> Result<ParticleEnsemble> {
    if povm.dim() != 2 {
        return Err(Error::NotQubit(povm.dim()));
    }
    let k = povm.position(outcome).ok_or(Error::UnknownOutcome)?;
    let (t, v) = linalg::qubit_components(&povm.elements()[k].operator);
    let mut next = ensemble.clone();
    next.update_with_effect(t, &v)?;
    next.maybe_resample(rng);
    Ok(next)
}

/// Liu–West kernel resampling.
///
/// Ancestors are drawn in proportion to weight, shrunk toward the posterior
/// mean by a, jittered with covariance (1 − a²)·Cov, and projected back onto
/// the unit sphere. Weights become uniform.
pub fn resample<R: Rng + ?Sized>(ensemble: &ParticleEnsemble, rng: &mut R) -> ParticleEnsemble {
    let a = LIU_WEST_A;
    let h = (1.0 - a * a).sqrt();
    let m = Vector3::from(ensemble.mean_bloch());
    let cov = ensemble
        .particles
        .iter()
        .zip(&ensemble.weights)
        .fold(Matrix3::zeros(), |acc, (r, w)| {
            let d = Vector3::from(*r) - m;
            acc + d * d.transpose() * *w
        });
    let eig = SymmetricEigen::new(cov);
    let root = eig.eigenvectors
        * Matrix3::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()))
        * eig.eigenvectors.transpose();

    let n = ensemble.len();
    let cumulative: Vec<f64> = ensemble
        .weights
        .iter()
        .scan(0.0, |acc, w| {
            *acc += w;
            Some(*acc)
        })
        .collect();
    let total = *cumulative.last().expect("nonempty ensemble");
    // Systematic resampling: one uniform offset, n evenly spaced pointers.
    let offset: f64 = rng.random();
    let mut ancestor = 0;
    let mut particles = Vec::with_capacity(n);
    for i in 0..n {
        let u = (i as f64 + offset) / n as f64 * total;
        while ancestor + 1 < n && cumulative[ancestor] <= u {
            ancestor += 1;
        }
        let r = Vector3::from(ensemble.particles[ancestor]);
        let z = Vector3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        let moved = a * r + (1.0 - a) * m + h * (root * z);
        let norm = moved.norm();
        let next = if norm > 1e-12 { moved / norm } else { r };
        particles.push([next[0], next[1], next[2]]);
    }
    ParticleEnsemble {
        particles,
        weights: vec![1.0 / n as f64; n],
    }
}

/// The pure state maximizing the posterior-expected fidelity.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub bloch: [f64; 3],
    /// The posterior mean has a degenerate top eigenvalue and `bloch` is the
    /// tie-break choice.
    pub degenerate: bool,
}

impl Estimate {
    pub fn state(&self) -> PureState {
        bloch_to_state(BlochAngles::from_vector(self.bloch).expect("unit vector"))
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::from_bloch(self.bloch).expect("unit vector")
    }

    /// ⟨ψ|ρ̂|ψ⟩ = (1 + r·r̂)/2 for a true state with Bloch vector r.
    pub fn fidelity(&self, r: &[f64; 3]) -> f64 {
        0.5 * (1.0 + dot3(r, &self.bloch))
    }
}

/// Top eigenvector of Σ w_i |ψ_i⟩⟨ψ_i|. For a qubit this is the direction of
/// the mean Bloch vector; when the mean vanishes every pure state ties and
/// the lexicographically largest Bloch vector, +x̂, is returned.
pub fn fidelity_optimal_estimate(ensemble: &ParticleEnsemble) -> Estimate {
    let m = ensemble.mean_bloch();
    let n = norm3(&m);
    if n <= DEGENERATE_MEAN {
        Estimate {
            bloch: [1.0, 0.0, 0.0],
            degenerate: true,
        }
    } else {
        Estimate {
            bloch: m.map(|x| x / n),
            degenerate: false,
        }
    }
}

/// N values 1, 2, 5, 10, 20, 50, … up to and including `n_copies`.
pub fn checkpoints(n_copies: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut decade = 1;
    'outer: loop {
        for m in [1, 2, 5] {
            let n = m * decade;
            if n > n_copies {
                break 'outer;
            }
            out.push(n);
        }
        decade *= 10;
    }
    if out.last() != Some(&n_copies) {
        out.push(n_copies);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub protocol: ProtocolSpec,
    pub n_copies: u64,
    pub n_trials: usize,
    pub n_particles: usize,
    pub seed: u64,
}

impl ExperimentPlan {
    pub const DEFAULT_PARTICLES: usize = 4000;
    pub const DEFAULT_TRIALS: usize = 500;

    pub fn new(protocol: ProtocolSpec, n_copies: u64, seed: u64) -> Self {
        Self {
            protocol,
            n_copies,
            n_trials: Self::DEFAULT_TRIALS,
            n_particles: Self::DEFAULT_PARTICLES,
            seed,
        }
    }

    pub fn with_trials(mut self, n_trials: usize) -> Self {
        self.n_trials = n_trials;
        self
    }

    pub fn with_particles(mut self, n_particles: usize) -> Self {
        self.n_particles = n_particles;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_copies == 0 {
            return Err(Error::InvalidParameter("n_copies must be at least 1".into()));
        }
        if self.n_trials == 0 {
            return Err(Error::InvalidParameter("n_trials must be at least 1".into()));
        }
        if self.n_particles < MIN_PARTICLES {
            return Err(Error::InvalidParameter(format!(
                "need at least {MIN_PARTICLES} particles"
            )));
        }
        self.protocol.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub n: u64,
    pub mean_infidelity: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfidelityCurve {
    pub protocol: ProtocolSpec,
    pub points: Vec<CurvePoint>,
}

/// How one copy is measured.
enum Simulator {
    /// Fixed POVM in Bloch form with its cumulative sampling order.
    Finite(Vec<(f64, [f64; 3])>),
    /// Fresh Haar-random basis per copy.
    HaarOdop,
    DasArvind(f64),
}

impl Simulator {
    fn new(protocol: &ProtocolSpec) -> Result<Self> {
        Ok(match *protocol {
            ProtocolSpec::HaarOdop => Simulator::HaarOdop,
            ProtocolSpec::DasArvind { epsilon } => Simulator::DasArvind(epsilon),
            _ => Simulator::Finite(
                protocol
                    .povm()?
                    .elements()
                    .iter()
                    .map(|e| linalg::qubit_components(&e.operator))
                    .filter(|(t, _)| *t > 0.0)
                    .collect(),
            ),
        })
    }

    /// Draw an outcome for true Bloch vector `r` and return its effect (t, v).
    fn measure<R: Rng + ?Sized>(
        &self,
        r: &[f64; 3],
        state: &PureState,
        rng: &mut R,
    ) -> Result<(f64, [f64; 3])> {
        match self {
            Simulator::Finite(effects) => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut last = effects[0];
                for &(t, v) in effects {
                    let p = (0.5 * (t + dot3(&v, r))).max(0.0);
                    if p > 0.0 {
                        last = (t, v);
                    }
                    acc += p;
                    if u < acc {
                        return Ok((t, v));
                    }
                }
                Ok(last)
            }
            Simulator::HaarOdop => {
                let axis: [f64; 3] = UnitSphere.sample(rng);
                let up = 0.5 * (1.0 + dot3(&axis, r));
                let v = if rng.random::<f64>() < up {
                    axis
                } else {
                    axis.map(|x| -x)
                };
                Ok((1.0, v))
            }
            Simulator::DasArvind(epsilon) => {
                let outcome = sample_measurement(state, *epsilon, rng)?;
                // G(q1, q2) is common to all particles and drops out.
                Ok((1.0, outcome.density(*epsilon)?.direction(outcome.sign)))
            }
        }
    }
}

/// Generator for one trial: the plan seed with the trial index as stream.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn run_trial(
    plan: &ExperimentPlan,
    simulator: &Simulator,
    marks: &[u64],
    trial: usize,
) -> Result<Vec<f64>> {
    let mut rng = trial_rng(plan.seed, trial);
    let r_true: [f64; 3] = UnitSphere.sample(&mut rng);
    let state = bloch_to_state(BlochAngles::from_vector(r_true)?);
    let mut ensemble = init_prior(plan.n_particles, &mut rng)?;
    let mut out = Vec::with_capacity(marks.len());
    let mut next_mark = 0;
    for n in 1..=plan.n_copies {
        let (t, v) = simulator.measure(&r_true, &state, &mut rng)?;
        ensemble.update_with_effect(t, &v)?;
        ensemble.maybe_resample(&mut rng);
        if marks.get(next_mark) == Some(&n) {
            let estimate = fidelity_optimal_estimate(&ensemble);
            out.push(1.0 - estimate.fidelity(&r_true));
            next_mark += 1;
        }
    }
    Ok(out)
}

/// Trial-averaged infidelity 1 − f(true, estimate) at logarithmic N
/// checkpoints, true states drawn from the Haar prior per trial.
///
/// Trials run in parallel but each owns a generator derived from
/// (seed, trial) and results are reduced in trial order, so the curve depends
/// only on the plan.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<InfidelityCurve> {
    plan.validate()?;
    let simulator = Simulator::new(&plan.protocol)?;
    let marks = checkpoints(plan.n_copies);
    let trials: Vec<Vec<f64>> = (0..plan.n_trials)
        .into_par_iter()
        .map(|trial| run_trial(plan, &simulator, &marks, trial))
        .collect::<Result<_>>()?;
    let count = trials.len() as f64;
    let points = marks
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let mean = trials.iter().map(|t| t[k]).sum::<f64>() / count;
            let var = if trials.len() > 1 {
                trials.iter().map(|t| (t[k] - mean).powi(2)).sum::<f64>() / (count - 1.0)
            } else {
                0.0
            };
            CurvePoint {
                n,
                mean_infidelity: mean,
                stderr: (var / count).sqrt(),
            }
        })
        .collect();
    Ok(InfidelityCurve {
        protocol: plan.protocol,
        points,
    })
}
