//! Python bindings: protocols, POVMs, Cramér–Rao constants, Monte Carlo
//! curves, DST statistics and reconstruction, Das–Arvind basis distributions.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use weaktomo::dasarvind::{self, DaConfig};
use weaktomo::dst::{self, ConditionalStats, WeakMode};
use weaktomo::estimate::{run_experiment, ExperimentPlan};
use weaktomo::fisher::{self, CrbResult, SphereRule};
use weaktomo::povm::{random_odop_decomposition, DiscretePovm, OdopVerdict, PovmDocument};
use weaktomo::protocol::{ProtocolKind, ProtocolSpec};
use weaktomo::qcore::linalg::{qubit_components, CVector};
use weaktomo::qcore::{DensityOperator, PureState};
use weaktomo::Tolerances;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn pure_state(amplitudes: Vec<Complex64>) -> PyResult<PureState> {
    PureState::normalized(CVector::from_vec(amplitudes)).map_err(value_error)
}

fn parse_kind(name: &str) -> PyResult<ProtocolKind> {
    name.parse().map_err(value_error)
}

/// A measurement family with its strength (φ_c for DST, ε for Das–Arvind).
#[pyclass(name = "Protocol", module = "pyweaktomo", frozen)]
struct PyProtocol {
    spec: ProtocolSpec,
}

#[pymethods]
impl PyProtocol {
    #[new]
    #[pyo3(signature = (name, strength = None))]
    fn new(name: &str, strength: Option<f64>) -> PyResult<Self> {
        let kind = parse_kind(name)?;
        let spec = match (kind.has_strength(), strength) {
            (true, Some(s)) => kind.with_strength(s),
            (true, None) => return Err(value_error(format!("{kind} needs a strength"))),
            (false, _) => kind.with_strength(0.0),
        };
        spec.validate().map_err(value_error)?;
        Ok(Self { spec })
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.spec.kind().name()
    }

    #[getter]
    fn strength(&self) -> Option<f64> {
        self.spec.strength()
    }

    fn povm(&self, py: Python<'_>) -> PyResult<PyPovm> {
        let spec = self.spec;
        let inner = py.detach(|| spec.povm()).map_err(value_error)?;
        Ok(PyPovm { inner })
    }

    /// Cramér–Rao constant C on the default sphere rule.
    fn crb(&self, py: Python<'_>) -> PyResult<PyCrb> {
        let spec = self.spec;
        let result = py.detach(|| fisher::crb(&spec)).map_err(value_error)?;
        Ok(result.into())
    }

    /// Average infidelity curve as (N, mean infidelity, stderr) rows.
    #[pyo3(signature = (n_copies, seed, trials = 500, particles = 4000))]
    fn simulate(
        &self,
        py: Python<'_>,
        n_copies: u64,
        seed: u64,
        trials: usize,
        particles: usize,
    ) -> PyResult<Vec<(u64, f64, f64)>> {
        let plan = ExperimentPlan::new(self.spec, n_copies, seed)
            .with_trials(trials)
            .with_particles(particles);
        let curve = py.detach(|| run_experiment(&plan)).map_err(value_error)?;
        Ok(curve
            .points
            .iter()
            .map(|p| (p.n, p.mean_infidelity, p.stderr))
            .collect())
    }

    fn __repr__(&self) -> String {
        match self.spec.strength() {
            Some(s) => format!("Protocol('{}', {s})", self.spec.kind()),
            None => format!("Protocol('{}')", self.spec.kind()),
        }
    }
}

#[pyclass(name = "ValidationReport", module = "pyweaktomo", frozen, get_all)]
struct PyValidation {
    completeness_deficit: f64,
    positivity_violation: f64,
    hermiticity_defect: f64,
    passes: bool,
}

#[pyclass(name = "Povm", module = "pyweaktomo", frozen)]
struct PyPovm {
    inner: DiscretePovm,
}

#[pymethods]
impl PyPovm {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let doc: PovmDocument = serde_json::from_str(text).map_err(value_error)?;
        Ok(Self {
            inner: doc.into_povm().map_err(value_error)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Element labels as JSON strings.
    fn labels(&self) -> Vec<String> {
        self.inner
            .labels()
            .map(|l| serde_json::to_string(l).expect("serializable label"))
            .collect()
    }

    #[pyo3(signature = (completeness = 1e-10))]
    fn validate(&self, completeness: f64) -> PyValidation {
        let r = self
            .inner
            .validate(&Tolerances::DEFAULT.with_completeness(completeness));
        PyValidation {
            completeness_deficit: r.completeness_deficit,
            positivity_violation: r.positivity_violation,
            hermiticity_defect: r.hermiticity_defect,
            passes: r.passes,
        }
    }

    /// Qubit elements as (t, [vx, vy, vz]) with E = (t + v·σ)/2.
    fn bloch_effects(&self) -> PyResult<Vec<(f64, [f64; 3])>> {
        if self.inner.dim() != 2 {
            return Err(value_error("not a qubit POVM"));
        }
        Ok(self
            .inner
            .elements()
            .iter()
            .map(|e| qubit_components(&e.operator))
            .collect())
    }

    /// Outcome probabilities for a qubit Bloch vector.
    fn probabilities(&self, bloch: [f64; 3]) -> PyResult<Vec<f64>> {
        let rho = DensityOperator::from_bloch(bloch).map_err(value_error)?;
        self.inner.outcome_probabilities(&rho).map_err(value_error)
    }

    /// Random-ODOP verdict: (decomposable, bases found or unmatched count).
    #[pyo3(signature = (completeness = 1e-10))]
    fn odop(&self, completeness: f64) -> PyResult<(bool, usize)> {
        let tol = Tolerances::DEFAULT.with_completeness(completeness);
        match random_odop_decomposition(&self.inner, &tol).map_err(value_error)? {
            OdopVerdict::Decomposable(d) => Ok((true, d.pairs.len())),
            OdopVerdict::NotDecomposable { unmatched } => Ok((false, unmatched.len())),
        }
    }

    fn crb(&self, py: Python<'_>) -> PyResult<PyCrb> {
        let povm = &self.inner;
        let result = py
            .detach(|| fisher::crb_povm(povm, SphereRule::default()))
            .map_err(value_error)?;
        Ok(result.into())
    }

    fn __repr__(&self) -> String {
        format!("Povm(dim={}, elements={})", self.inner.dim(), self.inner.len())
    }
}

#[pyclass(name = "CrbResult", module = "pyweaktomo", frozen, get_all)]
struct PyCrb {
    c_value: f64,
    divergent: bool,
    certificate: Option<[f64; 3]>,
    integrand_max: f64,
    singular_nodes: usize,
}

impl From<CrbResult> for PyCrb {
    fn from(r: CrbResult) -> Self {
        Self {
            c_value: r.c_value,
            divergent: r.divergent,
            certificate: r.certificate,
            integrand_max: r.integrand_max,
            singular_nodes: r.singular_nodes,
        }
    }
}

#[pymethods]
impl PyCrb {
    fn __repr__(&self) -> String {
        format!("CrbResult(c_value={}, divergent={})", self.c_value, self.divergent)
    }
}

/// DST conditional statistics, tables indexed [n][m].
#[pyclass(name = "ConditionalStats", module = "pyweaktomo", frozen)]
struct PyStats {
    inner: ConditionalStats,
}

#[pymethods]
impl PyStats {
    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim
    }
    #[getter]
    fn phi_c(&self) -> f64 {
        self.inner.phi_c
    }
    #[getter]
    fn upsilon(&self) -> Option<f64> {
        self.inner.upsilon
    }
    #[getter]
    fn exp_x(&self) -> Vec<Vec<f64>> {
        self.inner.exp_x.clone()
    }
    #[getter]
    fn exp_y(&self) -> Vec<Vec<f64>> {
        self.inner.exp_y.clone()
    }
    #[getter]
    fn exp_z(&self) -> Vec<Vec<f64>> {
        self.inner.exp_z.clone()
    }
    #[getter]
    fn prob_cm(&self) -> Vec<Vec<f64>> {
        self.inner.prob_cm.clone()
    }
    #[getter]
    fn x_minus_joint(&self) -> Vec<Vec<f64>> {
        self.inner.x_minus_joint.clone()
    }
}

#[pyfunction]
fn conditional_stats(amplitudes: Vec<Complex64>, phi_c: f64) -> PyResult<PyStats> {
    let state = pure_state(amplitudes)?;
    let inner = dst::conditional_stats(&state, phi_c).map_err(value_error)?;
    Ok(PyStats { inner })
}

#[pyfunction]
fn reconstruct_exact_augmented(stats: &PyStats) -> PyResult<Vec<Complex64>> {
    let state = dst::reconstruct_exact_augmented(&stats.inner).map_err(value_error)?;
    Ok(state.amplitudes().iter().copied().collect())
}

/// Weak-limit reconstruction from the c_0 outcome or from all outcomes.
#[pyfunction]
#[pyo3(signature = (stats, all_outcomes = false))]
fn reconstruct_weak(stats: &PyStats, all_outcomes: bool) -> PyResult<Vec<Complex64>> {
    let mode = if all_outcomes {
        WeakMode::AllOutcomes
    } else {
        WeakMode::PostselectedC0
    };
    let state = dst::reconstruct_weak(&stats.inner, mode).map_err(value_error)?;
    Ok(state.amplitudes().iter().copied().collect())
}

/// |⟨a|b⟩|² for two (unnormalized) amplitude vectors.
#[pyfunction]
fn state_fidelity(a: Vec<Complex64>, b: Vec<Complex64>) -> PyResult<f64> {
    let (a, b) = (pure_state(a)?, pure_state(b)?);
    if a.dim() != b.dim() {
        return Err(value_error("dimension mismatch"));
    }
    Ok(a.inner(&b).norm_sqr())
}

/// C over a grid of strengths as (strength, C, divergent) rows.
#[pyfunction]
fn crb_scan(py: Python<'_>, protocol: &str, strengths: Vec<f64>) -> PyResult<Vec<(f64, f64, bool)>> {
    let kind = parse_kind(protocol)?;
    let scan = py
        .detach(|| fisher::scan_crb(kind, &strengths, SphereRule::default()))
        .map_err(value_error)?;
    Ok(scan
        .points
        .into_iter()
        .map(|(s, r)| (s, r.c_value, r.divergent))
        .collect())
}

/// Das–Arvind basis distribution folded to the +y hemisphere, with its
/// uniformity metric.
#[pyfunction]
#[pyo3(signature = (epsilon, nodes = 801, range_sd = DaConfig::DEFAULT_RANGE_SD))]
fn basis_distribution(
    py: Python<'_>,
    epsilon: f64,
    nodes: usize,
    range_sd: f64,
) -> PyResult<(Vec<([f64; 3], f64)>, f64)> {
    let config = DaConfig::with_grid(epsilon, nodes, range_sd).map_err(value_error)?;
    let (points, metric) = py
        .detach(|| {
            let points = dasarvind::basis_distribution(&config)?;
            let metric = dasarvind::uniformity_metric(&points)?;
            Ok::<_, weaktomo::Error>((points, metric))
        })
        .map_err(value_error)?;
    Ok((points.into_iter().map(|p| (p.n, p.weight)).collect(), metric))
}

#[pyfunction]
fn protocol_names() -> Vec<&'static str> {
    ProtocolKind::ALL.iter().map(|k| k.name()).collect()
}

#[pymodule]
fn pyweaktomo(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProtocol>()?;
    m.add_class::<PyPovm>()?;
    m.add_class::<PyValidation>()?;
    m.add_class::<PyCrb>()?;
    m.add_class::<PyStats>()?;
    m.add_function(wrap_pyfunction!(conditional_stats, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct_exact_augmented, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct_weak, m)?)?;
    m.add_function(wrap_pyfunction!(state_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(crb_scan, m)?)?;
    m.add_function(wrap_pyfunction!(basis_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(protocol_names, m)?)?;
    Ok(())
}
