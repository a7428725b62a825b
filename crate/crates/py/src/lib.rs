//! Python bindings: Pauli strings, gate networks, Hamiltonians, density
//! states and the one-clean-qubit estimators.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use dqc::circuit::{self, GateNetwork, PauliSum};
use dqc::dense::Matrix;
use dqc::measure::{Estimate, EstimationBudget, MeterMode, NoisyMeter};
use dqc::oracle_lab::{self, SweepConfig};
use dqc::pauli::PauliString;
use dqc::protocols;
use dqc::spectroscopy::{self, SpectrumEstimate, TimeSample, Window};
use dqc::state::{self, DensityState};
use dqc::Error;
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Invariant(_) | Error::NotUnitary(_) | Error::NotDeterministic(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for dqc::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn rows(m: &Matrix) -> Vec<Vec<Complex64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

fn pauli(s: &str) -> PyResult<PauliString> {
    s.parse().py()
}

#[pyclass(name = "PauliString", module = "dqc", skip_from_py_object, frozen, eq)]
#[derive(Clone, PartialEq)]
struct PyPauliString(PauliString);

#[pymethods]
impl PyPauliString {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        pauli(text).map(Self)
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.0.num_qubits()
    }

    #[getter]
    fn weight(&self) -> usize {
        self.0.weight()
    }

    /// Returns `(phase, string)` with `self * other = phase * string`.
    fn mul(&self, other: &Self) -> PyResult<(Complex64, Self)> {
        let p = self.0.mul(&other.0).py()?;
        Ok((p.phase.to_complex(), Self(p.string)))
    }

    fn commutes(&self, other: &Self) -> PyResult<bool> {
        self.0.commutes(&other.0).py()
    }

    fn matrix(&self) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(rows(&self.0.matrix().py()?))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("PauliString('{}')", self.0)
    }

    fn __hash__(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.0.hash(&mut h);
        h.finish()
    }
}

/// A sequence of Pauli rotations `exp(-i theta sigma)`, optionally
/// conditioned on one control qubit.
#[pyclass(name = "GateNetwork", module = "dqc", skip_from_py_object)]
#[derive(Clone)]
struct PyGateNetwork(GateNetwork);

#[pymethods]
impl PyGateNetwork {
    #[new]
    fn new(num_qubits: usize) -> Self {
        Self(GateNetwork::new(num_qubits))
    }

    #[staticmethod]
    #[pyo3(signature = (text, qubits=None))]
    fn parse(text: &str, qubits: Option<usize>) -> PyResult<Self> {
        circuit::parse_circuit(text, qubits).py().map(Self)
    }

    fn to_text(&self) -> String {
        circuit::write_circuit(&self.0)
    }

    fn rotate(&mut self, axis: &str, angle: f64) -> PyResult<()> {
        self.0.rotate(pauli(axis)?, angle).py().map(drop)
    }

    /// Rotation applied when qubit `control` reads `value`.
    fn controlled_rotate(&mut self, control: usize, value: bool, axis: &str, angle: f64) -> PyResult<()> {
        self.0
            .controlled_rotate(control, value, pauli(axis)?, angle)
            .py()
            .map(drop)
    }

    fn add_global_phase(&mut self, phi: f64) {
        self.0.add_global_phase(phi);
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.0.num_qubits()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn inverse(&self) -> Self {
        Self(self.0.inverse())
    }

    fn power(&self, k: usize) -> Self {
        Self(self.0.power(k))
    }

    fn then(&self, other: &Self) -> PyResult<Self> {
        self.0.clone().then(&other.0).py().map(Self)
    }

    fn unitary(&self) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(rows(&self.0.unitary().py()?))
    }

    /// Sorted eigenphases in `(-pi, pi]`.
    fn eigenphases(&self) -> PyResult<Vec<f64>> {
        spectroscopy::eigenphases(&self.0).py()
    }

    fn __repr__(&self) -> String {
        format!("GateNetwork(num_qubits={}, gates={})", self.0.num_qubits(), self.0.len())
    }
}

#[pyclass(name = "Hamiltonian", module = "dqc", skip_from_py_object)]
#[derive(Clone)]
struct PyHamiltonian(PauliSum);

#[pymethods]
impl PyHamiltonian {
    #[new]
    fn new(num_qubits: usize) -> Self {
        Self(PauliSum::new(num_qubits))
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        circuit::parse_hamiltonian(text).py().map(Self)
    }

    fn to_text(&self) -> String {
        circuit::write_hamiltonian(&self.0)
    }

    fn add_term(&mut self, coefficient: f64, string: &str) -> PyResult<()> {
        self.0.add_term(coefficient, pauli(string)?).py()
    }

    fn terms(&self) -> Vec<(f64, String)> {
        self.0.terms().iter().map(|(c, s)| (*c, s.to_string())).collect()
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.0.num_qubits()
    }

    fn norm_bound(&self) -> f64 {
        self.0.norm_bound()
    }

    fn eigenvalues(&self) -> PyResult<Vec<f64>> {
        state::eigen_spectrum(&self.0).py()
    }

    fn trotterize(&self, t: f64, steps: usize) -> PyResult<PyGateNetwork> {
        circuit::trotterize(&self.0, t, steps).py().map(PyGateNetwork)
    }

    /// Operator-norm distance between the Trotter product and `exp(-iHt)`.
    fn trotter_error(&self, t: f64, steps: usize) -> PyResult<f64> {
        circuit::trotter_error(&self.0, t, steps).py()
    }
}

#[pyclass(name = "DensityState", module = "dqc", skip_from_py_object)]
#[derive(Clone)]
struct PyDensityState(DensityState);

#[pymethods]
impl PyDensityState {
    /// `(|0><0| (x) I) / 2^{n-1}`: one clean qubit, the rest maximally mixed.
    #[staticmethod]
    fn dqc1(num_qubits: usize) -> PyResult<Self> {
        DensityState::init_dqc1(num_qubits).py().map(Self)
    }

    #[staticmethod]
    fn dqcp(num_qubits: usize) -> PyResult<Self> {
        DensityState::init_dqcp(num_qubits).py().map(Self)
    }

    #[staticmethod]
    fn maximally_mixed(num_qubits: usize) -> PyResult<Self> {
        DensityState::maximally_mixed(num_qubits).py().map(Self)
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.0.num_qubits()
    }

    fn apply(&self, network: &PyGateNetwork) -> PyResult<Self> {
        self.0.apply_network(&network.0).py().map(Self)
    }

    fn expectation(&self, op: &str) -> PyResult<f64> {
        self.0.expectation(&pauli(op)?).py()
    }

    fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    fn eigenvalues(&self) -> Vec<f64> {
        self.0.eigenvalues()
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        rows(self.0.matrix())
    }
}

/// Sampling settings shared by the estimators.
#[pyclass(name = "Meter", module = "dqc")]
struct PyMeter {
    meter: NoisyMeter,
    budget: EstimationBudget,
}

#[pymethods]
impl PyMeter {
    #[new]
    #[pyo3(signature = (mode="projective", variance=1.0, seed=0, epsilon=0.05, fail_prob=0.01))]
    fn new(mode: &str, variance: f64, seed: u64, epsilon: f64, fail_prob: f64) -> PyResult<Self> {
        let mode: MeterMode = mode.parse().py()?;
        Ok(Self {
            meter: NoisyMeter::new(mode, variance, seed).py()?,
            budget: EstimationBudget::new(epsilon, fail_prob).py()?,
        })
    }

    /// Repetitions spent on one estimate.
    fn repetitions(&self) -> u64 {
        self.budget.repetitions(self.meter.variance_bound())
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.meter.seed()
    }
}

fn estimate_dict<'py>(py: Python<'py>, e: &Estimate) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("value", e.value)?;
    d.set_item("stderr", e.stderr)?;
    d.set_item("shots", e.shots)?;
    Ok(d)
}

/// Samples `tr(sigma_a U sigma_b U^dagger) / 2^n` with one clean qubit.
#[pyfunction]
fn trace_pair<'py>(
    py: Python<'py>,
    network: &PyGateNetwork,
    a: &str,
    b: &str,
    meter: &mut PyMeter,
) -> PyResult<Bound<'py, PyDict>> {
    let (a, b) = (pauli(a)?, pauli(b)?);
    let e = protocols::dqc1_pauli_pair(&network.0, &a, &b, &mut meter.meter, &meter.budget).py()?;
    let d = estimate_dict(py, &e)?;
    d.set_item("exact", protocols::pauli_pair_exact(&network.0, &a, &b).py()?)?;
    Ok(d)
}

/// Samples the coefficient `tr(sigma_b U) / 2^n`.
#[pyfunction]
fn pauli_coefficient<'py>(
    py: Python<'py>,
    network: &PyGateNetwork,
    b: &str,
    meter: &mut PyMeter,
) -> PyResult<Bound<'py, PyDict>> {
    let b = pauli(b)?;
    let c = protocols::estimate_pauli_coefficient(&network.0, &b, &mut meter.meter, &meter.budget)
        .py()?;
    let d = PyDict::new(py);
    d.set_item("value", c.value)?;
    d.set_item("stderr", c.stderr)?;
    d.set_item("shots", c.shots)?;
    d.set_item("exact", protocols::pauli_coefficient_exact(&network.0, &b).py()?)?;
    Ok(d)
}

/// Samples `<a|U|b>` for basis labels such as `"0110"`.
#[pyfunction]
fn matrix_element<'py>(
    py: Python<'py>,
    network: &PyGateNetwork,
    a: &str,
    b: &str,
    meter: &mut PyMeter,
) -> PyResult<Bound<'py, PyDict>> {
    let n = network.0.num_qubits();
    let (na, ia) = protocols::parse_basis(a).py()?;
    let (nb, ib) = protocols::parse_basis(b).py()?;
    if na != n || nb != n {
        return Err(PyValueError::new_err(format!(
            "basis labels need {n} bits"
        )));
    }
    let e = protocols::dqcp_matrix_element(&network.0, ia, ib, &mut meter.meter, &meter.budget)
        .py()?;
    let d = PyDict::new(py);
    d.set_item("value", e.value)?;
    d.set_item("stderr_re", e.stderr_re)?;
    d.set_item("stderr_im", e.stderr_im)?;
    d.set_item("shots", e.shots)?;
    d.set_item("exact", network.0.unitary().py()?[(ia, ib)])?;
    Ok(d)
}

/// Reads the answer bit `<0|U^dagger Z_1 U|0>` through a pseudo-pure state.
#[pyfunction]
fn pseudo_pure<'py>(
    py: Python<'py>,
    network: &PyGateNetwork,
    meter: &mut PyMeter,
) -> PyResult<Bound<'py, PyDict>> {
    let r = protocols::pseudo_pure_answer(&network.0, &mut meter.meter, &meter.budget).py()?;
    let d = PyDict::new(py);
    d.set_item("signal", estimate_dict(py, &r.signal)?)?;
    d.set_item("signal_exact", r.signal_exact)?;
    d.set_item("scale", r.scale)?;
    d.set_item("alpha", r.alpha)?;
    d.set_item("alpha_stderr", r.alpha_stderr)?;
    d.set_item("alpha_exact", r.alpha_exact)?;
    d.set_item("sign_shots", r.sign_shots)?;
    Ok(d)
}

fn spectrum_dict<'py>(py: Python<'py>, s: &SpectrumEstimate) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("frequencies", s.frequencies.clone())?;
    d.set_item("density", s.density.clone())?;
    d.set_item("resolution", s.resolution)?;
    d.set_item("density_stderr", s.density_stderr)?;
    let peaks: Vec<(f64, f64, f64)> = s
        .peaks()
        .iter()
        .map(|p| (p.frequency, p.height, p.intensity))
        .collect();
    d.set_item("peaks", peaks)?;
    Ok(d)
}

fn fft(samples: &[TimeSample], window: &str) -> PyResult<SpectrumEstimate> {
    let w: Window = window.parse().py()?;
    spectroscopy::spectrum_fft(samples, w).py()
}

/// Broadened spectrum of `H` from `npoints` samples of `f(k dt)`.
///
/// The returned dict holds `frequencies`, `density`, `resolution`,
/// `density_stderr` and `peaks` as `(frequency, height, intensity)` tuples.
#[pyfunction]
#[pyo3(signature = (hamiltonian, dt, npoints, meter, trotter_steps=1, window="hann"))]
fn spectrum<'py>(
    py: Python<'py>,
    hamiltonian: &PyHamiltonian,
    dt: f64,
    npoints: usize,
    meter: &mut PyMeter,
    trotter_steps: usize,
    window: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let samples = spectroscopy::sample_f_grid(
        &hamiltonian.0,
        dt,
        npoints,
        trotter_steps,
        &mut meter.meter,
        &meter.budget,
    )
    .py()?;
    spectrum_dict(py, &fft(&samples, window)?)
}

/// Broadened eigenphase spectrum of `W` from the traces of `W^k`.
#[pyfunction]
#[pyo3(signature = (network, npoints, meter, window="hann"))]
fn unitary_spectrum<'py>(
    py: Python<'py>,
    network: &PyGateNetwork,
    npoints: usize,
    meter: &mut PyMeter,
    window: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let samples =
        spectroscopy::sample_f_unitary_grid(&network.0, npoints, &mut meter.meter, &meter.budget)
            .py()?;
    spectrum_dict(py, &fft(&samples, window)?)
}

/// Worst `|v(U') - v(U)|` against `4r/2^n` over random oracles and algorithms.
#[pyfunction]
#[pyo3(signature = (ns, rs, ancillas, trials=200, seed=0, layer_gates=oracle_lab::DEFAULT_LAYER_GATES))]
fn separation_sweep<'py>(
    py: Python<'py>,
    ns: Vec<usize>,
    rs: Vec<usize>,
    ancillas: Vec<usize>,
    trials: usize,
    seed: u64,
    layer_gates: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let cfg = SweepConfig {
        ns,
        rs,
        ancillas,
        trials,
        seed,
        layer_gates,
    };
    let rows = py.detach(|| oracle_lab::separation_sweep(&cfg)).py()?;
    rows.iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("n", r.n)?;
            d.set_item("r", r.r)?;
            d.set_item("m", r.m)?;
            d.set_item("bound", r.bound)?;
            d.set_item("observed_max", r.observed_max)?;
            d.set_item("violations", r.violations)?;
            d.set_item("trials", r.trials)?;
            Ok(d)
        })
        .collect()
}

#[pymodule(name = "dqc")]
fn dqc_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPauliString>()?;
    m.add_class::<PyGateNetwork>()?;
    m.add_class::<PyHamiltonian>()?;
    m.add_class::<PyDensityState>()?;
    m.add_class::<PyMeter>()?;
    m.add_function(wrap_pyfunction!(trace_pair, m)?)?;
    m.add_function(wrap_pyfunction!(pauli_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(matrix_element, m)?)?;
    m.add_function(wrap_pyfunction!(pseudo_pure, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(unitary_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(separation_sweep, m)?)?;
    Ok(())
}
