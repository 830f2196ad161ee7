//! Python bindings for the bihsc toolkit: parameters and spectrum,
//! coefficient states, observability diagnostics and null-control
//! synthesis, mirroring the Rust API one-to-one.

use bihsc::control::{self, ControlReport};
use bihsc::evolution;
use bihsc::hilbert::ThetaWeight;
use bihsc::observability;
use bihsc::spectrum::{self, MediumParams, DEFAULT_INT_TOL};
use bihsc::{CoeffState, ControlSignal};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: bihsc::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Physical configuration (gamma < 0, interval length) plus the spectral
/// operations defined on it.
#[pyclass(name = "Params", module = "bihsc_py", skip_from_py_object)]
#[derive(Clone)]
struct PyParams {
    inner: MediumParams,
}

#[pymethods]
impl PyParams {
    #[new]
    fn new(gamma: f64, ell: f64) -> PyResult<Self> {
        Ok(Self {
            inner: MediumParams::new(gamma, ell).map_err(err)?,
        })
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma()
    }

    #[getter]
    fn ell(&self) -> f64 {
        self.inner.ell()
    }

    #[getter]
    fn n0(&self) -> usize {
        self.inner.n0()
    }

    #[getter]
    fn spectral_floor(&self) -> f64 {
        self.inner.spectral_floor()
    }

    fn eigenvalue(&self, n: usize) -> PyResult<f64> {
        if n == 0 {
            return Err(PyValueError::new_err("mode indices are 1-based"));
        }
        Ok(self.inner.eigenvalue(n))
    }

    fn trace0(&self, n: usize) -> f64 {
        self.inner.trace0(n)
    }

    fn characteristic_residual(&self, lam: f64) -> PyResult<f64> {
        self.inner.characteristic_residual(lam).map_err(err)
    }

    /// Spectrum points found by bisection on the characteristic equation,
    /// independent of the closed form (resonant values appear twice).
    fn characteristic_roots(&self, count: usize) -> Vec<f64> {
        self.inner.characteristic_roots(count)
    }

    fn spectral_gap_floor(&self, n_max: usize) -> PyResult<f64> {
        if n_max <= self.inner.n0() {
            return Err(PyValueError::new_err("need n_max > n0"));
        }
        Ok(self.inner.spectral_gap_floor(n_max))
    }

    fn trace_ratio(&self, n: usize) -> PyResult<f64> {
        self.inner.trace_ratio(n).map_err(err)
    }

    fn upper_density_estimate(&self, r: f64, n_modes: usize) -> PyResult<f64> {
        self.inner.upper_density_estimate(r, n_modes).map_err(err)
    }

    #[pyo3(signature = (int_tol = DEFAULT_INT_TOL))]
    fn resonance(&self, int_tol: f64) -> PyResonance {
        PyResonance {
            inner: self.inner.resonance_check(int_tol),
        }
    }

    #[pyo3(signature = (n_modes, int_tol = DEFAULT_INT_TOL))]
    fn modes(&self, n_modes: usize, int_tol: f64) -> Vec<PyMode> {
        self.inner
            .enumerate_modes(n_modes, int_tol)
            .into_iter()
            .map(|m| PyMode { inner: m })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Params(gamma={}, ell={}, n0={})",
            self.inner.gamma(),
            self.inner.ell(),
            self.inner.n0()
        )
    }
}

/// One spectral line.
#[pyclass(name = "Mode", module = "bihsc_py", skip_from_py_object)]
#[derive(Clone)]
struct PyMode {
    inner: spectrum::Mode,
}

#[pymethods]
impl PyMode {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn wavenumber(&self) -> f64 {
        self.inner.wavenumber
    }

    #[getter]
    fn eigenvalue(&self) -> f64 {
        self.inner.lambda
    }

    #[getter]
    fn trace0(&self) -> f64 {
        self.inner.trace0
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind.as_str()
    }

    #[getter]
    fn partner(&self) -> Option<usize> {
        self.inner.partner
    }

    fn __repr__(&self) -> String {
        format!(
            "Mode(n={}, eigenvalue={}, kind={})",
            self.inner.n,
            self.inner.lambda,
            self.inner.kind.as_str()
        )
    }
}

/// Outcome of the integer resonance scan.
#[pyclass(name = "Resonance", module = "bihsc_py", skip_from_py_object)]
#[derive(Clone)]
struct PyResonance {
    inner: spectrum::ResonanceInfo,
}

#[pymethods]
impl PyResonance {
    #[getter]
    fn resonant(&self) -> bool {
        self.inner.resonant
    }

    #[getter]
    fn pairs(&self) -> Vec<(usize, usize)> {
        self.inner.pairs.clone()
    }

    #[getter]
    fn zero_mode(&self) -> Option<usize> {
        self.inner.zero_mode
    }

    #[getter]
    fn s_value(&self) -> f64 {
        self.inner.s_value
    }

    #[getter]
    fn exact(&self) -> bool {
        self.inner.is_exact()
    }

    fn __repr__(&self) -> String {
        format!(
            "Resonance(resonant={}, pairs={:?}, zero_mode={:?})",
            self.inner.resonant, self.inner.pairs, self.inner.zero_mode
        )
    }
}

/// A finite coefficient vector against the eigenbasis.
#[pyclass(name = "State", module = "bihsc_py", skip_from_py_object)]
#[derive(Clone)]
struct PyState {
    inner: CoeffState,
}

#[pymethods]
impl PyState {
    /// Coefficients indexed by mode number 1..=n_modes.
    #[staticmethod]
    fn from_coefficients(params: &PyParams, n_modes: usize, coeffs: Vec<Complex64>) -> PyResult<Self> {
        Ok(Self {
            inner: CoeffState::from_coefficients(params.inner, n_modes, &coeffs).map_err(err)?,
        })
    }

    #[staticmethod]
    fn zeros(params: &PyParams, n_modes: usize) -> Self {
        Self {
            inner: CoeffState::zeros(params.inner, n_modes),
        }
    }

    #[staticmethod]
    fn unit_mode(params: &PyParams, n_modes: usize, n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: CoeffState::unit_mode(params.inner, n_modes, n).map_err(err)?,
        })
    }

    /// Simpson projection of uniform samples on [0, ell] (endpoints included).
    #[staticmethod]
    fn project(params: &PyParams, n_modes: usize, samples: Vec<Complex64>) -> PyResult<Self> {
        Ok(Self {
            inner: CoeffState::project(params.inner, n_modes, &samples).map_err(err)?,
        })
    }

    /// Mode list this state is expressed against (eigenvalue-ascending).
    fn modes(&self) -> Vec<PyMode> {
        self.inner
            .modes()
            .iter()
            .map(|m| PyMode { inner: m.clone() })
            .collect()
    }

    /// Coefficients aligned with `modes()`.
    fn coefficients(&self) -> Vec<Complex64> {
        self.inner.coeffs().to_vec()
    }

    /// Coefficient of the mode with sine index n (zero if absent).
    fn coefficient(&self, n: usize) -> Complex64 {
        self.inner.coefficient_for(n)
    }

    fn l2_norm(&self) -> f64 {
        self.inner.l2_norm()
    }

    /// Graded norm with weights |lambda|^(2*theta).
    fn norm(&self, theta: f64) -> f64 {
        self.inner.norm(theta)
    }

    fn energy(&self, theta: f64, t: f64) -> f64 {
        let w = ThetaWeight::new(self.inner.modes(), theta);
        self.inner.energy(&w, t).expect("weights match own modes")
    }

    /// Free propagation by t.
    fn evolve(&self, t: f64) -> Self {
        Self {
            inner: self.inner.free_evolve(t),
        }
    }

    /// Boundary derivative trace sampled on the given times.
    fn boundary_trace(&self, times: Vec<f64>) -> Vec<Complex64> {
        self.inner.boundary_trace(&times).values().to_vec()
    }

    /// Pointwise values on a spatial grid.
    fn synthesize(&self, xs: Vec<f64>) -> Vec<Complex64> {
        self.inner.synthesize(&xs)
    }

    /// Re-express against modes 1..=n_modes (pad or truncate).
    fn resized(&self, n_modes: usize) -> Self {
        Self {
            inner: self.inner.resized(n_modes),
        }
    }

    fn __repr__(&self) -> String {
        format!("State(n_modes={}, l2_norm={:.6})", self.inner.len(), self.inner.l2_norm())
    }
}

/// Boundary control as an exact exponential sum.
#[pyclass(name = "Control", module = "bihsc_py", skip_from_py_object)]
#[derive(Clone)]
struct PyControl {
    inner: ControlSignal,
}

#[pymethods]
impl PyControl {
    #[getter]
    fn frequencies(&self) -> Vec<f64> {
        self.inner.lambdas().to_vec()
    }

    #[getter]
    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.betas().to_vec()
    }

    #[getter]
    fn horizon(&self) -> f64 {
        self.inner.horizon()
    }

    fn eval(&self, t: f64) -> Complex64 {
        self.inner.eval(t)
    }

    fn sample(&self, times: Vec<f64>) -> Vec<Complex64> {
        self.inner.sample(&times)
    }

    fn l2_norm(&self) -> f64 {
        self.inner.l2_norm()
    }

    fn __repr__(&self) -> String {
        format!(
            "Control(terms={}, horizon={}, l2_norm={:.6})",
            self.inner.lambdas().len(),
            self.inner.horizon(),
            self.inner.l2_norm()
        )
    }
}

/// Certificate attached to a synthesized control.
#[pyclass(name = "Report", module = "bihsc_py", skip_from_py_object)]
#[derive(Clone)]
struct PyReport {
    inner: ControlReport,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn residual_modal(&self) -> Vec<f64> {
        self.inner.residual_modal.clone()
    }

    #[getter]
    fn residual_theta(&self) -> f64 {
        self.inner.residual_theta
    }

    #[getter]
    fn gram_cond(&self) -> f64 {
        self.inner.gram_cond
    }

    #[getter]
    fn control_energy(&self) -> f64 {
        self.inner.control_energy
    }

    #[getter]
    fn oracle_agreement(&self) -> f64 {
        self.inner.oracle_agreement
    }

    #[getter]
    fn verified_by_oracle(&self) -> bool {
        self.inner.verified_by_oracle
    }

    fn __repr__(&self) -> String {
        format!(
            "Report(residual_theta={:.3e}, energy={:.6}, verified={})",
            self.inner.residual_theta, self.inner.control_energy, self.inner.verified_by_oracle
        )
    }
}

/// Smallest eigenvalue of the weighted observability Gramian over modes
/// 1..=n_modes on (0, horizon).
#[pyfunction]
fn observability_constant(params: &PyParams, n_modes: usize, horizon: f64) -> f64 {
    observability::observability_constant(&params.inner, n_modes, horizon)
}

/// The trace-silent combination over a resonant pair (p, q).
#[pyfunction]
fn invisible_mode(params: &PyParams, p: usize, q: usize) -> PyResult<PyState> {
    Ok(PyState {
        inner: observability::invisible_mode(&params.inner, (p, q)).map_err(err)?,
    })
}

/// Minimal-norm null control over modes 1..=n_modes with certification.
#[pyfunction]
#[pyo3(signature = (params, y0, horizon, n_modes, reg = 0.0))]
fn null_control(
    params: &PyParams,
    y0: &PyState,
    horizon: f64,
    n_modes: usize,
    reg: f64,
) -> PyResult<(PyControl, PyReport)> {
    let (control, report) =
        control::null_control(&params.inner, &y0.inner, horizon, n_modes, reg).map_err(err)?;
    Ok((PyControl { inner: control }, PyReport { inner: report }))
}

/// Best-effort control and irreducible residual at resonance.
#[pyfunction]
fn diagnose_resonant(
    params: &PyParams,
    y0: &PyState,
    horizon: f64,
    n_modes: usize,
) -> PyResult<(PyControl, PyReport)> {
    let (control, report) =
        control::diagnose_resonant(&params.inner, &y0.inner, horizon, n_modes).map_err(err)?;
    Ok((PyControl { inner: control }, PyReport { inner: report }))
}

/// Controlled propagation of a state under an exponential-sum control.
#[pyfunction]
fn controlled_evolve(y0: &PyState, f: &PyControl, horizon: f64) -> PyState {
    PyState {
        inner: evolution::controlled_evolve(&y0.inner, &f.inner, horizon),
    }
}

/// Independent RK4 verification integrator for the same flow.
#[pyfunction]
fn rk4_oracle(y0: &PyState, f: &PyControl, horizon: f64, steps: usize) -> PyResult<PyState> {
    Ok(PyState {
        inner: evolution::rk4_oracle(&y0.inner, &f.inner, horizon, steps).map_err(err)?,
    })
}

/// Observability sweep; returns one (gamma, constant, resonant) dict per
/// grid point.
#[pyfunction]
#[pyo3(signature = (gammas, ell, n_modes, horizon, int_tol = DEFAULT_INT_TOL))]
fn resonance_scan(
    py: Python<'_>,
    gammas: Vec<f64>,
    ell: f64,
    n_modes: usize,
    horizon: f64,
    int_tol: f64,
) -> PyResult<Vec<Py<pyo3::types::PyDict>>> {
    let rows =
        observability::resonance_scan(&gammas, ell, n_modes, horizon, int_tol).map_err(err)?;
    rows.into_iter()
        .map(|row| {
            let dict = pyo3::types::PyDict::new(py);
            dict.set_item("gamma", row.gamma)?;
            dict.set_item("observability_constant", row.constant)?;
            dict.set_item("resonant", row.resonance.resonant)?;
            dict.set_item("pairs", row.resonance.pairs.clone())?;
            dict.set_item("exact", row.resonance.is_exact())?;
            Ok(dict.unbind())
        })
        .collect()
}

/// Residual of the transposition duality identity for a random check of
/// the sign convention.
#[pyfunction]
fn validate_sign_convention() -> PyResult<f64> {
    evolution::validate_sign_convention().map_err(err)
}

#[pymodule]
fn bihsc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DEFAULT_INT_TOL", DEFAULT_INT_TOL)?;
    m.add_class::<PyParams>()?;
    m.add_class::<PyMode>()?;
    m.add_class::<PyResonance>()?;
    m.add_class::<PyState>()?;
    m.add_class::<PyControl>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(observability_constant, m)?)?;
    m.add_function(wrap_pyfunction!(invisible_mode, m)?)?;
    m.add_function(wrap_pyfunction!(null_control, m)?)?;
    m.add_function(wrap_pyfunction!(diagnose_resonant, m)?)?;
    m.add_function(wrap_pyfunction!(controlled_evolve, m)?)?;
    m.add_function(wrap_pyfunction!(rk4_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(resonance_scan, m)?)?;
    m.add_function(wrap_pyfunction!(validate_sign_convention, m)?)?;
    Ok(())
}
