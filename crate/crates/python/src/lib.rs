//! Python module `pymagband`: potentials, fiber solves, sweeps and the
//! derivative and perturbation helpers of `magband`.

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use magband::dispersion;
use magband::oracles::{SolvableKind, SolvableModel};
use magband::{cli, fiber, Error, Outside, SignClass};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NonConvergence(_) | Error::SizeExceeded { .. } => PyRuntimeError::new_err(e.to_string()),
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        Error::AtMomentum { ref source, .. } if matches!(**source, Error::NonConvergence(_) | Error::SizeExceeded { .. }) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Homogeneous magnetic field of strength `B > 0`.
#[pyclass(name = "FieldConfig", module = "pymagband", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyField(magband::FieldConfig);

#[pymethods]
impl PyField {
    #[new]
    fn new(b: f64) -> PyResult<Self> {
        magband::FieldConfig::new(b).map(PyField).map_err(to_py)
    }

    #[getter]
    fn strength(&self) -> f64 {
        self.0.strength()
    }

    /// `B(2n+1)`
    fn landau_level(&self, n: usize) -> f64 {
        self.0.landau_level(n)
    }

    fn __repr__(&self) -> String {
        format!("FieldConfig(B={})", self.0.strength())
    }
}

/// Obstacle profile `v(x)`.
#[pyclass(name = "Potential", module = "pymagband", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPotential(magband::PotentialSpec);

#[pymethods]
impl PyPotential {
    #[staticmethod]
    fn zero() -> Self {
        PyPotential(magband::PotentialSpec::zero())
    }

    #[staticmethod]
    fn lorentzian(lambda: f64, a: f64) -> PyResult<Self> {
        magband::PotentialSpec::lorentzian(lambda, a).map(PyPotential).map_err(to_py)
    }

    #[staticmethod]
    fn flat_well(lambda: f64, a: f64, b: f64) -> PyResult<Self> {
        magband::PotentialSpec::flat_well(lambda, a, b).map(PyPotential).map_err(to_py)
    }

    #[staticmethod]
    fn sine_obstacle(lambda: f64, a: f64) -> PyResult<Self> {
        magband::PotentialSpec::sine_obstacle(lambda, a).map(PyPotential).map_err(to_py)
    }

    #[staticmethod]
    fn linear(alpha: f64) -> PyResult<Self> {
        magband::PotentialSpec::linear(alpha).map(PyPotential).map_err(to_py)
    }

    #[staticmethod]
    fn parabola(beta: f64) -> PyResult<Self> {
        magband::PotentialSpec::parabola(beta).map(PyPotential).map_err(to_py)
    }

    /// Piecewise-linear table; outside its range the profile is zero, or
    /// the end values when `clamp` is true.
    #[staticmethod]
    #[pyo3(signature = (xs, values, clamp = false))]
    fn tabulated(xs: Vec<f64>, values: Vec<f64>, clamp: bool) -> PyResult<Self> {
        let outside = if clamp { Outside::Clamp } else { Outside::Zero };
        magband::PotentialSpec::tabulated(xs, values, outside)
            .map(PyPotential)
            .map_err(to_py)
    }

    #[staticmethod]
    fn sum(parts: Vec<PyRef<'_, PyPotential>>) -> PyResult<Self> {
        magband::PotentialSpec::sum(parts.iter().map(|p| p.0.clone()).collect())
            .map(PyPotential)
            .map_err(to_py)
    }

    fn scale(&self, lambda: f64) -> Self {
        PyPotential(self.0.scale(lambda))
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind_name()
    }

    fn eval(&self, x: f64) -> f64 {
        self.0.eval(x)
    }

    fn eval_derivative(&self, x: f64) -> Option<f64> {
        self.0.eval_derivative(x)
    }

    /// `(v(-inf), v(+inf))` or `None`.
    fn asymptotic_limits(&self) -> Option<(f64, f64)> {
        self.0.asymptotic_limits()
    }

    fn sup_norm(&self) -> f64 {
        self.0.sup_norm()
    }

    /// `"nonnegative"`, `"nonpositive"` or `"indefinite"`.
    fn sign_class(&self) -> &'static str {
        match self.0.classify_sign() {
            SignClass::NonNegative => "nonnegative",
            SignClass::NonPositive => "nonpositive",
            SignClass::Indefinite => "indefinite",
        }
    }

    fn is_even(&self) -> Option<bool> {
        self.0.is_even()
    }

    /// `{"v1": bool, ..., "v5": bool}`
    fn hypotheses<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let h = self.0.hypotheses();
        let d = PyDict::new(py);
        for (k, v) in [("v1", h.v1), ("v2", h.v2), ("v3", h.v3), ("v4", h.v4), ("v5", h.v5)] {
            d.set_item(k, v)?;
        }
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("Potential({:?})", self.0)
    }
}

/// Lowest eigenpairs of one fiber.
#[pyclass(name = "FiberEigenpairs", module = "pymagband", frozen)]
struct PyFiber(magband::FiberEigenpairs);

#[pymethods]
impl PyFiber {
    #[getter]
    fn p(&self) -> f64 {
        self.0.p
    }

    #[getter]
    fn eigenvalues(&self) -> Vec<f64> {
        self.0.eigenvalues.clone()
    }

    /// Eigenvectors on the grid, normalized so that `sum(phi^2) h = 1`.
    #[getter]
    fn eigenvectors(&self) -> Vec<Vec<f64>> {
        self.0.eigenvectors.clone()
    }

    #[getter]
    fn grid_points(&self) -> Vec<f64> {
        self.0.grid.points()
    }

    #[getter]
    fn spacing(&self) -> f64 {
        self.0.grid.spacing()
    }

    #[getter]
    fn est_error(&self) -> f64 {
        self.0.est_error
    }

    #[getter]
    fn refinement_steps(&self) -> usize {
        self.0.refinement_steps
    }

    fn extrapolated_eigenvalues(&self) -> Option<Vec<f64>> {
        self.0.extrapolated_eigenvalues()
    }

    fn sign_changes(&self, n: usize) -> PyResult<usize> {
        if n >= self.0.band_count() {
            return Err(PyValueError::new_err(format!("band {n} not computed")));
        }
        Ok(self.0.sign_changes(n))
    }

    fn __repr__(&self) -> String {
        format!("FiberEigenpairs(p={}, eigenvalues={:?})", self.0.p, self.0.eigenvalues)
    }
}

/// Dispersion curves on a momentum grid.
#[pyclass(name = "BandStructure", module = "pymagband", frozen)]
struct PyBands(magband::BandStructure);

#[pymethods]
impl PyBands {
    #[getter]
    fn p_grid(&self) -> Vec<f64> {
        self.0.p_grid.clone()
    }

    /// `energies[n][j] = eps_n(p_j)`
    #[getter]
    fn energies(&self) -> Vec<Vec<f64>> {
        self.0.energies.clone()
    }

    #[getter]
    fn widths(&self) -> Vec<f64> {
        self.0.widths.clone()
    }

    #[getter]
    fn slopes(&self) -> Option<Vec<Vec<f64>>> {
        self.0.slopes.clone()
    }

    /// `[(n, lower, upper, open), ...]`
    #[getter]
    fn gaps(&self) -> Vec<(usize, f64, f64, bool)> {
        self.0.gaps.iter().map(|g| (g.band, g.lower, g.upper, g.open)).collect()
    }

    fn band_range(&self, n: usize) -> PyResult<(f64, f64)> {
        if n >= self.0.band_count() {
            return Err(PyValueError::new_err(format!("band {n} not computed")));
        }
        Ok(self.0.band_range(n))
    }

    fn to_csv(&self) -> String {
        cli::bands_csv(&self.0)
    }

    fn to_svg(&self) -> String {
        cli::bands_svg(&self.0)
    }
}

#[pyfunction]
#[pyo3(signature = (potential, field, p, k, tol = 1e-6))]
fn solve_fiber(potential: &PyPotential, field: &PyField, p: f64, k: usize, tol: f64) -> PyResult<PyFiber> {
    fiber::solve_fiber(&potential.0, field.0, p, k, tol)
        .map(PyFiber)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (potential, field, p_min, p_max, p_steps, bands, tol = 1e-6))]
fn sweep(
    py: Python<'_>,
    potential: &PyPotential,
    field: &PyField,
    p_min: f64,
    p_max: f64,
    p_steps: usize,
    bands: usize,
    tol: f64,
) -> PyResult<PyBands> {
    let cfg = dispersion::SweepConfig::new(p_min, p_max, p_steps, bands, tol).map_err(to_py)?;
    let spec = potential.0.clone();
    let field = field.0;
    py.detach(|| dispersion::sweep(&spec, field, &cfg))
        .map(PyBands)
        .map_err(to_py)
}

/// Feynman–Hellmann slope `eps_n'(p)`.
#[pyfunction]
#[pyo3(signature = (potential, field, p, n, tol = 1e-6))]
fn fh_derivative_p(potential: &PyPotential, field: &PyField, p: f64, n: usize, tol: f64) -> PyResult<f64> {
    dispersion::fh_derivative_p(&potential.0, field.0, p, n, tol).map_err(to_py)
}

/// Central difference in `p`; `delta_p` defaults to `1e-3 max(1, |p|)`.
#[pyfunction]
#[pyo3(signature = (potential, field, p, n, tol = 1e-6, delta_p = None))]
fn fd_derivative_p(
    potential: &PyPotential,
    field: &PyField,
    p: f64,
    n: usize,
    tol: f64,
    delta_p: Option<f64>,
) -> PyResult<f64> {
    dispersion::fd_derivative_p(&potential.0, field.0, p, n, tol, delta_p).map_err(to_py)
}

/// `d eps_n / d lambda` at coupling `lambda`.
#[pyfunction]
#[pyo3(signature = (potential, field, p, n, lambda_, tol = 1e-6))]
fn fh_derivative_lambda(
    potential: &PyPotential,
    field: &PyField,
    p: f64,
    n: usize,
    lambda_: f64,
    tol: f64,
) -> PyResult<f64> {
    dispersion::fh_derivative_lambda(&potential.0, field.0, p, n, lambda_, tol).map_err(to_py)
}

/// `B(2j+1) + lambda * int v(x - p/B) phi_j(x)^2 dx`
#[pyfunction]
fn first_order_estimate(potential: &PyPotential, field: &PyField, p: f64, j: usize, lambda_: f64) -> PyResult<f64> {
    dispersion::first_order_estimate(&potential.0, field.0, p, j, lambda_).map_err(to_py)
}

/// `(left, right)` residuals of `eps_n(-P)` and `eps_n(+P)` against their limits.
#[pyfunction]
#[pyo3(signature = (potential, field, n, big_p, tol = 1e-6))]
fn asymptote_check(potential: &PyPotential, field: &PyField, n: usize, big_p: f64, tol: f64) -> PyResult<(f64, f64)> {
    dispersion::asymptote_check(&potential.0, field.0, n, big_p, tol)
        .map(|r| (r.left, r.right))
        .map_err(to_py)
}

/// Closed-form eigenvalue of the `"free"`, `"linear"` (parameter alpha) or
/// `"parabola"` (parameter beta) model.
#[pyfunction]
#[pyo3(signature = (kind, field, n, p, parameter = 0.0))]
fn exact_eigenvalue(kind: &str, field: &PyField, n: usize, p: f64, parameter: f64) -> PyResult<f64> {
    let kind = match kind {
        "free" => SolvableKind::FreeLandau,
        "linear" => SolvableKind::Linear { alpha: parameter },
        "parabola" => SolvableKind::Parabola { beta: parameter },
        other => return Err(PyValueError::new_err(format!("unknown model `{other}`"))),
    };
    SolvableModel::new(kind, field.0)
        .and_then(|m| m.exact_eigenvalue(n, p))
        .map_err(to_py)
}

/// Normalized oscillator eigenfunction `phi_j(x)` of `-d^2 + B^2 x^2`.
#[pyfunction]
fn hermite_function(j: usize, field: &PyField, x: f64) -> f64 {
    fiber::hermite_function(j, field.0, x)
}

/// Lowest `k` eigenvalues of a symmetric tridiagonal matrix.
#[pyfunction]
#[pyo3(signature = (diag, offdiag, k, tol = 1e-12))]
fn lowest_eigenvalues(diag: Vec<f64>, offdiag: Vec<f64>, k: usize, tol: f64) -> PyResult<Vec<f64>> {
    let m = magband::TridiagonalMatrix::new(diag, offdiag).map_err(to_py)?;
    magband::eigensolver::lowest_eigenvalues(&m, k, tol).map_err(to_py)
}

/// Parse a TOML run configuration, sweep, check and write the output
/// files. Returns `(success, [(check, status, summary), ...])`.
#[pyfunction]
#[pyo3(signature = (config_text, out_dir = None))]
fn run_config(
    py: Python<'_>,
    config_text: &str,
    out_dir: Option<std::path::PathBuf>,
) -> PyResult<(bool, Vec<(String, String, String)>)> {
    let mut cfg = cli::parse_config(config_text).map_err(to_py)?;
    if let Some(dir) = out_dir {
        cfg.output.dir = dir;
    }
    let outcome = py.detach(|| cli::run(&cfg)).map_err(to_py)?;
    let checks = outcome
        .checks
        .iter()
        .map(|c| (c.name.to_string(), c.status.to_string(), c.summary.clone()))
        .collect();
    Ok((outcome.success(), checks))
}

#[pymodule]
fn pymagband(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyField>()?;
    m.add_class::<PyPotential>()?;
    m.add_class::<PyFiber>()?;
    m.add_class::<PyBands>()?;
    m.add_function(wrap_pyfunction!(solve_fiber, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(fh_derivative_p, m)?)?;
    m.add_function(wrap_pyfunction!(fd_derivative_p, m)?)?;
    m.add_function(wrap_pyfunction!(fh_derivative_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(first_order_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(asymptote_check, m)?)?;
    m.add_function(wrap_pyfunction!(exact_eigenvalue, m)?)?;
    m.add_function(wrap_pyfunction!(hermite_function, m)?)?;
    m.add_function(wrap_pyfunction!(lowest_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
