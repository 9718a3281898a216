//! Python bindings: thin wrappers over the core types and operations.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use copspec::{
    algorithm2_pvalues, fit_ar, fit_arma, fit_garch, gaussian_copula_spectrum, parse_model,
    run_parametric_bootstrap, smoothed_estimate, EstimatorConfig, FrequencyGrid, GarchVariant,
    KernelSpec, ModelClass, QuantileGrid, SimConfig, TimeSeries,
};

fn to_py_err(e: copspec::Error) -> PyErr {
    match e.exit_code() {
        2 => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn series(values: Vec<f64>, label: &str) -> PyResult<TimeSeries> {
    TimeSeries::new(values, label).map_err(to_py_err)
}

fn parse_class(name: &str, p: usize, q: usize) -> PyResult<ModelClass> {
    match name.to_ascii_lowercase().as_str() {
        "ar" => Ok(ModelClass::Ar(p)),
        "arma" => Ok(ModelClass::Arma(p, q)),
        "arch1" => Ok(ModelClass::Arch1),
        "garch11" => Ok(ModelClass::Garch11),
        "egarch11" => Ok(ModelClass::Egarch11),
        other => Err(PyValueError::new_err(format!("unknown model class `{other}`"))),
    }
}

/// Complex spectral estimates indexed by (tau_i, tau_j, omega_k).
#[pyclass(name = "SpectralMatrix")]
struct PySpectralMatrix {
    inner: copspec::SpectralMatrix,
}

#[pymethods]
impl PySpectralMatrix {
    #[getter]
    fn taus(&self) -> Vec<f64> {
        self.inner.taus().levels().to_vec()
    }

    #[getter]
    fn omegas(&self) -> Vec<f64> {
        self.inner.omegas().omegas().to_vec()
    }

    #[getter]
    fn shape(&self) -> (usize, usize, usize) {
        (self.inner.n_taus(), self.inner.n_taus(), self.inner.n_freqs())
    }

    fn at(&self, i: usize, j: usize, k: usize) -> PyResult<(f64, f64)> {
        let (nt, nf) = (self.inner.n_taus(), self.inner.n_freqs());
        if i >= nt || j >= nt || k >= nf {
            return Err(PyValueError::new_err("index out of bounds"));
        }
        let v = self.inner.at(i, j, k);
        Ok((v.re, v.im))
    }

    /// Row-major (i, j, k) flattened values as (re, im) pairs.
    fn flat(&self) -> Vec<(f64, f64)> {
        self.inner.values().iter().map(|v| (v.re, v.im)).collect()
    }

    fn hermitian_violation(&self) -> f64 {
        self.inner.hermitian_violation()
    }
}

/// Signed p-values per quantile pair plus the per-frequency minimum.
#[pyclass(name = "PValueField")]
struct PyPValueField {
    inner: copspec::PValueField,
}

#[pymethods]
impl PyPValueField {
    #[getter]
    fn levels(&self) -> Vec<f64> {
        self.inner.levels.levels().to_vec()
    }

    #[getter]
    fn omegas(&self) -> Vec<f64> {
        self.inner.omegas.omegas().to_vec()
    }

    #[getter]
    fn p_min(&self) -> Vec<f64> {
        self.inner.p_min.clone()
    }

    #[getter]
    fn r(&self) -> usize {
        self.inner.r
    }

    /// (p_re, sign_re, p_im, sign_im) for levels (tau_i <= tau_j) at omega_k.
    fn at(&self, i: usize, j: usize, k: usize) -> PyResult<(f64, i8, f64, i8)> {
        let nl = self.inner.levels.len();
        if i > j || j >= nl || k >= self.inner.omegas.len() {
            return Err(PyValueError::new_err("index out of bounds (need i <= j)"));
        }
        Ok((
            self.inner.p_re_at(i, j, k),
            self.inner.sign_re_at(i, j, k),
            self.inner.p_im_at(i, j, k),
            self.inner.sign_im_at(i, j, k),
        ))
    }
}

/// Empirical-CDF ranks of a series: #{s : x_s <= x_t} / n.
#[pyfunction]
fn rank_transform(values: Vec<f64>) -> PyResult<Vec<f64>> {
    Ok(copspec::rank_transform(&series(values, "py")?))
}

/// Simulate an admissible model, e.g. `garch11(omega=0.01,alpha=0.4,beta=0.5)`.
#[pyfunction]
#[pyo3(signature = (model, n, seed, burn_in = 1000, replicate = 0))]
fn simulate(model: &str, n: usize, seed: u64, burn_in: usize, replicate: u64) -> PyResult<Vec<f64>> {
    let spec = parse_model(model).map_err(to_py_err)?;
    let cfg = SimConfig::new(n, seed).with_burn_in(burn_in).with_replicate(replicate);
    Ok(copspec::simulate(&spec, &cfg).map_err(to_py_err)?.values().to_vec())
}

/// (admissible, diagnostic message) for a model text form.
#[pyfunction]
fn check_admissible(model: &str) -> PyResult<(bool, String)> {
    let spec = parse_model(model).map_err(to_py_err)?;
    let adm = copspec::check_admissible(&spec);
    Ok((adm.admissible, adm.message))
}

/// Kernel-smoothed copula spectral density estimate.
#[pyfunction]
#[pyo3(signature = (values, taus, omegas, bandwidth = 0.1))]
fn estimate_spectrum(
    values: Vec<f64>,
    taus: Vec<f64>,
    omegas: Vec<f64>,
    bandwidth: f64,
) -> PyResult<PySpectralMatrix> {
    let data = series(values, "py")?;
    let taus = QuantileGrid::new(taus).map_err(to_py_err)?;
    let omegas = FrequencyGrid::new(omegas).map_err(to_py_err)?;
    let kernel = KernelSpec::epanechnikov(bandwidth).map_err(to_py_err)?;
    let est = smoothed_estimate(&data, &taus, &omegas, &kernel).map_err(to_py_err)?;
    Ok(PySpectralMatrix { inner: est })
}

/// Analytic copula spectrum of a Gaussian AR/ARMA model.
#[pyfunction]
fn reference_spectrum(model: &str, taus: Vec<f64>, omegas: Vec<f64>) -> PyResult<PySpectralMatrix> {
    let spec = parse_model(model).map_err(to_py_err)?;
    let taus = QuantileGrid::new(taus).map_err(to_py_err)?;
    let omegas = FrequencyGrid::new(omegas).map_err(to_py_err)?;
    let f = gaussian_copula_spectrum(&spec, &taus, &omegas, 64).map_err(to_py_err)?;
    Ok(PySpectralMatrix { inner: f })
}

/// Fit a model class; returns (model_text, objective, converged, iterations).
#[pyfunction]
#[pyo3(signature = (values, class_name, p = 0, q = 0))]
fn fit(values: Vec<f64>, class_name: &str, p: usize, q: usize) -> PyResult<(String, f64, bool, usize)> {
    let data = series(values, "py")?;
    let result = match parse_class(class_name, p, q)? {
        ModelClass::Ar(p) => fit_ar(&data, p),
        ModelClass::Arma(p, q) => fit_arma(&data, p, q),
        ModelClass::Arch1 => fit_garch(&data, GarchVariant::Arch1),
        ModelClass::Garch11 => fit_garch(&data, GarchVariant::Garch11),
        ModelClass::Egarch11 => fit_garch(&data, GarchVariant::Egarch11),
    }
    .map_err(to_py_err)?;
    Ok((result.spec.to_string(), result.objective_value, result.converged, result.iterations))
}

/// End-to-end Algorithm 2: fit the class, bootstrap R replicates with the
/// given seed, and return the p-value field for the data.
#[pyfunction]
#[pyo3(signature = (values, class_name, p = 0, q = 0, r = 200, beta = 0.1, bandwidth = 0.1, seed = 0, levels = None))]
#[allow(clippy::too_many_arguments)]
fn bootstrap_pvalues(
    values: Vec<f64>,
    class_name: &str,
    p: usize,
    q: usize,
    r: usize,
    beta: f64,
    bandwidth: f64,
    seed: u64,
    levels: Option<Vec<f64>>,
) -> PyResult<PyPValueField> {
    let data = series(values, "py")?;
    let class = parse_class(class_name, p, q)?;
    let taus = match levels {
        Some(l) => QuantileGrid::new(l).map_err(to_py_err)?,
        None => QuantileGrid::pvalue_default(),
    };
    let config = EstimatorConfig::new(
        taus,
        FrequencyGrid::fourier_default(),
        KernelSpec::epanechnikov(bandwidth).map_err(to_py_err)?,
    );
    let ensemble = run_parametric_bootstrap(&data, class, r, &config, seed).map_err(to_py_err)?;
    let estimate = config.estimate(&data).map_err(to_py_err)?;
    let field = algorithm2_pvalues(&ensemble, &estimate, beta).map_err(to_py_err)?;
    Ok(PyPValueField { inner: field })
}

#[pymodule]
fn copspec_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpectralMatrix>()?;
    m.add_class::<PyPValueField>()?;
    m.add_function(wrap_pyfunction!(rank_transform, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(check_admissible, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(reference_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(bootstrap_pvalues, m)?)?;
    Ok(())
}
