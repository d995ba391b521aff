//! Python bindings for `fadingcap`. Import as `fadingcap`.

use ::fadingcap as core;
use ::fadingcap::prediction::interpolation_error;
use ::fadingcap::{InputDistribution, PowerConstraints, PredictionMode};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn constraints(rho: f64, beta: f64) -> PyResult<PowerConstraints> {
    PowerConstraints::new(rho, beta).map_err(err)
}

fn mode(name: &str) -> PyResult<PredictionMode> {
    match name {
        "causal" => Ok(PredictionMode::Causal),
        "noncausal" => Ok(PredictionMode::Noncausal),
        other => Err(PyValueError::new_err(format!(
            "mode must be 'causal' or 'noncausal', got '{other}'"
        ))),
    }
}

fn on_off(n: usize, duty: f64, psk: usize, law: &str) -> PyResult<InputDistribution> {
    match law {
        "iid" => InputDistribution::iid_on_off(n, duty, psk).map_err(err),
        "coupled" => InputDistribution::coupled_on_off(n, duty, psk).map_err(err),
        other => Err(PyValueError::new_err(format!(
            "law must be 'iid' or 'coupled', got '{other}'"
        ))),
    }
}

/// A stationary unit-power discrete-time fading process.
#[pyclass(name = "FadingModel", module = "fadingcap", frozen)]
#[derive(Clone)]
pub struct PyFadingModel {
    inner: core::FadingModel,
}

#[pymethods]
impl PyFadingModel {
    #[staticmethod]
    fn iid() -> Self {
        Self {
            inner: core::FadingModel::iid(),
        }
    }

    #[staticmethod]
    fn gauss_markov(r: f64) -> PyResult<Self> {
        Ok(Self {
            inner: core::FadingModel::gauss_markov(r).map_err(err)?,
        })
    }

    #[staticmethod]
    fn bandlimited(w: f64) -> PyResult<Self> {
        Ok(Self {
            inner: core::FadingModel::bandlimited(w).map_err(err)?,
        })
    }

    /// Lags `R(1), ..., R(K)`; `R(0) = 1` is implied.
    #[staticmethod]
    fn finite_memory(lags: Vec<Complex64>) -> PyResult<Self> {
        Ok(Self {
            inner: core::FadingModel::finite_memory(lags).map_err(err)?,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    fn autocorr(&self, k: i64) -> Complex64 {
        self.inner.autocorr(k)
    }

    fn psd(&self, omega: f64) -> f64 {
        self.inner.psd(omega)
    }

    fn with_quad_points(&self, points: usize) -> Self {
        Self {
            inner: self.inner.clone().with_quad_points(points),
        }
    }

    fn __repr__(&self) -> String {
        format!("FadingModel({})", self.inner.name())
    }
}

/// A continuous-time fading process.
#[pyclass(name = "CtFadingModel", module = "fadingcap", frozen)]
pub struct PyCtFadingModel {
    inner: core::CtFadingModel,
}

#[pymethods]
impl PyCtFadingModel {
    #[staticmethod]
    fn ou(gamma: f64) -> PyResult<Self> {
        Ok(Self {
            inner: core::CtFadingModel::ou(gamma).map_err(err)?,
        })
    }

    #[staticmethod]
    fn bandlimited(w_max: f64) -> PyResult<Self> {
        Ok(Self {
            inner: core::CtFadingModel::bandlimited(w_max).map_err(err)?,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    fn closed_form_i(&self, p_peak: f64) -> Option<f64> {
        self.inner.closed_form_i(p_peak)
    }

    fn __repr__(&self) -> String {
        format!("CtFadingModel({})", self.inner.name())
    }
}

#[pyfunction]
fn compute_i(model: &PyFadingModel, rho: f64) -> PyResult<f64> {
    Ok(core::compute_i(&model.inner, rho).map_err(err)?.value)
}

#[pyfunction]
fn compute_lambda_inf(model: &PyFadingModel) -> PyResult<f64> {
    Ok(core::compute_lambda_inf(&model.inner).map_err(err)?.value)
}

#[pyfunction]
fn theta_star(model: &PyFadingModel, rho: f64, beta: f64) -> PyResult<f64> {
    core::theta_star(&model.inner, constraints(rho, beta)?).map_err(err)
}

#[pyfunction]
fn upper_bound_u(model: &PyFadingModel, rho: f64, beta: f64) -> PyResult<f64> {
    core::upper_bound_u(&model.inner, constraints(rho, beta)?).map_err(err)
}

#[pyfunction]
fn upper_bound_u_pred(model: &PyFadingModel, rho: f64, beta: f64) -> PyResult<f64> {
    Ok(
        core::upper_bound_u_pred(&model.inner, constraints(rho, beta)?)
            .map_err(err)?
            .value,
    )
}

#[pyfunction]
fn bound_cu(model: &PyFadingModel, rho: f64, beta: f64) -> PyResult<f64> {
    core::bound_cu(&model.inner, constraints(rho, beta)?).map_err(err)
}

#[pyfunction]
fn asymptote_f(model: &PyFadingModel, beta: f64) -> PyResult<f64> {
    core::asymptote_f(&model.inner, beta).map_err(err)
}

#[pyfunction]
fn asymptote_cll(model: &PyFadingModel, beta: f64) -> PyResult<f64> {
    core::asymptote_cll(&model.inner, beta).map_err(err)
}

/// Every bound at one operating point, as a dict.
#[pyfunction]
#[pyo3(signature = (model, rho, beta, n = 1024))]
fn evaluate_bounds<'py>(
    py: Python<'py>,
    model: &PyFadingModel,
    rho: f64,
    beta: f64,
    n: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let b = core::evaluate_bounds(&model.inner, constraints(rho, beta)?, n).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("rho", b.rho)?;
    d.set_item("U", b.u)?;
    d.set_item("U_pred", b.u_pred)?;
    d.set_item("C_u", b.c_u)?;
    d.set_item("L_n", b.l_n)?;
    d.set_item("f_beta_rho2", b.f_beta_rho2)?;
    d.set_item("theta", b.theta)?;
    Ok(d)
}

#[pyfunction]
fn lambda_n(model: &PyFadingModel, n: usize) -> PyResult<f64> {
    core::lambda_n(&model.inner, n).map_err(err)
}

#[pyfunction]
fn optimal_duty(lambda_n: f64, beta: f64) -> PyResult<f64> {
    core::optimal_duty(lambda_n, beta).map_err(err)
}

#[pyfunction]
fn ln_coefficient(model: &PyFadingModel, n: usize, beta: f64) -> PyResult<f64> {
    core::ln_coefficient(&model.inner, n, beta).map_err(err)
}

#[pyfunction]
fn causal_error(model: &PyFadingModel, rho: f64) -> PyResult<f64> {
    Ok(core::causal_error(&model.inner, rho).map_err(err)?.sigma2)
}

#[pyfunction]
fn noncausal_error(model: &PyFadingModel, rho: f64) -> PyResult<f64> {
    Ok(core::noncausal_error(&model.inner, rho)
        .map_err(err)?
        .sigma2)
}

#[pyfunction(name = "interpolation_error")]
fn py_interpolation_error(model: &PyFadingModel, rho: f64) -> PyResult<f64> {
    Ok(interpolation_error(&model.inner, rho).map_err(err)?.sigma2)
}

#[pyfunction]
#[pyo3(signature = (model, rho, n, mode = "causal"))]
fn finite_window_error(model: &PyFadingModel, rho: f64, n: usize, mode: &str) -> PyResult<f64> {
    Ok(
        core::finite_window_error(&model.inner, rho, n, self::mode(mode)?)
            .map_err(err)?
            .sigma2,
    )
}

#[pyfunction]
fn single_letter_mi_sup(rho: f64, p_ave: f64) -> PyResult<f64> {
    core::single_letter_mi_sup(rho, p_ave).map_err(err)
}

/// `(value, error)` for the scalar on-off channel.
#[pyfunction]
fn mi_quadrature_1d(a: f64, rho: f64) -> PyResult<(f64, f64)> {
    let e = core::mi_quadrature_1d(a, rho).map_err(err)?;
    Ok((e.value, e.stderr))
}

/// Coefficient `c` of `I ~ c rho^2` for a block on-off input.
#[pyfunction]
#[pyo3(signature = (model, n, duty, psk = 4, law = "iid"))]
fn mi_quadratic(
    model: &PyFadingModel,
    n: usize,
    duty: f64,
    psk: usize,
    law: &str,
) -> PyResult<f64> {
    let mu = on_off(n, duty, psk, law)?;
    Ok(core::mi_quadratic(&mu, &model.inner).coefficient)
}

/// `(value, stderr)` Monte Carlo estimate for a block on-off input.
#[pyfunction]
#[pyo3(signature = (model, n, duty, rho, samples = 100_000, seed = 42, psk = 4, law = "iid"))]
#[allow(clippy::too_many_arguments)]
fn mi_monte_carlo(
    py: Python<'_>,
    model: &PyFadingModel,
    n: usize,
    duty: f64,
    rho: f64,
    samples: usize,
    seed: u64,
    psk: usize,
    law: &str,
) -> PyResult<(f64, f64)> {
    let mu = on_off(n, duty, psk, law)?;
    let e = py
        .allow_threads(|| core::mi_monte_carlo(&mu, &model.inner, rho, samples, seed))
        .map_err(err)?;
    Ok((e.value, e.stderr))
}

#[pyfunction]
fn ct_i(model: &PyCtFadingModel, p_peak: f64) -> PyResult<f64> {
    Ok(core::ct_i(&model.inner, p_peak).map_err(err)?.value)
}

#[pyfunction]
fn ct_capacity(model: &PyCtFadingModel, p_ave: f64, p_peak: f64) -> PyResult<f64> {
    core::ct_capacity(&model.inner, p_ave, p_peak).map_err(err)
}

#[pymodule]
#[pyo3(name = "fadingcap")]
fn fadingcap_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFadingModel>()?;
    m.add_class::<PyCtFadingModel>()?;
    m.add_function(wrap_pyfunction!(compute_i, m)?)?;
    m.add_function(wrap_pyfunction!(compute_lambda_inf, m)?)?;
    m.add_function(wrap_pyfunction!(theta_star, m)?)?;
    m.add_function(wrap_pyfunction!(upper_bound_u, m)?)?;
    m.add_function(wrap_pyfunction!(upper_bound_u_pred, m)?)?;
    m.add_function(wrap_pyfunction!(bound_cu, m)?)?;
    m.add_function(wrap_pyfunction!(asymptote_f, m)?)?;
    m.add_function(wrap_pyfunction!(asymptote_cll, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_n, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_duty, m)?)?;
    m.add_function(wrap_pyfunction!(ln_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(causal_error, m)?)?;
    m.add_function(wrap_pyfunction!(noncausal_error, m)?)?;
    m.add_function(wrap_pyfunction!(py_interpolation_error, m)?)?;
    m.add_function(wrap_pyfunction!(finite_window_error, m)?)?;
    m.add_function(wrap_pyfunction!(single_letter_mi_sup, m)?)?;
    m.add_function(wrap_pyfunction!(mi_quadrature_1d, m)?)?;
    m.add_function(wrap_pyfunction!(mi_quadratic, m)?)?;
    m.add_function(wrap_pyfunction!(mi_monte_carlo, m)?)?;
    m.add_function(wrap_pyfunction!(ct_i, m)?)?;
    m.add_function(wrap_pyfunction!(ct_capacity, m)?)?;
    Ok(())
}
