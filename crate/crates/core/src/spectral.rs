//! Spectral functionals of the fading process: the log-spectral integral
//! `I(rho)`, the autocorrelation energy `lambda_inf` and the cubic moment
//! `nu_inf`, plus the low-SNR Taylor expansion of `I(rho)`.

use crate::error::{check_param, Error, Result};
use crate::fading::FadingModel;
use crate::quadrature::QuadResult;

const SERIES_WINDOW: usize = 64;
const SERIES_TAIL_TOL: f64 = 1e-12;
const SERIES_MAX_LAGS: usize = 1_000_000;
const SERIES_AGREEMENT_TOL: f64 = 1e-6;

/// `I(rho) = ∫ log(1 + rho S(w)) dw / 2pi`, in nats.
pub fn compute_i(model: &FadingModel, rho: f64) -> Result<QuadResult> {
    check_param("rho", rho, rho >= 0.0, "must be nonnegative")?;
    if rho == 0.0 {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
        });
    }
    Ok(model.circle_mean(|w| (rho * model.psd(w)).ln_1p()))
}

/// Both evaluations of `lambda_inf`: the autocorrelation energy series and
/// the quadrature of `S^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaInf {
    /// Quadrature value; this is the value used downstream.
    pub value: f64,
    pub quad_error: f64,
    pub series: f64,
    pub series_lags: usize,
    /// Estimated remainder of the truncated series.
    pub series_tail: f64,
    /// Set when the series hit the lag cap before its tail became negligible.
    pub capped: bool,
}

/// `sum_k |R(k)|^2 = ∫ S^2 dw / 2pi`.
pub fn compute_lambda_inf(model: &FadingModel) -> Result<LambdaInf> {
    let quad = model.circle_mean(|w| model.psd(w).powi(2));
    let (series, lags, tail, capped) = autocorr_energy_series(model)?;
    let tolerance = SERIES_AGREEMENT_TOL + tail + quad.error;
    if (series - quad.value).abs() > tolerance {
        return Err(Error::SeriesMismatch {
            series,
            quadrature: quad.value,
            tolerance,
        });
    }
    Ok(LambdaInf {
        value: quad.value,
        quad_error: quad.error,
        series,
        series_lags: lags,
        series_tail: tail,
        capped,
    })
}

/// Truncated `1 + 2 sum_{k>=1} |R(k)|^2`, returning the sum, the number of
/// lags used, a tail estimate and whether the lag cap was hit.
fn autocorr_energy_series(model: &FadingModel) -> Result<(f64, usize, f64, bool)> {
    if let Some(mem) = model.memory() {
        let s: f64 = (1..=mem as i64).map(|k| model.autocorr(k).norm_sqr()).sum();
        return Ok((1.0 + 2.0 * s, mem, 0.0, false));
    }
    energy_series(|k| model.autocorr(k as i64).norm_sqr())
}

fn energy_series<T: Fn(usize) -> f64>(term_at: T) -> Result<(f64, usize, f64, bool)> {
    let mut sum = 0.0;
    let mut window = 0.0;
    let mut half_cap_window = f64::NAN;
    let mut k = 1usize;
    loop {
        let term = term_at(k);
        sum += term;
        window += term;
        if k.is_multiple_of(SERIES_WINDOW) {
            if 2.0 * window < SERIES_TAIL_TOL {
                return Ok((1.0 + 2.0 * sum, k, 2.0 * window, false));
            }
            if k == SERIES_MAX_LAGS / 2 / SERIES_WINDOW * SERIES_WINDOW {
                half_cap_window = window;
            }
            if k + SERIES_WINDOW > SERIES_MAX_LAGS {
                // A tail that has not shrunk over the last half of the range
                // indicates a non-summable sequence.
                if !(window < 0.4 * half_cap_window) {
                    return Err(Error::SeriesDivergent {
                        lags: k,
                        tail: 2.0 * window,
                    });
                }
                // For inverse-square decay the remainder is about
                // window * k / SERIES_WINDOW.
                let tail = 2.0 * window * k as f64 / SERIES_WINDOW as f64;
                return Ok((1.0 + 2.0 * sum, k, tail, true));
            }
            window = 0.0;
        }
        k += 1;
    }
}

/// `∫ S^3 dw / 2pi`, the cubic coefficient of the expansion of `I(rho)`.
pub fn compute_nu_inf(model: &FadingModel) -> QuadResult {
    model.circle_mean(|w| model.psd(w).powi(3))
}

/// Low-SNR expansion `rho - rho^2 lambda/2 (+ rho^3 nu/3)`.
pub fn taylor_i(lambda_inf: f64, nu_inf: f64, rho: f64, order: u32) -> f64 {
    let second = rho - 0.5 * rho * rho * lambda_inf;
    if order >= 3 {
        second + rho.powi(3) * nu_inf / 3.0
    } else {
        second
    }
}

/// Cached spectral functionals of one model on one quadrature grid.
#[derive(Debug, Clone)]
pub struct SpectralFunctionals {
    model: FadingModel,
    pub lambda_inf: f64,
    pub nu_inf: f64,
    pub quad_points: usize,
    pub quad_error_estimate: f64,
    pub lambda_series_capped: bool,
}

impl SpectralFunctionals {
    pub fn new(model: &FadingModel) -> Result<Self> {
        let lambda = compute_lambda_inf(model)?;
        let nu = compute_nu_inf(model);
        Ok(Self {
            model: model.clone(),
            lambda_inf: lambda.value,
            nu_inf: nu.value,
            quad_points: model.quad_points(),
            quad_error_estimate: lambda.quad_error.max(nu.error),
            lambda_series_capped: lambda.capped,
        })
    }

    pub fn model(&self) -> &FadingModel {
        &self.model
    }

    pub fn i_of_rho(&self, rho: f64) -> Result<f64> {
        compute_i(&self.model, rho).map(|q| q.value)
    }

    pub fn taylor_i(&self, rho: f64, order: u32) -> f64 {
        taylor_i(self.lambda_inf, self.nu_inf, rho, order)
    }
}
