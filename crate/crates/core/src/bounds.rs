//! Upper bounds on the capacity of the peak- and average-power limited
//! fading channel and their low-SNR coefficients.

use crate::error::{check_param, Result};
use crate::fading::FadingModel;
use crate::onoff::ln_coefficient;
use crate::single_letter::single_letter_mi_sup_detailed;
use crate::spectral::{compute_i, compute_lambda_inf};

/// Peak power `rho` and peak-to-average ratio `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerConstraints {
    pub rho: f64,
    pub beta: f64,
}

impl PowerConstraints {
    pub fn new(rho: f64, beta: f64) -> Result<Self> {
        check_param("rho", rho, rho > 0.0, "must be positive")?;
        check_param("beta", beta, beta >= 1.0, "must be at least 1")?;
        Ok(Self { rho, beta })
    }

    pub fn p_ave(&self) -> f64 {
        self.rho / self.beta
    }
}

fn theta_from_i(i: f64, c: PowerConstraints) -> f64 {
    (1.0 / c.beta).min(1.0 / i - 1.0 / c.rho).max(0.0)
}

/// Optimal duty cycle `min(1/beta, 1/I(rho) - 1/rho)` of the upper bound.
pub fn theta_star(model: &FadingModel, c: PowerConstraints) -> Result<f64> {
    let i = compute_i(model, c.rho)?.value;
    Ok(theta_from_i(i, c))
}

/// `log(1 + rho theta) - theta I(rho)` at the optimal `theta`.
pub fn upper_bound_u(model: &FadingModel, c: PowerConstraints) -> Result<f64> {
    let i = compute_i(model, c.rho)?.value;
    let theta = theta_from_i(i, c);
    Ok(((c.rho * theta).ln_1p() - theta * i).max(0.0))
}

/// `(rho - I(rho)) / beta`.
pub fn bound_cu(model: &FadingModel, c: PowerConstraints) -> Result<f64> {
    let i = compute_i(model, c.rho)?.value;
    Ok((c.rho - i) / c.beta)
}

/// Gain from knowing the fading through an ideal predictor with error
/// `sigma2`: `log((1 + p) / (1 + p sigma2))`.
pub fn prediction_gain(p_ave: f64, sigma2: f64) -> f64 {
    (p_ave.ln_1p() - (p_ave * sigma2).ln_1p()).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UPred {
    pub value: f64,
    /// Average power at which the bound is attained.
    pub p_ave: f64,
    pub single_letter: f64,
    pub prediction_gain: f64,
    /// False when the single-letter optimiser did not converge; `value` then
    /// holds the best value it found.
    pub converged: bool,
}

/// The objective `sup I(X_0; Y_0) + log((1 + P) / (1 + P sigma2))` at a
/// given average power `P`.
pub fn u_pred_objective(model: &FadingModel, rho: f64, p_ave: f64) -> Result<UPred> {
    let i = compute_i(model, rho)?.value;
    let sigma2 = (i.exp_m1() / rho).min(1.0);
    let sl = single_letter_mi_sup_detailed(rho, p_ave)?;
    let gain = prediction_gain(p_ave, sigma2);
    Ok(UPred {
        value: sl.value + gain,
        p_ave,
        single_letter: sl.value,
        prediction_gain: gain,
        converged: sl.converged,
    })
}

/// Upper bound built from the memoryless peak/average-limited capacity plus
/// the prediction gain, maximised over `P_ave` in `[0, rho/beta]`.
///
/// Both terms are nondecreasing in `P_ave` (the first by nesting of the
/// feasible sets, the second because `sigma2 <= 1`), so the maximum sits at
/// the largest admissible average power.
pub fn upper_bound_u_pred(model: &FadingModel, c: PowerConstraints) -> Result<UPred> {
    u_pred_objective(model, c.rho, c.p_ave())
}

/// Low-SNR coefficient `lim C / rho^2` given `lambda_inf`.
pub fn asymptote_f_from_lambda(lambda_inf: f64, beta: f64) -> f64 {
    if lambda_inf / 2.0 <= 1.0 / beta {
        lambda_inf * lambda_inf / 8.0
    } else {
        lambda_inf / (2.0 * beta) - 1.0 / (2.0 * beta * beta)
    }
}

pub fn asymptote_f(model: &FadingModel, beta: f64) -> Result<f64> {
    check_param("beta", beta, beta >= 1.0, "must be at least 1")?;
    Ok(asymptote_f_from_lambda(
        compute_lambda_inf(model)?.value,
        beta,
    ))
}

pub fn asymptote_cll_from_lambda(lambda_inf: f64, beta: f64) -> f64 {
    (lambda_inf - 1.0) / (2.0 * beta)
}

/// `(lambda_inf - 1) / (2 beta)`, the low-SNR coefficient of the
/// predictor-based lower bound.
pub fn asymptote_cll(model: &FadingModel, beta: f64) -> Result<f64> {
    check_param("beta", beta, beta >= 1.0, "must be at least 1")?;
    Ok(asymptote_cll_from_lambda(
        compute_lambda_inf(model)?.value,
        beta,
    ))
}

/// All bounds at one operating point, in nats per symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSet {
    pub rho: f64,
    pub u: f64,
    pub u_pred: f64,
    pub u_pred_converged: bool,
    pub c_u: f64,
    /// Block on-off rate coefficient times `rho^2`.
    pub l_n: f64,
    pub f_beta_rho2: f64,
    pub theta: f64,
}

/// Evaluates every bound at `c`, with the on-off scheme of length `n`.
pub fn evaluate_bounds(model: &FadingModel, c: PowerConstraints, n: usize) -> Result<BoundSet> {
    let i = compute_i(model, c.rho)?.value;
    let theta = theta_from_i(i, c);
    let u_pred = upper_bound_u_pred(model, c)?;
    let rho2 = c.rho * c.rho;
    Ok(BoundSet {
        rho: c.rho,
        u: ((c.rho * theta).ln_1p() - theta * i).max(0.0),
        u_pred: u_pred.value,
        u_pred_converged: u_pred.converged,
        c_u: (c.rho - i) / c.beta,
        l_n: ln_coefficient(model, n, c.beta)? * rho2,
        f_beta_rho2: asymptote_f(model, c.beta)? * rho2,
        theta,
    })
}
