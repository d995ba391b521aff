use clap::ValueEnum;
use fadingcap::onoff::lambda_n_double_sum;
use fadingcap::prediction::interpolation_error;
use fadingcap::{
    asymptote_cll, asymptote_f, causal_error, compute_lambda_inf, ct_capacity, ct_i,
    finite_window_error, lambda_n, ln_coefficient, mi_monte_carlo, mi_quadratic, mi_quadrature_1d,
    upper_bound_u, CtFadingModel, FadingModel, InputDistribution, PowerConstraints, PredictionMode,
};

use crate::config::{CommonArgs, SweepConfig, Units};
use crate::table::{Cell, Table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Asymptotes,
    Mi,
    Prediction,
    Lambda,
    Ct,
}

/// One line of a validation report. `tolerance` is absolute.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// `|measured - expected| <= tolerance`.
    pub fn close(name: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            expected,
            tolerance,
            pass: (measured - expected).abs() <= tolerance,
        }
    }

    pub fn relative(name: impl Into<String>, measured: f64, expected: f64, rel: f64) -> Self {
        Self::close(name, measured, expected, rel * expected.abs())
    }

    /// `measured <= bound + slack`.
    pub fn at_most(name: impl Into<String>, measured: f64, bound: f64, slack: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            expected: bound,
            tolerance: slack,
            pass: measured <= bound + slack,
        }
    }
}

pub const TIGHTNESS_RHO: f64 = 1e-3;
pub const U_TIGHTNESS_REL: f64 = 0.02;
pub const LN_TIGHTNESS_N: usize = 1024;
pub const LN_TIGHTNESS_REL: f64 = 0.01;
pub const MI_DUTY: f64 = 0.5;
pub const MI_PSK: usize = 4;
pub const MI_BLOCK: usize = 3;
pub const MI_RHOS: [f64; 2] = [0.1, 0.05];
pub const LAMBDA_NS: [usize; 6] = [1, 2, 8, 32, 128, 512];
pub const PREDICTION_RHO: f64 = 1.0;
pub const CAUSAL_WINDOW: usize = 1024;
pub const NONCAUSAL_WINDOW: usize = 2048;
pub const PREDICTION_TOL: f64 = 1e-3;

fn betas(cfg: &SweepConfig) -> Vec<f64> {
    let mut b = vec![1.0, 2.0, 4.0];
    if !b.contains(&cfg.beta) {
        b.push(cfg.beta);
    }
    b
}

pub fn asymptote_checks(model: &FadingModel, cfg: &SweepConfig) -> Result<Vec<Check>, CliError> {
    let lambda = compute_lambda_inf(model)?.value;
    let mut out = Vec::new();
    for beta in betas(cfg) {
        let f = asymptote_f(model, beta)?;
        let cll = asymptote_cll(model, beta)?;
        let rho = TIGHTNESS_RHO;
        let u = upper_bound_u(model, PowerConstraints::new(rho, beta)?)?;
        out.push(Check::relative(
            format!("U_rho2_vs_f[beta={beta}]"),
            u / (rho * rho),
            f,
            U_TIGHTNESS_REL,
        ));
        let ln = ln_coefficient(model, LN_TIGHTNESS_N, beta)?;
        out.push(Check::relative(
            format!("L_n_vs_f[beta={beta};n={LN_TIGHTNESS_N}]"),
            ln,
            f,
            LN_TIGHTNESS_REL,
        ));
        out.push(Check::at_most(
            format!("L_n_le_f[beta={beta}]"),
            ln,
            f,
            1e-12,
        ));
        out.push(Check::at_most(
            format!("Cll_le_f[beta={beta}]"),
            cll,
            f,
            1e-12,
        ));
        out.push(Check::at_most(
            format!("f_le_lambda_over_2beta[beta={beta}]"),
            f,
            lambda / (2.0 * beta),
            1e-12,
        ));
        if beta == 1.0 && lambda >= 2.0 {
            out.push(Check::close("Cll_eq_f[beta=1]", cll, f, 1e-12));
        }
    }
    Ok(out)
}

pub fn mi_checks(model: &FadingModel, cfg: &SweepConfig) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    let mut rho = 0.05;
    let mut prev_gap = f64::INFINITY;
    for step in 0..3 {
        let q = mi_quadrature_1d(MI_DUTY, rho)?.value / (rho * rho);
        if step == 0 {
            out.push(Check::close(
                format!("mi_1d_rho2[rho={rho}]"),
                q,
                0.125,
                0.01,
            ));
        } else {
            out.push(Check::at_most(
                format!("mi_1d_gap_shrinks[rho={rho}]"),
                (q - 0.125).abs(),
                prev_gap,
                0.0,
            ));
        }
        prev_gap = (q - 0.125).abs();
        rho /= 2.0;
    }
    let scalar = InputDistribution::iid_on_off(1, MI_DUTY, MI_PSK)?;
    let block = InputDistribution::iid_on_off(MI_BLOCK, MI_DUTY, MI_PSK)?;
    let quad_block = mi_quadratic(&block, model);
    for rho in MI_RHOS {
        let mc = mi_monte_carlo(&scalar, model, rho, cfg.samples, cfg.seed)?;
        let exact = mi_quadrature_1d(MI_DUTY, rho)?;
        out.push(Check::close(
            format!("mc_vs_quadrature_1d[rho={rho}]"),
            mc.value,
            exact.value,
            3.0 * mc.stderr + exact.stderr,
        ));
        let mc = mi_monte_carlo(&block, model, rho, cfg.samples, cfg.seed)?;
        out.push(Check::close(
            format!("mc_vs_quadratic[n={MI_BLOCK};rho={rho}]"),
            mc.value,
            quad_block.value_at(rho),
            3.0 * mc.stderr + 0.2 * rho.powi(3),
        ));
    }
    Ok(out)
}

pub fn prediction_checks(model: &FadingModel) -> Result<Vec<Check>, CliError> {
    let rho = PREDICTION_RHO;
    let causal = finite_window_error(model, rho, CAUSAL_WINDOW, PredictionMode::Causal)?.sigma2;
    let noncausal =
        finite_window_error(model, rho, NONCAUSAL_WINDOW, PredictionMode::Noncausal)?.sigma2;
    Ok(vec![
        Check::close(
            format!("causal_window[n={CAUSAL_WINDOW};rho={rho}]"),
            causal,
            causal_error(model, rho)?.sigma2,
            PREDICTION_TOL,
        ),
        Check::close(
            format!("noncausal_window[n={NONCAUSAL_WINDOW};rho={rho}]"),
            noncausal,
            interpolation_error(model, rho)?.sigma2,
            PREDICTION_TOL,
        ),
    ])
}

pub fn lambda_checks(model: &FadingModel, cfg: &SweepConfig) -> Result<Vec<Check>, CliError> {
    let lambda = compute_lambda_inf(model)?.value;
    let mut ns: Vec<usize> = LAMBDA_NS.iter().chain(&cfg.n_values).copied().collect();
    ns.sort_unstable();
    ns.dedup();
    let mut out = Vec::new();
    for &n in &ns {
        out.push(Check::at_most(
            format!("lambda_n_le_lambda_inf[n={n}]"),
            lambda_n(model, n)?,
            lambda,
            1e-12,
        ));
    }
    for n in [1, 8, 64] {
        out.push(Check::relative(
            format!("lambda_n_double_sum[n={n}]"),
            lambda_n_double_sum(model, n)?,
            lambda_n(model, n)?,
            1e-12,
        ));
    }
    out.push(Check::relative(
        "lambda_512_vs_lambda_inf",
        lambda_n(model, 512)?,
        lambda,
        0.01,
    ));
    Ok(out)
}

pub fn ct_checks() -> Result<Vec<Check>, CliError> {
    let ou = CtFadingModel::ou(1.0)?;
    let band = CtFadingModel::bandlimited(2.0)?;
    Ok(vec![
        Check::close(
            "ct_ou_I[P=2]",
            ct_i(&ou, 2.0)?.value,
            5f64.sqrt() - 1.0,
            1e-6,
        ),
        Check::close(
            "ct_ou_C[P_ave=0.5;P_peak=2]",
            ct_capacity(&ou, 0.5, 2.0)?,
            0.1909830,
            1e-6,
        ),
        Check::relative(
            "ct_bandlimited_I[W=2;P=1]",
            ct_i(&band, 1.0)?.value,
            band.closed_form_i(1.0).expect("closed form"),
            1e-6,
        ),
    ])
}

pub fn checks(suite: Suite, cfg: &SweepConfig) -> Result<Vec<Check>, CliError> {
    let model = cfg.build_model()?;
    let mut out = Vec::new();
    if matches!(suite, Suite::All | Suite::Asymptotes) {
        out.extend(asymptote_checks(&model, cfg)?);
    }
    if matches!(suite, Suite::All | Suite::Mi) {
        out.extend(mi_checks(&model, cfg)?);
    }
    if matches!(suite, Suite::All | Suite::Prediction) {
        out.extend(prediction_checks(&model)?);
    }
    if matches!(suite, Suite::All | Suite::Lambda) {
        out.extend(lambda_checks(&model, cfg)?);
    }
    if matches!(suite, Suite::All | Suite::Ct) {
        out.extend(ct_checks()?);
    }
    Ok(out)
}

pub fn report(checks: &[Check]) -> Table {
    let mut table = Table::new(vec!["name", "measured", "expected", "tolerance", "status"]);
    for c in checks {
        table.push(vec![
            Cell::Text(c.name.clone()),
            Cell::Real(c.measured),
            Cell::Real(c.expected),
            Cell::Real(c.tolerance),
            Cell::Text(if c.pass { "PASS" } else { "FAIL" }.to_string()),
        ]);
    }
    table
}

pub fn run(suite: Suite, args: &CommonArgs) -> Result<(), CliError> {
    let cfg = SweepConfig::resolve(args)?;
    let checks = checks(suite, &cfg)?;
    report(&checks).emit(cfg.output.as_deref(), Units::Nats)?;
    let failed = checks.iter().filter(|c| !c.pass).count();
    if failed > 0 {
        return Err(CliError::Validation {
            failed,
            total: checks.len(),
        });
    }
    Ok(())
}
