use clap::{Args, ValueEnum};
use fadingcap::prediction::interpolation_error;
use fadingcap::{
    asymptote_f, causal_error, cll_monte_carlo, ct_capacity, ct_i, evaluate_bounds,
    finite_window_error, mi_monte_carlo, mi_quadratic, upper_bound_u, CtFadingModel,
    InputDistribution, OnOffScheme, PowerConstraints, PredictionMode,
};
use rayon::prelude::*;

use crate::config::{CommonArgs, SweepConfig};
use crate::table::{Cell, Table};
use crate::CliError;

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Add a Monte Carlo estimate of the constant-amplitude lower bound
    /// (QPSK given the infinite past) and its standard error.
    #[arg(long)]
    pub cll_mc: bool,
}

pub fn bounds(args: &BoundsArgs) -> Result<(), CliError> {
    let cfg = SweepConfig::resolve(&args.common)?;
    let model = cfg.build_model()?;
    let n = cfg.max_n();
    let rows = cfg
        .rho_grid
        .par_iter()
        .map(|&rho| {
            let b = evaluate_bounds(&model, PowerConstraints::new(rho, cfg.beta)?, n)?;
            let mut row = vec![
                Cell::Real(b.rho),
                Cell::Info(b.u),
                Cell::Info(b.u_pred),
                Cell::Info(b.c_u),
                Cell::Info(b.l_n),
                Cell::Info(b.f_beta_rho2),
                Cell::Real(b.theta),
            ];
            if args.cll_mc {
                let est = cll_monte_carlo(&model, rho, cfg.beta, cfg.samples, cfg.seed)?;
                row.push(Cell::Info(est.value));
                row.push(Cell::Info(est.stderr));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut header = vec!["rho", "U", "U_pred", "C_u", "L_n", "f_beta_rho2", "theta"];
    if args.cll_mc {
        header.extend(["C_ll_mc", "C_ll_mc_stderr"]);
    }
    let mut table = Table::new(header);
    rows.into_iter().for_each(|r| table.push(r));
    table.emit(cfg.output.as_deref(), cfg.units)
}

pub fn asymptote(args: &CommonArgs) -> Result<(), CliError> {
    let cfg = SweepConfig::resolve(args)?;
    let model = cfg.build_model()?;
    let f = asymptote_f(&model, cfg.beta)?;
    let coeff = OnOffScheme::new(&model, cfg.max_n(), cfg.beta)?.coeff;
    let rows = cfg
        .rho_grid
        .par_iter()
        .map(|&rho| {
            let u = upper_bound_u(&model, PowerConstraints::new(rho, cfg.beta)?)?;
            Ok(vec![
                Cell::Real(rho),
                Cell::Info(u / (rho * rho)),
                Cell::Info(coeff),
                Cell::Info(f),
            ])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut table = Table::new(vec!["rho", "U_rho2", "L_n_rho2", "f_beta"]);
    rows.into_iter().for_each(|r| table.push(r));
    table.emit(cfg.output.as_deref(), cfg.units)
}

pub fn lowerbound(args: &CommonArgs) -> Result<(), CliError> {
    let cfg = SweepConfig::resolve(args)?;
    let model = cfg.build_model()?;
    let rows = cfg
        .n_values
        .par_iter()
        .map(|&n| {
            let s = OnOffScheme::new(&model, n, cfg.beta)?;
            Ok(vec![
                Cell::Int(n),
                Cell::Real(s.lambda_n),
                Cell::Real(s.a),
                Cell::Info(s.coeff),
            ])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut table = Table::new(vec!["n", "lambda_n", "a", "coeff"]);
    rows.into_iter().for_each(|r| table.push(r));
    table.emit(cfg.output.as_deref(), cfg.units)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OnOffLaw {
    /// Coordinates switch on and off independently.
    Iid,
    /// All coordinates switch together.
    Coupled,
}

#[derive(Debug, Clone, Args)]
pub struct MiArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// On-off duty cycle; defaults to the optimal duty of the scheme.
    #[arg(long)]
    pub duty: Option<f64>,
    /// Number of phase points of the "on" symbol.
    #[arg(long)]
    pub psk: Option<usize>,
    #[arg(long, value_enum, default_value = "iid")]
    pub law: OnOffLaw,
    /// Add Monte Carlo estimates with standard errors.
    #[arg(long)]
    pub oracle: bool,
}

pub fn mi(args: &MiArgs) -> Result<(), CliError> {
    let cfg = SweepConfig::resolve(&args.common)?;
    let model = cfg.build_model()?;
    let psk = args.psk.or(cfg.file.psk).unwrap_or(4);
    let points: Vec<(usize, f64)> = cfg
        .n_values
        .iter()
        .flat_map(|&n| cfg.rho_grid.iter().map(move |&rho| (n, rho)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(n, rho)| {
            let duty = match args.duty.or(cfg.file.duty) {
                Some(d) => d,
                None => OnOffScheme::new(&model, n, cfg.beta)?.a,
            };
            let mu = match args.law {
                OnOffLaw::Iid => InputDistribution::iid_on_off(n, duty, psk)?,
                OnOffLaw::Coupled => InputDistribution::coupled_on_off(n, duty, psk)?,
            };
            let quad = mi_quadratic(&mu, &model).value_at(rho);
            let mut row = vec![
                Cell::Int(n),
                Cell::Real(rho),
                Cell::Real(duty),
                Cell::Info(quad),
            ];
            if args.oracle {
                let est = mi_monte_carlo(&mu, &model, rho, cfg.samples, cfg.seed)?;
                row.push(Cell::Info(est.value));
                row.push(Cell::Info(est.stderr));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut header = vec!["n", "rho", "duty", "mi_quadratic"];
    if args.oracle {
        header.extend(["mi_monte_carlo", "stderr"]);
    }
    let mut table = Table::new(header);
    rows.into_iter().for_each(|r| table.push(r));
    table.emit(cfg.output.as_deref(), cfg.units)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Causal,
    Noncausal,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value = "causal")]
    pub mode: ModeArg,
}

/// Runs at a single `rho`. The asymptotic column is the limit of the window
/// column: the infinite-past error when causal, the error given every
/// sample but `Y_0` otherwise.
pub fn predict(args: &PredictArgs) -> Result<(), CliError> {
    let cfg = SweepConfig::resolve(&args.common)?;
    let [rho] = cfg.rho_grid[..] else {
        return Err(CliError::Usage(format!(
            "predict takes a single rho, got {}",
            cfg.rho_grid.len()
        )));
    };
    let model = cfg.build_model()?;
    let mode = match args.mode {
        ModeArg::Causal => PredictionMode::Causal,
        ModeArg::Noncausal => PredictionMode::Noncausal,
    };
    let limit = match mode {
        PredictionMode::Causal => causal_error(&model, rho)?.sigma2,
        PredictionMode::Noncausal => interpolation_error(&model, rho)?.sigma2,
    };
    let rows = cfg
        .n_values
        .par_iter()
        .map(|&n| {
            let window = finite_window_error(&model, rho, n, mode)?.sigma2;
            Ok(vec![Cell::Int(n), Cell::Real(window), Cell::Real(limit)])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut table = Table::new(vec!["n", "sigma2_window", "sigma2_asymptotic"]);
    rows.into_iter().for_each(|r| table.push(r));
    table.emit(cfg.output.as_deref(), cfg.units)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CtModelArg {
    Ou,
    Bandlimited,
}

#[derive(Debug, Clone, Args)]
pub struct CtArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub ct_model: Option<CtModelArg>,
    /// OU decay rate.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Bandlimited half-bandwidth in rad/s.
    #[arg(long)]
    pub ct_w: Option<f64>,
    /// Comma-separated peak powers.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub p_peak: Option<Vec<f64>>,
    #[arg(long)]
    pub p_ave: Option<f64>,
}

pub fn ct(args: &CtArgs) -> Result<(), CliError> {
    let cfg = SweepConfig::resolve(&args.common)?;
    let kind = match (args.ct_model, cfg.file.ct_model.as_deref()) {
        (Some(k), _) => k,
        (None, None | Some("ou")) => CtModelArg::Ou,
        (None, Some("bandlimited")) => CtModelArg::Bandlimited,
        (None, Some(other)) => return Err(CliError::Usage(format!("unknown ct_model `{other}`"))),
    };
    let model = match kind {
        CtModelArg::Ou => CtFadingModel::ou(args.gamma.or(cfg.file.gamma).unwrap_or(1.0))?,
        CtModelArg::Bandlimited => CtFadingModel::bandlimited(
            args.ct_w
                .or(cfg.file.ct_w)
                .ok_or_else(|| CliError::Usage("bandlimited ct model needs ct_w".into()))?,
        )?,
    };
    let p_peak = args
        .p_peak
        .clone()
        .or_else(|| cfg.file.p_peak.clone())
        .unwrap_or_else(|| vec![2.0]);
    if p_peak.is_empty() {
        return Err(CliError::Usage("p_peak grid is empty".into()));
    }
    let rows = p_peak
        .par_iter()
        .map(|&pk| {
            let pa = args.p_ave.or(cfg.file.p_ave).unwrap_or(pk);
            let i = ct_i(&model, pk)?.value;
            let c = ct_capacity(&model, pa, pk)?;
            Ok(vec![
                Cell::Real(pk),
                Cell::Real(pa),
                Cell::Info(i),
                Cell::Info(c),
            ])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut table = Table::new(vec!["P_peak", "P_ave", "I", "C"]);
    rows.into_iter().for_each(|r| table.push(r));
    table.emit(cfg.output.as_deref(), cfg.units)
}
