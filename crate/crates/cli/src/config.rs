use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use fadingcap::ModelSpec;
use num_complex::Complex64;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Nats,
    Bits,
}

impl Units {
    pub fn scale(self) -> f64 {
        match self {
            Units::Nats => 1.0,
            Units::Bits => std::f64::consts::LOG2_E,
        }
    }
}

/// Flags shared by every sweep subcommand. Anything left unset falls back
/// to the config file and then to the built-in default.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Flat `key = value` config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// iid, gauss_markov, bandlimited or finite_memory.
    #[arg(long)]
    pub model: Option<String>,
    /// Gauss-Markov correlation coefficient.
    #[arg(long)]
    pub r: Option<f64>,
    /// Bandlimited spectral occupancy in (0, 1].
    #[arg(long)]
    pub w: Option<f64>,
    /// Finite-memory autocorrelation lags R(1), R(2), ..., each `re` or `re:im`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lags: Option<Vec<String>>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Comma-separated peak SNR values.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub rho: Option<Vec<f64>>,
    /// Log-spaced peak SNR grid `start:stop:count`.
    #[arg(long)]
    pub rho_logspace: Option<String>,
    /// Comma-separated block lengths / window sizes.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub n: Option<Vec<usize>>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub quad_points: Option<usize>,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub units: Option<Units>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum LagValue {
    Real(f64),
    Complex([f64; 2]),
}

/// Contents of a config file. Keys mirror the long flags with `-`
/// replaced by `_`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    model: Option<String>,
    r: Option<f64>,
    w: Option<f64>,
    lags: Option<Vec<LagValue>>,
    beta: Option<f64>,
    rho: Option<Vec<f64>>,
    rho_logspace: Option<String>,
    n: Option<Vec<usize>>,
    seed: Option<u64>,
    samples: Option<usize>,
    quad_points: Option<usize>,
    output: Option<PathBuf>,
    units: Option<Units>,
    pub duty: Option<f64>,
    pub psk: Option<usize>,
    pub ct_model: Option<String>,
    pub gamma: Option<f64>,
    pub ct_w: Option<f64>,
    pub p_peak: Option<Vec<f64>>,
    pub p_ave: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }
}

pub const DEFAULT_RHO_GRID: [f64; 4] = [1e-3, 1e-2, 1e-1, 1.0];
pub const DEFAULT_N: usize = 1024;
pub const DEFAULT_SEED: u64 = 42;

/// Fully resolved sweep parameters.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub model: ModelSpec,
    pub quad_points: usize,
    pub beta: f64,
    pub rho_grid: Vec<f64>,
    pub n_values: Vec<usize>,
    pub seed: u64,
    pub samples: usize,
    pub output: Option<PathBuf>,
    pub units: Units,
    pub file: FileConfig,
}

impl SweepConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let kind = args
            .model
            .clone()
            .or_else(|| file.model.clone())
            .unwrap_or_else(|| "iid".to_string());
        let lags = match &args.lags {
            Some(items) => items
                .iter()
                .map(|s| parse_lag(s))
                .collect::<Result<Vec<_>, _>>()?,
            None => file
                .lags
                .iter()
                .flatten()
                .map(|v| match v {
                    LagValue::Real(x) => Complex64::new(*x, 0.0),
                    LagValue::Complex([re, im]) => Complex64::new(*re, *im),
                })
                .collect(),
        };
        let model = match kind.as_str() {
            "iid" => ModelSpec::Iid,
            "gauss_markov" => ModelSpec::GaussMarkov {
                r: args
                    .r
                    .or(file.r)
                    .ok_or_else(|| CliError::Usage("gauss_markov needs r".into()))?,
            },
            "bandlimited" => ModelSpec::Bandlimited {
                w: args
                    .w
                    .or(file.w)
                    .ok_or_else(|| CliError::Usage("bandlimited needs w".into()))?,
            },
            "finite_memory" => {
                if lags.is_empty() {
                    return Err(CliError::Usage("finite_memory needs lags".into()));
                }
                ModelSpec::FiniteMemory { lags }
            }
            other => return Err(CliError::Usage(format!("unknown model `{other}`"))),
        };
        let rho_grid = match (&args.rho, &args.rho_logspace) {
            (Some(grid), _) => grid.clone(),
            (None, Some(spec)) => logspace(spec)?,
            (None, None) => match (&file.rho, &file.rho_logspace) {
                (Some(grid), _) => grid.clone(),
                (None, Some(spec)) => logspace(spec)?,
                (None, None) => DEFAULT_RHO_GRID.to_vec(),
            },
        };
        if rho_grid.is_empty() {
            return Err(CliError::Usage("rho grid is empty".into()));
        }
        if let Some(bad) = rho_grid.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
            return Err(CliError::Usage(format!("rho must be positive, got {bad}")));
        }
        let beta = args.beta.or(file.beta).unwrap_or(1.0);
        if !(beta >= 1.0 && beta.is_finite()) {
            return Err(CliError::Usage(format!(
                "beta must be at least 1, got {beta}"
            )));
        }
        let n_values = args
            .n
            .clone()
            .or_else(|| file.n.clone())
            .unwrap_or_else(|| vec![DEFAULT_N]);
        if n_values.is_empty() || n_values.contains(&0) {
            return Err(CliError::Usage(
                "n values must be a nonempty list of positive integers".into(),
            ));
        }
        Ok(Self {
            model,
            quad_points: args
                .quad_points
                .or(file.quad_points)
                .unwrap_or(fadingcap::fading::DEFAULT_QUAD_POINTS),
            beta,
            rho_grid,
            n_values,
            seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            samples: args
                .samples
                .or(file.samples)
                .unwrap_or(fadingcap::mi_oracle::DEFAULT_SAMPLES),
            output: args.output.clone().or_else(|| file.output.clone()),
            units: args.units.or(file.units).unwrap_or_default(),
            file,
        })
    }

    pub fn build_model(&self) -> Result<fadingcap::FadingModel, CliError> {
        Ok(fadingcap::FadingModel::from_spec(&self.model)?.with_quad_points(self.quad_points))
    }

    pub fn max_n(&self) -> usize {
        *self.n_values.iter().max().expect("n_values is nonempty")
    }
}

fn parse_lag(s: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Usage(format!("bad lag `{s}`, expected `re` or `re:im`"));
    let mut parts = s.trim().splitn(2, ':');
    let re: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let im: f64 = match parts.next() {
        Some(p) => p.parse().map_err(|_| bad())?,
        None => 0.0,
    };
    Ok(Complex64::new(re, im))
}

/// `start:stop:count`, geometric and inclusive of both ends.
pub fn logspace(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || {
        CliError::Usage(format!(
            "bad log-spaced grid `{spec}`, expected start:stop:count"
        ))
    };
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].parse().map_err(|_| bad())?;
    let count: usize = parts[2].parse().map_err(|_| bad())?;
    if !(start > 0.0 && stop > 0.0) {
        return Err(bad());
    }
    Ok(match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let (a, b) = (start.log10(), stop.log10());
            (0..count)
                .map(|k| 10f64.powf(a + (b - a) * k as f64 / (count - 1) as f64))
                .collect()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logspace_hits_both_ends() {
        let g = logspace("1e-3:1:4").unwrap();
        assert_eq!(g.len(), 4);
        assert!((g[0] - 1e-3).abs() < 1e-18 && (g[3] - 1.0).abs() < 1e-15);
        assert!((g[1] - 1e-2).abs() < 1e-15);
        assert!(logspace("1:2").is_err());
        assert!(logspace("0:1:3").is_err());
    }

    #[test]
    fn lags_parse() {
        assert_eq!(parse_lag("0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(parse_lag("0.25:-0.1").unwrap(), Complex64::new(0.25, -0.1));
        assert!(parse_lag("x").is_err());
    }

    #[test]
    fn file_config_parses_flat_keys() {
        let cfg: FileConfig = toml::from_str(
            "model = \"finite_memory\"\nlags = [0.5, [0.1, 0.2]]\nbeta = 2\nrho = [0.1, 0.2]\nunits = \"bits\"\n",
        )
        .unwrap();
        assert_eq!(cfg.beta, Some(2.0));
        assert_eq!(cfg.units, Some(Units::Bits));
        assert!(toml::from_str::<FileConfig>("colour = 3").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.toml");
        std::fs::write(
            &path,
            "model = \"gauss_markov\"\nr = 0.9\nbeta = 4\nrho = [0.5]\n",
        )
        .unwrap();
        let args = CommonArgs {
            config: Some(path),
            beta: Some(2.0),
            ..Default::default()
        };
        let cfg = SweepConfig::resolve(&args).unwrap();
        assert_eq!(cfg.beta, 2.0);
        assert_eq!(cfg.rho_grid, vec![0.5]);
        assert!(matches!(cfg.model, ModelSpec::GaussMarkov { r } if r == 0.9));
        let empty = CommonArgs {
            rho: Some(vec![]),
            ..Default::default()
        };
        assert!(matches!(
            SweepConfig::resolve(&empty),
            Err(CliError::Usage(_))
        ));
    }
}
