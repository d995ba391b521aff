//! Stationary unit-variance fading processes.
//!
//! A model is described both by its autocorrelation `R(k) = E[H_{t+k} conj(H_t)]`
//! and by its power spectral density `S(w) = sum_k R(k) exp(-i w k)` on
//! `[0, 2pi)`, so that `R(k) = ∫ S(w) exp(i w k) dw / 2pi`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{check_param, Error, Result};
use crate::quadrature::{periodic_mean, CompositeRule, QuadResult};

/// Default number of points for integrals over the circle.
pub const DEFAULT_QUAD_POINTS: usize = 8192;

const PIECEWISE_ORDER: usize = 8;

/// Plain-data description of a built-in fading family.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Iid,
    /// First-order autoregressive fading, `R(k) = r^|k|`.
    GaussMarkov {
        r: f64,
    },
    /// Flat spectrum `1/w` on a band of total measure `2 pi w` centred at 0.
    Bandlimited {
        w: f64,
    },
    /// Finite-memory fading given by its autocorrelation lags `R(1), ..., R(K)`;
    /// `R(0) = 1` is implied and `R(k) = 0` for `|k| > K`.
    FiniteMemory {
        lags: Vec<Complex64>,
    },
}

type AutocorrFn = dyn Fn(i64) -> Complex64 + Send + Sync;
type PsdFn = dyn Fn(f64) -> f64 + Send + Sync;

struct Custom {
    autocorr: Box<AutocorrFn>,
    psd: Box<PsdFn>,
    breakpoints: Vec<f64>,
}

#[derive(Clone)]
enum Kind {
    Iid,
    GaussMarkov(f64),
    Bandlimited(f64),
    FiniteMemory(Arc<[Complex64]>),
    Custom(Arc<Custom>),
}

/// An immutable stationary fading model.
#[derive(Clone)]
pub struct FadingModel {
    name: String,
    kind: Kind,
    quad_points: usize,
}

impl fmt::Debug for FadingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FadingModel")
            .field("name", &self.name)
            .field("quad_points", &self.quad_points)
            .finish()
    }
}

/// Result of comparing `R(k)` against the Fourier integral of `S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyReport {
    pub max_abs_error: f64,
    pub worst_lag: i64,
}

impl FadingModel {
    pub fn iid() -> Self {
        Self::with_kind("iid".into(), Kind::Iid)
    }

    pub fn gauss_markov(r: f64) -> Result<Self> {
        check_param("r", r, (0.0..1.0).contains(&r), "must lie in [0, 1)")?;
        Ok(Self::with_kind(
            format!("gauss_markov(r={r})"),
            Kind::GaussMarkov(r),
        ))
    }

    pub fn bandlimited(w: f64) -> Result<Self> {
        check_param("w", w, w > 0.0 && w <= 1.0, "must lie in (0, 1]")?;
        Ok(Self::with_kind(
            format!("bandlimited(w={w})"),
            Kind::Bandlimited(w),
        ))
    }

    /// Finite-memory model from the lags `R(1), ..., R(K)`. Rejects lag sets
    /// whose spectrum dips below zero, reporting the offending frequency.
    pub fn finite_memory(lags: Vec<Complex64>) -> Result<Self> {
        for l in &lags {
            check_param("lag", l.norm(), l.norm() <= 1.0, "|R(k)| must not exceed 1")?;
        }
        let name = format!("finite_memory(K={})", lags.len());
        let model = Self::with_kind(name, Kind::FiniteMemory(lags.into()));
        let grid = DEFAULT_QUAD_POINTS.max(64 * model.memory().unwrap_or(0));
        let (omega, value) = (0..grid)
            .map(|j| {
                let w = 2.0 * PI * j as f64 / grid as f64;
                (w, model.psd(w))
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if value < -1e-12 {
            return Err(Error::NegativePsd { omega, value });
        }
        Ok(model)
    }

    /// A user-supplied model. Both halves of the Fourier pair are required;
    /// they are checked against each other rather than derived.
    /// `breakpoints` lists the angles in `[0, 2pi)` where `psd` jumps.
    pub fn custom<R, S>(
        name: impl Into<String>,
        autocorr: R,
        psd: S,
        breakpoints: Vec<f64>,
    ) -> Result<Self>
    where
        R: Fn(i64) -> Complex64 + Send + Sync + 'static,
        S: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let model = Self::with_kind(
            name.into(),
            Kind::Custom(Arc::new(Custom {
                autocorr: Box::new(autocorr),
                psd: Box::new(psd),
                breakpoints,
            })),
        );
        let r0 = model.autocorr(0);
        if (r0 - Complex64::new(1.0, 0.0)).norm() > 1e-9 {
            return Err(Error::InconsistentModel(format!("R(0) = {r0}, expected 1")));
        }
        for k in 1..=32 {
            let (a, b) = (model.autocorr(k), model.autocorr(-k));
            if (a - b.conj()).norm() > 1e-9 || a.norm() > 1.0 + 1e-12 {
                return Err(Error::InconsistentModel(format!(
                    "autocorrelation not Hermitian or exceeds 1 at lag {k}"
                )));
            }
        }
        for j in 0..10_000 {
            let w = 2.0 * PI * j as f64 / 10_000.0;
            let s = model.psd(w);
            if !(s >= -1e-12) {
                return Err(Error::NegativePsd { omega: w, value: s });
            }
        }
        let report = model.check_consistency(32, DEFAULT_QUAD_POINTS);
        if report.max_abs_error > 1e-6 {
            return Err(Error::InconsistentModel(format!(
                "R and S disagree by {:e} at lag {}",
                report.max_abs_error, report.worst_lag
            )));
        }
        Ok(model)
    }

    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        match spec {
            ModelSpec::Iid => Ok(Self::iid()),
            ModelSpec::GaussMarkov { r } => Self::gauss_markov(*r),
            ModelSpec::Bandlimited { w } => Self::bandlimited(*w),
            ModelSpec::FiniteMemory { lags } => Self::finite_memory(lags.clone()),
        }
    }

    fn with_kind(name: String, kind: Kind) -> Self {
        Self {
            name,
            kind,
            quad_points: DEFAULT_QUAD_POINTS,
        }
    }

    /// Returns the same model using `points` samples for circle integrals.
    pub fn with_quad_points(mut self, points: usize) -> Self {
        self.quad_points = points.max(16);
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn quad_points(&self) -> usize {
        self.quad_points
    }

    pub fn spec(&self) -> Option<ModelSpec> {
        match &self.kind {
            Kind::Iid => Some(ModelSpec::Iid),
            Kind::GaussMarkov(r) => Some(ModelSpec::GaussMarkov { r: *r }),
            Kind::Bandlimited(w) => Some(ModelSpec::Bandlimited { w: *w }),
            Kind::FiniteMemory(l) => Some(ModelSpec::FiniteMemory { lags: l.to_vec() }),
            Kind::Custom(_) => None,
        }
    }

    /// Largest lag with nonzero correlation, when it is known to be finite.
    pub fn memory(&self) -> Option<usize> {
        match &self.kind {
            Kind::Iid => Some(0),
            Kind::GaussMarkov(r) if *r == 0.0 => Some(0),
            Kind::Bandlimited(w) if *w == 1.0 => Some(0),
            Kind::FiniteMemory(l) => Some(l.len()),
            _ => None,
        }
    }

    /// `R(k) = E[H_{t+k} conj(H_t)]`.
    pub fn autocorr(&self, k: i64) -> Complex64 {
        if k < 0 {
            return self.autocorr(-k).conj();
        }
        let real = |x: f64| Complex64::new(x, 0.0);
        match &self.kind {
            _ if k == 0 && !matches!(self.kind, Kind::Custom(_)) => real(1.0),
            Kind::Iid => real(0.0),
            Kind::GaussMarkov(r) => real(r.powi(k.min(i32::MAX as i64) as i32)),
            Kind::Bandlimited(w) => {
                if *w == 1.0 {
                    real(0.0)
                } else {
                    let x = PI * w * k as f64;
                    real(x.sin() / x)
                }
            }
            Kind::FiniteMemory(lags) => lags
                .get(k as usize - 1)
                .copied()
                .unwrap_or_else(|| real(0.0)),
            Kind::Custom(c) => (c.autocorr)(k),
        }
    }

    /// `S(w)`, with `w` taken modulo `2pi`.
    pub fn psd(&self, omega: f64) -> f64 {
        match &self.kind {
            Kind::Iid => 1.0,
            Kind::GaussMarkov(r) => (1.0 - r * r) / (1.0 + r * r - 2.0 * r * omega.cos()),
            Kind::Bandlimited(w) => {
                let centred = (omega + PI).rem_euclid(2.0 * PI) - PI;
                if centred.abs() <= PI * w {
                    1.0 / w
                } else {
                    0.0
                }
            }
            Kind::FiniteMemory(lags) => {
                let mut s = 1.0;
                for (k, r) in lags.iter().enumerate() {
                    let phase = Complex64::from_polar(1.0, -omega * (k + 1) as f64);
                    s += 2.0 * (r * phase).re;
                }
                s
            }
            Kind::Custom(c) => (c.psd)(omega.rem_euclid(2.0 * PI)),
        }
    }

    /// Angles in `[0, 2pi)` where the spectrum is discontinuous.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            Kind::Bandlimited(w) if *w < 1.0 => vec![PI * w, 2.0 * PI - PI * w],
            Kind::Custom(c) => c.breakpoints.clone(),
            _ => Vec::new(),
        }
    }

    /// `∫ g(w) dw / 2pi` over one period, using the uniform rule for smooth
    /// spectra and Gauss-Legendre panels between breakpoints otherwise.
    pub fn circle_mean<G: Fn(f64) -> f64>(&self, g: G) -> QuadResult {
        self.circle_mean_with(g, self.quad_points)
    }

    pub fn circle_mean_with<G: Fn(f64) -> f64>(&self, g: G, points: usize) -> QuadResult {
        let mut cuts: Vec<f64> = self
            .breakpoints()
            .into_iter()
            .map(|b| b.rem_euclid(2.0 * PI))
            .collect();
        if cuts.is_empty() {
            return periodic_mean(g, points);
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let rule = CompositeRule::new(PIECEWISE_ORDER);
        let start = cuts[0];
        let mut edges = cuts.clone();
        edges.push(start + 2.0 * PI);
        let mut value = 0.0;
        let mut error = 0.0;
        for seg in edges.windows(2) {
            let len = seg[1] - seg[0];
            if len <= 0.0 {
                continue;
            }
            let panels = ((points as f64 * len / (2.0 * PI)) / PIECEWISE_ORDER as f64)
                .ceil()
                .max(2.0) as usize;
            let r = rule.integrate_with_error(&g, seg[0], seg[1], panels);
            value += r.value;
            error += r.error;
        }
        QuadResult {
            value: value / (2.0 * PI),
            error: error / (2.0 * PI),
        }
    }

    /// Compares `R(k)` with `∫ S(w) exp(i w k) dw / 2pi` for `|k| <= n_terms`.
    pub fn check_consistency(&self, n_terms: usize, quad_points: usize) -> ConsistencyReport {
        let mut report = ConsistencyReport {
            max_abs_error: 0.0,
            worst_lag: 0,
        };
        for k in -(n_terms as i64)..=(n_terms as i64) {
            let kf = k as f64;
            let re = self.circle_mean_with(|w| self.psd(w) * (w * kf).cos(), quad_points);
            let im = self.circle_mean_with(|w| self.psd(w) * (w * kf).sin(), quad_points);
            let err = (self.autocorr(k) - Complex64::new(re.value, im.value)).norm();
            if err > report.max_abs_error {
                report = ConsistencyReport {
                    max_abs_error: err,
                    worst_lag: k,
                };
            }
        }
        report
    }
}
