//! Continuous-time fading with a spectral density on the whole frequency
//! axis, and the wideband capacity `P_ave - (P_ave / P_peak) I(P_peak)`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

use crate::error::{check_param, Error, Result};
use crate::quadrature::{CompositeRule, QuadResult};

pub const DEFAULT_CT_PANELS: usize = 4096;
const CT_ORDER: usize = 8;
const MASS_TOL: f64 = 1e-6;

type Psd = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type ClosedForm = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A continuous-time fading process described by its spectral density
/// `S(w)`, `w` in rad/s, normalised so that `∫ S dw / 2pi = 1`.
#[derive(Clone)]
pub struct CtFadingModel {
    name: String,
    psd: Psd,
    closed_form_i: Option<ClosedForm>,
    breakpoints: Vec<f64>,
    scale: f64,
    panels: usize,
}

impl fmt::Debug for CtFadingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CtFadingModel")
            .field("name", &self.name)
            .field("scale", &self.scale)
            .field("breakpoints", &self.breakpoints)
            .field("panels", &self.panels)
            .finish()
    }
}

impl CtFadingModel {
    /// Ornstein-Uhlenbeck fading, `R(t) = exp(-gamma |t|)`,
    /// `S(w) = 2 gamma / (gamma^2 + w^2)`.
    pub fn ou(gamma: f64) -> Result<Self> {
        check_param("gamma", gamma, gamma > 0.0, "must be positive")?;
        Ok(Self {
            name: format!("ou(gamma={gamma})"),
            psd: Arc::new(move |w| 2.0 * gamma / (gamma * gamma + w * w)),
            closed_form_i: Some(Arc::new(move |p| {
                (gamma * gamma + 2.0 * gamma * p).sqrt() - gamma
            })),
            breakpoints: Vec::new(),
            scale: gamma,
            panels: DEFAULT_CT_PANELS,
        })
    }

    /// Flat spectrum `pi / w_max` on `|w| <= w_max`.
    pub fn bandlimited(w_max: f64) -> Result<Self> {
        check_param("w_max", w_max, w_max > 0.0, "must be positive")?;
        Ok(Self {
            name: format!("ct_bandlimited(W={w_max})"),
            psd: Arc::new(move |w| if w.abs() <= w_max { PI / w_max } else { 0.0 }),
            closed_form_i: Some(Arc::new(move |p| w_max / PI * (PI * p / w_max).ln_1p())),
            breakpoints: vec![-w_max, w_max],
            scale: w_max,
            panels: DEFAULT_CT_PANELS,
        })
    }

    /// A user-supplied density. `scale` is the frequency where most of the
    /// mass sits and `breakpoints` lists discontinuities. The density must be
    /// nonnegative, have unit mass and an integrable tail.
    pub fn custom<F>(
        name: impl Into<String>,
        psd: F,
        scale: f64,
        breakpoints: Vec<f64>,
    ) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_param("scale", scale, scale > 0.0, "must be positive")?;
        let mut breakpoints = breakpoints;
        breakpoints.retain(|b| b.is_finite());
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        let model = Self {
            name: name.into(),
            psd: Arc::new(psd),
            closed_form_i: None,
            breakpoints,
            scale,
            panels: DEFAULT_CT_PANELS,
        };
        model.check_tail()?;
        for k in -400..=400 {
            let w = scale * (k as f64 / 40.0).sinh();
            let s = model.psd(w);
            if !(s >= 0.0) {
                return Err(Error::NegativePsd { omega: w, value: s });
            }
        }
        let mass = model.integrate(|s| s)?;
        if (mass.value - 1.0).abs() > MASS_TOL {
            return Err(Error::InconsistentModel(format!(
                "spectral density has mass {} instead of 1",
                mass.value
            )));
        }
        Ok(model)
    }

    pub fn with_panels(mut self, panels: usize) -> Self {
        self.panels = panels.max(2);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn psd(&self, omega: f64) -> f64 {
        (self.psd)(omega)
    }

    /// Closed-form `I(P)` when the model has one.
    pub fn closed_form_i(&self, p_peak: f64) -> Option<f64> {
        self.closed_form_i.as_ref().map(|f| f(p_peak))
    }

    fn check_tail(&self) -> Result<()> {
        for sign in [-1.0, 1.0] {
            let near = self.scale * 1e4;
            let far = self.scale * 1e8;
            let a = near * self.psd(sign * near);
            let b = far * self.psd(sign * far);
            if !b.is_finite() || (b > 0.0 && b >= 0.5 * a) {
                return Err(Error::NonIntegrableTail);
            }
        }
        Ok(())
    }

    /// `∫ g(S(w)) dw / 2pi` over the real line, with `w = scale tan(u)`.
    fn integrate<G: Fn(f64) -> f64>(&self, g: G) -> Result<QuadResult> {
        let rule = CompositeRule::new(CT_ORDER);
        let mut cuts = vec![-FRAC_PI_2];
        cuts.extend(self.breakpoints.iter().map(|b| (b / self.scale).atan()));
        cuts.push(FRAC_PI_2);
        let integrand = |u: f64| {
            let t = u.tan();
            let sec2 = 1.0 + t * t;
            let s = self.psd(self.scale * t);
            let v = g(s);
            if v == 0.0 {
                0.0
            } else {
                v * self.scale * sec2
            }
        };
        let mut value = 0.0;
        let mut error = 0.0;
        for seg in cuts.windows(2) {
            let len = seg[1] - seg[0];
            if len <= 0.0 {
                continue;
            }
            let panels = ((self.panels as f64 * len / PI).round() as usize).max(2);
            let q = rule.integrate_with_error(integrand, seg[0], seg[1], panels);
            value += q.value;
            error += q.error;
        }
        if !value.is_finite() {
            return Err(Error::NonIntegrableTail);
        }
        Ok(QuadResult {
            value: value / (2.0 * PI),
            error: error / (2.0 * PI),
        })
    }
}

/// `I(P) = ∫ log(1 + P S(w)) dw / 2pi`, in nats per second.
pub fn ct_i(model: &CtFadingModel, p_peak: f64) -> Result<QuadResult> {
    check_param("p_peak", p_peak, p_peak >= 0.0, "must be nonnegative")?;
    if p_peak == 0.0 {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
        });
    }
    model.check_tail()?;
    model.integrate(|s| (p_peak * s).ln_1p())
}

/// `P_ave - (P_ave / P_peak) I(P_peak)`, in nats per second.
pub fn ct_capacity(model: &CtFadingModel, p_ave: f64, p_peak: f64) -> Result<f64> {
    check_param("p_peak", p_peak, p_peak > 0.0, "must be positive")?;
    check_param("p_ave", p_ave, p_ave >= 0.0, "must be nonnegative")?;
    if p_ave > p_peak {
        return Err(Error::ConstraintViolation(format!(
            "average power {p_ave} exceeds peak power {p_peak}"
        )));
    }
    let i = ct_i(model, p_peak)?.value;
    Ok((p_ave - p_ave / p_peak * i).clamp(0.0, p_ave))
}
