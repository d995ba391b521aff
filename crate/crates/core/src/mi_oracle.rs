//! Brute-force mutual information of the block fading channel, used as the
//! ground truth for the quadratic approximation and for the bounds.
//!
//! Given the input block `z`, the output row `Y` is proper complex Gaussian
//! with `E[Y^† Y] = K_Y = rho K_Z + I`. Internally the column `w = Y^†` is
//! used, so that `Y K_Y^{-1} Y^† = w^H K_Y^{-1} w` and `w = L g` for the
//! Cholesky factor `K_Y = L L^H` and white `g`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{check_param, Error, Result};
use crate::fading::FadingModel;
use crate::prediction::causal_error;
use crate::quadrature::adaptive;
use crate::vector_channel::{k_of_z, InputDistribution};

/// Default Monte Carlo sample count.
pub const DEFAULT_SAMPLES: usize = 100_000;
const BATCH: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MiMethod {
    MonteCarlo,
    Quadrature1d,
}

/// A mutual-information estimate in nats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiEstimate {
    pub value: f64,
    /// Standard error (Monte Carlo) or quadrature error estimate.
    pub stderr: f64,
    pub samples: usize,
    pub method: MiMethod,
}

impl MiEstimate {
    fn exact_zero(method: MiMethod, samples: usize) -> Self {
        Self {
            value: 0.0,
            stderr: 0.0,
            samples,
            method,
        }
    }
}

/// `K_Y = rho K_Z + I`.
pub fn conditional_covariance(
    z: &[Complex64],
    model: &FadingModel,
    rho: f64,
) -> DMatrix<Complex64> {
    let n = z.len();
    k_of_z(z, model) * Complex64::new(rho, 0.0) + DMatrix::identity(n, n)
}

/// `log q(Y | Z) = -Y K_Y^{-1} Y^† - n log(pi) - log det K_Y` for a row `y`.
pub fn log_conditional_density(y: &[Complex64], k_y: &DMatrix<Complex64>) -> Result<f64> {
    let factor = GaussianFactor::new(k_y.clone())?;
    let w = DVector::from_iterator(y.len(), y.iter().map(|v| v.conj()));
    Ok(factor.log_density(&w) - y.len() as f64 * std::f64::consts::PI.ln())
}

struct GaussianFactor {
    chol: Cholesky<Complex64, Dyn>,
    log_det: f64,
}

impl GaussianFactor {
    fn new(k: DMatrix<Complex64>) -> Result<Self> {
        let chol = Cholesky::new(k)
            .ok_or_else(|| Error::NotPositiveDefinite("conditional output covariance".into()))?;
        let l = chol.l_dirty();
        let n = l.nrows();
        if (0..n).any(|i| !(l[(i, i)].re > 0.0) || l[(i, i)].im.abs() > 1e-12 * l[(i, i)].re) {
            return Err(Error::NotPositiveDefinite(
                "conditional output covariance".into(),
            ));
        }
        let log_det = 2.0 * (0..l.nrows()).map(|i| l[(i, i)].re.ln()).sum::<f64>();
        Ok(Self { chol, log_det })
    }

    /// Log-density without the `-n log(pi)` constant.
    fn log_density(&self, w: &DVector<Complex64>) -> f64 {
        let l = self.chol.l_dirty();
        let n = w.len();
        // forward substitution L s = w, lower triangle only
        let mut s = vec![Complex64::new(0.0, 0.0); n];
        let mut quad = 0.0;
        for i in 0..n {
            let mut acc = w[i];
            for j in 0..i {
                acc -= l[(i, j)] * s[j];
            }
            s[i] = acc / l[(i, i)].re;
            quad += s[i].norm_sqr();
        }
        -quad - self.log_det
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> DVector<Complex64> {
        let l = self.chol.l_dirty();
        let n = l.nrows();
        let g: Vec<Complex64> = (0..n).map(|_| standard_complex(rng)).collect();
        DVector::from_fn(n, |i, _| (0..=i).map(|j| l[(i, j)] * g[j]).sum())
    }
}

fn standard_complex<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    top + values.iter().map(|v| (v - top).exp()).sum::<f64>().ln()
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let d = x - self.mean;
        self.mean += d / self.count;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Self) -> Self {
        if self.count == 0.0 {
            return other;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        Self {
            count,
            mean: self.mean + d * other.count / count,
            m2: self.m2 + other.m2 + d * d * self.count * other.count / count,
        }
    }

    fn stderr(&self) -> f64 {
        if self.count < 2.0 {
            return 0.0;
        }
        (self.m2 / (self.count - 1.0) / self.count).sqrt()
    }
}

/// Runs `per_sample` over `samples` draws split into fixed-size batches, each
/// with its own ChaCha stream, and reduces the batches in order so that the
/// result is bit-for-bit reproducible regardless of thread count.
fn batched_mean<F>(samples: usize, seed: u64, per_sample: F) -> Moments
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let batches = samples.div_ceil(BATCH);
    let partial: Vec<Moments> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = BATCH.min(samples - b * BATCH);
            let mut m = Moments::default();
            for _ in 0..count {
                m.push(per_sample(&mut rng));
            }
            m
        })
        .collect();
    partial.into_iter().fold(Moments::default(), Moments::merge)
}

/// Monte Carlo estimate of `I(Z; Y) = E[log q(Y|Z) - log sum_k mu_k q(Y|z_k)]`
/// with exact Gaussian sampling of the output.
pub fn mi_monte_carlo(
    mu: &InputDistribution,
    model: &FadingModel,
    rho: f64,
    samples: usize,
    seed: u64,
) -> Result<MiEstimate> {
    check_param("rho", rho, rho >= 0.0, "must be nonnegative")?;
    if samples == 0 {
        return Err(Error::InvalidParameter {
            name: "samples",
            value: 0.0,
            reason: "must be positive",
        });
    }
    if rho == 0.0 || mu.atoms().len() == 1 {
        return Ok(MiEstimate::exact_zero(MiMethod::MonteCarlo, samples));
    }
    let factors = mu
        .atoms()
        .iter()
        .map(|a| GaussianFactor::new(conditional_covariance(&a.z, model, rho)))
        .collect::<Result<Vec<_>>>()?;
    let log_p: Vec<f64> = mu.atoms().iter().map(|a| a.p.ln()).collect();
    let mut cumulative = Vec::with_capacity(log_p.len());
    let mut acc = 0.0;
    for a in mu.atoms() {
        acc += a.p;
        cumulative.push(acc);
    }

    let moments = batched_mean(samples, seed, |rng| {
        let u: f64 = rng.random::<f64>() * acc;
        let own = cumulative
            .partition_point(|&c| c < u)
            .min(factors.len() - 1);
        let w = factors[own].sample(rng);
        let terms: Vec<f64> = factors
            .iter()
            .zip(&log_p)
            .map(|(f, lp)| lp + f.log_density(&w))
            .collect();
        terms[own] - log_p[own] - log_sum_exp(&terms)
    });
    Ok(MiEstimate {
        value: moments.mean,
        stderr: moments.stderr(),
        samples,
        method: MiMethod::MonteCarlo,
    })
}

/// Exact mutual information of the scalar on-off channel with duty `a`:
/// `|Y|^2` is exponential with mean 1 (off) or `1 + rho` (on). Evaluated by
/// adaptive quadrature of the pointwise nonnegative divergence integrand.
pub fn mi_quadrature_1d(a: f64, rho: f64) -> Result<MiEstimate> {
    check_param("a", a, (0.0..=1.0).contains(&a), "must lie in [0, 1]")?;
    check_param("rho", rho, rho >= 0.0, "must be nonnegative")?;
    if a == 0.0 || a == 1.0 || rho == 0.0 {
        return Ok(MiEstimate::exact_zero(MiMethod::Quadrature1d, 0));
    }
    let mean_on = 1.0 + rho;
    let log_mean_on = rho.ln_1p();
    // r log r - r + 1 with r = exp(l)
    let phi = |l: f64| {
        let e = l.exp();
        if e == 0.0 {
            1.0
        } else {
            l * e - (e - 1.0)
        }
    };
    let integrand = |t: f64| {
        let d = t * rho / mean_on - log_mean_on;
        let l_off = -log_mix(1.0 - a, a, d);
        let l_on = -log_mix(a, 1.0 - a, -d);
        let mix = (1.0 - a) * (-t).exp() + a * (-t / mean_on).exp() / mean_on;
        mix * ((1.0 - a) * phi(l_off) + a * phi(l_on))
    };
    // the two exponential components live on scales 1 and 1 + rho
    let mut cuts: Vec<f64> = [1.0, 5.0, 20.0, 60.0]
        .iter()
        .flat_map(|&c| [c, c * mean_on])
        .collect();
    cuts.push(0.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let (mut value, mut error) = (0.0, 0.0);
    for seg in cuts.windows(2) {
        let r = adaptive(integrand, seg[0], seg[1], 1e-18, 1e-11, 2000);
        value += r.value;
        error += r.error;
    }
    Ok(MiEstimate {
        value,
        stderr: error,
        samples: 0,
        method: MiMethod::Quadrature1d,
    })
}

/// `log(p + q exp(d))` for weights `p + q = 1`.
fn log_mix(p: f64, q: f64, d: f64) -> f64 {
    if d < 1.0 {
        (q * d.exp_m1()).ln_1p()
    } else {
        let (hi, lo) = (q.ln() + d, p.ln());
        hi + (lo - hi).exp().ln_1p()
    }
}

/// Monte Carlo estimate of the constant-amplitude lower bound
/// `(1/beta) I(X_0; Y_0 | past)` with QPSK input. Given the infinite past at
/// peak power, `H_0` is Gaussian around its prediction with variance equal to
/// the causal prediction error `sigma^2`, and the prediction itself has
/// variance `1 - sigma^2`.
pub fn cll_monte_carlo(
    model: &FadingModel,
    rho: f64,
    beta: f64,
    samples: usize,
    seed: u64,
) -> Result<MiEstimate> {
    check_param("rho", rho, rho > 0.0, "must be positive")?;
    check_param("beta", beta, beta >= 1.0, "must be at least 1")?;
    let sigma2 = causal_error(model, rho)?.sigma2;
    let known = (1.0 - sigma2).max(0.0).sqrt();
    let noise = (1.0 + rho * sigma2).sqrt();
    let amp = rho.sqrt();
    let qpsk = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    let moments = batched_mean(samples.max(1), seed, |rng| {
        let h = standard_complex(rng) * known;
        let own = rng.random_range(0..4usize);
        let y = amp * qpsk[own] * h + standard_complex(rng) * noise;
        let terms: Vec<f64> = qpsk
            .iter()
            .map(|x| -(y - amp * x * h).norm_sqr() / (noise * noise))
            .collect();
        terms[own] - log_sum_exp(&terms) + 4f64.ln()
    });
    Ok(MiEstimate {
        value: moments.mean / beta,
        stderr: moments.stderr() / beta,
        samples,
        method: MiMethod::MonteCarlo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn conditional_covariance_examples() {
        let iid = FadingModel::iid();
        let k = conditional_covariance(&[c(0.0), c(0.0)], &iid, 3.0);
        assert_eq!(k, DMatrix::identity(2, 2));
        let k = conditional_covariance(&[c(1.0)], &iid, 1.0);
        assert_eq!(k[(0, 0)], c(2.0));
        let gm = FadingModel::gauss_markov(0.5).unwrap();
        let k = conditional_covariance(&[c(1.0), c(1.0)], &gm, 2.0);
        assert_eq!(
            k,
            DMatrix::from_row_slice(2, 2, &[c(3.0), c(1.0), c(1.0), c(3.0)])
        );
    }

    #[test]
    fn log_density_examples() {
        let id = DMatrix::<Complex64>::identity(1, 1);
        let v = log_conditional_density(&[c(0.0)], &id).unwrap();
        assert_relative_eq!(v, -std::f64::consts::PI.ln(), epsilon = 1e-15);
        let k = DMatrix::from_element(1, 1, c(2.0));
        let v = log_conditional_density(&[Complex64::new(0.6, 0.8)], &k).unwrap();
        assert_relative_eq!(v, -0.5 - (2.0 * std::f64::consts::PI).ln(), epsilon = 1e-15);
        let bad = DMatrix::from_element(1, 1, c(-1.0));
        assert!(log_conditional_density(&[c(0.0)], &bad).is_err());
    }

    #[test]
    fn density_integrates_to_one() {
        // Importance sampling from CN(0, 4 I) against the density of K_Y.
        let gm = FadingModel::gauss_markov(0.6).unwrap();
        let k = conditional_covariance(&[c(1.0), Complex64::new(0.0, 1.0)], &gm, 1.5);
        let proposal_var: f64 = 4.0;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut m = Moments::default();
        for _ in 0..200_000 {
            let y: Vec<Complex64> = (0..2)
                .map(|_| standard_complex(&mut rng) * proposal_var.sqrt())
                .collect();
            let lq = log_conditional_density(&y, &k).unwrap();
            let lprop = -y.iter().map(|v| v.norm_sqr()).sum::<f64>() / proposal_var
                - 2.0 * (std::f64::consts::PI * proposal_var).ln();
            m.push((lq - lprop).exp());
        }
        assert!(
            (m.mean - 1.0).abs() <= 3.0 * m.stderr(),
            "{} ± {}",
            m.mean,
            m.stderr()
        );
    }

    #[test]
    fn monte_carlo_degenerate_cases() {
        let gm = FadingModel::gauss_markov(0.5).unwrap();
        let pm = InputDistribution::point_mass(vec![c(1.0), c(1.0)]).unwrap();
        let e = mi_monte_carlo(&pm, &gm, 0.3, 2000, 1).unwrap();
        assert!(e.value.abs() <= 3.0 * e.stderr);
        let mu = InputDistribution::iid_on_off(2, 0.5, 2).unwrap();
        let e = mi_monte_carlo(&mu, &gm, 0.0, 2000, 1).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let gm = FadingModel::gauss_markov(0.5).unwrap();
        let mu = InputDistribution::iid_on_off(2, 0.5, 4).unwrap();
        let a = mi_monte_carlo(&mu, &gm, 0.2, 20_000, 42).unwrap();
        let b = mi_monte_carlo(&mu, &gm, 0.2, 20_000, 42).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
        let c = mi_monte_carlo(&mu, &gm, 0.2, 20_000, 43).unwrap();
        assert_ne!(a.value, c.value);
    }

    #[test]
    fn monte_carlo_matches_scalar_quadrature() {
        let mu = InputDistribution::iid_on_off(1, 0.5, 1).unwrap();
        let mc = mi_monte_carlo(&mu, &FadingModel::iid(), 0.05, 1_000_000, 11).unwrap();
        let q = mi_quadrature_1d(0.5, 0.05).unwrap();
        assert!(
            (mc.value - q.value).abs() <= 3.0 * mc.stderr,
            "{} ± {} vs {}",
            mc.value,
            mc.stderr,
            q.value
        );
    }

    #[test]
    fn quadrature_1d_examples() {
        assert_eq!(mi_quadrature_1d(0.0, 1.0).unwrap().value, 0.0);
        let rho = 0.05;
        let v = mi_quadrature_1d(0.5, rho).unwrap().value / (rho * rho);
        assert!((0.9 * 0.125..=1.1 * 0.125).contains(&v), "{v}");
        let coarse = mi_quadrature_1d(0.5, 0.1).unwrap().value / 0.01;
        let fine = mi_quadrature_1d(0.5, 0.01).unwrap().value / 1e-4;
        assert!((fine - 0.125).abs() < (coarse - 0.125).abs());
    }

    #[test]
    fn quadrature_1d_matches_large_snr_limit() {
        // At huge SNR the on/off decision becomes nearly error free: I -> h(a).
        let a: f64 = 0.3;
        let h = -(a * a.ln() + (1.0 - a) * (1.0 - a).ln());
        let v = mi_quadrature_1d(a, 1e6).unwrap().value;
        assert!(v < h && v > h - 1e-3, "{v} vs {h}");
    }

    #[test]
    fn cll_monte_carlo_matches_low_snr_expansion() {
        // For a proper constellation I = snr - snr^2 / 2 + O(snr^3), with
        // snr = rho |h|^2 / (1 + rho sigma2) and |h|^2 exponential of mean v.
        let gm = FadingModel::gauss_markov(0.9).unwrap();
        let rho = 0.05;
        let beta = 2.0;
        let est = cll_monte_carlo(&gm, rho, beta, 400_000, 5).unwrap();
        let sigma2 = causal_error(&gm, rho).unwrap().sigma2;
        let v = 1.0 - sigma2;
        let g = rho / (1.0 + rho * sigma2);
        let expansion = (g * v - g * g * v * v) / beta;
        assert!(
            (est.value - expansion).abs() <= 4.0 * est.stderr + 0.02 * expansion,
            "{} ± {} vs {expansion}",
            est.value,
            est.stderr
        );
        let iid = cll_monte_carlo(&FadingModel::iid(), rho, 1.0, 100_000, 5).unwrap();
        assert!(iid.value.abs() <= 1e-9);
    }
}
