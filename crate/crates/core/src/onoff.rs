//! Block on-off signaling lower bound at low SNR.

use rayon::prelude::*;

use crate::error::{check_param, Error, Result};
use crate::fading::FadingModel;
use crate::spectral::compute_lambda_inf;

/// Block on-off scheme of length `n` with duty cycle `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnOffScheme {
    pub n: usize,
    pub a: f64,
    pub lambda_n: f64,
    /// Per-symbol coefficient of `rho^2` in the achievable rate.
    pub coeff: f64,
}

impl OnOffScheme {
    pub fn new(model: &FadingModel, n: usize, beta: f64) -> Result<Self> {
        let lambda_n = lambda_n(model, n)?;
        let a = optimal_duty(lambda_n, beta)?;
        Ok(Self {
            n,
            a,
            lambda_n,
            coeff: 0.5 * (a * lambda_n - a * a),
        })
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            reason: "block length must be at least 1",
        });
    }
    Ok(())
}

/// `sum_{|i|<n} |R(i)|^2 (1 - |i|/n)`.
pub fn lambda_n(model: &FadingModel, n: usize) -> Result<f64> {
    check_n(n)?;
    let nf = n as f64;
    let tail: f64 = (1..n)
        .map(|i| model.autocorr(i as i64).norm_sqr() * (1.0 - i as f64 / nf))
        .sum();
    Ok(model.autocorr(0).norm_sqr() + 2.0 * tail)
}

/// `(1/n) sum_i sum_j |R(i - j)|^2`, quadratic in `n`.
pub fn lambda_n_double_sum(model: &FadingModel, n: usize) -> Result<f64> {
    check_n(n)?;
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            total += model.autocorr(i as i64 - j as i64).norm_sqr();
        }
    }
    Ok(total / n as f64)
}

/// `min(lambda_n / 2, 1 / beta)`.
pub fn optimal_duty(lambda_n: f64, beta: f64) -> Result<f64> {
    check_param(
        "lambda_n",
        lambda_n,
        lambda_n >= 1.0 - 1e-12,
        "must be at least 1",
    )?;
    check_param("beta", beta, beta >= 1.0, "must be at least 1")?;
    Ok((0.5 * lambda_n).min(1.0 / beta))
}

pub fn ln_coefficient(model: &FadingModel, n: usize, beta: f64) -> Result<f64> {
    Ok(OnOffScheme::new(model, n, beta)?.coeff)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaConvergenceRow {
    pub n: usize,
    pub lambda_n: f64,
    pub gap: f64,
}

/// `(n, lambda_n, lambda_inf - lambda_n)` for each `n`.
pub fn lambda_convergence_report(
    model: &FadingModel,
    n_list: &[usize],
) -> Result<Vec<LambdaConvergenceRow>> {
    let lambda_inf = compute_lambda_inf(model)?.value;
    n_list
        .par_iter()
        .map(|&n| {
            let l = lambda_n(model, n)?;
            Ok(LambdaConvergenceRow {
                n,
                lambda_n: l,
                gap: lambda_inf - l,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector_channel::{mi_quadratic, InputDistribution};
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn models() -> Vec<FadingModel> {
        vec![
            FadingModel::iid(),
            FadingModel::gauss_markov(0.5).unwrap(),
            FadingModel::gauss_markov(0.9).unwrap(),
            FadingModel::bandlimited(0.3).unwrap(),
            FadingModel::finite_memory(vec![Complex64::new(0.3, 0.1), Complex64::new(0.1, -0.05)])
                .unwrap(),
        ]
    }

    #[test]
    fn lambda_examples() {
        for n in [1, 2, 17, 400] {
            assert_eq!(lambda_n(&FadingModel::iid(), n).unwrap(), 1.0);
        }
        let gm = FadingModel::gauss_markov(0.5).unwrap();
        assert_relative_eq!(lambda_n(&gm, 2).unwrap(), 1.25, epsilon = 1e-15);
        for m in models() {
            assert_relative_eq!(lambda_n(&m, 1).unwrap(), 1.0, epsilon = 1e-14);
        }
        assert!(lambda_n(&gm, 0).is_err());
    }

    #[test]
    fn single_and_double_sums_agree() {
        for m in models() {
            for n in [1, 2, 3, 10, 64] {
                let a = lambda_n(&m, n).unwrap();
                let b = lambda_n_double_sum(&m, n).unwrap();
                assert!(
                    (a - b).abs() <= 1e-12 * a.max(1.0),
                    "{} n={n}: {a} {b}",
                    m.name()
                );
            }
        }
    }

    #[test]
    fn duty_examples() {
        assert_eq!(optimal_duty(1.25, 1.0).unwrap(), 0.625);
        assert_eq!(optimal_duty(3.0, 1.0).unwrap(), 1.0);
        assert_eq!(optimal_duty(2.0, 1.0).unwrap(), 1.0);
        assert!(optimal_duty(1.0, 0.5).is_err());
    }

    #[test]
    fn coefficient_examples() {
        for n in [1, 5, 100] {
            assert_relative_eq!(
                ln_coefficient(&FadingModel::iid(), n, 1.0).unwrap(),
                0.125,
                epsilon = 1e-15
            );
        }
        let gm = FadingModel::gauss_markov(0.5).unwrap();
        assert_relative_eq!(
            ln_coefficient(&gm, 2, 1.0).unwrap(),
            0.1953125,
            epsilon = 1e-15
        );
        // closed branches
        for m in models() {
            for beta in [1.0, 2.0, 4.0] {
                let s = OnOffScheme::new(&m, 32, beta).unwrap();
                let expect = if s.lambda_n / 2.0 <= 1.0 / beta {
                    s.lambda_n * s.lambda_n / 8.0
                } else {
                    s.lambda_n / (2.0 * beta) - 1.0 / (2.0 * beta * beta)
                };
                assert_relative_eq!(s.coeff, expect, epsilon = 1e-14);
                assert!(s.coeff >= 0.0 && s.a <= 1.0 / beta);
            }
        }
    }

    #[test]
    fn coupled_block_matches_quadratic_mi() {
        for m in models() {
            for n in 1..=6 {
                for beta in [1.0, 2.0, 4.0] {
                    let s = OnOffScheme::new(&m, n, beta).unwrap();
                    let mu = InputDistribution::coupled_on_off(n, s.a, 2).unwrap();
                    let q = mi_quadratic(&mu, &m).coefficient;
                    assert!(
                        (q - n as f64 * s.coeff).abs() <= 1e-10,
                        "{} n={n} beta={beta}",
                        m.name()
                    );
                }
            }
        }
    }

    #[test]
    fn convergence_report() {
        let gm = FadingModel::gauss_markov(0.9).unwrap();
        let rows = lambda_convergence_report(&gm, &[2, 8, 32, 128, 512]).unwrap();
        assert!(rows.iter().all(|r| r.gap >= -1e-12));
        assert!(rows.windows(2).all(|w| w[1].gap < w[0].gap));
        let last = rows.last().unwrap();
        assert!(last.gap / 9.526316 < 0.01);
        let iid = lambda_convergence_report(&FadingModel::iid(), &[1, 4, 64]).unwrap();
        assert!(iid.iter().all(|r| r.gap.abs() < 1e-12));
    }
}
