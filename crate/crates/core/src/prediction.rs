//! MMSE estimation of the fading gain from peak-power observations
//! `Y_k = sqrt(rho) H_k + W_k`.

use num_complex::Complex64;

use crate::error::{check_param, Error, Result};
use crate::fading::FadingModel;
use crate::spectral::compute_i;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictionMode {
    /// Observations at `-1, ..., -n`.
    Causal,
    /// Observations on both sides of 0, excluding 0 itself.
    Noncausal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    Finite(usize),
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionError {
    pub sigma2: f64,
    pub window: Window,
    pub mode: PredictionMode,
}

/// Infinite-past prediction error `(exp(I(rho)) - 1) / rho`.
pub fn causal_error(model: &FadingModel, rho: f64) -> Result<PredictionError> {
    check_param("rho", rho, rho > 0.0, "must be positive")?;
    let i = compute_i(model, rho)?.value;
    Ok(PredictionError {
        sigma2: (i.exp_m1() / rho).clamp(0.0, 1.0),
        window: Window::Asymptotic,
        mode: PredictionMode::Causal,
    })
}

/// Two-sided error `1 - rho ∫ S^2 / (1 + rho S) dw / 2pi = ∫ S / (1 + rho S)`.
///
/// This is the smoothing error of `H_0` given every observation, `Y_0`
/// included. See [`interpolation_error`] for the error with `Y_0` left out.
pub fn noncausal_error(model: &FadingModel, rho: f64) -> Result<PredictionError> {
    check_param("rho", rho, rho > 0.0, "must be positive")?;
    let gain = model.circle_mean(|w| {
        let s = model.psd(w);
        s * s / (1.0 + rho * s)
    });
    Ok(PredictionError {
        sigma2: (1.0 - rho * gain.value).clamp(0.0, 1.0),
        window: Window::Asymptotic,
        mode: PredictionMode::Noncausal,
    })
}

/// Error of estimating `H_0` from `Y_k` for all `k != 0`. Adding `Y_0` to
/// that set turns the error `e` into `e / (1 + rho e)`, which inverts the
/// two-sided smoothing error `s` as `s / (1 - rho s)`.
pub fn interpolation_error(model: &FadingModel, rho: f64) -> Result<PredictionError> {
    let s = noncausal_error(model, rho)?.sigma2;
    Ok(PredictionError {
        sigma2: (s / (1.0 - rho * s)).clamp(0.0, 1.0),
        window: Window::Asymptotic,
        mode: PredictionMode::Noncausal,
    })
}

/// Error of the linear MMSE estimate of `H_0` from `n` observations,
/// `1 - rho v^H (rho R + I)^{-1} v`, with `R` the Toeplitz covariance of the
/// observed gains and `v_k = E[H_k conj(H_0)]`.
///
/// The noncausal window takes `ceil(n/2)` past and `floor(n/2)` future
/// samples. Its covariance is Toeplitz with a hole at 0; the reduced inverse
/// is recovered from two solves with the full Toeplitz matrix.
pub fn finite_window_error(
    model: &FadingModel,
    rho: f64,
    n: usize,
    mode: PredictionMode,
) -> Result<PredictionError> {
    check_param("rho", rho, rho > 0.0, "must be positive")?;
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            reason: "window must contain at least one observation",
        });
    }
    let column = |len: usize| -> Vec<Complex64> {
        (0..len)
            .map(|k| {
                let r = model.autocorr(k as i64) * rho;
                if k == 0 {
                    r + 1.0
                } else {
                    r
                }
            })
            .collect()
    };
    let gain = match mode {
        PredictionMode::Causal => {
            // indices -n, ..., -1 in increasing order
            let v: Vec<Complex64> = (0..n)
                .map(|a| model.autocorr(a as i64 - n as i64))
                .collect();
            let x = levinson_solve(&column(n), &v)?;
            dot(&v, &x)
        }
        PredictionMode::Noncausal => {
            let past = n.div_ceil(2);
            let future = n / 2;
            let len = past + future + 1;
            let v: Vec<Complex64> = (0..len)
                .map(|a| {
                    if a == past {
                        Complex64::new(0.0, 0.0)
                    } else {
                        model.autocorr(a as i64 - past as i64)
                    }
                })
                .collect();
            let mut unit = vec![Complex64::new(0.0, 0.0); len];
            unit[past] = Complex64::new(1.0, 0.0);
            let col = column(len);
            let x = levinson_solve(&col, &v)?;
            let b0 = levinson_solve(&col, &unit)?;
            dot(&v, &x) - dot(&v, &b0) * x[past] / b0[past].re
        }
    };
    Ok(PredictionError {
        sigma2: (1.0 - rho * gain.re).clamp(0.0, 1.0),
        window: Window::Finite(n),
        mode,
    })
}

/// `a^H b`.
fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Solves `T x = b` for the Hermitian positive-definite Toeplitz matrix with
/// first column `col` (`T[i][j] = col[i - j]` for `i >= j`) by the Levinson
/// recursion, in `O(n^2)`.
pub fn levinson_solve(col: &[Complex64], b: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = col.len();
    assert_eq!(n, b.len(), "dimension mismatch");
    let t = |k: isize| -> Complex64 {
        if k >= 0 {
            col[k as usize]
        } else {
            col[(-k) as usize].conj()
        }
    };
    let t0 = col[0].re;
    if !(t0 > 0.0) || col[0].im.abs() > 1e-12 * t0.abs().max(1.0) {
        return Err(Error::NotPositiveDefinite(format!(
            "diagonal entry {}",
            col[0]
        )));
    }
    // forward vector f solves T_k f = e_1; the backward one is J conj(f)
    let mut f = vec![Complex64::new(1.0 / t0, 0.0)];
    let mut x = vec![b[0] / t0];
    for k in 1..n {
        let eps_f: Complex64 = (0..k).map(|j| t(k as isize - j as isize) * f[j]).sum();
        // backward vector entries are conj(f[k-1-j])
        let eps_b: Complex64 = (0..k)
            .map(|j| t(-(j as isize + 1)) * f[k - 1 - j].conj())
            .sum();
        let denom = Complex64::new(1.0, 0.0) - eps_f * eps_b;
        if !(denom.re > 1e-14) || !denom.re.is_finite() {
            return Err(Error::NotPositiveDefinite(format!(
                "Levinson breakdown at order {k} (reflection energy {:e})",
                1.0 - denom.re
            )));
        }
        let alpha = denom.inv();
        let beta = -alpha * eps_f;
        let mut next = Vec::with_capacity(k + 1);
        for j in 0..=k {
            let fj = if j < k {
                f[j]
            } else {
                Complex64::new(0.0, 0.0)
            };
            let bj = if j >= 1 {
                f[k - j].conj()
            } else {
                Complex64::new(0.0, 0.0)
            };
            next.push(alpha * fj + beta * bj);
        }
        f = next;
        let eps_x: Complex64 = (0..k).map(|j| t(k as isize - j as isize) * x[j]).sum();
        let scale = b[k] - eps_x;
        x.push(Complex64::new(0.0, 0.0));
        for j in 0..=k {
            x[j] += scale * f[k - j].conj();
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{DMatrix, DVector};

    fn dense_window_error(model: &FadingModel, rho: f64, idx: &[i64]) -> f64 {
        let n = idx.len();
        let a = DMatrix::from_fn(n, n, |i, j| {
            let mut v = model.autocorr(idx[i] - idx[j]) * rho;
            if i == j {
                v += 1.0;
            }
            v
        });
        let v = DVector::from_fn(n, |i, _| model.autocorr(idx[i]));
        let x = a.cholesky().unwrap().solve(&v);
        1.0 - rho * v.dotc(&x).re
    }

    #[test]
    fn levinson_matches_dense_solve() {
        let col = vec![
            Complex64::new(3.0, 0.0),
            Complex64::new(0.8, 0.5),
            Complex64::new(-0.3, 0.2),
            Complex64::new(0.1, -0.4),
        ];
        let n = col.len();
        let t = DMatrix::from_fn(n, n, |i, j| {
            if i >= j {
                col[i - j]
            } else {
                col[j - i].conj()
            }
        });
        let b = DVector::from_vec(vec![
            Complex64::new(1.0, 2.0),
            Complex64::new(-0.5, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(2.0, -1.0),
        ]);
        let x = levinson_solve(&col, b.as_slice()).unwrap();
        let residual = &t * DVector::from_vec(x) - b;
        assert!(residual.norm() < 1e-12, "{residual}");
    }

    #[test]
    fn levinson_rejects_indefinite_matrix() {
        let col = vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)];
        assert!(matches!(
            levinson_solve(&col, &[Complex64::new(1.0, 0.0); 2]),
            Err(Error::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn windowed_error_matches_dense_reference() {
        let model = crate::fading::FadingModel::finite_memory(vec![
            Complex64::new(0.3, 0.1),
            Complex64::new(0.1, -0.05),
        ])
        .unwrap();
        let gm = FadingModel::gauss_markov(0.7).unwrap();
        for m in [&model, &gm] {
            for n in [1usize, 2, 5, 8] {
                let causal: Vec<i64> = (1..=n as i64).map(|k| -k).collect();
                let got = finite_window_error(m, 0.8, n, PredictionMode::Causal).unwrap();
                assert_relative_eq!(
                    got.sigma2,
                    dense_window_error(m, 0.8, &causal),
                    epsilon = 1e-12
                );
                let past = n.div_ceil(2) as i64;
                let future = (n / 2) as i64;
                let both: Vec<i64> = (-past..=future).filter(|&k| k != 0).collect();
                let got = finite_window_error(m, 0.8, n, PredictionMode::Noncausal).unwrap();
                assert_relative_eq!(
                    got.sigma2,
                    dense_window_error(m, 0.8, &both),
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn causal_examples() {
        for rho in [0.01, 1.0, 30.0] {
            let e = causal_error(&FadingModel::iid(), rho).unwrap();
            assert_relative_eq!(e.sigma2, 1.0, epsilon = 1e-12);
        }
        let gm = FadingModel::gauss_markov(0.5).unwrap();
        assert_relative_eq!(
            causal_error(&gm, 1.0).unwrap().sigma2,
            0.866_025,
            epsilon = 1e-6
        );
        // sigma2 = 1 - (lambda_inf - 1) rho / 2 + O(rho^2)
        for (m, lambda) in [
            (gm, 5.0 / 3.0),
            (FadingModel::bandlimited(0.5).unwrap(), 2.0),
        ] {
            let s = causal_error(&m, 1e-2).unwrap().sigma2;
            assert!(s >= 0.99);
            assert!((s - (1.0 - (lambda - 1.0) * 5e-3)).abs() < 1e-4);
        }
        // AR(1): exp(I) = (A + sqrt(A^2 - 4 r^2)) / 2 with A = 1 + r^2 + rho (1 - r^2)
        let (r, rho) = (0.9f64, 1e-2);
        let a = 1.0 + r * r + rho * (1.0 - r * r);
        let exact = ((a + (a * a - 4.0 * r * r).sqrt()) / 2.0 - 1.0) / rho;
        let gm9 = causal_error(&FadingModel::gauss_markov(r).unwrap(), rho)
            .unwrap()
            .sigma2;
        assert_relative_eq!(gm9, exact, epsilon = 1e-10);
    }

    #[test]
    fn noncausal_examples() {
        let iid = FadingModel::iid();
        assert_relative_eq!(
            noncausal_error(&iid, 1.0).unwrap().sigma2,
            0.5,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            noncausal_error(&iid, 3.0).unwrap().sigma2,
            0.25,
            epsilon = 1e-14
        );
        let bl = FadingModel::bandlimited(0.5).unwrap();
        assert_relative_eq!(
            noncausal_error(&bl, 1.0).unwrap().sigma2,
            1.0 / 3.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn interpolation_without_memory_is_blind() {
        let iid = FadingModel::iid();
        for rho in [0.1, 1.0, 7.0] {
            assert_relative_eq!(
                interpolation_error(&iid, rho).unwrap().sigma2,
                1.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn window_examples() {
        let iid = FadingModel::iid();
        let e = finite_window_error(&iid, 2.0, 16, PredictionMode::Causal).unwrap();
        assert_eq!(e.sigma2, 1.0);
        let gm9 = FadingModel::gauss_markov(0.9).unwrap();
        let short = finite_window_error(&gm9, 1.0, 2, PredictionMode::Causal).unwrap();
        let long = finite_window_error(&gm9, 1.0, 64, PredictionMode::Causal).unwrap();
        assert!(short.sigma2 >= long.sigma2);
    }

    #[test]
    fn windows_converge_to_closed_forms() {
        for r in [0.5, 0.9] {
            let m = FadingModel::gauss_markov(r).unwrap();
            for rho in [0.1, 1.0] {
                let mut prev = 1.0;
                for n in [1usize, 4, 16, 64, 256, 1024] {
                    let w = finite_window_error(&m, rho, n, PredictionMode::Causal)
                        .unwrap()
                        .sigma2;
                    assert!(w <= prev + 1e-12);
                    prev = w;
                }
                let asym = causal_error(&m, rho).unwrap().sigma2;
                assert!((prev - asym).abs() <= 1e-3 && prev >= asym - 1e-9);
                let w = finite_window_error(&m, rho, 1024, PredictionMode::Noncausal)
                    .unwrap()
                    .sigma2;
                let asym_nc = interpolation_error(&m, rho).unwrap().sigma2;
                assert!((w - asym_nc).abs() <= 1e-3 && w >= asym_nc - 1e-9);
                assert!(asym_nc <= asym);
                // the two-sided smoothing error is below both
                let s = noncausal_error(&m, rho).unwrap().sigma2;
                assert_relative_eq!(s, asym_nc / (1.0 + rho * asym_nc), epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn asymptotic_errors_tend_to_one_and_decrease() {
        let m = FadingModel::gauss_markov(0.9).unwrap();
        let grid = [1e-4, 1e-3, 1e-2, 0.1, 1.0, 10.0];
        let causal: Vec<f64> = grid
            .iter()
            .map(|&r| causal_error(&m, r).unwrap().sigma2)
            .collect();
        let nonc: Vec<f64> = grid
            .iter()
            .map(|&r| noncausal_error(&m, r).unwrap().sigma2)
            .collect();
        assert!(causal[0] > 0.9995 && nonc[0] > 0.999);
        assert!(causal.windows(2).all(|w| w[1] <= w[0]));
        assert!(nonc.windows(2).all(|w| w[1] <= w[0]));
    }
}
