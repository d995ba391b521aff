//! Quadratic low-SNR mutual information of the block channel
//! `Y = sqrt(rho) Z diag(H) + W` for finite-support inputs.
//!
//! `K_Z` has entries `conj(z_i) z_j E[conj(H_i) H_j] = conj(z_i) z_j R(j - i)`
//! and the information is `rho^2/2 (E Tr K_Z^2 - Tr K_mu^2) + o(rho^2)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fading::FadingModel;

/// One support point of an input law.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub z: Vec<Complex64>,
    pub p: f64,
}

/// A finite-support law on length-`n` input blocks with `|z_i| <= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct InputDistribution {
    n: usize,
    atoms: Vec<Atom>,
}

impl InputDistribution {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let first = atoms
            .first()
            .ok_or_else(|| Error::InvalidDistribution("no atoms".into()))?;
        let n = first.z.len();
        if n == 0 {
            return Err(Error::InvalidDistribution("empty input block".into()));
        }
        let mut total = 0.0;
        for a in &atoms {
            if a.z.len() != n {
                return Err(Error::InvalidDistribution("atoms differ in length".into()));
            }
            if !(a.p > 0.0) {
                return Err(Error::InvalidDistribution(format!(
                    "probability {} is not positive",
                    a.p
                )));
            }
            if a.z.iter().any(|z| !(z.norm() <= 1.0 + 1e-12)) {
                return Err(Error::InvalidDistribution(
                    "peak constraint |z_i| <= 1 violated".into(),
                ));
            }
            total += a.p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self { n, atoms })
    }

    /// Checks the per-coordinate average constraint `E|z_i|^2 <= 1/beta`.
    pub fn check_average(&self, beta: f64) -> Result<()> {
        for i in 0..self.n {
            let e: f64 = self.atoms.iter().map(|a| a.p * a.z[i].norm_sqr()).sum();
            if e > 1.0 / beta + 1e-12 {
                return Err(Error::ConstraintViolation(format!(
                    "E|z_{i}|^2 = {e} exceeds 1/beta = {}",
                    1.0 / beta
                )));
            }
        }
        Ok(())
    }

    pub fn point_mass(z: Vec<Complex64>) -> Result<Self> {
        Self::new(vec![Atom { z, p: 1.0 }])
    }

    /// Independent coordinates, each off with probability `1 - duty` and
    /// otherwise at unit amplitude with a uniform `psk`-ary phase.
    pub fn iid_on_off(n: usize, duty: f64, psk: usize) -> Result<Self> {
        validate_on_off(n, duty, psk)?;
        let symbols = on_off_symbols(duty, psk);
        let mut atoms = vec![Atom {
            z: Vec::with_capacity(n),
            p: 1.0,
        }];
        for _ in 0..n {
            let mut next = Vec::with_capacity(atoms.len() * symbols.len());
            for a in &atoms {
                for (s, q) in &symbols {
                    let mut z = a.z.clone();
                    z.push(*s);
                    next.push(Atom { z, p: a.p * q });
                }
            }
            atoms = next;
        }
        Self::new(atoms)
    }

    /// The block on-off law where all coordinates switch together
    /// (`|Z_i| = 1{U <= duty}` for one uniform `U`) and the phases are
    /// independent and uniform over `psk` points.
    pub fn coupled_on_off(n: usize, duty: f64, psk: usize) -> Result<Self> {
        validate_on_off(n, duty, psk)?;
        let mut atoms = Vec::new();
        if duty < 1.0 {
            atoms.push(Atom {
                z: vec![Complex64::new(0.0, 0.0); n],
                p: 1.0 - duty,
            });
        }
        if duty > 0.0 {
            let count = psk.pow(n as u32);
            for idx in 0..count {
                let mut rest = idx;
                let z = (0..n)
                    .map(|_| {
                        let m = rest % psk;
                        rest /= psk;
                        psk_symbol(m, psk)
                    })
                    .collect();
                atoms.push(Atom {
                    z,
                    p: duty / count as f64,
                });
            }
        }
        Self::new(atoms)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }
}

fn validate_on_off(n: usize, duty: f64, psk: usize) -> Result<()> {
    if n == 0 || psk == 0 {
        return Err(Error::InvalidDistribution(
            "block length and PSK order must be positive".into(),
        ));
    }
    if !(0.0..=1.0).contains(&duty) {
        return Err(Error::InvalidDistribution(format!(
            "duty cycle {duty} outside [0, 1]"
        )));
    }
    Ok(())
}

fn psk_symbol(m: usize, psk: usize) -> Complex64 {
    match (psk, m) {
        // exact values keep K_Z real for the common alphabets
        (_, 0) => Complex64::new(1.0, 0.0),
        (2, 1) | (4, 2) => Complex64::new(-1.0, 0.0),
        (4, 1) => Complex64::new(0.0, 1.0),
        (4, 3) => Complex64::new(0.0, -1.0),
        _ => Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * m as f64 / psk as f64),
    }
}

fn on_off_symbols(duty: f64, psk: usize) -> Vec<(Complex64, f64)> {
    let mut out = Vec::new();
    if duty < 1.0 {
        out.push((Complex64::new(0.0, 0.0), 1.0 - duty));
    }
    if duty > 0.0 {
        for m in 0..psk {
            out.push((psk_symbol(m, psk), duty / psk as f64));
        }
    }
    out
}

/// `K_Z` for one input block.
pub fn k_of_z(z: &[Complex64], model: &FadingModel) -> DMatrix<Complex64> {
    let n = z.len();
    DMatrix::from_fn(n, n, |i, j| {
        z[i].conj() * z[j] * model.autocorr(j as i64 - i as i64)
    })
}

/// `K_mu = E_mu[K_Z]`.
pub fn k_of_mu(mu: &InputDistribution, model: &FadingModel) -> DMatrix<Complex64> {
    let n = mu.n();
    let mut acc = DMatrix::zeros(n, n);
    for a in mu.atoms() {
        acc += k_of_z(&a.z, model) * Complex64::new(a.p, 0.0);
    }
    acc
}

/// The quadratic approximation `coefficient * rho^2` of `I(Z; Y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticMi {
    pub coefficient: f64,
}

impl QuadraticMi {
    pub fn value_at(&self, rho: f64) -> f64 {
        self.coefficient * rho * rho
    }
}

/// `Tr(A^2)` for Hermitian `A`, i.e. the squared Frobenius norm.
fn trace_square(a: &DMatrix<Complex64>) -> f64 {
    (a * a).trace().re
}

/// Quadratic coefficient `(E Tr K_Z^2 - Tr K_mu^2) / 2` from dense matrices.
pub fn mi_quadratic(mu: &InputDistribution, model: &FadingModel) -> QuadraticMi {
    let expected: f64 = mu
        .atoms()
        .iter()
        .map(|a| a.p * trace_square(&k_of_z(&a.z, model)))
        .sum();
    let mean = trace_square(&k_of_mu(mu, model));
    QuadraticMi {
        coefficient: 0.5 * (expected - mean),
    }
}

/// The same coefficient from the joint moments of `V_i = |Z_i|^2` and the
/// phase correlations `E[conj(Z_i) Z_j]`, using only `|R|`.
pub fn moment_coefficient(mu: &InputDistribution, model: &FadingModel) -> f64 {
    let n = mu.n();
    let atoms = mu.atoms();
    let expect = |f: &dyn Fn(&[Complex64]) -> Complex64| -> Complex64 {
        atoms.iter().map(|a| f(&a.z) * a.p).sum()
    };
    let mut total = 0.0;
    for i in 0..n {
        let ev = expect(&|z| Complex64::new(z[i].norm_sqr(), 0.0)).re;
        let ev2 = expect(&|z| Complex64::new(z[i].norm_sqr().powi(2), 0.0)).re;
        total += ev2 - ev * ev;
        for j in i + 1..n {
            let r2 = model.autocorr(i as i64 - j as i64).norm_sqr();
            let evv = expect(&|z| Complex64::new(z[i].norm_sqr() * z[j].norm_sqr(), 0.0)).re;
            let cross = expect(&|z| z[i].conj() * z[j]).norm_sqr();
            total += 2.0 * r2 * (evv - cross);
        }
    }
    0.5 * total
}
