//! Capacity of the memoryless Rayleigh channel `Y = X H + W` under a peak
//! and an average power constraint.
//!
//! Given `|X|^2 = s`, the output is proper complex Gaussian with variance
//! `1 + s`, so `T = |Y|^2` is a sufficient statistic with an exponential
//! conditional law of mean `1 + s`. The input is a mass distribution over a
//! fixed grid of powers in `[0, rho]`; for each average-power multiplier the
//! penalised mutual information is maximised by exponentiated-gradient
//! (Blahut-Arimoto) updates, and the multiplier is found by minimising the
//! convex dual.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_param, Error, Result};
use crate::quadrature::CompositeRule;

const GRID_POINTS: usize = 65;
const GRID_DECADES: f64 = 3.0;
const OUTPUT_SPAN: f64 = 45.0;
const OUTPUT_ORDER: usize = 8;
const MAX_STEP: f64 = 1e14;
const MULTIPLIER_TOL: f64 = 1e-11;
const MIN_MASS: f64 = 1e-280;
const EG_ITERATIONS: usize = 400;
const NEWTON_ITERATIONS: usize = 100;
/// Masses below this are treated as outside the support when polishing.
const SUPPORT_MASS: f64 = 1e-9;

/// Optimised input law and the resulting mutual information.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleLetterMi {
    /// Mutual information in nats.
    pub value: f64,
    pub powers: Vec<f64>,
    pub masses: Vec<f64>,
    /// Lagrange multiplier of the average-power constraint.
    pub multiplier: f64,
    /// Remaining Blahut-Arimoto duality gap at the returned point.
    pub gap: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl SingleLetterMi {
    pub fn mean_power(&self) -> f64 {
        self.powers
            .iter()
            .zip(&self.masses)
            .map(|(s, p)| s * p)
            .sum()
    }
}

/// `sup I(X; Y)` over input laws with `|X|^2 <= rho` and `E|X|^2 <= p_ave`.
/// Fails with [`Error::NonConvergence`] if the optimiser stalls.
pub fn single_letter_mi_sup(rho: f64, p_ave: f64) -> Result<f64> {
    let r = single_letter_mi_sup_detailed(rho, p_ave)?;
    if r.converged {
        Ok(r.value)
    } else {
        Err(Error::NonConvergence {
            iterations: r.iterations,
            best: r.value,
        })
    }
}

/// Like [`single_letter_mi_sup`] but returns the optimiser state, including
/// a `converged` flag instead of an error.
pub fn single_letter_mi_sup_detailed(rho: f64, p_ave: f64) -> Result<SingleLetterMi> {
    check_param("rho", rho, rho > 0.0, "must be positive")?;
    check_param("p_ave", p_ave, p_ave >= 0.0, "must be nonnegative")?;
    if p_ave > rho * (1.0 + 1e-12) {
        return Err(Error::ConstraintViolation(format!(
            "average power {p_ave} exceeds peak power {rho}"
        )));
    }
    let channel = GridChannel::new(rho);
    if p_ave == 0.0 {
        let mut masses = vec![0.0; channel.powers.len()];
        masses[0] = 1.0;
        return Ok(SingleLetterMi {
            value: 0.0,
            powers: channel.powers,
            masses,
            multiplier: 0.0,
            gap: 0.0,
            converged: true,
            iterations: 0,
        });
    }
    // Gap tolerance scales with the size of the answer, which is O(rho^2)
    // at low SNR.
    let tol = 1e-9 * rho.min(1.0).powi(2);
    channel.maximise(p_ave, tol)
}

struct GridChannel {
    powers: Vec<f64>,
    /// `weights[k] * density[j][k]` integrates the output law of input `j`.
    weights: Vec<f64>,
    density: Vec<Vec<f64>>,
    log_density: Vec<Vec<f64>>,
}

struct InnerState {
    masses: Vec<f64>,
    /// Penalised objective `I - multiplier * E[s]`.
    objective: f64,
    info: f64,
    mean_power: f64,
    gap: f64,
    converged: bool,
    iterations: usize,
}

impl GridChannel {
    fn new(rho: f64) -> Self {
        let mut powers = Vec::with_capacity(GRID_POINTS);
        powers.push(0.0);
        for k in 0..GRID_POINTS - 1 {
            let frac = k as f64 / (GRID_POINTS - 2) as f64;
            powers.push(rho * 10f64.powf(-GRID_DECADES * (1.0 - frac)));
        }
        *powers.last_mut().unwrap() = rho;

        // Output nodes in x = t / (1 + rho). The narrowest law (s = 0) decays
        // like exp(-(1 + rho) x), so panels shrink with rho.
        let scale = 1.0 + rho;
        let width = (2.0 / scale).min(1.0);
        let panels = (OUTPUT_SPAN / width).ceil() as usize;
        let rule = CompositeRule::new(OUTPUT_ORDER);
        let (xs, ws) = rule.layout(0.0, OUTPUT_SPAN, panels);
        let ts: Vec<f64> = xs.iter().map(|x| x * scale).collect();
        let weights: Vec<f64> = ws.iter().map(|w| w * scale).collect();
        let log_density: Vec<Vec<f64>> = powers
            .iter()
            .map(|s| {
                let mean = 1.0 + s;
                let log_mean = s.ln_1p();
                ts.iter().map(|t| -t / mean - log_mean).collect()
            })
            .collect();
        let density = log_density
            .iter()
            .map(|row| row.iter().map(|l| l.exp()).collect())
            .collect();
        Self {
            powers,
            weights,
            density,
            log_density,
        }
    }

    /// Divergences `D(W_j || q)` for the output law `q` induced by `masses`.
    fn divergences(&self, masses: &[f64], out: &mut [f64], log_q: &mut [f64]) {
        for (k, lq) in log_q.iter_mut().enumerate() {
            let q: f64 = masses
                .iter()
                .zip(&self.density)
                .map(|(p, row)| p * row[k])
                .sum();
            *lq = q.ln();
        }
        for (j, d) in out.iter_mut().enumerate() {
            let row = &self.density[j];
            let lrow = &self.log_density[j];
            let mut acc = 0.0;
            for k in 0..self.weights.len() {
                acc += self.weights[k] * row[k] * (lrow[k] - log_q[k]);
            }
            *d = acc;
        }
    }

    fn evaluate(
        &self,
        masses: &[f64],
        multiplier: f64,
        div: &mut [f64],
        log_q: &mut [f64],
    ) -> (f64, f64, f64, f64) {
        self.divergences(masses, div, log_q);
        let mut info = 0.0;
        let mut mean_power = 0.0;
        let mut best = f64::NEG_INFINITY;
        for ((p, d), s) in masses.iter().zip(div.iter()).zip(&self.powers) {
            info += p * d;
            mean_power += p * s;
            best = best.max(d - multiplier * s);
        }
        let objective = info - multiplier * mean_power;
        (objective, info, mean_power, (best - objective).max(0.0))
    }

    /// Maximises `I(p) - multiplier * E_p[s]` starting from `start`:
    /// exponentiated-gradient ascent locates the support, then Newton steps
    /// on that support finish the job.
    fn inner(&self, start: &[f64], multiplier: f64, tol: f64) -> InnerState {
        let mut state = self.ascend(start, multiplier, tol, EG_ITERATIONS);
        if !state.converged {
            let polished = self.polish(&state.masses, multiplier, tol);
            let iterations = state.iterations + polished.iterations;
            if polished.gap < state.gap {
                state = polished;
            }
            state.iterations = iterations;
        }
        state
    }

    fn state(&self, masses: Vec<f64>, multiplier: f64, tol: f64, iterations: usize) -> InnerState {
        let mut div = vec![0.0; self.powers.len()];
        let mut log_q = vec![0.0; self.weights.len()];
        let (objective, info, mean_power, gap) =
            self.evaluate(&masses, multiplier, &mut div, &mut log_q);
        InnerState {
            masses,
            objective,
            info,
            mean_power,
            gap,
            converged: gap <= tol,
            iterations,
        }
    }

    /// Exponentiated-gradient (accelerated Blahut-Arimoto) ascent.
    fn ascend(
        &self,
        start: &[f64],
        multiplier: f64,
        tol: f64,
        max_iterations: usize,
    ) -> InnerState {
        let n = self.powers.len();
        let mut masses = start.to_vec();
        let mut div = vec![0.0; n];
        let mut log_q = vec![0.0; self.weights.len()];
        let (mut objective, _, _, mut gap) =
            self.evaluate(&masses, multiplier, &mut div, &mut log_q);
        let mut step = 1.0;
        let mut trial = vec![0.0; n];
        let mut trial_div = vec![0.0; n];
        let mut iterations = 0;
        while gap > tol && iterations < max_iterations {
            iterations += 1;
            let grads: Vec<f64> = div
                .iter()
                .zip(&self.powers)
                .map(|(d, s)| d - multiplier * s)
                .collect();
            let top = grads.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut total = 0.0;
            for j in 0..n {
                trial[j] = (masses[j] * (step * (grads[j] - top)).exp()).max(MIN_MASS);
                total += trial[j];
            }
            trial.iter_mut().for_each(|p| *p /= total);
            let (t_obj, _, _, t_gap) =
                self.evaluate(&trial, multiplier, &mut trial_div, &mut log_q);
            if t_obj >= objective {
                std::mem::swap(&mut masses, &mut trial);
                std::mem::swap(&mut div, &mut trial_div);
                objective = t_obj;
                gap = t_gap;
                step = (step * 2.0).min(MAX_STEP);
            } else {
                step *= 0.25;
                if step < 1e-3 {
                    // Rounding noise; plain Blahut-Arimoto (step 1) is monotone.
                    break;
                }
            }
        }
        self.state(masses, multiplier, tol, iterations)
    }

    /// Active-set Newton iteration. The Hessian of `I` in the masses is
    /// `-∫ W_j W_k / q`; each step solves the equality-constrained quadratic
    /// model on the current support and truncates at the simplex boundary.
    fn polish(&self, start: &[f64], multiplier: f64, tol: f64) -> InnerState {
        let n = self.powers.len();
        let m = self.weights.len();
        let mut masses: Vec<f64> = start
            .iter()
            .map(|&p| if p < SUPPORT_MASS { 0.0 } else { p })
            .collect();
        let total: f64 = masses.iter().sum();
        masses.iter_mut().for_each(|p| *p /= total);
        let mut div = vec![0.0; n];
        let mut log_q = vec![0.0; m];
        let mut best = self.state(masses.clone(), multiplier, tol, 0);
        for it in 1..=NEWTON_ITERATIONS {
            let (_, _, _, gap) = self.evaluate(&masses, multiplier, &mut div, &mut log_q);
            if gap <= tol {
                break;
            }
            let grads: Vec<f64> = div
                .iter()
                .zip(&self.powers)
                .map(|(d, s)| d - multiplier * s)
                .collect();
            let entering = (0..n)
                .max_by(|&a, &b| grads[a].total_cmp(&grads[b]))
                .unwrap();
            let mut support: Vec<usize> = (0..n).filter(|&j| masses[j] > 0.0).collect();
            if !support.contains(&entering) {
                support.push(entering);
            }
            let k = support.len();
            let inv_q: Vec<f64> = log_q.iter().map(|l| (-l).exp()).collect();
            let mut kkt = DMatrix::<f64>::zeros(k + 1, k + 1);
            let mut rhs = DVector::<f64>::zeros(k + 1);
            for (a, &ja) in support.iter().enumerate() {
                for (b, &jb) in support.iter().enumerate().skip(a) {
                    let (ra, rb) = (&self.density[ja], &self.density[jb]);
                    let h: f64 = (0..m)
                        .map(|t| self.weights[t] * ra[t] * rb[t] * inv_q[t])
                        .sum();
                    kkt[(a, b)] = h;
                    kkt[(b, a)] = h;
                }
                kkt[(a, k)] = 1.0;
                kkt[(k, a)] = 1.0;
                rhs[a] = grads[ja];
            }
            let ridge = 1e-13 * (0..k).map(|a| kkt[(a, a)]).sum::<f64>() / k as f64;
            for a in 0..k {
                kkt[(a, a)] += ridge;
            }
            let Some(sol) = kkt.lu().solve(&rhs) else {
                break;
            };
            // truncate the step where a mass would turn negative
            let mut alpha = 1.0f64;
            for (a, &j) in support.iter().enumerate() {
                if sol[a] < 0.0 {
                    alpha = alpha.min(masses[j] / -sol[a]);
                }
            }
            for (a, &j) in support.iter().enumerate() {
                let p = masses[j] + alpha * sol[a];
                masses[j] = if p <= 1e-300 { 0.0 } else { p };
            }
            let total: f64 = masses.iter().sum();
            masses.iter_mut().for_each(|p| *p /= total);
            let candidate = self.state(masses.clone(), multiplier, tol, it);
            if candidate.gap < best.gap {
                best = candidate;
            }
            best.iterations = it;
        }
        best.converged = best.gap <= tol;
        best
    }

    fn maximise(&self, p_ave: f64, tol: f64) -> Result<SingleLetterMi> {
        let n = self.powers.len();
        let uniform = vec![1.0 / n as f64; n];
        let mut total_iterations = 0;

        let free = self.inner(&uniform, 0.0, tol);
        total_iterations += free.iterations;
        if free.mean_power <= p_ave {
            return Ok(self.finish(free, 0.0, total_iterations));
        }

        // Dual h(m) = max_p [I - m E s] + m p_ave is convex in m, and the
        // slope of the capacity-cost curve never exceeds 1.
        let dual = |state: &InnerState, m: f64| state.objective + m * p_ave;
        let golden = 0.5 * (5f64.sqrt() - 1.0);
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let mut warm = free.masses.clone();
        let mut x1 = hi - golden * (hi - lo);
        let mut x2 = lo + golden * (hi - lo);
        let s1 = self.inner(&warm, x1, tol);
        let s2 = self.inner(&warm, x2, tol);
        total_iterations += s1.iterations + s2.iterations;
        let (mut h1, mut h2) = (dual(&s1, x1), dual(&s2, x2));
        let mut best = if h1 <= h2 { (s1, x1) } else { (s2, x2) };
        while hi - lo > MULTIPLIER_TOL {
            if h1 <= h2 {
                hi = x2;
                x2 = x1;
                h2 = h1;
                x1 = hi - golden * (hi - lo);
                warm.clone_from(&best.0.masses);
                let s = self.inner(&warm, x1, tol);
                total_iterations += s.iterations;
                h1 = dual(&s, x1);
                if h1 < dual(&best.0, best.1) {
                    best = (s, x1);
                }
            } else {
                lo = x1;
                x1 = x2;
                h1 = h2;
                x2 = lo + golden * (hi - lo);
                warm.clone_from(&best.0.masses);
                let s = self.inner(&warm, x2, tol);
                total_iterations += s.iterations;
                h2 = dual(&s, x2);
                if h2 < dual(&best.0, best.1) {
                    best = (s, x2);
                }
            }
        }
        let (state, m) = best;
        let value = dual(&state, m);
        let mut out = self.finish(state, m, total_iterations);
        out.value = value;
        Ok(out)
    }

    fn finish(&self, state: InnerState, multiplier: f64, iterations: usize) -> SingleLetterMi {
        SingleLetterMi {
            value: state.info,
            powers: self.powers.clone(),
            masses: state.masses,
            multiplier,
            gap: state.gap,
            converged: state.converged,
            iterations,
        }
    }
}
