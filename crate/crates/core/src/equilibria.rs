//! Endemic steady states of the pairwise SIS system.
//!
//! The SIS system conserves `S + I = N` and, per class, the doubly counted
//! pair total `SS_m + 2SI_m + II_m`. Both are eliminated before Newton so
//! the Jacobian of the remaining unknowns `(I, SI_m, II_m)` is not rank
//! deficient.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gillespie::{Dynamics, EpidemicParams};
use crate::netgen::{WeightClasses, WeightMode};
use crate::pairwise::{initial_conditions, Closure, IntegrateOptions, PairwiseModel, PairwiseState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NewtonOptions {
    pub max_iterations: usize,
    pub max_halvings: usize,
    /// Converged when the residual ∞-norm is at most `tolerance · N`.
    pub tolerance: f64,
    /// Relative finite-difference step.
    pub fd_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { max_iterations: 200, max_halvings: 30, tolerance: 1e-10, fd_step: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyStateResult {
    pub state: PairwiseState,
    /// ∞-norm of the full time derivative at `state`.
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl SteadyStateResult {
    pub fn prevalence(&self) -> f64 {
        self.state.i / (self.state.s + self.state.i)
    }
}

/// The reduced system: unknowns `x = [I, SI_1..SI_M, II_1..II_M]`.
struct Reduced<'a> {
    model: &'a PairwiseModel,
    n: f64,
    pair_sums: Vec<f64>,
}

impl Reduced<'_> {
    fn classes(&self) -> usize {
        self.pair_sums.len()
    }

    fn pack(&self, st: &PairwiseState) -> Vec<f64> {
        let mut x = Vec::with_capacity(2 * self.classes() + 1);
        x.push(st.i);
        x.extend(&st.si);
        x.extend(&st.ii);
        x
    }

    fn unpack(&self, x: &[f64]) -> PairwiseState {
        let m = self.classes();
        let mut st = PairwiseState::zeros(Dynamics::Sis, m);
        st.i = x[0];
        st.s = self.n - x[0];
        for c in 0..m {
            st.si[c] = x[1 + c];
            st.ii[c] = x[1 + m + c];
            st.ss[c] = self.pair_sums[c] - 2.0 * st.si[c] - st.ii[c];
        }
        st
    }

    /// Reduced residual and the ∞-norm of the full derivative.
    fn residual(&self, x: &[f64]) -> (Vec<f64>, f64) {
        let y = self.unpack(x).to_vec();
        let mut dy = vec![0.0; y.len()];
        self.model.rhs(&y, &mut dy);
        let full = dy.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let m = self.classes();
        // Flat SIS layout is [S, I, SS.., SI.., II..].
        let mut f = Vec::with_capacity(2 * m + 1);
        f.push(dy[1]);
        f.extend(&dy[2 + m..2 + 3 * m]);
        (f, full)
    }

    fn physical(&self, x: &[f64]) -> bool {
        let slack = 1e-9 * self.n;
        let st = self.unpack(x);
        st.s >= -slack
            && st.i >= -slack
            && st.ss.iter().chain(&st.si).chain(&st.ii).all(|&v| v >= -slack)
    }

    fn jacobian(&self, x: &[f64], f0: &[f64], rel_step: f64) -> DMatrix<f64> {
        let dim = x.len();
        let mut jac = DMatrix::zeros(dim, dim);
        let mut xp = x.to_vec();
        for j in 0..dim {
            let h = rel_step * x[j].abs().max(1.0);
            xp[j] = x[j] + h;
            let (fp, _) = self.residual(&xp);
            for i in 0..dim {
                jac[(i, j)] = (fp[i] - f0[i]) / h;
            }
            xp[j] = x[j];
        }
        jac
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, b| a.max(b.abs()))
}

fn sis_model(wc: &WeightClasses, params: EpidemicParams, closure: &Closure) -> Result<PairwiseModel> {
    PairwiseModel::new(Dynamics::Sis, wc, params, closure.clone())
}

fn check_population(n: f64) -> Result<()> {
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::invalid("N", format!("must be finite and > 0, got {n}")));
    }
    Ok(())
}

/// Damped Newton from `guess`. Running out of iterations is not an error
/// here: the last iterate comes back with `converged == false`.
pub fn newton_sis(
    wc: &WeightClasses,
    params: EpidemicParams,
    closure: &Closure,
    n: f64,
    guess: &PairwiseState,
    opts: &NewtonOptions,
) -> Result<SteadyStateResult> {
    check_population(n)?;
    let model = sis_model(wc, params, closure)?;
    if guess.dynamics != Dynamics::Sis || guess.classes() != wc.len() {
        return Err(Error::invalid("initial_guess", "must be an SIS state with one entry per weight class"));
    }
    let k = wc.degree() as f64;
    let pair_sums = wc.fractions().iter().map(|q| q * k * n).collect();
    let sys = Reduced { model: &model, n, pair_sums };

    let tol = opts.tolerance * n;
    let mut x = sys.pack(guess);
    if !sys.physical(&x) {
        return Err(Error::invalid("initial_guess", "state is outside the physical region"));
    }
    let (mut f, mut full) = sys.residual(&x);
    let mut iterations = 0;
    while full > tol && iterations < opts.max_iterations {
        iterations += 1;
        let jac = sys.jacobian(&x, &f, opts.fd_step);
        let rhs = -DVector::from_column_slice(&f);
        let delta = jac.lu().solve(&rhs).ok_or(Error::SingularJacobian { iteration: iterations })?;
        let norm = inf_norm(&f);
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, d)| a + alpha * d).collect();
            if sys.physical(&trial) {
                let (ft, full_t) = sys.residual(&trial);
                if inf_norm(&ft) < norm || full_t <= tol {
                    accepted = Some((trial, ft, full_t));
                    break;
                }
            }
            alpha *= 0.5;
        }
        match accepted {
            Some((xn, fn_, full_n)) => {
                x = xn;
                f = fn_;
                full = full_n;
            }
            None => {
                log::debug!("newton stalled at iteration {iterations}, residual {full:e}");
                break;
            }
        }
    }
    Ok(SteadyStateResult { state: sys.unpack(&x), residual: full, converged: full <= tol, iterations })
}

/// Endemic (or disease-free) root nearest to `guess` in the Newton sense.
pub fn solve_sis_endemic(
    wc: &WeightClasses,
    params: EpidemicParams,
    closure: &Closure,
    n: f64,
    guess: &PairwiseState,
) -> Result<SteadyStateResult> {
    let res = newton_sis(wc, params, closure, n, guess, &NewtonOptions::default())?;
    if !res.converged {
        return Err(Error::NonConvergence { iterations: res.iterations, residual: res.residual });
    }
    Ok(res)
}

/// Horizon for long integrations, in units of `1/γ`.
pub const LONG_TIME: f64 = 500.0;

/// State after integrating the SIS system for `t_end` from a 5% random start.
pub fn long_time_state(
    wc: &WeightClasses,
    params: EpidemicParams,
    closure: &Closure,
    n: f64,
    t_end: f64,
) -> Result<PairwiseState> {
    let model = sis_model(wc, params, closure)?;
    let start = initial_conditions(Dynamics::Sis, n, 0.05, wc)?;
    let sol = model.solve(&start, (0.0, t_end), &IntegrateOptions::with_tolerances(1e-10, 1e-10 * n))?;
    PairwiseState::from_slice(Dynamics::Sis, wc.len(), sol.final_state())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub tau: f64,
    pub p1: f64,
    pub i_over_n: f64,
    pub residual: f64,
    pub converged: bool,
}

pub const SWEEP_CSV_HEADER: &str = "tau,p1,I_over_N,residual,converged";

pub fn write_sweep_csv<W: Write>(mut out: W, rows: &[SweepRow]) -> std::io::Result<()> {
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{},{},{},{},{}", r.tau, r.p1, r.i_over_n, r.residual, r.converged)?;
    }
    Ok(())
}

// Below this prevalence a root is treated as disease-free for seeding.
const ENDEMIC_FLOOR: f64 = 1e-6;

/// Endemic prevalence over an ascending `τ` grid by continuation.
///
/// Each point is seeded with the previous root. The first point, and any
/// point following a disease-free or failed root, is seeded from a long
/// ODE integration instead, since continuing from the disease-free root
/// would never leave it. Per-point failures become rows with
/// `converged == false`.
pub fn sweep_endemic(
    wc: &WeightClasses,
    gamma: f64,
    taus: &[f64],
    closure: &Closure,
    n: f64,
) -> Result<Vec<SweepRow>> {
    check_population(n)?;
    if taus.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("tau", "grid must be strictly ascending"));
    }
    let p1 = match wc.mode() {
        WeightMode::Random => wc.probs()[0],
        WeightMode::Fixed => wc.fractions()[0],
    };
    let opts = NewtonOptions::default();
    let mut previous: Option<PairwiseState> = None;
    let mut rows = Vec::with_capacity(taus.len());
    for &tau in taus {
        let params = EpidemicParams::new(tau, gamma)?;
        let attempt = |guess: &PairwiseState| newton_sis(wc, params, closure, n, guess, &opts);
        let from_ode = || -> Result<SteadyStateResult> {
            let seed = long_time_state(wc, params, closure, n, LONG_TIME / gamma)?;
            attempt(&seed)
        };
        let outcome = match previous.take() {
            Some(prev) => match attempt(&prev) {
                Ok(res) if res.converged && res.prevalence() > ENDEMIC_FLOOR => Ok(res),
                _ => from_ode(),
            },
            None => from_ode(),
        };
        match outcome {
            Ok(res) => {
                if !res.converged {
                    log::warn!("steady state at tau={tau} did not converge (residual {:e})", res.residual);
                }
                rows.push(SweepRow {
                    tau,
                    p1,
                    i_over_n: res.state.i / n,
                    residual: res.residual,
                    converged: res.converged,
                });
                if res.converged && res.prevalence() > ENDEMIC_FLOOR {
                    previous = Some(res.state);
                }
            }
            Err(e) => {
                log::warn!("steady state at tau={tau} failed: {e}");
                rows.push(SweepRow { tau, p1, i_over_n: f64::NAN, residual: f64::NAN, converged: false });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairwise::disease_free_state;

    fn fig7(p1: f64) -> WeightClasses {
        WeightClasses::random(5, vec![10.0, 1.0], vec![p1, 1.0 - p1]).unwrap()
    }

    #[test]
    fn disease_free_guess_is_returned_unchanged() {
        let wc = fig7(0.5);
        let dfe = disease_free_state(Dynamics::Sis, 1000.0, &wc);
        let params = EpidemicParams::new(1.0, 1.0).unwrap();
        let res = solve_sis_endemic(&wc, params, &Closure::classic(5.0).unwrap(), 1000.0, &dfe).unwrap();
        assert_eq!(res.iterations, 0);
        assert_eq!(res.state, dfe);
        assert_eq!(res.residual, 0.0);
    }

    #[test]
    fn root_matches_long_integration() {
        let wc = fig7(0.5);
        let n = 1000.0;
        let params = EpidemicParams::new(1.0, 1.0).unwrap();
        let closure = Closure::classic(5.0).unwrap();
        let ode = long_time_state(&wc, params, &closure, n, LONG_TIME).unwrap();
        let mut guess = ode.clone();
        // Perturb so Newton has work to do.
        guess.i *= 0.9;
        guess.ii[1] *= 0.9;
        let res = solve_sis_endemic(&wc, params, &closure, n, &guess).unwrap();
        assert!(res.converged && res.residual <= 1e-10 * n);
        for (a, b) in res.state.to_vec().iter().zip(ode.to_vec()) {
            assert!((a - b).abs() <= 1e-6 * n, "{a} vs {b}");
        }
        assert!((res.state.population() - n).abs() <= 1e-9 * n);
        for (sum, q) in res.state.pair_sums().iter().zip(wc.fractions()) {
            assert!((sum - q * 5.0 * n).abs() <= 1e-9 * n);
        }
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let wc = fig7(0.5);
        let params = EpidemicParams::new(1.0, 1.0).unwrap();
        let closure = Closure::classic(5.0).unwrap();
        let guess = initial_conditions(Dynamics::Sis, 1000.0, 0.05, &wc).unwrap();
        let opts = NewtonOptions { max_iterations: 1, ..Default::default() };
        let res = newton_sis(&wc, params, &closure, 1000.0, &guess, &opts).unwrap();
        assert!(!res.converged);
        assert_eq!(res.iterations, 1);
    }

    #[test]
    fn bad_inputs() {
        let wc = fig7(0.5);
        let params = EpidemicParams::new(1.0, 1.0).unwrap();
        let closure = Closure::classic(5.0).unwrap();
        let dfe = disease_free_state(Dynamics::Sis, 1000.0, &wc);
        assert!(solve_sis_endemic(&wc, params, &closure, 0.0, &dfe).is_err());
        let sir = disease_free_state(Dynamics::Sir, 1000.0, &wc);
        assert!(solve_sis_endemic(&wc, params, &closure, 1000.0, &sir).is_err());
        let mut neg = dfe.clone();
        neg.si[0] = -10.0;
        assert!(solve_sis_endemic(&wc, params, &closure, 1000.0, &neg).is_err());
        assert!(sweep_endemic(&wc, 1.0, &[1.0, 0.5], &closure, 1000.0).is_err());
    }

    #[test]
    fn subthreshold_sweep_is_disease_free() {
        let wc = fig7(0.5);
        let rows = sweep_endemic(&wc, 1.0, &[0.005, 0.01, 0.02], &Closure::classic(5.0).unwrap(), 1000.0).unwrap();
        for r in &rows {
            assert!(r.converged);
            assert!(r.i_over_n.abs() < 1e-9, "{r:?}");
        }
    }

    #[test]
    fn sweep_is_monotone_and_ordered_in_p1() {
        let taus = [0.3, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0];
        let closure = Closure::classic(5.0).unwrap();
        let high = sweep_endemic(&fig7(0.9), 1.0, &taus, &closure, 1000.0).unwrap();
        assert!(high.iter().all(|r| r.converged));
        for w in high.windows(2) {
            assert!(w[1].i_over_n >= w[0].i_over_n - 1e-12);
        }
        let low = sweep_endemic(&fig7(0.01), 1.0, &[3.0], &closure, 1000.0).unwrap();
        assert!(high.last().unwrap().i_over_n > low[0].i_over_n);
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &low).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("tau,p1,I_over_N,residual,converged\n3,0.01,"));
        assert!(text.trim_end().ends_with(",true"));
    }
}
