//! Weighted pairwise ODE models for SIS and SIR dynamics.
//!
//! Singles `[S]`, `[I]`, `[R]` and, for every weight class `m`, the pair
//! counts `[AB]_m` are tracked as expected values. Pairs are doubly counted:
//! `[AB]_m = [BA]_m` and `[AA]_m` is twice the number of class-`m` A–A links,
//! so `[SS]_m + 2[SI]_m + [II]_m (+ 2[SR]_m + 2[IR]_m + [RR]_m)` is twice
//! the number of class-`m` links and stays constant in time.
//!
//! Triples are closed with [`Closure`].

mod closure;
mod integrate;
mod reference;

use std::io::Write;

use crate::error::{Error, Result};
use crate::gillespie::{Dynamics, EpidemicParams};
use crate::netgen::WeightClasses;

pub use closure::{closure_eval, Closure};
pub use integrate::{integrate, integrate_grid, IntegrateOptions, OdeSolution};
pub use reference::{aggregate, unweighted_initial_conditions, unweighted_reference_rhs};

/// Expected singles and per-class pairs. The `sr`, `ir` and `rr` vectors are
/// empty for SIS states.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseState {
    pub dynamics: Dynamics,
    pub s: f64,
    pub i: f64,
    pub r: f64,
    pub ss: Vec<f64>,
    pub si: Vec<f64>,
    pub ii: Vec<f64>,
    pub sr: Vec<f64>,
    pub ir: Vec<f64>,
    pub rr: Vec<f64>,
}

impl PairwiseState {
    pub fn zeros(dynamics: Dynamics, classes: usize) -> Self {
        let sir = |v: Vec<f64>| if dynamics == Dynamics::Sir { v } else { Vec::new() };
        Self {
            dynamics,
            s: 0.0,
            i: 0.0,
            r: 0.0,
            ss: vec![0.0; classes],
            si: vec![0.0; classes],
            ii: vec![0.0; classes],
            sr: sir(vec![0.0; classes]),
            ir: sir(vec![0.0; classes]),
            rr: sir(vec![0.0; classes]),
        }
    }

    pub fn classes(&self) -> usize {
        self.ss.len()
    }

    /// Length of the flat vector for `classes` weight classes.
    pub fn flat_len(dynamics: Dynamics, classes: usize) -> usize {
        match dynamics {
            Dynamics::Sis => 2 + 3 * classes,
            Dynamics::Sir => 3 + 6 * classes,
        }
    }

    /// Flat layout: SIS `[S, I, SS.., SI.., II..]`;
    /// SIR `[S, I, R, SS.., SI.., II.., SR.., IR.., RR..]`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![self.s, self.i];
        if self.dynamics == Dynamics::Sir {
            v.push(self.r);
        }
        for block in [&self.ss, &self.si, &self.ii, &self.sr, &self.ir, &self.rr] {
            v.extend_from_slice(block);
        }
        v
    }

    pub fn from_slice(dynamics: Dynamics, classes: usize, y: &[f64]) -> Result<Self> {
        if y.len() != Self::flat_len(dynamics, classes) {
            return Err(Error::invalid(
                "state",
                format!("expected {} components, got {}", Self::flat_len(dynamics, classes), y.len()),
            ));
        }
        let lay = Layout::new(dynamics, classes);
        let block = |b: usize| y[lay.block(b)].to_vec();
        let mut state = Self {
            dynamics,
            s: y[0],
            i: y[1],
            r: 0.0,
            ss: block(0),
            si: block(1),
            ii: block(2),
            sr: Vec::new(),
            ir: Vec::new(),
            rr: Vec::new(),
        };
        if dynamics == Dynamics::Sir {
            state.r = y[2];
            state.sr = block(3);
            state.ir = block(4);
            state.rr = block(5);
        }
        Ok(state)
    }

    pub fn population(&self) -> f64 {
        self.s + self.i + self.r
    }

    /// Per-class doubly counted pair sums.
    pub fn pair_sums(&self) -> Vec<f64> {
        (0..self.classes())
            .map(|m| {
                let mut total = self.ss[m] + 2.0 * self.si[m] + self.ii[m];
                if self.dynamics == Dynamics::Sir {
                    total += 2.0 * self.sr[m] + 2.0 * self.ir[m] + self.rr[m];
                }
                total
            })
            .collect()
    }
}

/// Index arithmetic for the flat state vector.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Layout {
    classes: usize,
    singles: usize,
}

impl Layout {
    pub(crate) fn new(dynamics: Dynamics, classes: usize) -> Self {
        let singles = match dynamics {
            Dynamics::Sis => 2,
            Dynamics::Sir => 3,
        };
        Self { classes, singles }
    }

    /// Range of pair block `b` (0 = SS, 1 = SI, 2 = II, 3 = SR, 4 = IR, 5 = RR).
    pub(crate) fn block(&self, b: usize) -> std::ops::Range<usize> {
        let start = self.singles + b * self.classes;
        start..start + self.classes
    }

    pub(crate) fn at(&self, b: usize, m: usize) -> usize {
        self.singles + b * self.classes + m
    }
}

const SS: usize = 0;
const SI: usize = 1;
const II: usize = 2;
const SR: usize = 3;
const IR: usize = 4;
const RR: usize = 5;

/// A closed weighted pairwise system.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseModel {
    dynamics: Dynamics,
    weights: Vec<f64>,
    params: EpidemicParams,
    closure: Closure,
}

impl PairwiseModel {
    pub fn new(dynamics: Dynamics, wc: &WeightClasses, params: EpidemicParams, closure: Closure) -> Result<Self> {
        Self::with_weights(dynamics, wc.weights().to_vec(), params, closure)
    }

    pub fn with_weights(
        dynamics: Dynamics,
        weights: Vec<f64>,
        params: EpidemicParams,
        closure: Closure,
    ) -> Result<Self> {
        params.validate()?;
        if weights.is_empty() {
            return Err(Error::invalid("weights", "at least one weight class is required"));
        }
        if let Some(count) = closure.class_count() {
            if count != weights.len() {
                return Err(Error::invalid(
                    "closure",
                    format!("closure has {count} classes, model has {}", weights.len()),
                ));
            }
        }
        Ok(Self {
            dynamics,
            weights,
            params,
            closure,
        })
    }

    pub fn dynamics(&self) -> Dynamics {
        self.dynamics
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn params(&self) -> EpidemicParams {
        self.params
    }

    pub fn closure(&self) -> &Closure {
        &self.closure
    }

    pub fn classes(&self) -> usize {
        self.weights.len()
    }

    pub fn dim(&self) -> usize {
        PairwiseState::flat_len(self.dynamics, self.classes())
    }

    /// Right-hand side on the flat state vector.
    pub fn rhs(&self, y: &[f64], dy: &mut [f64]) {
        let m_count = self.classes();
        let lay = Layout::new(self.dynamics, m_count);
        let EpidemicParams { tau, gamma } = self.params;
        let w = &self.weights;
        let c = &self.closure;
        let s = y[0];
        let i = y[1];
        let pair = |b: usize, m: usize| y[lay.at(b, m)];

        let force: f64 = (0..m_count).map(|n| w[n] * pair(SI, n)).sum();
        dy[0] = -tau * force;
        dy[1] = tau * force - gamma * i;
        match self.dynamics {
            Dynamics::Sis => dy[0] += gamma * i,
            Dynamics::Sir => dy[2] = gamma * i,
        }

        for m in 0..m_count {
            // sum_n w_n [SSI]_mn, sum_n w_n [ISI]_nm and sum_n w_n [ISR]_nm
            let mut ssi = 0.0;
            let mut isi = 0.0;
            let mut isr = 0.0;
            for n in 0..m_count {
                ssi += w[n] * c.triple(pair(SS, m), pair(SI, n), s, m, n);
                isi += w[n] * c.triple(pair(SI, n), pair(SI, m), s, n, m);
                if self.dynamics == Dynamics::Sir {
                    isr += w[n] * c.triple(pair(SI, n), pair(SR, m), s, n, m);
                }
            }
            let si_m = pair(SI, m);
            let ii_m = pair(II, m);
            let direct = tau * w[m] * si_m;
            match self.dynamics {
                Dynamics::Sis => {
                    dy[lay.at(SS, m)] = 2.0 * gamma * si_m - 2.0 * tau * ssi;
                    dy[lay.at(SI, m)] = gamma * (ii_m - si_m) + tau * (ssi - isi) - direct;
                    dy[lay.at(II, m)] = -2.0 * gamma * ii_m + 2.0 * tau * isi + 2.0 * direct;
                }
                Dynamics::Sir => {
                    let ir_m = pair(IR, m);
                    dy[lay.at(SS, m)] = -2.0 * tau * ssi;
                    dy[lay.at(SI, m)] = tau * (ssi - isi) - direct - gamma * si_m;
                    dy[lay.at(SR, m)] = -tau * isr + gamma * si_m;
                    dy[lay.at(II, m)] = 2.0 * tau * isi + 2.0 * direct - 2.0 * gamma * ii_m;
                    dy[lay.at(IR, m)] = tau * isr + gamma * (ii_m - ir_m);
                    // each recovering I–R link becomes one R–R link, counted twice
                    dy[lay.at(RR, m)] = 2.0 * gamma * ir_m;
                }
            }
        }
    }

    /// Right-hand side on a structured state.
    pub fn derivative(&self, state: &PairwiseState) -> Result<PairwiseState> {
        if state.dynamics != self.dynamics || state.classes() != self.classes() {
            return Err(Error::invalid(
                "state",
                format!(
                    "state has {:?} with {} classes, model expects {:?} with {}",
                    state.dynamics,
                    state.classes(),
                    self.dynamics,
                    self.classes()
                ),
            ));
        }
        let y = state.to_vec();
        let mut dy = vec![0.0; y.len()];
        self.rhs(&y, &mut dy);
        PairwiseState::from_slice(self.dynamics, self.classes(), &dy)
    }

    /// Integrates from `state0` over `t_span`.
    pub fn solve(&self, state0: &PairwiseState, t_span: (f64, f64), opts: &IntegrateOptions) -> Result<OdeSolution> {
        self.check_state(state0)?;
        integrate(|_, y, dy| self.rhs(y, dy), &state0.to_vec(), t_span, opts)
    }

    /// Integrates from `state0` and returns the states at each grid time.
    pub fn solve_grid(&self, state0: &PairwiseState, grid: &[f64], opts: &IntegrateOptions) -> Result<Vec<PairwiseState>> {
        self.check_state(state0)?;
        integrate_grid(|_, y, dy| self.rhs(y, dy), &state0.to_vec(), grid, opts)?
            .iter()
            .map(|y| PairwiseState::from_slice(self.dynamics, self.classes(), y))
            .collect()
    }

    fn check_state(&self, state: &PairwiseState) -> Result<()> {
        if state.dynamics != self.dynamics || state.classes() != self.classes() {
            return Err(Error::invalid("state", "state does not match the model dimensions"));
        }
        Ok(())
    }
}

/// SIS derivative for `state` under the given weights and closure.
pub fn sis_rhs(state: &PairwiseState, wc: &WeightClasses, params: EpidemicParams, closure: &Closure) -> Result<PairwiseState> {
    PairwiseModel::new(Dynamics::Sis, wc, params, closure.clone())?.derivative(state)
}

/// SIR derivative for `state` under the given weights and closure.
pub fn sir_rhs(state: &PairwiseState, wc: &WeightClasses, params: EpidemicParams, closure: &Closure) -> Result<PairwiseState> {
    PairwiseModel::new(Dynamics::Sir, wc, params, closure.clone())?.derivative(state)
}

/// Random-mixing start: a fraction `f` infected and pairs in proportion
/// to the product of the endpoint fractions.
pub fn initial_conditions(dynamics: Dynamics, n: f64, fraction: f64, wc: &WeightClasses) -> Result<PairwiseState> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid("I0_fraction", format!("must lie in (0, 1), got {fraction}")));
    }
    if !(n > 0.0) {
        return Err(Error::invalid("N", "population must be positive"));
    }
    let k = wc.degree() as f64;
    let (s, i) = (1.0 - fraction, fraction);
    let mut state = PairwiseState::zeros(dynamics, wc.len());
    state.s = s * n;
    state.i = i * n;
    for (m, q) in wc.fractions().into_iter().enumerate() {
        let links = q * k * n;
        state.ss[m] = links * s * s;
        state.si[m] = links * s * i;
        state.ii[m] = links * i * i;
    }
    Ok(state)
}

/// Fully susceptible state with `q_m k N` doubly counted class-`m` pairs.
pub fn disease_free_state(dynamics: Dynamics, n: f64, wc: &WeightClasses) -> PairwiseState {
    let mut state = PairwiseState::zeros(dynamics, wc.len());
    state.s = n;
    for (m, q) in wc.fractions().into_iter().enumerate() {
        state.ss[m] = q * wc.degree() as f64 * n;
    }
    state
}

/// Writes ODE output with a `# M=.. weights=..` line before the column header.
pub fn write_ode_csv<W: Write>(mut out: W, model: &PairwiseModel, times: &[f64], states: &[PairwiseState]) -> std::io::Result<()> {
    let m = model.classes();
    let weights: Vec<String> = model.weights().iter().map(|w| w.to_string()).collect();
    writeln!(out, "# M={m} weights={}", weights.join(","))?;
    let mut cols = vec!["time".to_string(), "S".into(), "I".into(), "R".into()];
    let mut names = vec!["SS", "SI", "II"];
    if model.dynamics() == Dynamics::Sir {
        names.extend(["SR", "IR", "RR"]);
    }
    for name in &names {
        cols.extend((1..=m).map(|c| format!("{name}_{c}")));
    }
    writeln!(out, "{}", cols.join(","))?;
    for (t, st) in times.iter().zip(states) {
        let mut row = vec![t.to_string(), st.s.to_string(), st.i.to_string(), st.r.to_string()];
        for block in [&st.ss, &st.si, &st.ii, &st.sr, &st.ir, &st.rr] {
            row.extend(block.iter().map(|v| v.to_string()));
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
