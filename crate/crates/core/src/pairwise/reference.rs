//! Classic unweighted pairwise SIS/SIR model with the `(k-1)/k` closure.
//!
//! Flat layout: SIS `[S, I, SS, SI, II]`, SIR `[S, I, R, SS, SI, II, SR, IR, RR]`.
//! Written out independently of the weighted model so that it can serve as
//! a reference for the equal-weight reduction.

use super::PairwiseState;
use crate::gillespie::{Dynamics, EpidemicParams};

pub fn unweighted_reference_rhs(dynamics: Dynamics, y: &[f64], dy: &mut [f64], k: f64, params: EpidemicParams) {
    let EpidemicParams { tau, gamma } = params;
    let phi = (k - 1.0) / k;
    let triple = |ab: f64, bc: f64, b: f64| if b > 0.0 { phi * ab.max(0.0) * bc.max(0.0) / b } else { 0.0 };
    match dynamics {
        Dynamics::Sis => {
            let [s, i, ss, si, ii] = [y[0], y[1], y[2], y[3], y[4]];
            let ssi = triple(ss, si, s);
            let isi = triple(si, si, s);
            dy[0] = gamma * i - tau * si;
            dy[1] = tau * si - gamma * i;
            dy[2] = 2.0 * gamma * si - 2.0 * tau * ssi;
            dy[3] = gamma * (ii - si) + tau * (ssi - isi - si);
            dy[4] = -2.0 * gamma * ii + 2.0 * tau * (isi + si);
        }
        Dynamics::Sir => {
            let [s, i, _r, ss, si, ii, sr, ir, _rr] = [y[0], y[1], y[2], y[3], y[4], y[5], y[6], y[7], y[8]];
            let ssi = triple(ss, si, s);
            let isi = triple(si, si, s);
            let isr = triple(si, sr, s);
            dy[0] = -tau * si;
            dy[1] = tau * si - gamma * i;
            dy[2] = gamma * i;
            dy[3] = -2.0 * tau * ssi;
            dy[4] = tau * (ssi - isi - si) - gamma * si;
            dy[5] = 2.0 * tau * (isi + si) - 2.0 * gamma * ii;
            dy[6] = -tau * isr + gamma * si;
            dy[7] = tau * isr + gamma * (ii - ir);
            dy[8] = 2.0 * gamma * ir;
        }
    }
}

/// Sums a weighted state over classes into the reference layout.
pub fn aggregate(state: &PairwiseState) -> Vec<f64> {
    let sum = |v: &[f64]| v.iter().sum::<f64>();
    match state.dynamics {
        Dynamics::Sis => vec![state.s, state.i, sum(&state.ss), sum(&state.si), sum(&state.ii)],
        Dynamics::Sir => vec![
            state.s,
            state.i,
            state.r,
            sum(&state.ss),
            sum(&state.si),
            sum(&state.ii),
            sum(&state.sr),
            sum(&state.ir),
            sum(&state.rr),
        ],
    }
}

/// Random-mixing start for the reference model.
pub fn unweighted_initial_conditions(dynamics: Dynamics, n: f64, fraction: f64, k: f64) -> Vec<f64> {
    let (s, i) = (1.0 - fraction, fraction);
    let links = k * n;
    let pairs = [links * s * s, links * s * i, links * i * i];
    match dynamics {
        Dynamics::Sis => vec![s * n, i * n, pairs[0], pairs[1], pairs[2]],
        Dynamics::Sir => vec![s * n, i * n, 0.0, pairs[0], pairs[1], pairs[2], 0.0, 0.0, 0.0],
    }
}
