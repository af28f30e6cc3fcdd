//! Closed-form epidemic thresholds.
//!
//! Two families live here: the network-perspective basic reproduction
//! numbers for random and fixed weight assignment, and the pairwise
//! threshold `R` obtained from the early quasi-equilibrium of `[SI]/[I]`
//! under the classic or modified closure.

use std::fmt;
use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gillespie::EpidemicParams;
use crate::rng::{self, streams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThresholdKind {
    #[serde(rename = "R0_random")]
    R0Random,
    #[serde(rename = "R0_fixed")]
    R0Fixed,
    #[serde(rename = "R_classic")]
    RClassic,
    #[serde(rename = "R_modified")]
    RModified,
}

impl fmt::Display for ThresholdKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::R0Random => "R0_random",
            Self::R0Fixed => "R0_fixed",
            Self::RClassic => "R_classic",
            Self::RModified => "R_modified",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub kind: ThresholdKind,
    pub value: f64,
    /// Per-class transmissibility `τw/(τw+γ)`.
    pub r: Vec<f64>,
    /// `(R₁, R₂)` for the pairwise thresholds.
    pub big_r: Option<(f64, f64)>,
    /// `Q` when it is finite; it is singular at some parameter values even
    /// though `R` is not.
    pub q: Option<f64>,
    pub lambda: Option<(f64, f64)>,
}

pub const CSV_HEADER: &str = "kind,value,r1,r2,R1,R2,Q,lambda1,lambda2";

fn field(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl ThresholdReport {
    /// One CSV record matching [`CSV_HEADER`]. Missing intermediates are
    /// left empty; only the first two `r` values are written.
    pub fn csv_line(&self) -> String {
        [
            self.kind.to_string(),
            self.value.to_string(),
            field(self.r.first().copied()),
            field(self.r.get(1).copied()),
            field(self.big_r.map(|b| b.0)),
            field(self.big_r.map(|b| b.1)),
            field(self.q),
            field(self.lambda.map(|l| l.0)),
            field(self.lambda.map(|l| l.1)),
        ]
        .join(",")
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        writeln!(out, "{}", self.csv_line())
    }
}

fn transmissibility(tau: f64, w: f64, gamma: f64) -> f64 {
    tau * w / (tau * w + gamma)
}

fn check_weight(name: &'static str, w: f64) -> Result<()> {
    if !(w.is_finite() && w >= 0.0) {
        return Err(Error::invalid(name, format!("weight must be finite and >= 0, got {w}")));
    }
    Ok(())
}

/// `(k−1) Σ pᵢ rᵢ` for weights assigned independently to links.
pub fn r0_random(k: usize, weights: &[f64], probs: &[f64], tau: f64, gamma: f64) -> Result<ThresholdReport> {
    EpidemicParams::new(tau, gamma)?;
    if k < 2 {
        return Err(Error::invalid("k", format!("must be >= 2, got {k}")));
    }
    if weights.is_empty() || weights.len() != probs.len() {
        return Err(Error::invalid(
            "probs",
            format!("need one probability per weight, got {} and {}", probs.len(), weights.len()),
        ));
    }
    for &w in weights {
        check_weight("weights", w)?;
    }
    if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::invalid("probs", "entries must lie in [0, 1]"));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("probs", format!("must sum to 1, got {total}")));
    }
    let r: Vec<f64> = weights.iter().map(|&w| transmissibility(tau, w, gamma)).collect();
    let value = (k - 1) as f64 * probs.iter().zip(&r).map(|(p, r)| p * r).sum::<f64>();
    Ok(ThresholdReport { kind: ThresholdKind::R0Random, value, r, big_r: None, q: None, lambda: None })
}

/// Leading eigenvalue of the two-class next-generation matrix when every
/// node has exactly `k1` links of weight `w1` and `k2` of weight `w2`.
pub fn r0_fixed(k1: usize, k2: usize, w1: f64, w2: f64, tau: f64, gamma: f64) -> Result<ThresholdReport> {
    EpidemicParams::new(tau, gamma)?;
    if k1 < 1 || k2 < 1 {
        return Err(Error::invalid("k1/k2", format!("both must be >= 1, got {k1} and {k2}")));
    }
    check_weight("w1", w1)?;
    check_weight("w2", w2)?;
    let (r1, r2) = (transmissibility(tau, w1, gamma), transmissibility(tau, w2, gamma));
    let (k1, k2) = (k1 as f64, k2 as f64);
    let a = (k1 - 1.0) * r1;
    let d = (k2 - 1.0) * r2;
    let value = (a + d + ((a - d).powi(2) + 4.0 * k1 * k2 * r1 * r2).sqrt()) / 2.0;
    Ok(ThresholdReport { kind: ThresholdKind::R0Fixed, value, r: vec![r1, r2], big_r: None, q: None, lambda: None })
}

fn quadratic_root(b1: f64, b2: f64, disc_term: f64) -> f64 {
    let s = b1 + b2;
    ((s + (s * s + disc_term).sqrt()) / 2.0).max(0.0)
}

/// Pairwise threshold under the classic closure with link classes drawn
/// at random (`p₂ = 1 − p₁`).
pub fn r_pairwise_classic(k: usize, p1: f64, w1: f64, w2: f64, tau: f64, gamma: f64) -> Result<ThresholdReport> {
    EpidemicParams::new(tau, gamma)?;
    if k <= 2 {
        return Err(Error::invalid("k", format!("must be >= 3, got {k}")));
    }
    if !(0.0..=1.0).contains(&p1) {
        return Err(Error::invalid("p1", format!("must lie in [0, 1], got {p1}")));
    }
    check_weight("w1", w1)?;
    check_weight("w2", w2)?;
    let kf = k as f64;
    let p2 = 1.0 - p1;
    let (c1, c2) = ((kf - 1.0) * p1 - 1.0, (kf - 1.0) * p2 - 1.0);
    let big_r1 = tau * w1 * c1 / gamma;
    let big_r2 = tau * w2 * c2 / gamma;
    // R₁R₂Q with the bracketed factors cancelled.
    let product = tau * tau * w1 * w2 * (kf - 2.0) / (gamma * gamma);
    let value = quadratic_root(big_r1, big_r2, 4.0 * product);
    let q = (kf - 2.0) / (c1 * c2);
    let lambda = (
        gamma * (kf - 1.0) * p1 * value / (tau * w1 + gamma * value),
        gamma * (kf - 1.0) * p2 * value / (tau * w2 + gamma * value),
    );
    Ok(ThresholdReport {
        kind: ThresholdKind::RClassic,
        value,
        r: vec![transmissibility(tau, w1, gamma), transmissibility(tau, w2, gamma)],
        big_r: Some((big_r1, big_r2)),
        q: q.is_finite().then_some(q),
        lambda: Some(nan_to_zero(lambda)),
    })
}

/// Pairwise threshold under the modified closure on a fixed-weight network.
pub fn r_pairwise_modified(k1: usize, k2: usize, w1: f64, w2: f64, tau: f64, gamma: f64) -> Result<ThresholdReport> {
    EpidemicParams::new(tau, gamma)?;
    if k1 < 1 || k2 < 1 {
        return Err(Error::invalid("k1/k2", format!("both must be >= 1, got {k1} and {k2}")));
    }
    check_weight("w1", w1)?;
    check_weight("w2", w2)?;
    let (k1, k2) = (k1 as f64, k2 as f64);
    let big_r1 = tau * w1 * (k1 - 2.0) / gamma;
    let big_r2 = tau * w2 * (k2 - 2.0) / gamma;
    let product = tau * tau * w1 * w2 * k1 * k2 / (gamma * gamma);
    let value = quadratic_root(big_r1, big_r2, 4.0 * (product - big_r1 * big_r2));
    let q = k1 * k2 / ((k1 - 2.0) * (k2 - 2.0));
    let lambda = (
        gamma * k1 * value / (2.0 * tau * w1 + gamma * value),
        gamma * k2 * value / (2.0 * tau * w2 + gamma * value),
    );
    Ok(ThresholdReport {
        kind: ThresholdKind::RModified,
        value,
        r: vec![transmissibility(tau, w1, gamma), transmissibility(tau, w2, gamma)],
        big_r: Some((big_r1, big_r2)),
        q: q.is_finite().then_some(q),
        lambda: Some(nan_to_zero(lambda)),
    })
}

// 0/0 at τ = 0.
fn nan_to_zero((a, b): (f64, f64)) -> (f64, f64) {
    let fix = |x: f64| if x.is_nan() { 0.0 } else { x };
    (fix(a), fix(b))
}

/// Outcome of the random-vs-fixed inequality check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem1Report {
    pub samples: usize,
    pub violations: usize,
    /// Largest `R₀(fixed) − R₀(random)` seen; negative when all draws hold strictly.
    pub max_excess: f64,
    pub passed: bool,
}

/// Draws random `(k, k₁, w₁, w₂, τ, γ)` and checks that fixed assignment
/// never beats random assignment with `p₁ = k₁/k`.
pub fn check_theorem1(sample_count: usize, seed: u64) -> Result<Theorem1Report> {
    if sample_count == 0 {
        return Err(Error::invalid("sample_count", "must be >= 1"));
    }
    let mut rng = rng::stream(seed, streams::SAMPLING);
    // (0, hi] by reflecting the half-open [0, hi) draw.
    let open_closed = |lo: f64, hi: f64, rng: &mut rng::SimRng| hi - rng.random::<f64>() * (hi - lo);
    let mut violations = 0;
    let mut max_excess = f64::NEG_INFINITY;
    for _ in 0..sample_count {
        let k = rng.random_range(2..=20usize);
        let k1 = rng.random_range(1..k);
        let w1 = open_closed(0.0, 10.0, &mut rng);
        let w2 = open_closed(0.0, 10.0, &mut rng);
        let tau = open_closed(0.01, 5.0, &mut rng);
        let gamma = open_closed(0.01, 5.0, &mut rng);
        let p1 = k1 as f64 / k as f64;
        let fixed = r0_fixed(k1, k - k1, w1, w2, tau, gamma)?.value;
        let random = r0_random(k, &[w1, w2], &[p1, 1.0 - p1], tau, gamma)?.value;
        let excess = fixed - random;
        max_excess = max_excess.max(excess);
        if excess > 1e-12 {
            violations += 1;
        }
    }
    Ok(Theorem1Report { samples: sample_count, violations, max_excess, passed: violations == 0 })
}

/// Parameters of the constrained-weight sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Theorem2Setup {
    pub k: usize,
    /// Number of class-1 links in fixed mode; random mode uses `p₁ = k₁/k`.
    pub k1: usize,
    pub average_weight: f64,
    pub tau: f64,
    pub gamma: f64,
}

impl Default for Theorem2Setup {
    fn default() -> Self {
        Self { k: 6, k1: 2, average_weight: 1.0, tau: 1.0, gamma: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem2Curve {
    pub kind: ThresholdKind,
    pub argmax_w1: f64,
    pub max_value: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem2Report {
    pub setup: Theorem2Setup,
    pub grid: Vec<f64>,
    /// `(k−1)τW/(τW+γ)`.
    pub expected_max: f64,
    pub curves: Vec<Theorem2Curve>,
    pub passed: bool,
}

/// Sweeps `w₁` over `[0, 2W]` with `w₂` fixed by `p₁w₁ + p₂w₂ = W` and
/// checks that both `R₀` curves peak at the grid point nearest `w₁ = W`.
pub fn check_theorem2(grid_points: usize) -> Result<Theorem2Report> {
    check_theorem2_with(Theorem2Setup::default(), grid_points)
}

pub fn check_theorem2_with(setup: Theorem2Setup, grid_points: usize) -> Result<Theorem2Report> {
    if grid_points < 3 {
        return Err(Error::invalid("grid_points", format!("must be >= 3, got {grid_points}")));
    }
    let Theorem2Setup { k, k1, average_weight: big_w, tau, gamma } = setup;
    if k1 < 1 || k1 >= k {
        return Err(Error::invalid("k1", format!("must lie in 1..{k}, got {k1}")));
    }
    if !(big_w.is_finite() && big_w > 0.0) {
        return Err(Error::invalid("average_weight", "must be finite and > 0"));
    }
    let p1 = k1 as f64 / k as f64;
    let p2 = 1.0 - p1;
    // Keep w₂ ≥ 0 over the whole grid.
    let upper = (2.0 * big_w).min(big_w / p1);
    let step = upper / (grid_points - 1) as f64;
    let grid: Vec<f64> = (0..grid_points).map(|i| i as f64 * step).collect();
    // Two points can tie on an even grid; either counts as nearest.
    let nearest_gap = grid.iter().map(|g| (g - big_w).abs()).fold(f64::INFINITY, f64::min);
    let expected_max = (k - 1) as f64 * transmissibility(tau, big_w, gamma);

    let mut curves = Vec::new();
    for kind in [ThresholdKind::R0Random, ThresholdKind::R0Fixed] {
        let values = grid
            .iter()
            .map(|&w1| {
                let w2 = ((big_w - p1 * w1) / p2).max(0.0);
                match kind {
                    ThresholdKind::R0Random => r0_random(k, &[w1, w2], &[p1, p2], tau, gamma).map(|r| r.value),
                    _ => r0_fixed(k1, k - k1, w1, w2, tau, gamma).map(|r| r.value),
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        let (argmax, max_value) = values
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((0, f64::NAN));
        let resolution = values.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
        let passed = (grid[argmax] - big_w).abs() <= nearest_gap + 1e-12 && (max_value - expected_max).abs() <= resolution + 1e-12;
        curves.push(Theorem2Curve { kind, argmax_w1: grid[argmax], max_value, passed });
    }
    let passed = curves.iter().all(|c| c.passed);
    Ok(Theorem2Report { setup, grid, expected_max, curves, passed })
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn random_mode_hand_value() {
        let r = r0_random(6, &[1.4, 0.8], &[1.0 / 3.0, 2.0 / 3.0], 1.0, 1.0).unwrap();
        let hand = 5.0 * ((1.0 / 3.0) * (1.4 / 2.4) + (2.0 / 3.0) * (0.8 / 1.8));
        assert_abs_diff_eq!(r.value, hand, epsilon = 1e-12);
        assert_abs_diff_eq!(r.value, 2.453704, epsilon = 5e-7);
        assert_eq!(r0_random(6, &[1.0], &[1.0], 0.0, 1.0).unwrap().value, 0.0);
        assert_abs_diff_eq!(r0_random(6, &[1.0], &[1.0], 1.0, 1.0).unwrap().value, 2.5, epsilon = 1e-15);
    }

    #[test]
    fn fixed_mode_hand_value() {
        let r = r0_fixed(2, 4, 1.4, 0.8, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(r.value, 2.446520, epsilon = 5e-7);
        let random = r0_random(6, &[1.4, 0.8], &[1.0 / 3.0, 2.0 / 3.0], 1.0, 1.0).unwrap();
        assert!(r.value <= random.value);
    }

    #[test]
    fn equal_weights_coincide() {
        for (k1, k2, w, tau, gamma) in [(2, 4, 1.0, 1.0, 1.0), (1, 9, 0.3, 2.0, 0.7), (5, 5, 7.0, 0.1, 3.0)] {
            let k = k1 + k2;
            let expected = (k - 1) as f64 * tau * w / (tau * w + gamma);
            let fixed = r0_fixed(k1, k2, w, w, tau, gamma).unwrap().value;
            let p1 = k1 as f64 / k as f64;
            let random = r0_random(k, &[w, w], &[p1, 1.0 - p1], tau, gamma).unwrap().value;
            assert_abs_diff_eq!(fixed, expected, epsilon = 1e-12);
            assert_abs_diff_eq!(random, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn classic_values() {
        let eq = r_pairwise_classic(6, 0.3, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(eq.value, 4.0, epsilon = 1e-12);
        let r = r_pairwise_classic(5, 0.2, 5.0, 1.25, 1.0, 1.0).unwrap();
        let (r1, r2) = r.big_r.unwrap();
        assert_abs_diff_eq!(r1, -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r2, 2.75, epsilon = 1e-14);
        let hand = (1.75 + (1.75f64 * 1.75 + 75.0).sqrt()) / 2.0;
        assert_abs_diff_eq!(r.value, hand, epsilon = 1e-12);
        assert_abs_diff_eq!(r.value, 5.29265, epsilon = 1e-5);
        // γR = τw₁λ₁ + τw₂λ₂ at the returned R.
        let (l1, l2) = r.lambda.unwrap();
        assert_abs_diff_eq!(5.0 * l1 + 1.25 * l2, r.value, epsilon = 1e-12);
        assert!(r_pairwise_classic(2, 0.5, 1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn modified_values() {
        let r = r_pairwise_modified(2, 8, 10.0, 1.25, 0.5, 1.0).unwrap();
        assert_eq!(r.big_r, Some((0.0, 3.75)));
        assert_eq!(r.q, None);
        let hand = (3.75 + (3.75f64 * 3.75 + 200.0).sqrt()) / 2.0;
        assert_abs_diff_eq!(r.value, hand, epsilon = 1e-12);
        // Independent high-precision evaluation: 9.1904374442.
        assert_abs_diff_eq!(r.value, 9.190437444, epsilon = 1e-9);
        let (l1, l2) = r.lambda.unwrap();
        assert_abs_diff_eq!(0.5 * (10.0 * l1 + 1.25 * l2), r.value, epsilon = 1e-12);
        assert_eq!(r_pairwise_modified(2, 8, 10.0, 1.25, 0.0, 1.0).unwrap().value, 0.0);
        for (k1, k2) in [(1, 5), (2, 4), (3, 3)] {
            let eq = r_pairwise_modified(k1, k2, 1.0, 1.0, 1.0, 1.0).unwrap();
            assert_abs_diff_eq!(eq.value, 4.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn classic_singular_q_is_omitted() {
        // (k−1)p₁ = 1
        let r = r_pairwise_classic(5, 0.25, 2.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(r.q, None);
        assert!(r.value.is_finite() && r.value > 0.0);
    }

    #[test]
    fn invalid_inputs() {
        assert!(r0_random(1, &[1.0], &[1.0], 1.0, 1.0).is_err());
        assert!(r0_random(6, &[1.0, 2.0], &[0.5, 0.6], 1.0, 1.0).is_err());
        assert!(r0_random(6, &[1.0, 2.0], &[1.0], 1.0, 1.0).is_err());
        assert!(r0_random(6, &[-1.0], &[1.0], 1.0, 1.0).is_err());
        assert!(r0_fixed(2, 4, 1.0, 1.0, 1.0, 0.0).is_err());
        assert!(r0_fixed(0, 4, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(r_pairwise_modified(2, 4, 1.0, 1.0, 1.0, -1.0).is_err());
        assert!(check_theorem1(0, 1).is_err());
        assert!(check_theorem2(2).is_err());
    }

    #[test]
    fn csv_line_format() {
        let r = r0_random(6, &[1.0], &[1.0], 1.0, 1.0).unwrap();
        assert_eq!(r.csv_line(), "R0_random,2.5,0.5,,,,,,");
        let mut buf = Vec::new();
        r_pairwise_classic(6, 0.5, 1.0, 1.0, 1.0, 1.0).unwrap().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("R_classic,4,0.5,0.5,1.5,1.5,"));
        assert_eq!(lines[1].split(',').count(), 9);
    }

    #[test]
    fn theorem1_holds_on_random_draws() {
        let report = check_theorem1(2000, 7).unwrap();
        assert!(report.passed, "{report:?}");
        assert!(report.max_excess <= 1e-12);
    }

    #[test]
    fn theorem2_peaks_at_equal_weights() {
        let report = check_theorem2(101).unwrap();
        assert!(report.passed, "{report:?}");
        assert_abs_diff_eq!(report.expected_max, 2.5, epsilon = 1e-15);
        for c in &report.curves {
            assert_abs_diff_eq!(c.argmax_w1, 1.0, epsilon = 1e-12);
        }
        // The w₁ = 0 end loses the class-1 links entirely.
        let p2 = 2.0 / 3.0;
        let edge = r0_random(6, &[0.0, 1.0 / p2], &[1.0 / 3.0, p2], 1.0, 1.0).unwrap().value;
        assert!(edge < report.expected_max);
        // An even grid has no point at W but still peaks at its nearest neighbour.
        assert!(check_theorem2(100).unwrap().passed);
    }

    #[test]
    fn classic_pairwise_peaks_at_equal_weights() {
        let p1 = 0.3;
        let best = r_pairwise_classic(6, p1, 1.0, 1.0, 1.0, 1.0).unwrap().value;
        for i in 0..=60 {
            let w1 = i as f64 * 0.05;
            let w2 = (1.0 - p1 * w1) / (1.0 - p1);
            assert!(r_pairwise_classic(6, p1, w1, w2, 1.0, 1.0).unwrap().value <= best + 1e-12);
        }
    }

    proptest! {
        #[test]
        fn r0_random_is_monotone(
            k in 2usize..20,
            p1 in 0.01f64..0.99,
            w1 in 0.01f64..10.0,
            w2 in 0.01f64..10.0,
            tau in 0.01f64..5.0,
            gamma in 0.01f64..5.0,
            bump in 1.001f64..3.0,
        ) {
            let f = |w1: f64, w2: f64, tau: f64, gamma: f64| {
                r0_random(k, &[w1, w2], &[p1, 1.0 - p1], tau, gamma).unwrap().value
            };
            let base = f(w1, w2, tau, gamma);
            prop_assert!(f(w1 * bump, w2, tau, gamma) > base);
            prop_assert!(f(w1, w2 * bump, tau, gamma) > base);
            prop_assert!(f(w1, w2, tau * bump, gamma) > base);
            prop_assert!(f(w1, w2, tau, gamma * bump) < base);
            let r = r0_random(k, &[w1, w2], &[p1, 1.0 - p1], tau, gamma).unwrap();
            prop_assert!(r.r.iter().all(|&x| (0.0..1.0).contains(&x)));
            prop_assert!(r.value >= 0.0);
        }

        #[test]
        fn cancellation_matches_direct_q(
            k in 3usize..20,
            p1 in 0.01f64..0.99,
            k1 in 3usize..10,
            k2 in 3usize..10,
            w1 in 0.01f64..10.0,
            w2 in 0.01f64..10.0,
            tau in 0.01f64..5.0,
            gamma in 0.01f64..5.0,
        ) {
            let c = r_pairwise_classic(k, p1, w1, w2, tau, gamma).unwrap();
            if let (Some(q), Some((r1, r2))) = (c.q, c.big_r) {
                let direct = quadratic_root(r1, r2, 4.0 * r1 * r2 * q);
                prop_assert!((direct - c.value).abs() <= 1e-10 * c.value.max(1.0));
            }
            let m = r_pairwise_modified(k1, k2, w1, w2, tau, gamma).unwrap();
            let (r1, r2) = m.big_r.unwrap();
            let direct = quadratic_root(r1, r2, 4.0 * r1 * r2 * (m.q.unwrap() - 1.0));
            prop_assert!((direct - m.value).abs() <= 1e-10 * m.value.max(1.0));
            let (l1, l2) = m.lambda.unwrap();
            prop_assert!((tau * (w1 * l1 + w2 * l2) / gamma - m.value).abs() <= 1e-9 * m.value.max(1.0));
        }
    }
}
