//! Figure presets. Each preset writes every curve as CSV plus a manifest.

use std::fmt;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

use super::{entry, uniform_grid, write_comparison, Bundle, RunSummary, Scenario, GRID_POINTS};
use crate::equilibria::{long_time_state, sweep_endemic, write_sweep_csv, LONG_TIME};
use crate::error::{Error, Result};
use crate::gillespie::{ensemble_mean, Dynamics, EpidemicParams};
use crate::netgen::WeightClasses;
use crate::pairwise::Closure;
use crate::rng::member_seed;
use crate::thresholds::{r0_fixed, r0_random};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureName {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
}

impl FigureName {
    pub const ALL: [FigureName; 7] = [Self::Fig1, Self::Fig2, Self::Fig3, Self::Fig4, Self::Fig5, Self::Fig6, Self::Fig7];

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.to_string() == name)
            .ok_or_else(|| Error::Config { path: "figure".into(), reason: format!("unknown figure `{name}`, expected fig1..fig7") })
    }
}

impl fmt::Display for FigureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = Self::ALL.iter().position(|x| x == self).expect("listed") + 1;
        write!(f, "fig{i}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureOptions {
    /// Simulation runs per curve.
    pub runs: usize,
    pub seed: u64,
    pub n: usize,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self { runs: super::config::DEFAULT_RUNS, seed: 0, n: 1000 }
    }
}

/// Simulation horizon for the endemic markers of the steady-state figure, in `1/γ`.
pub const STEADY_SIM_HORIZON: f64 = 40.0;

/// Writes the bundle for `name` into `out`.
pub fn reproduce_figure(name: FigureName, out: &Path, opts: &FigureOptions) -> Result<RunSummary> {
    if opts.runs == 0 || opts.n == 0 {
        return Err(Error::invalid("runs", "runs and N must be >= 1"));
    }
    let mut bundle = Bundle::create(out)?;
    let summary = match name {
        FigureName::Fig1 => fig1(&mut bundle)?,
        FigureName::Fig2 => {
            let rows = [("top", 5.0, 0.2, 1.25), ("bottom", 0.5, 0.5, 1.5)];
            let pairs = rows
                .iter()
                .map(|&(label, w1, p1, w2)| Ok((label.to_string(), random(5, w1, w2, p1)?, 1.0)))
                .collect::<Result<Vec<_>>>()?;
            curve_pairs(&mut bundle, opts, &pairs)?
        }
        FigureName::Fig3 => {
            let mut pairs = Vec::new();
            for w1 in [2.5, 5.0, 10.0] {
                pairs.push((format!("w1_{w1}"), random(5, w1, (1.0 - 0.05 * w1) / 0.95, 0.05)?, 1.0));
            }
            pairs.push(("inset_k10_w1_10".to_string(), random(10, 10.0, 0.5 / 0.95, 0.05)?, 0.5));
            curve_pairs(&mut bundle, opts, &pairs)?
        }
        FigureName::Fig4 => {
            let mut pairs = Vec::new();
            for p1 in [0.01, 0.05, 0.09] {
                pairs.push((format!("p1_{p1}"), random(10, 10.0, (1.0 - 10.0 * p1) / (1.0 - p1), p1)?, 0.5));
            }
            curve_pairs(&mut bundle, opts, &pairs)?
        }
        FigureName::Fig5 => {
            let mut pairs = Vec::new();
            for (row, tau) in [("top", 0.5), ("bottom", 0.1)] {
                pairs.push((format!("{row}_random"), random(10, 10.0, 1.25, 0.2)?, tau));
                pairs.push((format!("{row}_fixed"), WeightClasses::fixed(vec![10.0, 1.25], vec![2, 8])?, tau));
            }
            curve_pairs(&mut bundle, opts, &pairs)?
        }
        FigureName::Fig6 => {
            let mut pairs = Vec::new();
            for k1 in [5, 4, 3, 2, 1] {
                pairs.push((format!("k1_{k1}"), WeightClasses::fixed(vec![1.4, 0.8], vec![k1, 6 - k1])?, 1.0));
            }
            curve_pairs(&mut bundle, opts, &pairs)?
        }
        FigureName::Fig7 => fig7(&mut bundle, opts)?,
    };
    let files = bundle.entries().iter().map(|e| out.join(&e.file)).collect();
    let parameters = json!({"figure": name.to_string(), "runs": opts.runs, "N": opts.n});
    let manifest = bundle.finish(&format!("figure-preset:{name}"), Some(opts.seed), parameters, summary)?;
    Ok(RunSummary { manifest, files, headline: None })
}

fn random(k: usize, w1: f64, w2: f64, p1: f64) -> Result<WeightClasses> {
    WeightClasses::random(k, vec![w1, w2], vec![p1, 1.0 - p1])
}

fn write_xy<W: Write>(mut w: W, header: &str, rows: &[(f64, f64)]) -> std::io::Result<()> {
    writeln!(w, "{header}")?;
    for (x, y) in rows {
        writeln!(w, "{x},{y}")?;
    }
    Ok(())
}

/// Threshold curves over `τ ∈ [0, 3]` under `p₁w₁ + p₂w₂ = 1`, `k = 6`, `γ = 1`.
fn fig1(bundle: &mut Bundle) -> Result<Value> {
    let taus: Vec<f64> = (0..=60).map(|i| i as f64 * 0.05).collect();
    let stars: Vec<f64> = (1..=12).map(|i| i as f64 * 0.25).collect();
    let mut summary = serde_json::Map::new();
    let mut curve = |bundle: &mut Bundle, file: String, role: &str, label: String, params: Value, xs: &[f64], f: &dyn Fn(f64) -> Result<f64>| -> Result<()> {
        let rows = xs.iter().map(|&t| Ok((t, f(t)?))).collect::<Result<Vec<_>>>()?;
        let at_one = rows.iter().find(|r| (r.0 - 1.0).abs() < 1e-12).map(|r| r.1);
        summary.insert(label.clone(), json!({"R0_at_tau_1": at_one}));
        bundle.write(entry(file, role, None, Some(&label), params), |w| write_xy(w, "tau,R0", &rows))
    };
    for p1 in [0.25, 0.1, 0.05] {
        let (w1, w2) = (0.5 / p1, 0.5 / (1.0 - p1));
        let params = json!({"mode": "random", "k": 6, "p1": p1, "w1": w1, "w2": w2, "gamma": 1.0});
        curve(bundle, format!("r0_random_p1_{p1}.csv"), "threshold-curve", format!("random p1={p1} w1={w1}"), params, &taus, &|t| {
            Ok(r0_random(6, &[w1, w2], &[p1, 1.0 - p1], t, 1.0)?.value)
        })?;
    }
    for w1 in [0.2, 0.5, 1.4] {
        let w2 = (1.0 - w1 / 3.0) * 1.5;
        let params = json!({"mode": "fixed", "k": 6, "k1": 2, "w1": w1, "w2": w2, "gamma": 1.0});
        curve(bundle, format!("r0_fixed_w1_{w1}.csv"), "threshold-curve", format!("fixed w1={w1}"), params, &taus, &|t| {
            Ok(r0_fixed(2, 4, w1, w2, t, 1.0)?.value)
        })?;
    }
    let params = json!({"k": 6, "W": 1.0, "gamma": 1.0});
    curve(bundle, "r0_max.csv".into(), "threshold-curve", "maximum (w1=w2=1)".into(), params, &taus, &|t| {
        Ok(5.0 * t / (t + 1.0))
    })?;
    let params = json!({"mode": "random", "k": 6, "p1": 1.0 / 3.0, "w1": 1.4, "w2": 0.8, "gamma": 1.0});
    curve(bundle, "r0_random_star.csv".into(), "marker", "random p1=1/3 w1=1.4".into(), params, &stars, &|t| {
        Ok(r0_random(6, &[1.4, 0.8], &[1.0 / 3.0, 2.0 / 3.0], t, 1.0)?.value)
    })?;
    Ok(Value::Object(summary))
}

/// SIS and SIR simulation-vs-ODE pairs for each `(label, classes, τ)`, `γ = 1`.
fn curve_pairs(bundle: &mut Bundle, opts: &FigureOptions, pairs: &[(String, WeightClasses, f64)]) -> Result<Value> {
    let mut summary = serde_json::Map::new();
    let mut index = 0u64;
    for dynamics in [Dynamics::Sis, Dynamics::Sir] {
        let panel = match dynamics {
            Dynamics::Sis => "SIS",
            Dynamics::Sir => "SIR",
        };
        let mut panel_summary = serde_json::Map::new();
        for (label, wc, tau) in pairs {
            let sc = Scenario::new(opts.n, wc.clone(), dynamics, EpidemicParams::new(*tau, 1.0)?)?;
            let cmp = sc.compare(opts.runs, member_seed(opts.seed, 1000 + index))?;
            index += 1;
            let prefix = format!("{}_{label}_", panel.to_lowercase());
            write_comparison(bundle, &sc, &cmp, &prefix, Some(panel), Some(label))?;
            let ode_prev: Vec<f64> = cmp.report.ode_prevalence.clone();
            let mut item = json!({
                "max_abs_discrepancy": cmp.report.max_abs_discrepancy,
                "t_max": cmp.report.times.last(),
                "runs": cmp.report.runs,
            });
            match dynamics {
                Dynamics::Sis => {
                    item["ode_final_I_over_N"] = json!(ode_prev.last());
                    item["sim_final_I_over_N"] = json!(cmp.report.sim_prevalence.last());
                }
                Dynamics::Sir => {
                    let (peak_i, peak) = ode_prev
                        .iter()
                        .copied()
                        .enumerate()
                        .max_by(|a, b| a.1.total_cmp(&b.1))
                        .unwrap_or((0, 0.0));
                    let model = sc.model()?;
                    let t_peak = super::ode_peak_time(&model, &sc.initial_state()?, cmp.report.times[GRID_POINTS - 1])?;
                    item["ode_peak_I_over_N"] = json!(peak);
                    item["ode_peak_time_grid"] = json!(cmp.report.times[peak_i]);
                    item["ode_peak_time"] = json!(t_peak);
                }
            }
            panel_summary.insert(label.clone(), item);
        }
        summary.insert(panel.to_string(), Value::Object(panel_summary));
    }
    Ok(Value::Object(summary))
}

/// Time-averaged ensemble-mean prevalence over the second half of
/// `[0, horizon]`.
pub fn endemic_simulation_mean(sc: &Scenario, runs: usize, seed: u64, horizon: f64) -> Result<f64> {
    let trajectories = sc.run_ensemble(runs, seed, horizon)?;
    let grid = uniform_grid(horizon, GRID_POINTS);
    let prev = ensemble_mean(&trajectories, &grid)?.prevalence();
    let late = &prev[GRID_POINTS / 2..];
    Ok(late.iter().sum::<f64>() / late.len() as f64)
}

pub const FIG7_MARKER_TAUS: [f64; 7] = [0.3, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0];
pub const FIG7_P1: [f64; 4] = [0.9, 0.5, 0.1, 0.01];

/// Endemic SIS prevalence against `τ`: Newton curves, long-time ODE markers
/// and simulation markers. `k = 5`, `w = (10, 1)`, `γ = 1`.
fn fig7(bundle: &mut Bundle, opts: &FigureOptions) -> Result<Value> {
    let n = opts.n as f64;
    let fine: Vec<f64> = (0..=54).map(|i| 0.3 + i as f64 * 0.05).collect();
    let mut summary = serde_json::Map::new();
    let mut index = 0u64;
    for p1 in FIG7_P1 {
        let wc = random(5, 10.0, 1.0, p1)?;
        let closure = Closure::classic(5.0)?;
        let params = json!({"k": 5, "w1": 10.0, "w2": 1.0, "p1": p1, "gamma": 1.0, "N": opts.n});
        let label = format!("p1={p1}");
        let rows = sweep_endemic(&wc, 1.0, &fine, &closure, n)?;
        bundle.write(entry(format!("steady_p1_{p1}.csv"), "steady-curve", None, Some(&label), params.clone()), |w| {
            write_sweep_csv(w, &rows)
        })?;
        let mut ode_rows = Vec::new();
        let mut sim_rows = Vec::new();
        for tau in FIG7_MARKER_TAUS {
            let ep = EpidemicParams::new(tau, 1.0)?;
            let ode = long_time_state(&wc, ep, &closure, n, LONG_TIME)?;
            ode_rows.push((tau, ode.i / n));
            let sc = Scenario::new(opts.n, wc.clone(), Dynamics::Sis, ep)?;
            let mean = endemic_simulation_mean(&sc, opts.runs, member_seed(opts.seed, 2000 + index), STEADY_SIM_HORIZON)?;
            index += 1;
            sim_rows.push((tau, mean));
        }
        bundle.write(entry(format!("ode_markers_p1_{p1}.csv"), "marker-ode", None, Some(&label), params.clone()), |w| {
            write_xy(w, "tau,I_over_N", &ode_rows)
        })?;
        bundle.write(entry(format!("sim_markers_p1_{p1}.csv"), "marker-simulation", None, Some(&label), params), |w| {
            write_xy(w, "tau,I_over_N", &sim_rows)
        })?;
        let failed = rows.iter().filter(|r| !r.converged).count();
        summary.insert(label, json!({"not_converged": failed, "ode_markers": ode_rows, "sim_markers": sim_rows}));
    }
    summary.insert("sim_horizon".into(), json!(STEADY_SIM_HORIZON));
    Ok(Value::Object(summary))
}
