//! Experiment orchestration: scenarios, ensembles, simulation-vs-ODE
//! comparisons, CSV bundles and their manifests.

pub mod config;
pub mod figures;

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::equilibria::{sweep_endemic, write_sweep_csv};
use crate::error::{Error, Result};
use crate::gillespie::{ensemble_mean, simulate, Dynamics, EnsembleMean, EpidemicParams, Trajectory};
use crate::netgen::{generate_network, network_stats, write_edge_list, Topology, WeightClasses};
use crate::pairwise::{initial_conditions, write_ode_csv, Closure, IntegrateOptions, PairwiseModel, PairwiseState};
use crate::rng::member_seed;

pub use config::{ExperimentConfig, ExperimentKind};
pub use figures::{reproduce_figure, FigureName, FigureOptions};

/// Points on every comparison grid, endpoints included.
pub const GRID_POINTS: usize = 201;
/// SIS horizon in units of `1/γ`.
pub const SIS_HORIZON: f64 = 15.0;
/// How far the SIR ODE is followed when looking for extinction, in `1/γ`.
pub const SIR_SEARCH_HORIZON: f64 = 200.0;
/// Prevalence below which a post-peak SIR epidemic counts as over.
pub const EXTINCTION_LEVEL: f64 = 1e-3;
/// An ensemble succeeds when at least this fraction of runs do.
pub const SUCCESS_FRACTION: f64 = 0.9;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn ode_options(n: f64) -> IntegrateOptions {
    IntegrateOptions::with_tolerances(1e-10, 1e-10 * n)
}

pub fn uniform_grid(t_max: f64, points: usize) -> Vec<f64> {
    let last = (points - 1) as f64;
    (0..points).map(|i| if i + 1 == points { t_max } else { t_max * i as f64 / last }).collect()
}

/// One network/epidemic parameter set, shared by simulation and ODE.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub n: usize,
    pub topology: Topology,
    pub classes: WeightClasses,
    pub dynamics: Dynamics,
    pub params: EpidemicParams,
    pub initial_fraction: f64,
    pub closure: Closure,
    pub t_max: Option<f64>,
}

impl Scenario {
    /// Regular network with the default closure for the weight mode.
    pub fn new(n: usize, classes: WeightClasses, dynamics: Dynamics, params: EpidemicParams) -> Result<Self> {
        let closure = Closure::default_for(&classes)?;
        Ok(Self {
            n,
            topology: Topology::Regular,
            classes,
            dynamics,
            params,
            initial_fraction: config::DEFAULT_INITIAL_FRACTION,
            closure,
            t_max: None,
        })
    }

    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        let net = cfg.network()?;
        let classes = net.classes()?;
        let closure = cfg.closure_for(&classes)?;
        let e = cfg.epidemic()?;
        Ok(Self {
            n: net.n,
            topology: net.topology(),
            classes,
            dynamics: e.dynamics,
            params: cfg.params()?,
            initial_fraction: e.initial_fraction,
            closure,
            t_max: e.t_max,
        })
    }

    pub fn model(&self) -> Result<PairwiseModel> {
        PairwiseModel::new(self.dynamics, &self.classes, self.params, self.closure.clone())
    }

    pub fn initial_state(&self) -> Result<PairwiseState> {
        initial_conditions(self.dynamics, self.n as f64, self.initial_fraction, &self.classes)
    }

    /// The configured horizon, or 15/γ for SIS and the ODE extinction
    /// time for SIR.
    pub fn horizon(&self) -> Result<f64> {
        if let Some(t) = self.t_max {
            return Ok(t);
        }
        match self.dynamics {
            Dynamics::Sis => Ok(SIS_HORIZON / self.params.gamma),
            Dynamics::Sir => sir_extinction_time(&self.model()?, &self.initial_state()?, self.params.gamma),
        }
    }

    pub fn solve_ode(&self, grid: &[f64]) -> Result<Vec<PairwiseState>> {
        self.model()?.solve_grid(&self.initial_state()?, grid, &ode_options(self.n as f64))
    }

    /// Runs `runs` independent realizations, each on its own network.
    pub fn run_ensemble(&self, runs: usize, seed: u64, t_max: f64) -> Result<Vec<Trajectory>> {
        run_ensemble(runs, seed, |s| {
            let net = generate_network(self.n, self.topology, &self.classes, s)?;
            simulate(&net, &self.classes, self.dynamics, self.params, self.initial_fraction, t_max, s)
        })
    }

    /// Ensemble mean and ODE prevalence on the same uniform grid.
    pub fn compare(&self, runs: usize, seed: u64) -> Result<Comparison> {
        let t_max = self.horizon()?;
        let grid = uniform_grid(t_max, GRID_POINTS);
        let ode = self.solve_ode(&grid)?;
        let trajectories = self.run_ensemble(runs, seed, t_max)?;
        let ensemble = ensemble_mean(&trajectories, &grid)?;
        let n = self.n as f64;
        let sim_prevalence = ensemble.prevalence();
        let ode_prevalence: Vec<f64> = ode.iter().map(|s| s.i / n).collect();
        let max_abs_discrepancy = sim_prevalence
            .iter()
            .zip(&ode_prevalence)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let report = ComparisonReport {
            times: grid,
            sim_prevalence,
            ode_prevalence,
            max_abs_discrepancy,
            runs: ensemble.runs,
            params: self.echo(),
        };
        Ok(Comparison { report, ensemble, ode, trajectories })
    }

    /// Parameters as recorded in manifests.
    pub fn echo(&self) -> Value {
        let (topology, mean_degree) = match self.topology {
            Topology::Regular => ("regular", None),
            Topology::ErdosRenyi { mean_degree } => ("erdos-renyi", Some(mean_degree)),
        };
        json!({
            "N": self.n,
            "k": self.classes.degree(),
            "topology": topology,
            "mean_degree": mean_degree,
            "mode": self.classes.mode(),
            "weights": self.classes.weights(),
            "probs": self.classes.probs(),
            "counts": self.classes.counts(),
            "average_weight": self.classes.average_weight(),
            "dynamics": self.dynamics,
            "tau": self.params.tau,
            "gamma": self.params.gamma,
            "initial_fraction": self.initial_fraction,
            "closure": closure_name(&self.closure),
            "t_max": self.t_max,
        })
    }
}

fn closure_name(c: &Closure) -> &'static str {
    match c {
        Closure::Classic { .. } => "classic",
        Closure::Modified { .. } => "modified",
    }
}

/// First time after the prevalence peak at which the SIR ODE falls below
/// `EXTINCTION_LEVEL · N`, or the search horizon if it never does.
pub fn sir_extinction_time(model: &PairwiseModel, state0: &PairwiseState, gamma: f64) -> Result<f64> {
    let n = state0.population();
    let horizon = SIR_SEARCH_HORIZON / gamma;
    let sol = model.solve(state0, (0.0, horizon), &ode_options(n))?;
    let infected: Vec<f64> = sol.states.iter().map(|y| y[1]).collect();
    let peak = infected
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    Ok(infected[peak..]
        .iter()
        .position(|&i| i < EXTINCTION_LEVEL * n)
        .map(|j| sol.times[peak + j])
        .unwrap_or(horizon))
}

/// Time of the ODE prevalence maximum.
pub fn ode_peak_time(model: &PairwiseModel, state0: &PairwiseState, t_end: f64) -> Result<f64> {
    let sol = model.solve(state0, (0.0, t_end), &ode_options(state0.population()))?;
    let peak = sol
        .states
        .iter()
        .enumerate()
        .max_by(|a, b| a.1[1].total_cmp(&b.1[1]))
        .map(|(i, _)| i)
        .unwrap_or(0);
    Ok(sol.times[peak])
}

/// Runs `member(seed_i)` for every member in parallel. Failed members are
/// logged and dropped; the ensemble fails if fewer than 90% succeed.
/// Output order follows member index, so results are deterministic.
pub fn run_ensemble<T, F>(runs: usize, seed: u64, member: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    if runs == 0 {
        return Err(Error::invalid("runs", "must be >= 1"));
    }
    let results: Vec<Result<T>> = (0..runs as u64).into_par_iter().map(|i| member(member_seed(seed, i))).collect();
    let mut ok = Vec::with_capacity(runs);
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(t) => ok.push(t),
            Err(e) => log::warn!("ensemble member {i} failed: {e}"),
        }
    }
    let needed = (SUCCESS_FRACTION * runs as f64).ceil() as usize;
    if ok.len() < needed {
        return Err(Error::EnsembleFailed { succeeded: ok.len(), requested: runs });
    }
    Ok(ok)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub times: Vec<f64>,
    pub sim_prevalence: Vec<f64>,
    pub ode_prevalence: Vec<f64>,
    pub max_abs_discrepancy: f64,
    pub runs: usize,
    pub params: Value,
}

impl ComparisonReport {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "time,sim_I_over_N,ode_I_over_N")?;
        for ((t, s), o) in self.times.iter().zip(&self.sim_prevalence).zip(&self.ode_prevalence) {
            writeln!(out, "{t},{s},{o}")?;
        }
        Ok(())
    }
}

pub struct Comparison {
    pub report: ComparisonReport,
    pub ensemble: EnsembleMean,
    pub ode: Vec<PairwiseState>,
    pub trajectories: Vec<Trajectory>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputEntry {
    pub file: String,
    pub role: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub panel: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub params: Value,
}

/// Writes the files of one bundle and collects their manifest entries.
/// All writes go through this one writer.
pub struct Bundle {
    dir: PathBuf,
    entries: Vec<OutputEntry>,
}

impl Bundle {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(Self { dir: dir.to_path_buf(), entries: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn entries(&self) -> &[OutputEntry] {
        &self.entries
    }

    pub fn write<F>(&mut self, entry: OutputEntry, body: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    {
        let path = self.dir.join(&entry.file);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut out = BufWriter::new(file);
        body(&mut out).and_then(|_| out.flush()).map_err(|e| Error::io(&path, e))?;
        self.entries.push(entry);
        Ok(())
    }

    /// Writes `manifest.json` and returns its path.
    pub fn finish(self, experiment: &str, seed: Option<u64>, parameters: Value, summary: Value) -> Result<PathBuf> {
        let modules: BTreeMap<&str, &str> = ["netgen", "gillespie", "pairwise", "thresholds", "equilibria", "harness"]
            .into_iter()
            .map(|m| (m, VERSION))
            .collect();
        let manifest = json!({
            "schema_version": config::SCHEMA_VERSION,
            "tool": "epinet",
            "version": VERSION,
            "modules": modules,
            "experiment": experiment,
            "seed": seed,
            "defaults": {
                "runs": config::DEFAULT_RUNS,
                "grid_points": GRID_POINTS,
                "initial_fraction": config::DEFAULT_INITIAL_FRACTION,
                "sis_t_max_gamma_units": SIS_HORIZON,
                "sir_t_max": format!("ODE extinction time (I < {EXTINCTION_LEVEL}·N after the peak, searched up to {SIR_SEARCH_HORIZON}/gamma)"),
                "success_fraction": SUCCESS_FRACTION,
            },
            "parameters": parameters,
            "outputs": self.entries,
            "summary": summary,
        });
        let path = self.dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&manifest).expect("manifest is serializable");
        fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

pub fn entry(file: impl Into<String>, role: &str, panel: Option<&str>, label: Option<&str>, params: Value) -> OutputEntry {
    OutputEntry {
        file: file.into(),
        role: role.to_string(),
        panel: panel.map(str::to_string),
        label: label.map(str::to_string),
        params,
    }
}

/// What an experiment produced.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub manifest: PathBuf,
    pub files: Vec<PathBuf>,
    /// Short text for the terminal, if the experiment has one.
    pub headline: Option<String>,
}

/// Runs `cfg` as `kind`, writing the bundle into `out`.
pub fn run_experiment(cfg: &ExperimentConfig, kind: ExperimentKind, out: &Path) -> Result<RunSummary> {
    cfg.validate(kind)?;
    let seed = cfg.ensemble.seed;
    let resolved = serde_json::to_value(cfg).expect("config is serializable");
    let mut bundle = Bundle::create(out)?;
    let (summary, headline) = match kind {
        ExperimentKind::Generate => {
            let net_spec = cfg.network()?;
            let wc = net_spec.classes()?;
            let net = generate_network(net_spec.n, net_spec.topology(), &wc, seed)?;
            let stats = network_stats(&net, &wc)?;
            bundle.write(entry("network.edges", "network", None, None, json!({})), |w| write_edge_list(w, &net, &wc))?;
            let summary = json!({
                "edges": net.edge_count(),
                "class_edge_counts": stats.class_edge_counts,
                "average_weight": stats.average_weight,
            });
            (summary, Some(format!("{} nodes, {} edges", net.node_count(), net.edge_count())))
        }
        ExperimentKind::Simulate => {
            let sc = Scenario::from_config(cfg)?;
            let t_max = sc.horizon()?;
            let trajectories = sc.run_ensemble(cfg.ensemble.runs, seed, t_max)?;
            let grid = uniform_grid(t_max, GRID_POINTS);
            let mean = ensemble_mean(&trajectories, &grid)?;
            bundle.write(entry("ensemble.csv", "simulation", None, None, sc.echo()), |w| mean.write_csv(w))?;
            if cfg.ensemble.write_runs {
                for (i, t) in trajectories.iter().enumerate() {
                    let e = entry(format!("runs/trajectory_{i:04}.csv"), "trajectory", None, None, json!({"seed": t.seed}));
                    bundle.write(e, |w| t.write_csv(w))?;
                }
            }
            let final_prev = mean.prevalence().last().copied().unwrap_or(0.0);
            (json!({"t_max": t_max, "runs": mean.runs, "final_I_over_N": final_prev}), None)
        }
        ExperimentKind::Pairwise => {
            let sc = Scenario::from_config(cfg)?;
            let t_max = sc.horizon()?;
            let grid = uniform_grid(t_max, GRID_POINTS);
            let states = sc.solve_ode(&grid)?;
            let model = sc.model()?;
            bundle.write(entry("ode.csv", "ode", None, None, sc.echo()), |w| write_ode_csv(w, &model, &grid, &states))?;
            let final_prev = states.last().map(|s| s.i / sc.n as f64).unwrap_or(0.0);
            (json!({"t_max": t_max, "final_I_over_N": final_prev}), None)
        }
        ExperimentKind::Compare => {
            let sc = Scenario::from_config(cfg)?;
            let cmp = sc.compare(cfg.ensemble.runs, seed)?;
            write_comparison(&mut bundle, &sc, &cmp, "", None, None)?;
            let d = cmp.report.max_abs_discrepancy;
            (
                json!({"t_max": cmp.report.times.last(), "runs": cmp.report.runs, "max_abs_discrepancy": d}),
                Some(format!("max |sim - ode| I/N = {d:.6}")),
            )
        }
        ExperimentKind::R0 => {
            let report = cfg.threshold_query()?.evaluate()?;
            let line = report.csv_line();
            bundle.write(entry("threshold.csv", "threshold", None, None, json!({})), |w| report.write_csv(w))?;
            (serde_json::to_value(&report).expect("serializable"), Some(line))
        }
        ExperimentKind::SteadySweep => {
            let wc = cfg.network()?.classes()?;
            let closure = cfg.closure_for(&wc)?;
            let gamma = cfg.epidemic()?.gamma;
            let taus = &cfg.sweep.as_ref().expect("validated").taus;
            let rows = sweep_endemic(&wc, gamma, taus, &closure, cfg.network()?.n as f64)?;
            bundle.write(entry("sweep.csv", "steady-curve", None, None, json!({})), |w| write_sweep_csv(w, &rows))?;
            let failed = rows.iter().filter(|r| !r.converged).count();
            (json!({"points": rows.len(), "not_converged": failed}), None)
        }
        ExperimentKind::FigurePreset => {
            let name = FigureName::parse(cfg.figure.as_deref().expect("validated"))?;
            let opts = FigureOptions { runs: cfg.ensemble.runs, seed, ..FigureOptions::default() };
            return reproduce_figure(name, out, &opts);
        }
    };
    let files = bundle.entries().iter().map(|e| out.join(&e.file)).collect();
    let manifest = bundle.finish(kind.name(), Some(seed), resolved, summary)?;
    Ok(RunSummary { manifest, files, headline })
}

/// Writes the ODE, ensemble and comparison CSVs of one curve pair.
pub(crate) fn write_comparison(
    bundle: &mut Bundle,
    sc: &Scenario,
    cmp: &Comparison,
    prefix: &str,
    panel: Option<&str>,
    label: Option<&str>,
) -> Result<()> {
    let params = sc.echo();
    let model = sc.model()?;
    let times = &cmp.report.times;
    bundle.write(entry(format!("{prefix}ode.csv"), "ode", panel, label, params.clone()), |w| {
        write_ode_csv(w, &model, times, &cmp.ode)
    })?;
    bundle.write(entry(format!("{prefix}simulation.csv"), "simulation", panel, label, params.clone()), |w| {
        cmp.ensemble.write_csv(w)
    })?;
    bundle.write(entry(format!("{prefix}comparison.csv"), "comparison", panel, label, params), |w| {
        cmp.report.write_csv(w)
    })
}
