//! JSON experiment configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gillespie::{Dynamics, EpidemicParams};
use crate::netgen::{Topology, WeightClasses, WeightMode};
use crate::pairwise::Closure;
use crate::thresholds::ThresholdKind;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_RUNS: usize = 100;
pub const DEFAULT_INITIAL_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Generate,
    Simulate,
    Pairwise,
    Compare,
    R0,
    SteadySweep,
    FigurePreset,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Generate => "generate",
            Self::Simulate => "simulate",
            Self::Pairwise => "pairwise",
            Self::Compare => "compare",
            Self::R0 => "r0",
            Self::SteadySweep => "steady-sweep",
            Self::FigurePreset => "figure-preset",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopologyKind {
    #[default]
    Regular,
    ErdosRenyi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClosureKind {
    Classic,
    Modified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub n: usize,
    /// Degree of a regular network, or the (integer) mean degree of an
    /// Erdős–Rényi one. Optional in fixed mode, where it is `Σ counts`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default)]
    pub topology: TopologyKind,
    pub mode: WeightMode,
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpidemicSpec {
    pub dynamics: Dynamics,
    pub tau: f64,
    pub gamma: f64,
    #[serde(default = "default_fraction")]
    pub initial_fraction: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
}

fn default_fraction() -> f64 {
    DEFAULT_INITIAL_FRACTION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    /// Also write every member trajectory.
    #[serde(default)]
    pub write_runs: bool,
}

fn default_runs() -> usize {
    DEFAULT_RUNS
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        Self { runs: DEFAULT_RUNS, seed: 0, write_runs: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub taus: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<ExperimentKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<NetworkSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epidemic: Option<EpidemicSpec>,
    #[serde(default)]
    pub ensemble: EnsembleSpec,
    /// Defaults to classic for random weights and modified for fixed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure: Option<ClosureKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<ThresholdKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn config_error(path: &str, reason: impl Into<String>) -> Error {
    Error::Config { path: path.to_string(), reason: reason.into() }
}

/// Re-labels a parameter error from a lower layer with the config path.
fn at(path: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::InvalidParameter { name, reason } => config_error(&format!("{path}.{name}"), reason),
        other => other,
    }
}

impl ExperimentConfig {
    /// Minimal config for `kind` with everything else defaulted.
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind: Some(kind),
            network: None,
            epidemic: None,
            ensemble: EnsembleSpec::default(),
            closure: None,
            threshold: None,
            sweep: None,
            figure: None,
            output: None,
        }
    }

    /// Parses JSON text. Errors carry the offending field path.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_error(if path == "." { "<root>" } else { &path }, e.into_inner().to_string())
        })?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(config_error(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", cfg.schema_version),
            ));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error("<file>", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is always serializable")
    }

    pub fn network(&self) -> Result<&NetworkSpec> {
        self.network.as_ref().ok_or_else(|| config_error("network", "required for this experiment"))
    }

    pub fn epidemic(&self) -> Result<&EpidemicSpec> {
        self.epidemic.as_ref().ok_or_else(|| config_error("epidemic", "required for this experiment"))
    }

    pub fn params(&self) -> Result<EpidemicParams> {
        let e = self.epidemic()?;
        EpidemicParams::new(e.tau, e.gamma).map_err(at("epidemic"))
    }

    pub fn closure_for(&self, wc: &WeightClasses) -> Result<Closure> {
        let k = wc.degree() as f64;
        match self.closure {
            None => Closure::default_for(wc),
            Some(ClosureKind::Classic) => Closure::classic(k),
            Some(ClosureKind::Modified) => Closure::modified(wc.class_degrees()),
        }
        .map_err(at("closure"))
    }

    /// Checks every parameter the chosen experiment will use.
    pub fn validate(&self, kind: ExperimentKind) -> Result<()> {
        if self.ensemble.runs == 0 {
            return Err(config_error("ensemble.runs", "must be >= 1"));
        }
        match kind {
            ExperimentKind::Generate => {
                self.network()?.classes()?;
            }
            ExperimentKind::Simulate | ExperimentKind::Pairwise | ExperimentKind::Compare => {
                let net = self.network()?;
                let wc = net.classes()?;
                self.params()?;
                let e = self.epidemic()?;
                if !(e.initial_fraction > 0.0 && e.initial_fraction < 1.0) {
                    return Err(config_error("epidemic.initial_fraction", "must lie in (0, 1)"));
                }
                if let Some(t) = e.t_max {
                    if !(t.is_finite() && t > 0.0) {
                        return Err(config_error("epidemic.t_max", "must be finite and > 0"));
                    }
                }
                if kind != ExperimentKind::Simulate {
                    self.closure_for(&wc)?;
                }
            }
            ExperimentKind::R0 => {
                self.threshold_query()?;
            }
            ExperimentKind::SteadySweep => {
                let wc = self.network()?.classes()?;
                self.closure_for(&wc)?;
                let taus = &self.sweep.as_ref().ok_or_else(|| config_error("sweep", "required for steady-sweep"))?.taus;
                if taus.is_empty() {
                    return Err(config_error("sweep.taus", "must not be empty"));
                }
                if taus.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || taus.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(config_error("sweep.taus", "must be finite, non-negative and strictly ascending"));
                }
                let e = self.epidemic()?;
                if !(e.gamma.is_finite() && e.gamma > 0.0) {
                    return Err(config_error("epidemic.gamma", "must be finite and > 0"));
                }
            }
            ExperimentKind::FigurePreset => {
                let name = self.figure.as_deref().ok_or_else(|| config_error("figure", "figure name required"))?;
                super::figures::FigureName::parse(name).map_err(|_| config_error("figure", format!("unknown figure `{name}`")))?;
            }
        }
        Ok(())
    }

    /// The threshold calculator and its arguments implied by the config.
    pub fn threshold_query(&self) -> Result<ThresholdQuery> {
        let net = self.network()?;
        let wc = net.classes()?;
        let e = self.epidemic()?;
        let (tau, gamma) = (e.tau, e.gamma);
        let kind = self.threshold.unwrap_or(match wc.mode() {
            WeightMode::Random => ThresholdKind::R0Random,
            WeightMode::Fixed => ThresholdKind::R0Fixed,
        });
        let two_class = |what: &str| -> Result<()> {
            if wc.len() != 2 {
                return Err(config_error("network.weights", format!("{what} needs exactly two weight classes")));
            }
            Ok(())
        };
        let q = match (kind, wc.mode()) {
            (ThresholdKind::R0Random, WeightMode::Random) => ThresholdQuery::R0Random {
                k: wc.degree(),
                weights: wc.weights().to_vec(),
                probs: wc.probs().to_vec(),
                tau,
                gamma,
            },
            (ThresholdKind::RClassic, WeightMode::Random) => {
                two_class("R_classic")?;
                ThresholdQuery::RClassic { k: wc.degree(), p1: wc.probs()[0], w1: wc.weights()[0], w2: wc.weights()[1], tau, gamma }
            }
            (ThresholdKind::R0Fixed, WeightMode::Fixed) => {
                two_class("R0_fixed")?;
                ThresholdQuery::R0Fixed { k1: wc.counts()[0], k2: wc.counts()[1], w1: wc.weights()[0], w2: wc.weights()[1], tau, gamma }
            }
            (ThresholdKind::RModified, WeightMode::Fixed) => {
                two_class("R_modified")?;
                ThresholdQuery::RModified { k1: wc.counts()[0], k2: wc.counts()[1], w1: wc.weights()[0], w2: wc.weights()[1], tau, gamma }
            }
            (kind, mode) => {
                return Err(config_error("threshold", format!("{kind} is not defined for {mode} weights")));
            }
        };
        // Surface precondition failures now, with the config path.
        q.evaluate().map_err(at("epidemic"))?;
        Ok(q)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ThresholdQuery {
    R0Random { k: usize, weights: Vec<f64>, probs: Vec<f64>, tau: f64, gamma: f64 },
    R0Fixed { k1: usize, k2: usize, w1: f64, w2: f64, tau: f64, gamma: f64 },
    RClassic { k: usize, p1: f64, w1: f64, w2: f64, tau: f64, gamma: f64 },
    RModified { k1: usize, k2: usize, w1: f64, w2: f64, tau: f64, gamma: f64 },
}

impl ThresholdQuery {
    pub fn evaluate(&self) -> Result<crate::thresholds::ThresholdReport> {
        use crate::thresholds::*;
        match *self {
            Self::R0Random { k, ref weights, ref probs, tau, gamma } => r0_random(k, weights, probs, tau, gamma),
            Self::R0Fixed { k1, k2, w1, w2, tau, gamma } => r0_fixed(k1, k2, w1, w2, tau, gamma),
            Self::RClassic { k, p1, w1, w2, tau, gamma } => r_pairwise_classic(k, p1, w1, w2, tau, gamma),
            Self::RModified { k1, k2, w1, w2, tau, gamma } => r_pairwise_modified(k1, k2, w1, w2, tau, gamma),
        }
    }
}

impl NetworkSpec {
    pub fn random(n: usize, k: usize, weights: Vec<f64>, probs: Vec<f64>) -> Self {
        Self { n, k: Some(k), topology: TopologyKind::Regular, mode: WeightMode::Random, weights, probs: Some(probs), counts: None }
    }

    pub fn fixed(n: usize, weights: Vec<f64>, counts: Vec<usize>) -> Self {
        let k = counts.iter().sum();
        Self { n, k: Some(k), topology: TopologyKind::Regular, mode: WeightMode::Fixed, weights, probs: None, counts: Some(counts) }
    }

    pub fn classes(&self) -> Result<WeightClasses> {
        if self.n == 0 {
            return Err(config_error("network.n", "must be >= 1"));
        }
        match self.mode {
            WeightMode::Random => {
                if self.counts.is_some() {
                    return Err(config_error("network.counts", "only valid in fixed mode"));
                }
                let k = self.k.ok_or_else(|| config_error("network.k", "required in random mode"))?;
                let probs = self.probs.clone().ok_or_else(|| config_error("network.probs", "required in random mode"))?;
                WeightClasses::random(k, self.weights.clone(), probs).map_err(at("network"))
            }
            WeightMode::Fixed => {
                if self.probs.is_some() {
                    return Err(config_error("network.probs", "only valid in random mode"));
                }
                if self.topology != TopologyKind::Regular {
                    return Err(config_error("network.topology", "fixed mode requires a regular network"));
                }
                let counts = self.counts.clone().ok_or_else(|| config_error("network.counts", "required in fixed mode"))?;
                let wc = WeightClasses::fixed(self.weights.clone(), counts).map_err(at("network"))?;
                if let Some(k) = self.k {
                    if k != wc.degree() {
                        return Err(config_error("network.k", format!("{k} does not equal the sum of counts {}", wc.degree())));
                    }
                }
                Ok(wc)
            }
        }
    }

    pub fn topology(&self) -> Topology {
        match self.topology {
            TopologyKind::Regular => Topology::Regular,
            TopologyKind::ErdosRenyi => Topology::ErdosRenyi { mean_degree: self.k.unwrap_or(0) as f64 },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const COMPARE: &str = r#"{
        "schema_version": 1,
        "kind": "compare",
        "network": {"n": 1000, "k": 5, "mode": "random", "weights": [5, 1.25], "probs": [0.2, 0.8]},
        "epidemic": {"dynamics": "sis", "tau": 1, "gamma": 1},
        "ensemble": {"runs": 10, "seed": 3}
    }"#;

    fn path_of(err: Error) -> String {
        match err {
            Error::Config { path, .. } => path,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn parses_and_defaults() {
        let cfg = ExperimentConfig::from_json(COMPARE).unwrap();
        assert_eq!(cfg.kind, Some(ExperimentKind::Compare));
        assert_eq!(cfg.epidemic().unwrap().initial_fraction, 0.05);
        assert!(!cfg.ensemble.write_runs);
        cfg.validate(ExperimentKind::Compare).unwrap();
        let wc = cfg.network().unwrap().classes().unwrap();
        assert_eq!(cfg.closure_for(&wc).unwrap(), Closure::classic(5.0).unwrap());
        let again = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn unknown_keys_report_their_path() {
        let text = COMPARE.replace("\"tau\": 1", "\"tau\": 1, \"beta\": 2");
        let err = ExperimentConfig::from_json(&text).unwrap_err();
        assert!(err.is_config_error());
        assert_eq!(path_of(err), "epidemic.beta");
        let text = COMPARE.replace("\"seed\": 3", "\"seed\": -3");
        assert_eq!(path_of(ExperimentConfig::from_json(&text).unwrap_err()), "ensemble.seed");
        let text = COMPARE.replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert_eq!(path_of(ExperimentConfig::from_json(&text).unwrap_err()), "schema_version");
    }

    #[test]
    fn semantic_errors_report_their_path() {
        let text = COMPARE.replace("[0.2, 0.8]", "[0.2, 0.7]");
        let cfg = ExperimentConfig::from_json(&text).unwrap();
        assert_eq!(path_of(cfg.validate(ExperimentKind::Compare).unwrap_err()), "network.probs");
        let text = COMPARE.replace("\"gamma\": 1", "\"gamma\": 0");
        let cfg = ExperimentConfig::from_json(&text).unwrap();
        assert_eq!(path_of(cfg.validate(ExperimentKind::Compare).unwrap_err()), "epidemic.gamma");
        let cfg = ExperimentConfig::from_json(COMPARE).unwrap();
        assert_eq!(path_of(cfg.validate(ExperimentKind::SteadySweep).unwrap_err()), "sweep");
        assert_eq!(path_of(cfg.validate(ExperimentKind::FigurePreset).unwrap_err()), "figure");
    }

    #[test]
    fn threshold_queries_follow_mode() {
        let cfg = ExperimentConfig::from_json(COMPARE).unwrap();
        assert!(matches!(cfg.threshold_query().unwrap(), ThresholdQuery::R0Random { .. }));
        let mut fixed = cfg.clone();
        fixed.network = Some(NetworkSpec::fixed(1000, vec![10.0, 1.25], vec![2, 8]));
        assert!(matches!(fixed.threshold_query().unwrap(), ThresholdQuery::R0Fixed { k1: 2, k2: 8, .. }));
        fixed.threshold = Some(ThresholdKind::RClassic);
        assert_eq!(path_of(fixed.threshold_query().unwrap_err()), "threshold");
        fixed.threshold = Some(ThresholdKind::RModified);
        assert!(matches!(fixed.threshold_query().unwrap(), ThresholdQuery::RModified { .. }));
    }

    #[test]
    fn fixed_mode_checks() {
        let mut spec = NetworkSpec::fixed(100, vec![1.0, 2.0], vec![2, 3]);
        assert_eq!(spec.classes().unwrap().degree(), 5);
        spec.k = Some(4);
        assert_eq!(path_of(spec.classes().unwrap_err()), "network.k");
        spec.k = None;
        spec.topology = TopologyKind::ErdosRenyi;
        assert_eq!(path_of(spec.classes().unwrap_err()), "network.topology");
    }
}
