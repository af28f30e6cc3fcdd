//! Event-exact stochastic SIS/SIR dynamics on a weighted network.
//!
//! A susceptible node `u` is infected at rate `tau * sum w(e)` over the edges
//! `e` joining it to infected neighbours; each infected node recovers at rate
//! `gamma`. Waiting times are exponential in the total rate and the firing
//! event is chosen proportionally to its rate.
//!
//! Per-node pressures are recomputed from integer per-class counts of
//! infected neighbours, so they never accumulate rounding drift. The total
//! infection rate is likewise read off the integer S–I link tallies.

use std::io::Write;

use rand::seq::index;
use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netgen::{WeightClasses, WeightedNetwork};
use crate::rng::{self, streams, SimRng};

/// Events between consistency audits in debug builds.
pub const AUDIT_INTERVAL: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpidemicParams {
    /// Transmission rate per unit link weight.
    pub tau: f64,
    /// Recovery rate.
    pub gamma: f64,
}

impl EpidemicParams {
    pub fn new(tau: f64, gamma: f64) -> Result<Self> {
        let params = Self { tau, gamma };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            return Err(Error::invalid("tau", format!("must be finite and >= 0, got {}", self.tau)));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::invalid("gamma", format!("must be finite and > 0, got {}", self.gamma)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dynamics {
    Sis,
    Sir,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Susceptible,
    Infected,
    Recovered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    Infection(u32),
    Recovery(u32),
}

/// Undirected link counts of one weight class, keyed by endpoint statuses.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LinkTally {
    pub ss: u64,
    pub si: u64,
    pub ii: u64,
    pub sr: u64,
    pub ir: u64,
    pub rr: u64,
}

impl LinkTally {
    fn slot(&mut self, a: Status, b: Status) -> &mut u64 {
        use Status::*;
        match (a, b) {
            (Susceptible, Susceptible) => &mut self.ss,
            (Susceptible, Infected) | (Infected, Susceptible) => &mut self.si,
            (Infected, Infected) => &mut self.ii,
            (Susceptible, Recovered) | (Recovered, Susceptible) => &mut self.sr,
            (Infected, Recovered) | (Recovered, Infected) => &mut self.ir,
            (Recovered, Recovered) => &mut self.rr,
        }
    }

    /// Pair counts in the doubly counted convention: `[AA]` is twice the
    /// number of A–A links, `[AB]` the number of A–B links.
    pub fn doubly_counted(&self) -> [u64; 6] {
        [2 * self.ss, self.si, 2 * self.ii, self.sr, self.ir, 2 * self.rr]
    }

    /// `[SS] + 2[SI] + [II] + 2[SR] + 2[IR] + [RR]`, which equals twice the
    /// number of links in the class.
    pub fn pair_sum(&self) -> u64 {
        let [ss, si, ii, sr, ir, rr] = self.doubly_counted();
        ss + 2 * si + ii + 2 * sr + 2 * ir + rr
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub time: f64,
    pub s: u32,
    pub i: u32,
    pub r: u32,
}

/// Every event of one realisation, plus a closing sample at `t_max` unless
/// the infection died out first.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub events: u64,
    pub seed: u64,
    pub node_count: usize,
    pub t_max: f64,
}

impl Trajectory {
    /// State in force at time `t` (piecewise constant, right-continuous).
    pub fn state_at(&self, t: f64) -> Sample {
        let idx = self.samples.partition_point(|s| s.time <= t);
        self.samples[idx.saturating_sub(1)]
    }

    pub fn final_sample(&self) -> Sample {
        *self.samples.last().expect("trajectory has an initial sample")
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "time,S,I,R")?;
        for s in &self.samples {
            writeln!(out, "{},{},{},{}", s.time, s.s, s.i, s.r)?;
        }
        Ok(())
    }
}

/// Mutable state of a running simulation.
pub struct Simulation<'a> {
    net: &'a WeightedNetwork,
    dynamics: Dynamics,
    class_rates: Vec<f64>,
    gamma: f64,
    status: Vec<Status>,
    infected_neighbors: Vec<u32>,
    pressure: Vec<f64>,
    infected: Vec<u32>,
    position: Vec<u32>,
    susceptible_count: usize,
    recovered_count: usize,
    tallies: Vec<LinkTally>,
    time: f64,
    events: u64,
    rng: SimRng,
}

const NOT_INFECTED: u32 = u32::MAX;

impl<'a> Simulation<'a> {
    /// Starts from all-susceptible with `initial_infected` infected at t = 0.
    pub fn new(
        net: &'a WeightedNetwork,
        wc: &WeightClasses,
        dynamics: Dynamics,
        params: EpidemicParams,
        initial_infected: &[u32],
        rng: SimRng,
    ) -> Result<Self> {
        params.validate()?;
        let n = net.node_count();
        if n == 0 || net.edge_count() == 0 {
            return Err(Error::invalid("net", "network is empty"));
        }
        let m = wc.len();
        if let Some(e) = net.edges().iter().find(|e| e.class as usize >= m) {
            return Err(Error::invalid(
                "net",
                format!("edge ({}, {}) has class {} outside the {m} weight classes", e.u, e.v, e.class),
            ));
        }
        let mut tallies = vec![LinkTally::default(); m];
        for e in net.edges() {
            tallies[e.class as usize].ss += 1;
        }
        let mut sim = Self {
            net,
            dynamics,
            class_rates: wc.weights().iter().map(|w| params.tau * w).collect(),
            gamma: params.gamma,
            status: vec![Status::Susceptible; n],
            infected_neighbors: vec![0; n * m],
            pressure: vec![0.0; n],
            infected: Vec::with_capacity(n),
            position: vec![NOT_INFECTED; n],
            susceptible_count: n,
            recovered_count: 0,
            tallies,
            time: 0.0,
            events: 0,
            rng,
        };
        for &v in initial_infected {
            if v as usize >= n {
                return Err(Error::invalid("initial_infected", format!("node {v} out of range")));
            }
            if sim.status[v as usize] == Status::Infected {
                return Err(Error::invalid("initial_infected", format!("node {v} listed twice")));
            }
            sim.infect(v as usize);
        }
        Ok(sim)
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    pub fn status(&self, node: usize) -> Status {
        self.status[node]
    }

    pub fn sample(&self) -> Sample {
        Sample {
            time: self.time,
            s: self.susceptible_count as u32,
            i: self.infected.len() as u32,
            r: self.recovered_count as u32,
        }
    }

    pub fn infected_count(&self) -> usize {
        self.infected.len()
    }

    /// Per-class link tallies, maintained incrementally.
    pub fn tallies(&self) -> &[LinkTally] {
        &self.tallies
    }

    pub fn infection_rate(&self) -> f64 {
        self.tallies
            .iter()
            .zip(&self.class_rates)
            .map(|(t, r)| t.si as f64 * r)
            .sum()
    }

    pub fn recovery_rate(&self) -> f64 {
        self.gamma * self.infected.len() as f64
    }

    pub fn total_rate(&self) -> f64 {
        self.infection_rate() + self.recovery_rate()
    }

    /// Draws an inter-event time for the current state without changing it.
    /// Returns `None` in an absorbing state.
    pub fn draw_waiting_time(&mut self) -> Option<f64> {
        let total = self.total_rate();
        if total > 0.0 {
            let e: f64 = self.rng.sample(Exp1);
            Some(e / total)
        } else {
            None
        }
    }

    /// Advances by one event if it occurs no later than `t_max`.
    pub fn step(&mut self, t_max: f64) -> Option<Event> {
        let dt = self.draw_waiting_time()?;
        if self.time + dt > t_max {
            return None;
        }
        self.time += dt;
        let event = self.fire();
        self.events += 1;
        if cfg!(debug_assertions) && self.events.is_multiple_of(AUDIT_INTERVAL) {
            if let Err(msg) = self.audit() {
                panic!("simulation state audit failed after {} events: {msg}", self.events);
            }
        }
        Some(event)
    }

    fn fire(&mut self) -> Event {
        let infection = self.infection_rate();
        let total = infection + self.recovery_rate();
        let target = self.rng.random::<f64>() * total;
        if target < infection {
            let node = self.pick_infection(target);
            self.infect(node);
            Event::Infection(node as u32)
        } else {
            let idx = self.rng.random_range(0..self.infected.len());
            let node = self.infected[idx] as usize;
            self.recover(node);
            Event::Recovery(node as u32)
        }
    }

    /// Linear scan over susceptible pressures.
    fn pick_infection(&self, target: f64) -> usize {
        let mut acc = 0.0;
        let mut last = None;
        for (u, (&st, &p)) in self.status.iter().zip(&self.pressure).enumerate() {
            if st == Status::Susceptible && p > 0.0 {
                acc += p;
                if acc > target {
                    return u;
                }
                last = Some(u);
            }
        }
        // rounding in the running sum can leave `acc` a hair below `target`
        last.expect("positive infection rate implies an exposed susceptible")
    }

    fn node_pressure(&self, node: usize) -> f64 {
        let m = self.class_rates.len();
        self.infected_neighbors[node * m..(node + 1) * m]
            .iter()
            .zip(&self.class_rates)
            .map(|(&c, r)| f64::from(c) * r)
            .sum()
    }

    fn set_status(&mut self, v: usize, new: Status) {
        let old = self.status[v];
        for nb in self.net.neighbors(v) {
            let other = self.status[nb.node as usize];
            let tally = &mut self.tallies[nb.class as usize];
            *tally.slot(old, other) -= 1;
            *tally.slot(new, other) += 1;
        }
        self.status[v] = new;
    }

    fn infect(&mut self, v: usize) {
        debug_assert_eq!(self.status[v], Status::Susceptible);
        self.set_status(v, Status::Infected);
        self.susceptible_count -= 1;
        self.position[v] = self.infected.len() as u32;
        self.infected.push(v as u32);
        self.pressure[v] = 0.0;
        let m = self.class_rates.len();
        for nb in self.net.neighbors(v) {
            let u = nb.node as usize;
            self.infected_neighbors[u * m + nb.class as usize] += 1;
            if self.status[u] == Status::Susceptible {
                self.pressure[u] = self.node_pressure(u);
            }
        }
    }

    fn recover(&mut self, v: usize) {
        debug_assert_eq!(self.status[v], Status::Infected);
        let next = match self.dynamics {
            Dynamics::Sis => Status::Susceptible,
            Dynamics::Sir => Status::Recovered,
        };
        self.set_status(v, next);
        let pos = self.position[v] as usize;
        self.infected.swap_remove(pos);
        if let Some(&moved) = self.infected.get(pos) {
            self.position[moved as usize] = pos as u32;
        }
        self.position[v] = NOT_INFECTED;
        let m = self.class_rates.len();
        for nb in self.net.neighbors(v) {
            let u = nb.node as usize;
            self.infected_neighbors[u * m + nb.class as usize] -= 1;
            if self.status[u] == Status::Susceptible {
                self.pressure[u] = self.node_pressure(u);
            }
        }
        match next {
            Status::Susceptible => {
                self.susceptible_count += 1;
                self.pressure[v] = self.node_pressure(v);
            }
            _ => self.recovered_count += 1,
        }
    }

    /// Recomputes every cached quantity from the node statuses and compares.
    pub fn audit(&self) -> std::result::Result<(), String> {
        let n = self.status.len();
        let m = self.class_rates.len();
        let (mut s, mut i, mut r) = (0usize, 0usize, 0usize);
        for st in &self.status {
            match st {
                Status::Susceptible => s += 1,
                Status::Infected => i += 1,
                Status::Recovered => r += 1,
            }
        }
        if (s, i, r) != (self.susceptible_count, self.infected.len(), self.recovered_count) {
            return Err(format!(
                "compartment counts ({s}, {i}, {r}) differ from cached ({}, {}, {})",
                self.susceptible_count,
                self.infected.len(),
                self.recovered_count
            ));
        }
        if s + i + r != n {
            return Err(format!("S + I + R = {} != N = {n}", s + i + r));
        }
        let mut tallies = vec![LinkTally::default(); m];
        for e in self.net.edges() {
            *tallies[e.class as usize].slot(self.status[e.u as usize], self.status[e.v as usize]) += 1;
        }
        if tallies != self.tallies {
            return Err(format!("link tallies {tallies:?} differ from cached {:?}", self.tallies));
        }
        let mut pressure_sum = 0.0;
        for u in 0..n {
            if self.status[u] != Status::Susceptible {
                continue;
            }
            let fresh: f64 = self
                .net
                .neighbors(u)
                .iter()
                .filter(|nb| self.status[nb.node as usize] == Status::Infected)
                .map(|nb| self.class_rates[nb.class as usize])
                .sum();
            if !close(fresh, self.pressure[u]) {
                return Err(format!("pressure of node {u}: cached {} vs {fresh}", self.pressure[u]));
            }
            pressure_sum += fresh;
        }
        let cached_total = self.infection_rate() + self.recovery_rate();
        let fresh_total = pressure_sum + self.gamma * i as f64;
        if !close(fresh_total, cached_total) {
            return Err(format!("total rate cached {cached_total} vs recomputed {fresh_total}"));
        }
        Ok(())
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-300)
}

/// Uniformly random distinct nodes, `round(fraction * n)` of them.
pub fn choose_initial_infected(n: usize, fraction: f64, rng: &mut SimRng) -> Result<Vec<u32>> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid(
            "initial_infected_fraction",
            format!("must lie in (0, 1), got {fraction}"),
        ));
    }
    let count = (fraction * n as f64).round() as usize;
    if count == 0 {
        return Err(Error::invalid(
            "initial_infected_fraction",
            format!("{fraction} of {n} nodes rounds to zero infected"),
        ));
    }
    Ok(index::sample(rng, n, count.min(n))
        .into_iter()
        .map(|v| v as u32)
        .collect())
}

pub fn run_sis(
    net: &WeightedNetwork,
    wc: &WeightClasses,
    params: EpidemicParams,
    initial_infected_fraction: f64,
    t_max: f64,
    seed: u64,
) -> Result<Trajectory> {
    simulate(net, wc, Dynamics::Sis, params, initial_infected_fraction, t_max, seed)
}

pub fn run_sir(
    net: &WeightedNetwork,
    wc: &WeightClasses,
    params: EpidemicParams,
    initial_infected_fraction: f64,
    t_max: f64,
    seed: u64,
) -> Result<Trajectory> {
    simulate(net, wc, Dynamics::Sir, params, initial_infected_fraction, t_max, seed)
}

pub fn simulate(
    net: &WeightedNetwork,
    wc: &WeightClasses,
    dynamics: Dynamics,
    params: EpidemicParams,
    initial_infected_fraction: f64,
    t_max: f64,
    seed: u64,
) -> Result<Trajectory> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::invalid("t_max", format!("must be positive, got {t_max}")));
    }
    if net.node_count() == 0 {
        return Err(Error::invalid("net", "network is empty"));
    }
    let mut rng = rng::stream(seed, streams::EPIDEMIC);
    let initial = choose_initial_infected(net.node_count(), initial_infected_fraction, &mut rng)?;
    let mut sim = Simulation::new(net, wc, dynamics, params, &initial, rng)?;
    let mut samples = vec![sim.sample()];
    while sim.step(t_max).is_some() {
        samples.push(sim.sample());
        if sim.infected_count() == 0 {
            break;
        }
    }
    if sim.infected_count() > 0 {
        samples.push(Sample {
            time: t_max,
            ..sim.sample()
        });
    }
    Ok(Trajectory {
        samples,
        events: sim.events(),
        seed,
        node_count: net.node_count(),
        t_max,
    })
}

/// Pointwise mean of step-function trajectories on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleMean {
    pub times: Vec<f64>,
    pub s: Vec<f64>,
    pub i: Vec<f64>,
    pub r: Vec<f64>,
    pub runs: usize,
    pub node_count: usize,
}

impl EnsembleMean {
    pub fn prevalence(&self) -> Vec<f64> {
        self.i.iter().map(|i| i / self.node_count as f64).collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "time,mean_S,mean_I,mean_R,runs")?;
        for k in 0..self.times.len() {
            writeln!(
                out,
                "{},{},{},{},{}",
                self.times[k], self.s[k], self.i[k], self.r[k], self.runs
            )?;
        }
        Ok(())
    }
}

pub fn ensemble_mean(trajectories: &[Trajectory], grid: &[f64]) -> Result<EnsembleMean> {
    let first = trajectories
        .first()
        .ok_or_else(|| Error::invalid("trajectories", "no trajectories to average"))?;
    if trajectories.iter().any(|t| t.node_count != first.node_count) {
        return Err(Error::invalid("trajectories", "trajectories have different node counts"));
    }
    let horizon = trajectories.iter().map(|t| t.t_max).fold(f64::INFINITY, f64::min);
    if let Some(t) = grid.iter().find(|&&t| !(0.0..=horizon).contains(&t)) {
        return Err(Error::invalid("time_grid", format!("grid point {t} outside [0, {horizon}]")));
    }
    let runs = trajectories.len() as f64;
    let mut mean = EnsembleMean {
        times: grid.to_vec(),
        s: vec![0.0; grid.len()],
        i: vec![0.0; grid.len()],
        r: vec![0.0; grid.len()],
        runs: trajectories.len(),
        node_count: first.node_count,
    };
    for traj in trajectories {
        for (k, &t) in grid.iter().enumerate() {
            let st = traj.state_at(t);
            mean.s[k] += f64::from(st.s);
            mean.i[k] += f64::from(st.i);
            mean.r[k] += f64::from(st.r);
        }
    }
    for v in [&mut mean.s, &mut mean.i, &mut mean.r] {
        v.iter_mut().for_each(|x| *x /= runs);
    }
    Ok(mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::{generate_network, Edge, Topology};

    fn pair(weight: f64) -> (WeightedNetwork, WeightClasses) {
        let net = WeightedNetwork::from_edges(2, vec![Edge { u: 0, v: 1, class: 0 }]).unwrap();
        (net, WeightClasses::uniform(1, weight).unwrap())
    }

    #[test]
    fn params_are_validated() {
        assert!(EpidemicParams::new(-1.0, 1.0).is_err());
        assert!(EpidemicParams::new(1.0, 0.0).is_err());
        assert!(EpidemicParams::new(0.0, 1.0).is_ok());
    }

    #[test]
    fn no_transmission_without_tau() {
        let wc = WeightClasses::random(5, vec![5.0, 1.25], vec![0.2, 0.8]).unwrap();
        let net = generate_network(200, Topology::Regular, &wc, 1).unwrap();
        let params = EpidemicParams::new(0.0, 1.0).unwrap();
        let sis = run_sis(&net, &wc, params, 0.05, 100.0, 3).unwrap();
        assert!(sis.samples.windows(2).all(|w| w[1].i <= w[0].i));
        assert_eq!(sis.final_sample().i, 0);

        let sir = run_sir(&net, &wc, params, 0.05, 100.0, 3).unwrap();
        let last = sir.final_sample();
        assert_eq!(last.r, 10);
        assert_eq!(last.i, 0);
    }

    #[test]
    fn zero_initial_infected_rejected() {
        let (net, wc) = pair(1.0);
        let params = EpidemicParams::new(1.0, 1.0).unwrap();
        assert!(run_sis(&net, &wc, params, 0.1, 1.0, 0).is_err());
        assert!(run_sis(&net, &wc, params, 0.0, 1.0, 0).is_err());
        assert!(run_sis(&net, &wc, params, 0.5, 0.0, 0).is_err());
    }

    #[test]
    fn empty_network_rejected() {
        let net = WeightedNetwork::from_edges(0, vec![]).unwrap();
        let wc = WeightClasses::uniform(1, 1.0).unwrap();
        let params = EpidemicParams::new(1.0, 1.0).unwrap();
        assert!(run_sis(&net, &wc, params, 0.5, 1.0, 0).is_err());
    }

    #[test]
    fn trajectory_invariants_and_determinism() {
        let wc = WeightClasses::random(5, vec![5.0, 1.25], vec![0.2, 0.8]).unwrap();
        let net = generate_network(300, Topology::Regular, &wc, 4).unwrap();
        let params = EpidemicParams::new(1.0, 1.0).unwrap();
        let a = run_sis(&net, &wc, params, 0.05, 10.0, 9).unwrap();
        let b = run_sis(&net, &wc, params, 0.05, 10.0, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.samples.windows(2).all(|w| w[1].time > w[0].time));
        assert!(a.samples.iter().all(|s| (s.s + s.i + s.r) as usize == 300));
        assert_eq!(a.samples.len() as u64, a.events + 2);
    }

    #[test]
    fn audit_holds_along_a_run() {
        let wc = WeightClasses::fixed(vec![1.4, 0.8], vec![2, 4]).unwrap();
        let net = generate_network(200, Topology::Regular, &wc, 4).unwrap();
        let params = EpidemicParams::new(1.0, 1.0).unwrap();
        let mut rng = rng::stream(1, streams::EPIDEMIC);
        let init = choose_initial_infected(200, 0.05, &mut rng).unwrap();
        let mut sim = Simulation::new(&net, &wc, Dynamics::Sir, params, &init, rng).unwrap();
        sim.audit().unwrap();
        while sim.step(f64::INFINITY).is_some() {
            sim.audit().unwrap();
        }
        assert_eq!(sim.infected_count(), 0);
    }

    #[test]
    fn state_at_is_a_step_function() {
        let traj = Trajectory {
            samples: vec![
                Sample { time: 0.0, s: 9, i: 1, r: 0 },
                Sample { time: 1.0, s: 8, i: 2, r: 0 },
                Sample { time: 2.5, s: 8, i: 1, r: 1 },
            ],
            events: 2,
            seed: 0,
            node_count: 10,
            t_max: 3.0,
        };
        assert_eq!(traj.state_at(0.0).i, 1);
        assert_eq!(traj.state_at(0.999).i, 1);
        assert_eq!(traj.state_at(1.0).i, 2);
        assert_eq!(traj.state_at(3.0).r, 1);
        let mean = ensemble_mean(std::slice::from_ref(&traj), &[0.0, 1.5, 3.0]).unwrap();
        assert_eq!(mean.i, vec![1.0, 2.0, 1.0]);
    }

    #[test]
    fn ensemble_mean_of_constants() {
        let constant = |i: u32| Trajectory {
            samples: vec![Sample { time: 0.0, s: 100 - i, i, r: 0 }],
            events: 0,
            seed: 0,
            node_count: 100,
            t_max: 5.0,
        };
        let grid: Vec<f64> = (0..6).map(f64::from).collect();
        let mean = ensemble_mean(&[constant(10), constant(20)], &grid).unwrap();
        assert!(mean.i.iter().all(|&x| x == 15.0));
        assert!(ensemble_mean(&[], &grid).is_err());
        assert!(ensemble_mean(&[constant(1)], &[6.0]).is_err());
    }

    #[test]
    fn csv_headers() {
        let (net, wc) = pair(1.0);
        let traj = run_sir(&net, &wc, EpidemicParams::new(1.0, 1.0).unwrap(), 0.5, 5.0, 1).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("time,S,I,R\n0,1,1,0\n"));
    }
}
