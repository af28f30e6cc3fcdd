//! Statistical checks of the stochastic simulator and the random weight
//! assignment against exact distributions.

use epinet::gillespie::{Dynamics, EpidemicParams, Event, Simulation, Status};
use epinet::netgen::{generate_network, Edge, Topology, WeightClasses, WeightedNetwork};
use epinet::rng::{self, streams};
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, Discrete, Exp};

fn params(tau: f64, gamma: f64) -> EpidemicParams {
    EpidemicParams::new(tau, gamma).unwrap()
}

fn ks_statistic(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Waiting times scaled by the total rate in force must be Exp(1). Ten
/// independent runs are tested at a per-run level of 0.001, and the pooled
/// sample at 0.01.
#[test]
fn rescaled_waiting_times_are_unit_exponential() {
    let wc = WeightClasses::random(5, vec![5.0, 1.25], vec![0.2, 0.8]).unwrap();
    let exp = Exp::new(1.0).unwrap();
    let per_run = 20_000;
    let mut pooled = Vec::new();
    for seed in 11..21 {
        let net = generate_network(500, Topology::Regular, &wc, seed).unwrap();
        let initial: Vec<u32> = (0..25).collect();
        let rng = rng::stream(seed, streams::EPIDEMIC);
        let mut sim = Simulation::new(&net, &wc, Dynamics::Sis, params(1.0, 1.0), &initial, rng).unwrap();
        let mut scaled = Vec::with_capacity(per_run);
        for _ in 0..per_run {
            let rate = sim.total_rate();
            let before = sim.time();
            sim.step(f64::INFINITY).expect("endemic SIS does not die out here");
            scaled.push((sim.time() - before) * rate);
        }
        let d = ks_statistic(scaled.clone(), |x| exp.cdf(x));
        assert!(d * (per_run as f64).sqrt() < 1.949, "seed {seed}: KS statistic {d}");
        pooled.extend(scaled);
    }
    let n = pooled.len() as f64;
    let d = ks_statistic(pooled, |x| exp.cdf(x));
    assert!(d * n.sqrt() < 1.628, "pooled KS statistic {d}");
}

#[test]
fn random_class_counts_follow_binomial() {
    let wc = WeightClasses::random(5, vec![5.0, 1.25], vec![0.2, 0.8]).unwrap();
    let net = generate_network(10_000, Topology::Regular, &wc, 5).unwrap();
    let mut observed = [0usize; 6];
    for v in 0..net.node_count() {
        observed[net.class_degree(v, 0)] += 1;
    }
    let binom = Binomial::new(0.2, 5).unwrap();
    let expected: Vec<f64> = (0..=5).map(|j| binom.pmf(j) * 10_000.0).collect();
    // Merge the sparse top bins (expected 6.4 and 0.3 nodes).
    let obs = [observed[0], observed[1], observed[2], observed[3], observed[4] + observed[5]];
    let exp = [expected[0], expected[1], expected[2], expected[3], expected[4] + expected[5]];
    let chi2: f64 = obs.iter().zip(&exp).map(|(&o, &e)| (o as f64 - e).powi(2) / e).sum();
    let critical = ChiSquared::new((obs.len() - 1) as f64).unwrap().inverse_cdf(0.99);
    assert!(chi2 < critical, "chi2 {chi2} >= {critical}, observed {observed:?}");
}

fn two_node(weight: f64) -> (WeightedNetwork, WeightClasses) {
    let wc = WeightClasses::random(1, vec![weight], vec![1.0]).unwrap();
    let net = WeightedNetwork::from_edges(2, vec![Edge { u: 0, v: 1, class: 0 }]).unwrap();
    (net, wc)
}

#[test]
fn two_node_sir_final_size() {
    let (tau, gamma, w) = (0.8, 1.0, 2.0);
    let (net, wc) = two_node(w);
    let trials = 20_000;
    let mut both = 0;
    for i in 0..trials {
        let rng = rng::stream(rng::member_seed(3, i), streams::EPIDEMIC);
        let mut sim = Simulation::new(&net, &wc, Dynamics::Sir, params(tau, gamma), &[0], rng).unwrap();
        while sim.step(f64::INFINITY).is_some() {}
        if sim.status(1) == Status::Recovered {
            both += 1;
        }
    }
    let p = tau * w / (tau * w + gamma);
    let sd = (p * (1.0 - p) / trials as f64).sqrt();
    let observed = both as f64 / trials as f64;
    assert!((observed - p).abs() < 4.0 * sd, "observed {observed}, expected {p}");
}

#[test]
fn infection_targets_are_weighted_by_link_class() {
    // Path 1 - 0 - 2 with the centre infected; class weights 3 and 1.
    let wc = WeightClasses::random(2, vec![3.0, 1.0], vec![0.5, 0.5]).unwrap();
    let net = WeightedNetwork::from_edges(3, vec![Edge { u: 0, v: 1, class: 0 }, Edge { u: 0, v: 2, class: 1 }]).unwrap();
    let (tau, gamma) = (1.0, 2.0);
    let trials = 20_000;
    let mut counts = [0usize; 3];
    for i in 0..trials {
        let rng = rng::stream(rng::member_seed(9, i), streams::EPIDEMIC);
        let mut sim = Simulation::new(&net, &wc, Dynamics::Sis, params(tau, gamma), &[0], rng).unwrap();
        match sim.step(f64::INFINITY).unwrap() {
            Event::Infection(1) => counts[0] += 1,
            Event::Infection(2) => counts[1] += 1,
            Event::Recovery(0) => counts[2] += 1,
            other => panic!("impossible first event {other:?}"),
        }
    }
    let total = tau * 4.0 + gamma;
    let probs = [3.0 / total, 1.0 / total, gamma / total];
    let chi2: f64 = counts
        .iter()
        .zip(probs)
        .map(|(&o, p)| (o as f64 - p * trials as f64).powi(2) / (p * trials as f64))
        .sum();
    let critical = ChiSquared::new(2.0).unwrap().inverse_cdf(0.99);
    assert!(chi2 < critical, "chi2 {chi2}, counts {counts:?}");
}

#[test]
fn audit_holds_after_every_event() {
    let wc = WeightClasses::fixed(vec![10.0, 1.25], vec![2, 8]).unwrap();
    let net = generate_network(300, Topology::Regular, &wc, 2).unwrap();
    for dynamics in [Dynamics::Sis, Dynamics::Sir] {
        let initial: Vec<u32> = (0..15).collect();
        let rng = rng::stream(2, streams::EPIDEMIC);
        let mut sim = Simulation::new(&net, &wc, dynamics, params(0.5, 1.0), &initial, rng).unwrap();
        let mut events = 0;
        while events < 20_000 && sim.step(f64::INFINITY).is_some() {
            events += 1;
            sim.audit().unwrap();
        }
        assert!(events > 100, "{dynamics:?} stopped after {events} events");
    }
}
