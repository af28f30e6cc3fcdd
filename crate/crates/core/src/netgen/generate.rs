use std::collections::HashSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::{pair_key, Edge, WeightClasses, WeightMode, WeightedNetwork, UNASSIGNED};
use crate::error::{Error, Result};
use crate::rng::{self, streams, SimRng};

/// Restart budget for stub matching before generation is abandoned.
pub const MAX_RESTARTS: usize = 500;

/// Random probes for a valid stub pair before falling back to enumeration.
const RANDOM_PROBES: usize = 64;

/// Underlying unweighted topology.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Topology {
    /// Every node has the degree given by the weight classes.
    Regular,
    ErdosRenyi { mean_degree: f64 },
}

/// Random `k`-regular simple graph on `n` nodes, all edges unassigned.
pub fn build_regular_graph(n: usize, k: usize, seed: u64) -> Result<WeightedNetwork> {
    check_regular(n, k, "k")?;
    let mut rng = rng::stream(seed, streams::TOPOLOGY);
    for _ in 0..MAX_RESTARTS {
        let mut taken = HashSet::with_capacity(n * k / 2);
        if let Some(pairs) = match_stubs(n, k, &mut taken, &mut rng) {
            let edges = pairs
                .into_iter()
                .map(|(u, v)| Edge { u, v, class: UNASSIGNED })
                .collect();
            return Ok(WeightedNetwork::from_edges_unchecked(n, edges));
        }
    }
    Err(Error::GenerationFailed {
        attempts: MAX_RESTARTS,
        reason: format!("no simple {k}-regular matching found on {n} nodes"),
    })
}

/// G(n, p) with `p = mean_degree / (n - 1)`, all edges unassigned.
pub fn build_erdos_renyi(n: usize, mean_degree: f64, seed: u64) -> Result<WeightedNetwork> {
    if n < 2 {
        return Err(Error::invalid("n", "need at least two nodes"));
    }
    let max = (n - 1) as f64;
    if !(mean_degree > 0.0 && mean_degree <= max) {
        return Err(Error::invalid(
            "mean_degree",
            format!("mean degree must lie in (0, {max}], got {mean_degree}"),
        ));
    }
    let p = mean_degree / max;
    let mut rng = rng::stream(seed, streams::TOPOLOGY);
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            if p >= 1.0 || rng.random_bool(p) {
                edges.push(Edge { u, v, class: UNASSIGNED });
            }
        }
    }
    Ok(WeightedNetwork::from_edges_unchecked(n, edges))
}

/// Assigns each edge class `i` independently with probability `p_i`.
pub fn assign_weights_random(
    net: &WeightedNetwork,
    wc: &WeightClasses,
    seed: u64,
) -> Result<WeightedNetwork> {
    if wc.mode() != WeightMode::Random {
        return Err(Error::invalid("wc", "random assignment needs random-mode classes"));
    }
    let dist = WeightedIndex::new(wc.probs())
        .map_err(|e| Error::invalid("probs", e.to_string()))?;
    let mut rng = rng::stream(seed, streams::WEIGHTS);
    let classes: Vec<u32> = net
        .edges()
        .iter()
        .map(|_| dist.sample(&mut rng) as u32)
        .collect();
    net.with_classes(&classes)
}

/// Simple graph in which every node has exactly `counts[i]` class-`i` edges.
///
/// The class layers are matched one after another; a layer may not reuse a
/// node pair already joined by an earlier layer.
pub fn build_fixed_weight_network(n: usize, wc: &WeightClasses, seed: u64) -> Result<WeightedNetwork> {
    if wc.mode() != WeightMode::Fixed {
        return Err(Error::invalid("wc", "fixed construction needs fixed-mode classes"));
    }
    check_regular(n, wc.degree(), "counts")?;
    for &k in wc.counts() {
        if !(n * k).is_multiple_of(2) {
            return Err(Error::invalid(
                "counts",
                format!("n * k_i must be even (n = {n}, k_i = {k})"),
            ));
        }
    }
    let mut rng = rng::stream(seed, streams::TOPOLOGY);
    'restart: for _ in 0..MAX_RESTARTS {
        let mut taken = HashSet::with_capacity(n * wc.degree() / 2);
        let mut edges = Vec::with_capacity(n * wc.degree() / 2);
        for (class, &k) in wc.counts().iter().enumerate() {
            match match_stubs(n, k, &mut taken, &mut rng) {
                Some(pairs) => edges.extend(pairs.into_iter().map(|(u, v)| Edge {
                    u,
                    v,
                    class: class as u32,
                })),
                None => continue 'restart,
            }
        }
        return Ok(WeightedNetwork::from_edges_unchecked(n, edges));
    }
    Err(Error::GenerationFailed {
        attempts: MAX_RESTARTS,
        reason: format!("no simple layered matching for counts {:?} on {n} nodes", wc.counts()),
    })
}

/// Network for the given topology and weight classes.
///
/// Random-mode classes are laid over a regular or Erdős–Rényi graph; fixed
/// mode always uses the layered regular construction.
pub fn generate_network(
    n: usize,
    topology: Topology,
    wc: &WeightClasses,
    seed: u64,
) -> Result<WeightedNetwork> {
    match (wc.mode(), topology) {
        (WeightMode::Random, Topology::Regular) => {
            let net = build_regular_graph(n, wc.degree(), seed)?;
            assign_weights_random(&net, wc, seed)
        }
        (WeightMode::Random, Topology::ErdosRenyi { mean_degree }) => {
            let net = build_erdos_renyi(n, mean_degree, seed)?;
            assign_weights_random(&net, wc, seed)
        }
        (WeightMode::Fixed, Topology::Regular) => build_fixed_weight_network(n, wc, seed),
        (WeightMode::Fixed, Topology::ErdosRenyi { .. }) => Err(Error::invalid(
            "topology",
            "fixed weight allotments require a regular topology",
        )),
    }
}

fn check_regular(n: usize, k: usize, name: &'static str) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n", "network needs at least one node"));
    }
    if k >= n {
        return Err(Error::invalid(name, format!("degree {k} must be below n = {n}")));
    }
    if !(n * k).is_multiple_of(2) {
        return Err(Error::invalid(name, format!("n * k must be even (n = {n}, k = {k})")));
    }
    Ok(())
}

/// Pairs `k` stubs per node into edges avoiding self-loops and any pair in
/// `taken`. Conflicting draws are redrawn; when no admissible pair remains the
/// attempt is abandoned and `taken` is left as it was on entry.
fn match_stubs(
    n: usize,
    k: usize,
    taken: &mut HashSet<u64>,
    rng: &mut SimRng,
) -> Option<Vec<(u32, u32)>> {
    let mut stubs: Vec<u32> = (0..n as u32)
        .flat_map(|u| std::iter::repeat_n(u, k))
        .collect();
    let mut pairs = Vec::with_capacity(stubs.len() / 2);
    let admissible = |taken: &HashSet<u64>, u: u32, v: u32| u != v && !taken.contains(&pair_key(u, v));

    while stubs.len() >= 2 {
        let len = stubs.len();
        let mut chosen = None;
        for _ in 0..RANDOM_PROBES {
            let i = rng.random_range(0..len);
            let mut j = rng.random_range(0..len - 1);
            if j >= i {
                j += 1;
            }
            if admissible(taken, stubs[i], stubs[j]) {
                chosen = Some((i, j));
                break;
            }
        }
        if chosen.is_none() {
            let mut candidates = Vec::new();
            for i in 0..len {
                for j in (i + 1)..len {
                    if admissible(taken, stubs[i], stubs[j]) {
                        candidates.push((i, j));
                    }
                }
            }
            if candidates.is_empty() {
                for &(u, v) in &pairs {
                    taken.remove(&pair_key(u, v));
                }
                return None;
            }
            chosen = Some(candidates[rng.random_range(0..candidates.len())]);
        }
        let (i, j) = chosen.expect("a pair was chosen");
        let (u, v) = (stubs[i], stubs[j]);
        taken.insert(pair_key(u, v));
        pairs.push((u.min(v), u.max(v)));
        stubs.swap_remove(i.max(j));
        stubs.swap_remove(i.min(j));
    }
    Some(pairs)
}
