//! Contact networks with discrete link-weight classes.
//!
//! A network is an undirected simple graph whose edges each carry the index
//! of a weight class. The weight values themselves live in [`WeightClasses`],
//! which also records how the classes were laid down: independently per edge
//! ([`WeightMode::Random`]) or as a fixed per-node allotment
//! ([`WeightMode::Fixed`]).

mod generate;
mod io;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generate::{
    assign_weights_random, build_erdos_renyi, build_fixed_weight_network, build_regular_graph,
    generate_network, Topology, MAX_RESTARTS,
};
pub use io::{read_edge_list, write_edge_list, EdgeListHeader};

/// Class index carried by edges of a network that has not been weighted yet.
pub const UNASSIGNED: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    Random,
    Fixed,
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightMode::Random => f.write_str("random"),
            WeightMode::Fixed => f.write_str("fixed"),
        }
    }
}

impl FromStr for WeightMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "random" => Ok(WeightMode::Random),
            "fixed" => Ok(WeightMode::Fixed),
            other => Err(format!("unknown weight mode `{other}`")),
        }
    }
}

/// The weight alphabet `w_1..w_M` together with either class frequencies
/// (random mode) or per-node class counts (fixed mode).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightClasses {
    mode: WeightMode,
    weights: Vec<f64>,
    probs: Vec<f64>,
    counts: Vec<usize>,
    degree: usize,
}

impl WeightClasses {
    /// Weights assigned independently to each edge with probabilities `probs`
    /// on a network of (mean) degree `degree`.
    pub fn random(degree: usize, weights: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        check_weights(&weights)?;
        if probs.len() != weights.len() {
            return Err(Error::invalid(
                "probs",
                format!("{} probabilities for {} weights", probs.len(), weights.len()),
            ));
        }
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::invalid("probs", "probabilities must lie in [0, 1]"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("probs", format!("probabilities sum to {total}, not 1")));
        }
        if degree == 0 {
            return Err(Error::invalid("degree", "degree must be positive"));
        }
        Ok(Self {
            mode: WeightMode::Random,
            weights,
            probs,
            counts: Vec::new(),
            degree,
        })
    }

    /// Every node carries exactly `counts[i]` links of weight `weights[i]`.
    pub fn fixed(weights: Vec<f64>, counts: Vec<usize>) -> Result<Self> {
        check_weights(&weights)?;
        if counts.len() != weights.len() {
            return Err(Error::invalid(
                "counts",
                format!("{} counts for {} weights", counts.len(), weights.len()),
            ));
        }
        let degree: usize = counts.iter().sum();
        if degree == 0 {
            return Err(Error::invalid("counts", "total degree must be positive"));
        }
        Ok(Self {
            mode: WeightMode::Fixed,
            weights,
            probs: Vec::new(),
            counts,
            degree,
        })
    }

    /// A single class of weight `weight` on a `degree`-regular network.
    pub fn uniform(degree: usize, weight: f64) -> Result<Self> {
        Self::random(degree, vec![weight], vec![1.0])
    }

    pub fn mode(&self) -> WeightMode {
        self.mode
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Class probabilities; empty in fixed mode.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Per-node class counts; empty in random mode.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of classes `M`.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Fraction of links in each class: `p_i` (random) or `k_i / k` (fixed).
    pub fn fractions(&self) -> Vec<f64> {
        match self.mode {
            WeightMode::Random => self.probs.clone(),
            WeightMode::Fixed => self
                .counts
                .iter()
                .map(|&c| c as f64 / self.degree as f64)
                .collect(),
        }
    }

    /// Expected number of class-`i` links per node, `q_i * k`.
    pub fn class_degrees(&self) -> Vec<f64> {
        self.fractions()
            .iter()
            .map(|q| q * self.degree as f64)
            .collect()
    }

    /// Model average link weight `sum_i q_i w_i`.
    pub fn average_weight(&self) -> f64 {
        self.fractions()
            .iter()
            .zip(&self.weights)
            .map(|(q, w)| q * w)
            .sum()
    }
}

fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::invalid("weights", "at least one weight class is required"));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::invalid("weights", "weights must be finite and positive"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: u32,
    pub v: u32,
    pub class: u32,
}

/// Adjacency entry: the neighbouring node and the class of the connecting edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighbor {
    pub node: u32,
    pub class: u32,
}

/// Undirected simple graph with a weight-class index per edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedNetwork {
    node_count: usize,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    adjacency: Vec<Neighbor>,
}

impl WeightedNetwork {
    /// Builds a network from an edge list, rejecting self-loops, parallel
    /// edges and out-of-range endpoints.
    pub fn from_edges(node_count: usize, edges: Vec<Edge>) -> Result<Self> {
        if node_count > u32::MAX as usize {
            return Err(Error::invalid("node_count", "too many nodes"));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        for e in &edges {
            if e.u as usize >= node_count || e.v as usize >= node_count {
                return Err(Error::invalid(
                    "edges",
                    format!("edge ({}, {}) references a node >= {node_count}", e.u, e.v),
                ));
            }
            if e.u == e.v {
                return Err(Error::invalid("edges", format!("self-loop at node {}", e.u)));
            }
            if !seen.insert(pair_key(e.u, e.v)) {
                return Err(Error::invalid(
                    "edges",
                    format!("parallel edge between {} and {}", e.u, e.v),
                ));
            }
        }
        Ok(Self::from_edges_unchecked(node_count, edges))
    }

    pub(crate) fn from_edges_unchecked(node_count: usize, edges: Vec<Edge>) -> Self {
        let mut offsets = vec![0usize; node_count + 1];
        for e in &edges {
            offsets[e.u as usize + 1] += 1;
            offsets[e.v as usize + 1] += 1;
        }
        for i in 0..node_count {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut adjacency = vec![Neighbor { node: 0, class: 0 }; 2 * edges.len()];
        for e in &edges {
            adjacency[fill[e.u as usize]] = Neighbor {
                node: e.v,
                class: e.class,
            };
            fill[e.u as usize] += 1;
            adjacency[fill[e.v as usize]] = Neighbor {
                node: e.u,
                class: e.class,
            };
            fill[e.v as usize] += 1;
        }
        Self {
            node_count,
            edges,
            offsets,
            adjacency,
        }
    }

    /// The same topology with edge `i` assigned class `classes[i]`.
    pub fn with_classes(&self, classes: &[u32]) -> Result<Self> {
        if classes.len() != self.edges.len() {
            return Err(Error::invalid(
                "classes",
                format!("{} classes for {} edges", classes.len(), self.edges.len()),
            ));
        }
        let edges = self
            .edges
            .iter()
            .zip(classes)
            .map(|(e, &class)| Edge { class, ..*e })
            .collect();
        Ok(Self::from_edges_unchecked(self.node_count, edges))
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[Neighbor] {
        &self.adjacency[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    /// Number of class-`class` edges incident to `node`.
    pub fn class_degree(&self, node: usize, class: u32) -> usize {
        self.neighbors(node).iter().filter(|n| n.class == class).count()
    }

    /// True when every edge carries a class index.
    pub fn is_weighted(&self) -> bool {
        self.edges.iter().all(|e| e.class != UNASSIGNED)
    }

    /// Largest class index plus one, or zero for an unweighted network.
    pub fn class_count(&self) -> usize {
        self.edges
            .iter()
            .filter(|e| e.class != UNASSIGNED)
            .map(|e| e.class as usize + 1)
            .max()
            .unwrap_or(0)
    }

    /// Exhaustive scan confirming the graph is simple and the adjacency is
    /// symmetric with matching classes on both sides.
    pub fn check_simple_symmetric(&self) -> Result<()> {
        let mut seen = HashSet::with_capacity(self.edges.len());
        for e in &self.edges {
            if e.u == e.v {
                return Err(Error::invalid("edges", format!("self-loop at node {}", e.u)));
            }
            if !seen.insert(pair_key(e.u, e.v)) {
                return Err(Error::invalid(
                    "edges",
                    format!("parallel edge between {} and {}", e.u, e.v),
                ));
            }
        }
        for u in 0..self.node_count {
            for nb in self.neighbors(u) {
                let back = self
                    .neighbors(nb.node as usize)
                    .iter()
                    .filter(|m| m.node as usize == u)
                    .collect::<Vec<_>>();
                if back.len() != 1 || back[0].class != nb.class {
                    return Err(Error::invalid(
                        "edges",
                        format!("asymmetric adjacency between {u} and {}", nb.node),
                    ));
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn pair_key(u: u32, v: u32) -> u64 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    (u64::from(a) << 32) | u64::from(b)
}

/// Summary counts for a weighted network.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkStats {
    /// `degree_histogram[d]` is the number of nodes of degree `d`.
    pub degree_histogram: Vec<usize>,
    /// `class_degree_histograms[m][d]` counts nodes with exactly `d` class-`m` links.
    pub class_degree_histograms: Vec<Vec<usize>>,
    pub class_edge_counts: Vec<usize>,
    /// Realised mean link weight over all edges.
    pub average_weight: f64,
}

pub fn network_stats(net: &WeightedNetwork, wc: &WeightClasses) -> Result<NetworkStats> {
    if net.node_count() == 0 || net.edge_count() == 0 {
        return Err(Error::invalid("net", "network has no edges"));
    }
    let m = wc.len();
    let mut class_edge_counts = vec![0usize; m];
    for e in net.edges() {
        let c = e.class as usize;
        if c >= m {
            return Err(Error::invalid(
                "net",
                format!("edge class {} outside the {m} weight classes", e.class),
            ));
        }
        class_edge_counts[c] += 1;
    }
    let max_degree = (0..net.node_count()).map(|u| net.degree(u)).max().unwrap_or(0);
    let mut degree_histogram = vec![0usize; max_degree + 1];
    let mut class_degree_histograms = vec![vec![0usize; max_degree + 1]; m];
    let mut per_class = vec![0usize; m];
    for u in 0..net.node_count() {
        degree_histogram[net.degree(u)] += 1;
        per_class.iter_mut().for_each(|c| *c = 0);
        for nb in net.neighbors(u) {
            per_class[nb.class as usize] += 1;
        }
        for (hist, &c) in class_degree_histograms.iter_mut().zip(&per_class) {
            hist[c] += 1;
        }
    }
    let weighted: f64 = class_edge_counts
        .iter()
        .zip(wc.weights())
        .map(|(&c, w)| c as f64 * w)
        .sum();
    Ok(NetworkStats {
        average_weight: weighted / net.edge_count() as f64,
        degree_histogram,
        class_degree_histograms,
        class_edge_counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_classes_validate_probability_sum() {
        assert!(WeightClasses::random(5, vec![1.0, 2.0], vec![0.5, 0.4]).is_err());
        assert!(WeightClasses::random(5, vec![1.0, 2.0], vec![0.5, 0.5]).is_ok());
        assert!(WeightClasses::random(5, vec![1.0, -2.0], vec![0.5, 0.5]).is_err());
        assert!(WeightClasses::random(5, vec![], vec![]).is_err());
    }

    #[test]
    fn fixed_classes_sum_counts_to_degree() {
        let wc = WeightClasses::fixed(vec![1.4, 0.8], vec![2, 4]).unwrap();
        assert_eq!(wc.degree(), 6);
        assert_eq!(wc.fractions(), vec![2.0 / 6.0, 4.0 / 6.0]);
    }

    #[test]
    fn model_average_weight_fig2_top() {
        let wc = WeightClasses::random(5, vec![5.0, 1.25], vec![0.2, 0.8]).unwrap();
        assert!((wc.average_weight() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn single_edge_stats() {
        let net = WeightedNetwork::from_edges(2, vec![Edge { u: 0, v: 1, class: 0 }]).unwrap();
        let wc = WeightClasses::uniform(1, 2.0).unwrap();
        let stats = network_stats(&net, &wc).unwrap();
        assert_eq!(stats.average_weight, 2.0);
        assert_eq!(stats.class_edge_counts, vec![1]);
        assert_eq!(stats.degree_histogram, vec![0, 2]);
    }

    #[test]
    fn fixed_average_weight_is_exact() {
        // 2 links of weight 1.4 and 4 of weight 0.8 per node
        let wc = WeightClasses::fixed(vec![1.4, 0.8], vec![2, 4]).unwrap();
        let net = build_fixed_weight_network(60, &wc, 3).unwrap();
        let stats = network_stats(&net, &wc).unwrap();
        assert!((stats.average_weight - 1.0).abs() < 1e-12);
        assert!((wc.average_weight() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn from_edges_rejects_non_simple() {
        let loop_edge = vec![Edge { u: 1, v: 1, class: 0 }];
        assert!(WeightedNetwork::from_edges(3, loop_edge).is_err());
        let parallel = vec![Edge { u: 0, v: 1, class: 0 }, Edge { u: 1, v: 0, class: 1 }];
        assert!(WeightedNetwork::from_edges(3, parallel).is_err());
        let out_of_range = vec![Edge { u: 0, v: 3, class: 0 }];
        assert!(WeightedNetwork::from_edges(3, out_of_range).is_err());
    }

    #[test]
    fn stats_reject_empty_network() {
        let net = WeightedNetwork::from_edges(3, vec![]).unwrap();
        let wc = WeightClasses::uniform(1, 1.0).unwrap();
        assert!(network_stats(&net, &wc).is_err());
    }
}
