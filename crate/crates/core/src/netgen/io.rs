//! Edge-list text format.
//!
//! ```text
//! # N=<n> M=<m> weights=<w1,...> mode=<random|fixed>
//! u v class_index
//! ```
//!
//! Class indices are zero-based. Weights are written in Rust's shortest
//! round-trip float representation.

use std::io::{BufRead, Write};

use super::{Edge, WeightClasses, WeightMode, WeightedNetwork};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeListHeader {
    pub node_count: usize,
    pub weights: Vec<f64>,
    pub mode: WeightMode,
}

pub fn write_edge_list<W: Write>(
    mut out: W,
    net: &WeightedNetwork,
    wc: &WeightClasses,
) -> std::io::Result<()> {
    let weights: Vec<String> = wc.weights().iter().map(|w| w.to_string()).collect();
    writeln!(
        out,
        "# N={} M={} weights={} mode={}",
        net.node_count(),
        wc.len(),
        weights.join(","),
        wc.mode()
    )?;
    for e in net.edges() {
        writeln!(out, "{} {} {}", e.u, e.v, e.class)?;
    }
    Ok(())
}

pub fn read_edge_list<R: BufRead>(input: R) -> Result<(WeightedNetwork, EdgeListHeader)> {
    let mut lines = input.lines().enumerate();
    let (_, first) = lines.next().ok_or(Error::Parse {
        line: 1,
        reason: "empty input".into(),
    })?;
    let first = first.map_err(|e| parse_err(1, e.to_string()))?;
    let header = parse_header(&first)?;

    let mut edges = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.map_err(|e| parse_err(lineno, e.to_string()))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(lineno, format!("expected `u v class`, got `{line}`")));
        }
        let num = |s: &str| s.parse::<u32>().map_err(|e| parse_err(lineno, format!("`{s}`: {e}")));
        let edge = Edge {
            u: num(fields[0])?,
            v: num(fields[1])?,
            class: num(fields[2])?,
        };
        if edge.class as usize >= header.weights.len() {
            return Err(parse_err(lineno, format!("class {} out of range", edge.class)));
        }
        edges.push(edge);
    }
    let net = WeightedNetwork::from_edges(header.node_count, edges).map_err(|e| Error::Parse {
        line: 0,
        reason: e.to_string(),
    })?;
    Ok((net, header))
}

fn parse_header(line: &str) -> Result<EdgeListHeader> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| parse_err(1, "missing `#` header"))?;
    let mut node_count = None;
    let mut class_count = None;
    let mut weights = None;
    let mut mode = None;
    for field in body.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| parse_err(1, format!("malformed header field `{field}`")))?;
        match key {
            "N" => node_count = Some(value.parse::<usize>().map_err(|e| parse_err(1, e.to_string()))?),
            "M" => class_count = Some(value.parse::<usize>().map_err(|e| parse_err(1, e.to_string()))?),
            "weights" => {
                let ws = value
                    .split(',')
                    .map(|w| w.parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| parse_err(1, e.to_string()))?;
                weights = Some(ws);
            }
            "mode" => mode = Some(value.parse::<WeightMode>().map_err(|e| parse_err(1, e))?),
            other => return Err(parse_err(1, format!("unknown header key `{other}`"))),
        }
    }
    let node_count = node_count.ok_or_else(|| parse_err(1, "header lacks N"))?;
    let weights = weights.ok_or_else(|| parse_err(1, "header lacks weights"))?;
    let mode = mode.ok_or_else(|| parse_err(1, "header lacks mode"))?;
    if class_count != Some(weights.len()) {
        return Err(parse_err(1, "M does not match the number of weights"));
    }
    Ok(EdgeListHeader {
        node_count,
        weights,
        mode,
    })
}

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}
