//! Minimum-weight matching of detection events over a weighted graph with a
//! boundary node.

mod blossom;
mod decode;

pub use blossom::max_weight_matching;
pub use decode::{decode, Matcher, Matching, Syndrome};

use crate::dem::xor_probability;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt::Write as _;

/// Stand-in detector index for the boundary.
pub const BOUNDARY: u32 = u32::MAX;

/// Probabilities are clamped to `[P_MIN, 1 - P_MIN]` before taking weights.
pub const P_MIN: f64 = 1e-12;

/// Log-likelihood weight `ln((1-p)/p)` of a clamped probability.
pub fn weight_of(p: f64) -> f64 {
    let p = p.clamp(P_MIN, 1.0 - P_MIN);
    ((1.0 - p) / p).ln()
}

/// Undirected edge; `b` may be [`BOUNDARY`]. Parallel edges differing only in
/// `obs` are distinct keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeKey {
    pub a: u32,
    pub b: u32,
    pub obs: bool,
}

impl EdgeKey {
    pub fn new(a: u32, b: u32, obs: bool) -> Self {
        EdgeKey { a: a.min(b), b: a.max(b), obs }
    }

    /// Edge realizing a one- or two-detector mechanism.
    pub fn from_detectors(dets: &[u32], obs: bool) -> Self {
        match *dets {
            [a] => EdgeKey::new(a, BOUNDARY, obs),
            [a, b] => EdgeKey::new(a, b, obs),
            _ => panic!("edge needs one or two detectors, got {}", dets.len()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub key: EdgeKey,
    pub probability: f64,
}

/// Detector nodes plus one boundary node; edges carry XOR-combined
/// probabilities and log-likelihood weights.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MatchingGraph {
    pub detector_count: usize,
    edges: Vec<GraphEdge>,
    #[serde(skip)]
    index: HashMap<EdgeKey, usize>,
}

impl MatchingGraph {
    pub fn new(detector_count: usize) -> Self {
        MatchingGraph { detector_count, edges: Vec::new(), index: HashMap::new() }
    }

    /// Detectors plus the boundary.
    pub fn node_count(&self) -> usize {
        self.detector_count + 1
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn edge_id(&self, key: &EdgeKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn probability(&self, key: &EdgeKey) -> Option<f64> {
        self.edge_id(key).map(|i| self.edges[i].probability)
    }

    /// Register an edge with probability 0 if it is new; returns its id.
    pub fn ensure_edge(&mut self, key: EdgeKey) -> usize {
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        assert!((key.a as usize) < self.detector_count, "edge endpoint {} outside graph", key.a);
        assert!(key.b == BOUNDARY || (key.b as usize) < self.detector_count, "edge endpoint {} outside graph", key.b);
        self.index.insert(key, self.edges.len());
        self.edges.push(GraphEdge { key, probability: 0.0 });
        self.edges.len() - 1
    }

    /// Fold an independent mechanism into an edge with the XOR rule.
    pub fn add_probability(&mut self, key: EdgeKey, p: f64) -> usize {
        let i = self.ensure_edge(key);
        let e = &mut self.edges[i].probability;
        *e = xor_probability(*e, p);
        i
    }

    pub fn weights(&self) -> Vec<f64> {
        self.edges.iter().map(|e| weight_of(e.probability)).collect()
    }

    /// Edge list, one line per edge: `<n1> <n2|boundary> <weight> <obs_flip>`.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            let b = if e.key.b == BOUNDARY { "boundary".to_string() } else { e.key.b.to_string() };
            let _ = writeln!(out, "{} {} {} {}", e.key.a, b, weight_of(e.probability), u8::from(e.key.obs));
        }
        out
    }

    /// Inverse of [`Self::to_edge_list`]; weights are turned back into probabilities.
    pub fn from_edge_list(detector_count: usize, text: &str) -> Result<Self> {
        let mut g = MatchingGraph::new(detector_count);
        for (ln, line) in text.lines().enumerate() {
            let err = |m: &str| Error::Parse { line: ln + 1, message: m.to_string() };
            let words: Vec<&str> = line.split_whitespace().collect();
            if words.is_empty() {
                continue;
            }
            let [a, b, w, o] = words[..] else {
                return Err(err("expected four fields"));
            };
            let node = |s: &str| -> Result<u32> {
                let v = if s == "boundary" { BOUNDARY } else { s.parse().map_err(|_| err("bad node"))? };
                if v != BOUNDARY && v as usize >= detector_count {
                    return Err(Error::UnknownDetector(v));
                }
                Ok(v)
            };
            let (a, b) = (node(a)?, node(b)?);
            if a == BOUNDARY {
                return Err(err("first node must be a detector"));
            }
            let w: f64 = w.parse().map_err(|_| err("bad weight"))?;
            let obs = match o {
                "0" => false,
                "1" => true,
                _ => return Err(err("bad observable flag")),
            };
            let p = 1.0 / (1.0 + w.exp());
            let i = g.ensure_edge(EdgeKey::new(a, b, obs));
            g.edges[i].probability = p;
        }
        Ok(g)
    }
}
