//! Loss graph built from the heralded losses of one shot: nodes are lost
//! atoms, edges are gates that could have lost two of them at once, and vacuum
//! edges stand for independent losses.

mod posterior;

pub use posterior::{
    accurate_posterior, fast_posterior, independent_posterior, posterior_to_location_weights, AccurateOptions, LocationWeights,
    NodeLocation,
};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::noise::NoiseParams;
use crate::sim::Herald;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LossNode {
    pub atom: u32,
    pub qubit: u32,
    pub round: u32,
    /// Candidate loss sites (the atom's gates), in time order.
    pub window: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossEdge {
    pub a: usize,
    /// Second endpoint; `None` for the vacuum.
    pub b: Option<usize>,
    /// The gate shared by both endpoints; `None` for vacuum edges.
    pub site: Option<u32>,
    pub prior: f64,
}

impl LossEdge {
    pub fn is_vacuum(&self) -> bool {
        self.b.is_none()
    }

    pub fn touches(&self, n: usize) -> bool {
        self.a == n || self.b == Some(n)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LossGraph {
    pub nodes: Vec<LossNode>,
    pub edges: Vec<LossEdge>,
    /// Edge ids incident to each node, vacuum edge included.
    pub incident: Vec<Vec<usize>>,
    /// Prior mass of a single (uncorrelated) loss at one site.
    pub single_prior: f64,
}

/// Nodes and edges of one connected component (vacuum edges included).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub nodes: Vec<usize>,
    pub edges: Vec<usize>,
}

/// Build the loss graph of one shot from its heralds.
pub fn build_loss_graph(c: &Circuit, heralds: &[Herald], params: &NoiseParams) -> Result<LossGraph> {
    let mut nodes = Vec::with_capacity(heralds.len());
    let mut by_atom = HashMap::with_capacity(heralds.len());
    for h in heralds {
        let atom = c.atom_at(h.qubit, h.round).ok_or_else(|| Error::UnknownHerald(format!("{}@{}", h.qubit, h.round)))?;
        let window = c.atoms()[atom as usize].window.clone();
        if window.is_empty() {
            return Err(Error::UnknownHerald(format!("{}@{} has no gate in its window", h.qubit, h.round)));
        }
        if by_atom.insert(atom, nodes.len()).is_none() {
            nodes.push(LossNode { atom, qubit: h.qubit, round: h.round, window });
        }
    }
    let pair_prior = params.p_loss * params.p_corr;
    let single_prior = params.p_loss * (1.0 - params.p_corr) / 2.0;
    let mut edges = Vec::new();
    let mut incident = vec![Vec::new(); nodes.len()];
    for (i, n) in nodes.iter().enumerate() {
        for &s in &n.window {
            let info = &c.sites()[s as usize];
            let other = if info.atoms[0] == Some(n.atom) { info.atoms[1] } else { info.atoms[0] };
            if let Some(&j) = other.and_then(|o| by_atom.get(&o)) {
                if j > i {
                    incident[i].push(edges.len());
                    incident[j].push(edges.len());
                    edges.push(LossEdge { a: i, b: Some(j), site: Some(s), prior: pair_prior });
                }
            }
        }
    }
    if params.p_corr < 1.0 {
        for (i, n) in nodes.iter().enumerate() {
            incident[i].push(edges.len());
            edges.push(LossEdge { a: i, b: None, site: None, prior: single_prior * n.window.len() as f64 });
        }
    }
    Ok(LossGraph { nodes, edges, incident, single_prior })
}

impl LossGraph {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| !e.is_vacuum()).count()
    }

    /// Structured text dump; `posterior` may be empty.
    pub fn dump(&self, c: &Circuit, posterior: &[f64]) -> String {
        let mut out = String::new();
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "node {i} {}@{} atom={} window={}", n.qubit, n.round, n.atom, n.window.len());
        }
        for (i, e) in self.edges.iter().enumerate() {
            let b = e.b.map_or("vacuum".to_string(), |b| b.to_string());
            let site = e.site.map_or("-".to_string(), |s| c.sites()[s as usize].id.to_string());
            let post = posterior.get(i).map_or("-".to_string(), |p| p.to_string());
            let _ = writeln!(out, "edge {i} {} {b} site={site} prior={} posterior={post}", e.a, e.prior);
        }
        out
    }
}

/// Partition of the nodes by node–node edges; vacuum edges never join components.
pub fn connected_components(g: &LossGraph) -> Vec<Component> {
    let n = g.nodes.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for e in &g.edges {
        if let Some(b) = e.b {
            let (ra, rb) = (find(&mut parent, e.a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut slot = HashMap::new();
    let mut comps: Vec<Component> = Vec::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        let idx = *slot.entry(r).or_insert_with(|| {
            comps.push(Component { nodes: Vec::new(), edges: Vec::new() });
            comps.len() - 1
        });
        comps[idx].nodes.push(v);
    }
    for (i, e) in g.edges.iter().enumerate() {
        let r = find(&mut parent, e.a);
        comps[slot[&r]].edges.push(i);
    }
    comps
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Hand-made graph: `pairs` are node–node edges, `vacuum` lists per-node
    /// vacuum priors.
    pub fn graph(n: usize, pairs: &[(usize, usize, f64)], vacuum: &[Option<f64>]) -> LossGraph {
        let mut g = LossGraph {
            nodes: (0..n).map(|i| LossNode { atom: i as u32, qubit: i as u32, round: 0, window: vec![i as u32] }).collect(),
            edges: Vec::new(),
            incident: vec![Vec::new(); n],
            single_prior: 0.0,
        };
        for (k, &(a, b, p)) in pairs.iter().enumerate() {
            g.incident[a].push(g.edges.len());
            g.incident[b].push(g.edges.len());
            g.edges.push(LossEdge { a, b: Some(b), site: Some(100 + k as u32), prior: p });
        }
        for (a, v) in vacuum.iter().enumerate() {
            if let Some(p) = v {
                g.incident[a].push(g.edges.len());
                g.edges.push(LossEdge { a, b: None, site: None, prior: *p });
            }
        }
        g
    }
}
