use super::{Component, LossGraph};
use crate::dem::LossVariant;
use crate::error::{Error, Result};
use crate::noise::NoiseParams;
use serde::{Deserialize, Serialize};

/// Limits for the exhaustive k-matching search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccurateOptions {
    /// Components with more nodes are refused.
    pub max_nodes: usize,
    /// Budget of search-tree visits per component.
    pub max_steps: u64,
}

impl Default for AccurateOptions {
    fn default() -> Self {
        AccurateOptions { max_nodes: 40, max_steps: 20_000_000 }
    }
}

struct Search<'a> {
    ends: &'a [(usize, Option<usize>)],
    prior: &'a [f64],
    /// Position of the last edge touching each node.
    last: Vec<usize>,
    cover: Vec<u32>,
    uncovered: usize,
    target: usize,
    chosen: Vec<usize>,
    sums: Vec<f64>,
    total: f64,
    found: bool,
    steps: u64,
    max_steps: u64,
}

impl Search<'_> {
    fn touch(&mut self, n: usize, delta: i32) {
        if delta > 0 {
            if self.cover[n] == 0 {
                self.uncovered -= 1;
            }
            self.cover[n] += 1;
        } else {
            self.cover[n] -= 1;
            if self.cover[n] == 0 {
                self.uncovered += 1;
            }
        }
    }

    fn run(&mut self, i: usize, size: usize, prob: f64) -> bool {
        self.steps += 1;
        if self.steps > self.max_steps {
            return false;
        }
        // Every uncovered node still needs one more incidence.
        if size + self.uncovered > self.target {
            return true;
        }
        if i == self.ends.len() {
            if self.uncovered == 0 && size == self.target {
                self.found = true;
                self.total += prob;
                for &e in &self.chosen {
                    self.sums[e] += prob;
                }
            }
            return true;
        }
        let (a, b) = self.ends[i];
        let width = 1 + usize::from(b.is_some());
        self.touch(a, 1);
        if let Some(b) = b {
            self.touch(b, 1);
        }
        self.chosen.push(i);
        let ok = self.run(i + 1, size + width, prob * self.prior[i]);
        self.chosen.pop();
        self.touch(a, -1);
        if let Some(b) = b {
            self.touch(b, -1);
        }
        if !ok {
            return false;
        }
        let dead = |n: usize| self.last[n] == i && self.cover[n] == 0;
        if dead(a) || b.is_some_and(dead) {
            return true;
        }
        self.run(i + 1, size, prob)
    }
}

/// Exact a-posteriori edge probabilities of one component: all edge sets that
/// cover every node at the smallest feasible multiplicity k, each weighted by
/// the product of its priors. Returns one value per entry of `comp.edges`.
pub fn accurate_posterior(g: &LossGraph, comp: &Component, opts: &AccurateOptions) -> Result<Vec<f64>> {
    let n = comp.nodes.len();
    let cap = || Error::MatchingCapExceeded { nodes: n, edges: comp.edges.len() };
    if n > opts.max_nodes {
        return Err(cap());
    }
    let local = |v: usize| comp.nodes.binary_search(&v).expect("edge endpoint inside its component");
    let ends: Vec<(usize, Option<usize>)> = comp.edges.iter().map(|&e| (local(g.edges[e].a), g.edges[e].b.map(local))).collect();
    let prior: Vec<f64> = comp.edges.iter().map(|&e| g.edges[e].prior).collect();
    let mut last = vec![0; n];
    for (i, &(a, b)) in ends.iter().enumerate() {
        last[a] = i;
        if let Some(b) = b {
            last[b] = i;
        }
    }
    let has_vacuum = ends.iter().any(|e| e.1.is_none());
    let (start, step) = if has_vacuum { (0, 1) } else { (n % 2, 2) };
    let mut s = Search {
        ends: &ends,
        prior: &prior,
        last,
        cover: vec![0; n],
        uncovered: n,
        target: 0,
        chosen: Vec::new(),
        sums: vec![0.0; ends.len()],
        total: 0.0,
        found: false,
        steps: 0,
        max_steps: opts.max_steps,
    };
    let mut k = start;
    while k <= n {
        s.target = n + k;
        if !s.run(0, 0, 1.0) {
            return Err(cap());
        }
        if s.found {
            let total = s.total;
            return Ok(s.sums.iter().map(|&x| if total > 0.0 { x / total } else { 0.0 }).collect());
        }
        k += step;
    }
    Err(cap())
}

/// Local estimate of every edge posterior from neighbouring priors only. A
/// vacuum endpoint contributes a factor of 1.
pub fn fast_posterior(g: &LossGraph) -> Vec<f64> {
    let others = |n: usize, e: usize| -> f64 { g.incident[n].iter().filter(|&&x| x != e).map(|&x| g.edges[x].prior).sum() };
    let eval = |(i, e): (usize, &super::LossEdge)| {
        let s1 = others(e.a, i);
        let s2 = e.b.map_or(1.0, |b| others(b, i));
        let den = s1 * s2 + e.prior;
        if den > 0.0 {
            e.prior / den
        } else {
            0.0
        }
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if g.edges.len() >= 4096 {
            return g.edges.par_iter().enumerate().map(eval).collect();
        }
    }
    g.edges.iter().enumerate().map(eval).collect()
}

/// Distribution over (site, variant) of one node's loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeLocation {
    pub node: usize,
    pub atom: u32,
    /// Sorted by (site, variant); weights sum to 1.
    pub entries: Vec<(u32, LossVariant, f64)>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LocationWeights {
    pub nodes: Vec<NodeLocation>,
    /// Nodes that had no posterior mass and fell back to uniform weights.
    pub fallbacks: usize,
}

/// Share of `mass` given to each candidate site; single-loss priors are equal
/// at every gate, so the split is uniform.
fn spread(window: &[u32], mass: f64) -> impl Iterator<Item = (u32, f64)> + '_ {
    let share = mass / window.len() as f64;
    window.iter().map(move |&s| (s, share))
}

fn finish(node: usize, atom: u32, mut entries: Vec<(u32, LossVariant, f64)>) -> Option<NodeLocation> {
    entries.retain(|e| e.2 > 0.0);
    entries.sort_by_key(|e| (e.0, e.1 == LossVariant::Single));
    let mut merged: Vec<(u32, LossVariant, f64)> = Vec::with_capacity(entries.len());
    for e in entries {
        match merged.last_mut() {
            Some(m) if m.0 == e.0 && m.1 == e.1 => m.2 += e.2,
            _ => merged.push(e),
        }
    }
    let total: f64 = merged.iter().map(|e| e.2).sum();
    if total.is_nan() || total <= 0.0 {
        return None;
    }
    for m in &mut merged {
        m.2 /= total;
    }
    Some(NodeLocation { node, atom, entries: merged })
}

fn independent_node(g: &LossGraph, n: usize, params: &NoiseParams) -> NodeLocation {
    // Given this atom was lost spontaneously at a gate, its partner survived with
    // probability (1 - p_c) / (1 + p_c).
    let survive = (1.0 - params.p_corr) / (1.0 + params.p_corr);
    let node = &g.nodes[n];
    let mut entries = Vec::with_capacity(2 * node.window.len());
    for (s, share) in spread(&node.window, 1.0) {
        entries.push((s, LossVariant::Single, share * survive));
        entries.push((s, LossVariant::Pair, share * (1.0 - survive)));
    }
    finish(n, node.atom, entries).expect("non-empty window")
}

/// Baseline weights that ignore the edges: uniform over each node's window.
pub fn independent_posterior(g: &LossGraph, params: &NoiseParams) -> LocationWeights {
    LocationWeights { nodes: (0..g.nodes.len()).map(|n| independent_node(g, n, params)).collect(), fallbacks: 0 }
}

/// Turn edge posteriors into per-node location weights. Node–node mass goes to
/// the shared gate with both partners lost; vacuum mass is spread over the
/// node's window with the partner surviving.
pub fn posterior_to_location_weights(g: &LossGraph, posterior: &[f64], params: &NoiseParams) -> LocationWeights {
    assert_eq!(posterior.len(), g.edges.len(), "one posterior per edge");
    let mut out = LocationWeights::default();
    for (n, node) in g.nodes.iter().enumerate() {
        let mut entries = Vec::new();
        for &e in &g.incident[n] {
            let edge = &g.edges[e];
            match edge.site {
                Some(s) => entries.push((s, LossVariant::Pair, posterior[e])),
                None => entries.extend(spread(&node.window, posterior[e]).map(|(s, w)| (s, LossVariant::Single, w))),
            }
        }
        match finish(n, node.atom, entries) {
            Some(loc) => out.nodes.push(loc),
            None => {
                log::debug!("node {}@{} has no posterior mass; using uniform weights", node.qubit, node.round);
                out.fallbacks += 1;
                out.nodes.push(independent_node(g, n, params));
            }
        }
    }
    out
}
