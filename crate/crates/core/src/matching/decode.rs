use super::{max_weight_matching, EdgeKey, MatchingGraph, BOUNDARY};
use crate::error::{Error, Result};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Flipped detectors, sorted and duplicate free.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Syndrome {
    pub defects: Vec<u32>,
}

impl Syndrome {
    pub fn new(mut defects: Vec<u32>) -> Self {
        defects.sort_unstable();
        defects.dedup();
        Syndrome { defects }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        Syndrome { defects: bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as u32).collect() }
    }
}

/// Result of matching one syndrome.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    pub pairs: Vec<(u32, u32)>,
    pub to_boundary: Vec<u32>,
    /// Sum of path weights of the chosen pairing.
    pub weight: f64,
    pub observable: bool,
}

/// Fixed-point scale for path lengths handed to the integer matcher.
const SCALE: f64 = (1u64 << 20) as f64;

/// Static adjacency of a matching graph. Weights are supplied per call, so the
/// same matcher serves every shot of a circuit.
#[derive(Debug, Clone)]
pub struct Matcher {
    n: usize,
    keys: Vec<EdgeKey>,
    start: Vec<usize>,
    adj: Vec<(u32, u32)>,
    base: Vec<f64>,
    component: Vec<u32>,
    /// Whether any edge touching the component flips the observable.
    relevant: Vec<bool>,
}

impl Matcher {
    pub fn new(g: &MatchingGraph) -> Self {
        let n = g.detector_count;
        let keys: Vec<EdgeKey> = g.edges().iter().map(|e| e.key).collect();
        let node = |v: u32| if v == BOUNDARY { n } else { v as usize };
        let mut deg = vec![0usize; n + 2];
        for k in &keys {
            deg[node(k.a) + 1] += 1;
            deg[node(k.b) + 1] += 1;
        }
        for i in 1..deg.len() {
            deg[i] += deg[i - 1];
        }
        let start = deg.clone();
        let mut fill = deg;
        let mut adj = vec![(0, 0); 2 * keys.len()];
        for (id, k) in keys.iter().enumerate() {
            let (a, b) = (node(k.a), node(k.b));
            adj[fill[a]] = (b as u32, id as u32);
            fill[a] += 1;
            adj[fill[b]] = (a as u32, id as u32);
            fill[b] += 1;
        }
        // Components over detector nodes only; the boundary does not join them.
        let mut component = vec![u32::MAX; n];
        let mut relevant = Vec::new();
        for s in 0..n {
            if component[s] != u32::MAX {
                continue;
            }
            let cid = relevant.len() as u32;
            let mut flag = false;
            let mut stack = vec![s];
            component[s] = cid;
            while let Some(v) = stack.pop() {
                for &(u, e) in &adj[start[v]..start[v + 1]] {
                    flag |= keys[e as usize].obs;
                    let u = u as usize;
                    if u < n && component[u] == u32::MAX {
                        component[u] = cid;
                        stack.push(u);
                    }
                }
            }
            relevant.push(flag);
        }
        Matcher { n, keys, start, adj, base: g.weights(), component, relevant }
    }

    pub fn edge_count(&self) -> usize {
        self.keys.len()
    }

    pub fn base_weights(&self) -> &[f64] {
        &self.base
    }

    /// Predicted observable flip under the graph's own weights.
    pub fn decode(&self, s: &Syndrome) -> Result<bool> {
        self.decode_with(&self.base, s)
    }

    /// Predicted observable flip under per-edge `weights` (same order as the
    /// graph edges). Components whose edges never flip the observable are skipped.
    pub fn decode_with(&self, weights: &[f64], s: &Syndrome) -> Result<bool> {
        Ok(self.solve(weights, s, true)?.observable)
    }

    /// Full minimum-weight pairing under `weights`.
    pub fn match_syndrome(&self, weights: &[f64], s: &Syndrome) -> Result<Matching> {
        self.solve(weights, s, false)
    }

    fn solve(&self, weights: &[f64], s: &Syndrome, skip_irrelevant: bool) -> Result<Matching> {
        assert_eq!(weights.len(), self.keys.len(), "one weight per edge");
        if let Some(&bad) = s.defects.iter().find(|&&d| d as usize >= self.n) {
            return Err(Error::UnknownDetector(bad));
        }
        let mut groups: std::collections::BTreeMap<u32, Vec<u32>> = Default::default();
        for &d in &s.defects {
            let c = self.component[d as usize];
            if !skip_irrelevant || self.relevant[c as usize] {
                groups.entry(c).or_default().push(d);
            }
        }
        let mut out = Matching { pairs: Vec::new(), to_boundary: Vec::new(), weight: 0.0, observable: false };
        for defects in groups.values() {
            self.solve_group(weights, defects, &mut out)?;
        }
        Ok(out)
    }

    /// Shortest distances and path parities from `src` to every node. Paths do
    /// not pass through the boundary.
    fn dijkstra(&self, weights: &[f64], src: usize) -> (Vec<f64>, Vec<bool>) {
        let mut dist = vec![f64::INFINITY; self.n + 1];
        let mut parity = vec![false; self.n + 1];
        let mut heap = BinaryHeap::new();
        dist[src] = 0.0;
        heap.push(Reverse((0f64.to_bits(), src as u32)));
        while let Some(Reverse((bits, v))) = heap.pop() {
            let v = v as usize;
            let dv = f64::from_bits(bits);
            if dv > dist[v] || v == self.n {
                continue;
            }
            for &(u, e) in &self.adj[self.start[v]..self.start[v + 1]] {
                let nd = dv + weights[e as usize].max(0.0);
                let u = u as usize;
                if nd < dist[u] {
                    dist[u] = nd;
                    parity[u] = parity[v] ^ self.keys[e as usize].obs;
                    heap.push(Reverse((nd.to_bits(), u as u32)));
                }
            }
        }
        (dist, parity)
    }

    fn solve_group(&self, weights: &[f64], defects: &[u32], out: &mut Matching) -> Result<()> {
        let k = defects.len();
        let paths: Vec<(Vec<f64>, Vec<bool>)> = defects.iter().map(|&d| self.dijkstra(weights, d as usize)).collect();
        let quant = |x: f64| (x * SCALE).round() as i64;
        let to_b: Vec<Option<i64>> = paths.iter().map(|(d, _)| d[self.n].is_finite().then(|| quant(d[self.n]))).collect();
        let mut longest: i64 = 0;
        for i in 0..k {
            for j in i + 1..k {
                let d = paths[i].0[defects[j] as usize];
                if d.is_finite() {
                    longest = longest.max(quant(d));
                }
            }
        }
        // A component without boundary edges must pair internally; this stand-in
        // boundary cost makes every extra pair worth more than any path length.
        let big = (longest + 1).saturating_mul(k as i64 + 1);
        let bcost: Vec<i64> = to_b.iter().map(|b| b.unwrap_or(big)).collect();
        let mut edges = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                let d = paths[i].0[defects[j] as usize];
                if d.is_finite() {
                    let saving = bcost[i] + bcost[j] - quant(d);
                    if saving > 0 {
                        edges.push((i, j, saving));
                    }
                }
            }
        }
        let mate = max_weight_matching(k, &edges);
        for i in 0..k {
            match mate[i] {
                Some(j) if j > i => {
                    out.pairs.push((defects[i], defects[j]));
                    out.weight += paths[i].0[defects[j] as usize];
                    out.observable ^= paths[i].1[defects[j] as usize];
                }
                Some(_) => {}
                None => {
                    if to_b[i].is_none() {
                        return Err(Error::DisconnectedDefect(defects[i]));
                    }
                    out.to_boundary.push(defects[i]);
                    out.weight += paths[i].0[self.n];
                    out.observable ^= paths[i].1[self.n];
                }
            }
        }
        Ok(())
    }
}

/// Convenience: decode `s` on `g` with its own weights.
pub fn decode(g: &MatchingGraph, s: &Syndrome) -> Result<bool> {
    Matcher::new(g).decode(s)
}
