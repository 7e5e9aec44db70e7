//! Reference implementations shared by the integration tests. They are
//! deliberately naive: exhaustive enumeration and dense shortest paths.

#![allow(dead_code)]

use corrloss::circuit::Circuit;
use corrloss::dem::DetectorErrorModel;
use corrloss::loss_graph::{LossEdge, LossGraph, LossNode};
use corrloss::matching::{weight_of, MatchingGraph, BOUNDARY};
use corrloss::noise::{sample_pauli_faults, LossConfig, NoiseParams};
use corrloss::rng::shot_rng;
use corrloss::sim::run_shot;
use rand::Rng;

/// Hand-made loss graph; node `i` has window `[i]` and edge `k` sits at site `100 + k`.
pub fn loss_graph(n: usize, pairs: &[(usize, usize, f64)], vacuum: &[Option<f64>]) -> LossGraph {
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

/// Random loss graph with at most `max_edges` edges (vacuum edges included).
pub fn random_loss_graph<R: Rng>(rng: &mut R, max_edges: usize) -> LossGraph {
    let n = rng.gen_range(2..7);
    let mut pairs = Vec::new();
    for _ in 0..rng.gen_range(1..max_edges) {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b {
            pairs.push((a, b, rng.gen_range(0.001..0.2)));
        }
    }
    let mut budget = max_edges.saturating_sub(pairs.len());
    let vacuum: Vec<Option<f64>> = (0..n)
        .map(|_| {
            if budget > 0 && rng.gen_bool(0.4) {
                budget -= 1;
                Some(rng.gen_range(0.001..0.2))
            } else {
                None
            }
        })
        .collect();
    loss_graph(n, &pairs, &vacuum)
}

/// Edge posteriors by enumerating every edge multiset with multiplicities
/// 0..=2, keeping covers of the smallest multiplicity. Also reports which
/// nodes are covered exactly once in every kept solution. `None` when no
/// cover exists.
pub fn brute_posterior(g: &LossGraph) -> Option<(Vec<f64>, Vec<bool>)> {
    let e = g.edges.len();
    let n = g.nodes.len();
    let mut best: Option<usize> = None;
    let mut sums = vec![0.0; e];
    let mut total = 0.0;
    let mut single = vec![true; n];
    for code in 0..3usize.pow(e as u32) {
        let mut mult = vec![0usize; e];
        let mut c = code;
        for m in mult.iter_mut() {
            *m = c % 3;
            c /= 3;
        }
        let mut deg = vec![0usize; n];
        for (edge, &m) in g.edges.iter().zip(&mult) {
            deg[edge.a] += m;
            if let Some(b) = edge.b {
                deg[b] += m;
            }
        }
        if deg.contains(&0) {
            continue;
        }
        let k: usize = deg.iter().map(|d| d - 1).sum();
        match best {
            Some(b) if k > b => continue,
            Some(b) if k == b => {}
            _ => {
                best = Some(k);
                sums.iter_mut().for_each(|s| *s = 0.0);
                single.iter_mut().for_each(|s| *s = true);
                total = 0.0;
            }
        }
        let p: f64 = g.edges.iter().zip(&mult).map(|(edge, &m)| edge.prior.powi(m as i32)).product();
        for (flag, &d) in single.iter_mut().zip(&deg) {
            *flag &= d == 1;
        }
        total += p;
        for (s, &m) in sums.iter_mut().zip(&mult) {
            if m > 0 {
                *s += p;
            }
        }
    }
    best.map(|_| (sums.iter().map(|s| s / total).collect(), single))
}

/// Minimum total weight over all pairings of `defects`, each defect either
/// paired or sent to the boundary, on Floyd–Warshall distances.
pub fn brute_matching_weight(g: &MatchingGraph, weights: &[f64], defects: &[u32]) -> f64 {
    let n = g.detector_count;
    let mut d = vec![vec![f64::INFINITY; n + 1]; n + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for (e, &w) in g.edges().iter().zip(weights) {
        let (a, b) = (e.key.a as usize, if e.key.b == BOUNDARY { n } else { e.key.b as usize });
        d[a][b] = d[a][b].min(w);
        d[b][a] = d[b][a].min(w);
    }
    // The boundary is a sink: paths never pass through it.
    for k in 0..n {
        for i in 0..=n {
            for j in 0..=n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    let m = defects.len();
    let mut best = vec![f64::INFINITY; 1 << m];
    best[0] = 0.0;
    for mask in 0..1usize << m {
        if !best[mask].is_finite() {
            continue;
        }
        let Some(i) = (0..m).find(|&i| mask & (1 << i) == 0) else { continue };
        let di = defects[i] as usize;
        let with = mask | (1 << i);
        best[with] = best[with].min(best[mask] + d[di][n]);
        for j in i + 1..m {
            if mask & (1 << j) == 0 {
                let both = with | (1 << j);
                best[both] = best[both].min(best[mask] + d[di][defects[j] as usize]);
            }
        }
    }
    best[(1 << m) - 1]
}

/// Graph with every edge weighted from its stored probability.
pub fn graph_weights(g: &MatchingGraph) -> Vec<f64> {
    g.edges().iter().map(|e| weight_of(e.probability)).collect()
}

/// Detector counts and pair counts from `shots` runs of a fixed loss
/// configuration with freshly sampled Pauli faults.
pub struct Frequencies {
    pub shots: u64,
    pub single: Vec<u64>,
    pub pairs: Vec<Vec<u64>>,
}

pub fn conditional_frequencies(c: &Circuit, params: &NoiseParams, loss: &LossConfig, shots: u64, seed: u64, with_pairs: bool) -> Frequencies {
    let n = c.num_detectors();
    let mut single = vec![0u64; n];
    let mut pairs = if with_pairs { vec![vec![0u64; n]; n] } else { Vec::new() };
    for shot in 0..shots {
        let mut rng = shot_rng(seed, shot);
        let faults = sample_pauli_faults(c, params, loss, &mut rng);
        let rec = run_shot(c, loss, &faults, &mut rng).expect("sampled from the same circuit");
        let on: Vec<usize> = rec.detectors.iter().enumerate().filter(|x| *x.1).map(|x| x.0).collect();
        for &a in &on {
            single[a] += 1;
            if with_pairs {
                for &b in &on {
                    pairs[a][b] += 1;
                }
            }
        }
    }
    Frequencies { shots, single, pairs }
}

/// Largest deviation, in binomial standard errors, between the model and the
/// observed frequencies. A probability of exactly 0 or 1 must be matched exactly.
pub fn worst_deviation(dem: &DetectorErrorModel, f: &Frequencies) -> (f64, String) {
    let n = f.shots as f64;
    let z = |p: f64, count: u64| {
        let obs = count as f64 / n;
        let sigma = (p * (1.0 - p) / n).sqrt();
        if sigma < 1e-15 {
            if (obs - p).abs() < 1e-15 { 0.0 } else { f64::INFINITY }
        } else {
            (obs - p).abs() / sigma
        }
    };
    let mut worst = (0.0, String::new());
    for (d, &count) in f.single.iter().enumerate() {
        let v = z(dem.detector_marginal(d as u32), count);
        if v > worst.0 {
            worst = (v, format!("detector {d}"));
        }
    }
    // Pairs are checked where the model correlates them: both detectors in
    // one mechanism.
    let mut shared = std::collections::BTreeSet::new();
    if !f.pairs.is_empty() {
        for m in dem.mechanisms() {
            for (i, &a) in m.detectors.iter().enumerate() {
                for &b in &m.detectors[i + 1..] {
                    shared.insert((a.min(b) as usize, a.max(b) as usize));
                }
            }
        }
    }
    for &(a, b) in &shared {
        let v = z(dem.detector_pair(a as u32, b as u32), f.pairs[a][b]);
        if v > worst.0 {
            worst = (v, format!("pair {a},{b}"));
        }
    }
    worst
}

/// Merge of the loss models of every atom lost in `loss`, each at its true site.
pub fn true_loss_dem(c: &Circuit, effects: &corrloss::propagate::SiteEffects, loss: &LossConfig) -> DetectorErrorModel {
    use corrloss::dem::{build_loss_dem, merge, LossVariant};
    let mut dems = Vec::new();
    for ev in &loss.events {
        let variant = if ev.lost.len() == 1 && !ev.forced { LossVariant::Single } else { LossVariant::Pair };
        for &q in &ev.lost {
            let atom = c.atoms().iter().position(|a| a.qubit == q && a.window.contains(&ev.site_index)).expect("lost atom has the site in its window");
            dems.push(build_loss_dem(c, effects, atom as u32, ev.site_index, variant).unwrap().dem);
        }
    }
    let refs: Vec<&DetectorErrorModel> = dems.iter().collect();
    if refs.is_empty() {
        DetectorErrorModel::new(c.num_detectors())
    } else {
        merge(&refs).unwrap()
    }
}
