//! Reduction of hyperedge mechanisms to chains of graph edges.

use super::DetectorErrorModel;
use crate::circuit::DetectorBasis;
use crate::error::{Error, Result};
use crate::matching::{EdgeKey, MatchingGraph, BOUNDARY};
use std::collections::HashSet;

/// Largest detector set the search will try to split.
const MAX_HYPEREDGE: usize = 12;

/// Edges available as decomposition targets.
#[derive(Debug, Clone, Default)]
pub struct KnownEdges {
    edges: HashSet<EdgeKey>,
    /// Partners of each detector, `BOUNDARY` included.
    partners: std::collections::HashMap<u32, Vec<(u32, bool)>>,
}

impl KnownEdges {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: EdgeKey) {
        if self.edges.insert(key) {
            self.partners.entry(key.a).or_default().push((key.b, key.obs));
            if key.b != BOUNDARY {
                self.partners.entry(key.b).or_default().push((key.a, key.obs));
            }
        }
    }

    pub fn contains(&self, key: &EdgeKey) -> bool {
        self.edges.contains(key)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Collect every single-basis mechanism with at most two detectors.
    pub fn gather(&mut self, dem: &DetectorErrorModel, bases: Option<&[DetectorBasis]>) {
        for m in dem.mechanisms() {
            if m.detectors.is_empty() || m.detectors.len() > 2 {
                continue;
            }
            if let (Some(b), [x, y]) = (bases, m.detectors.as_slice()) {
                if b[*x as usize] != b[*y as usize] {
                    continue;
                }
            }
            self.insert(EdgeKey::from_detectors(&m.detectors, m.flips_observable));
        }
    }

    fn sorted_partners(&self, d: u32) -> Vec<(u32, bool)> {
        let mut v = self.partners.get(&d).cloned().unwrap_or_default();
        v.sort_unstable();
        v
    }
}

/// One edge of a decomposition and the mechanism probability it receives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeContribution {
    pub edge: EdgeKey,
    pub probability: f64,
}

fn split(dets: &[u32], obs: bool, known: &KnownEdges, relaxed: bool, out: &mut Vec<EdgeKey>) -> bool {
    let Some(&a) = dets.first() else {
        return !obs;
    };
    if relaxed && dets.len() <= 2 {
        out.push(EdgeKey::from_detectors(dets, obs));
        return true;
    }
    for (b, eobs) in known.sorted_partners(a) {
        let rest: Vec<u32> = if b == BOUNDARY {
            dets[1..].to_vec()
        } else if dets.binary_search(&b).is_ok() {
            dets[1..].iter().copied().filter(|&x| x != b).collect()
        } else {
            continue;
        };
        out.push(EdgeKey::new(a, b, eobs));
        if split(&rest, obs ^ eobs, known, relaxed, out) {
            return true;
        }
        out.pop();
    }
    false
}

fn split_part(dets: &[u32], obs: bool, known: &KnownEdges) -> Option<Vec<EdgeKey>> {
    let mut out = Vec::new();
    if split(dets, obs, known, false, &mut out) {
        return Some(out);
    }
    out.clear();
    split(dets, obs, known, true, &mut out).then_some(out)
}

/// Decompose every mechanism of `dem` into edges. With `bases`, a mechanism is
/// first split by detector basis and each part decomposed on its own; the
/// observable flip is attached to the Z-basis part when possible. Mechanisms
/// that flip only the observable are undetectable and are skipped.
pub fn decompose_mechanisms(dem: &DetectorErrorModel, known: &KnownEdges, bases: Option<&[DetectorBasis]>) -> Result<Vec<EdgeContribution>> {
    let mut out = Vec::new();
    for (index, m) in dem.mechanisms().iter().enumerate() {
        if m.detectors.is_empty() {
            log::debug!("skipping observable-only mechanism with p={}", m.probability);
            continue;
        }
        let fail = || Error::Undecomposable { index, detectors: m.detectors.clone() };
        if m.detectors.len() > MAX_HYPEREDGE {
            return Err(fail());
        }
        let edges = match (bases, m.detectors.len()) {
            (_, 1) | (None, 2) => Some(vec![EdgeKey::from_detectors(&m.detectors, m.flips_observable)]),
            (None, _) => split_part(&m.detectors, m.flips_observable, known),
            (Some(b), _) => {
                let (zs, xs): (Vec<u32>, Vec<u32>) = m.detectors.iter().partition(|&&d| b[d as usize] == DetectorBasis::Z);
                if xs.is_empty() || zs.is_empty() {
                    split_part(&m.detectors, m.flips_observable, known)
                } else {
                    let obs = m.flips_observable;
                    [(obs, false), (false, obs)].into_iter().filter(|&(oz, ox)| !(oz && ox)).find_map(|(oz, ox)| {
                        let mut z = split_part(&zs, oz, known)?;
                        z.extend(split_part(&xs, ox, known)?);
                        Some(z)
                    })
                }
            }
        };
        let edges = edges.ok_or_else(fail)?;
        out.extend(edges.into_iter().map(|edge| EdgeContribution { edge, probability: m.probability }));
    }
    Ok(out)
}

/// Graph-like form of `dem`, treating all detectors as one basis and using its
/// own small mechanisms as the decomposition targets.
pub fn decompose_to_graph(dem: &DetectorErrorModel) -> Result<MatchingGraph> {
    let mut known = KnownEdges::new();
    known.gather(dem, None);
    let mut g = MatchingGraph::new(dem.detector_count);
    for c in decompose_mechanisms(dem, &known, None)? {
        g.add_probability(c.edge, c.probability);
    }
    Ok(g)
}
