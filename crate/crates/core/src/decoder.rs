//! Per-circuit decoding context and the per-shot pipeline: loss graph,
//! posterior, location weights, reweighted matching graph, matching.

use crate::circuit::{Circuit, DetectorBasis};
use crate::dem::{build_loss_dem, build_pauli_dem, decompose_mechanisms, xor_probability, KnownEdges, LossVariant};
use crate::error::Result;
use crate::loss_graph::{
    accurate_posterior, build_loss_graph, connected_components, fast_posterior, independent_posterior, posterior_to_location_weights,
    AccurateOptions, LocationWeights, LossGraph,
};
use crate::matching::{weight_of, Matcher, MatchingGraph, Syndrome};
use crate::noise::NoiseParams;
use crate::propagate::SiteEffects;
use crate::sim::ShotRecord;
use serde::{Deserialize, Serialize};
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderKind {
    Independent,
    Fast,
    Accurate,
}

impl DecoderKind {
    pub fn name(self) -> &'static str {
        match self {
            DecoderKind::Independent => "independent",
            DecoderKind::Fast => "fast",
            DecoderKind::Accurate => "accurate",
        }
    }
}

impl std::fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for DecoderKind {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "independent" => Ok(DecoderKind::Independent),
            "fast" => Ok(DecoderKind::Fast),
            "accurate" => Ok(DecoderKind::Accurate),
            other => Err(crate::Error::Config(format!("unknown decoder `{other}`"))),
        }
    }
}

/// Edge contributions of one (atom, site, variant) loss model, one entry per
/// graph edge.
type Contribution = Vec<(u32, f64)>;

/// Everything that depends only on the circuit and the noise parameters.
pub struct DecodingContext {
    pub circuit: Circuit,
    pub params: NoiseParams,
    pub accurate: AccurateOptions,
    graph: MatchingGraph,
    matcher: Matcher,
    base_prob: Vec<f64>,
    /// `[atom][window position][variant]`, variant 0 = pair, 1 = single.
    loss: Vec<Vec<[Contribution; 2]>>,
}

/// Outcome of decoding one shot.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    pub prediction: bool,
    /// The decoder fell back (search cap) or the matcher failed.
    pub failed: bool,
    pub t_graph: Duration,
    /// Posterior, location weights and reweighting of the loss models.
    pub t_post: Duration,
    /// Edges of the loss graph, vacuum edges included.
    pub loss_edges: usize,
}

fn variant_slot(v: LossVariant) -> usize {
    match v {
        LossVariant::Pair => 0,
        LossVariant::Single => 1,
    }
}

impl DecodingContext {
    pub fn new(circuit: Circuit, params: NoiseParams) -> Result<Self> {
        let c = &circuit;
        let effects = SiteEffects::new(c);
        let bases: Vec<DetectorBasis> = c.detectors.iter().map(|d| d.basis).collect();
        let pauli = build_pauli_dem(c, &effects, &params);
        // Structure of the depolarizing model, independent of its strength, so
        // the edge set is the same at every p_d.
        let structure = build_pauli_dem(c, &effects, &NoiseParams::new(0.0, 0.0, 0.01)?);

        let mut loss_dems = Vec::with_capacity(c.atoms().len());
        let mut known = KnownEdges::new();
        known.gather(&structure, Some(&bases));
        for (a, atom) in c.atoms().iter().enumerate() {
            let mut per_atom = Vec::with_capacity(atom.window.len());
            for &s in &atom.window {
                let pair = build_loss_dem(c, &effects, a as u32, s, LossVariant::Pair)?.dem;
                let single = build_loss_dem(c, &effects, a as u32, s, LossVariant::Single)?.dem;
                known.gather(&pair, Some(&bases));
                known.gather(&single, Some(&bases));
                per_atom.push([pair, single]);
            }
            loss_dems.push(per_atom);
        }

        let mut graph = MatchingGraph::new(c.num_detectors());
        for e in decompose_mechanisms(&structure, &known, Some(&bases))? {
            graph.ensure_edge(e.edge);
        }
        if params.p_depol > 0.0 {
            for e in decompose_mechanisms(&pauli, &known, Some(&bases))? {
                graph.add_probability(e.edge, e.probability);
            }
        }
        let mut loss = Vec::with_capacity(loss_dems.len());
        for per_atom in &loss_dems {
            let mut rows = Vec::with_capacity(per_atom.len());
            for dems in per_atom {
                let mut row: [Contribution; 2] = Default::default();
                for (slot, dem) in dems.iter().enumerate() {
                    let mut acc: Vec<(u32, f64)> = Vec::new();
                    for e in decompose_mechanisms(dem, &known, Some(&bases))? {
                        let id = graph.ensure_edge(e.edge) as u32;
                        match acc.iter_mut().find(|x| x.0 == id) {
                            Some(x) => x.1 = xor_probability(x.1, e.probability),
                            None => acc.push((id, e.probability)),
                        }
                    }
                    acc.sort_by_key(|x| x.0);
                    row[slot] = acc;
                }
                rows.push(row);
            }
            loss.push(rows);
        }
        let matcher = Matcher::new(&graph);
        let base_prob = graph.edges().iter().map(|e| e.probability).collect();
        Ok(DecodingContext { circuit, params, accurate: AccurateOptions::default(), graph, matcher, base_prob, loss })
    }

    pub fn graph(&self) -> &MatchingGraph {
        &self.graph
    }

    pub fn matcher(&self) -> &Matcher {
        &self.matcher
    }

    /// Edge contributions of one loss location, as stored.
    pub fn location_contribution(&self, atom: u32, site: u32, variant: LossVariant) -> Option<&[(u32, f64)]> {
        let a = &self.circuit.atoms()[atom as usize];
        let pos = a.window.iter().position(|&s| s == site)?;
        Some(&self.loss[atom as usize][pos][variant_slot(variant)])
    }

    /// Location weights for the heralds of `rec` under `kind`; also reports the
    /// loss graph, posterior time and whether the decoder fell back.
    pub fn location_weights(&self, kind: DecoderKind, g: &LossGraph) -> (LocationWeights, Duration, bool) {
        let t = Instant::now();
        let mut failed = false;
        let weights = match kind {
            DecoderKind::Independent => independent_posterior(g, &self.params),
            DecoderKind::Fast => posterior_to_location_weights(g, &fast_posterior(g), &self.params),
            DecoderKind::Accurate => {
                let mut post = vec![0.0; g.edges.len()];
                let mut fallback = None;
                for comp in connected_components(g) {
                    match accurate_posterior(g, &comp, &self.accurate) {
                        Ok(p) => {
                            for (&e, v) in comp.edges.iter().zip(p) {
                                post[e] = v;
                            }
                        }
                        Err(err) => {
                            log::debug!("accurate decoder fell back to the local rule: {err}");
                            failed = true;
                            let fast = fallback.get_or_insert_with(|| fast_posterior(g));
                            for &e in &comp.edges {
                                post[e] = fast[e];
                            }
                        }
                    }
                }
                posterior_to_location_weights(g, &post, &self.params)
            }
        };
        (weights, t.elapsed(), failed)
    }

    /// Per-edge probabilities after folding in the loss models selected by `w`.
    /// Returns the touched edge ids together with their new probabilities.
    pub fn overlay(&self, w: &LocationWeights) -> Vec<(u32, f64)> {
        let mut touched: Vec<(u32, f64)> = Vec::new();
        let mut slot = std::collections::HashMap::new();
        let mut node_acc: Vec<(u32, f64)> = Vec::new();
        for loc in &w.nodes {
            node_acc.clear();
            let atom = &self.circuit.atoms()[loc.atom as usize];
            for &(site, variant, weight) in &loc.entries {
                let pos = atom.window.iter().position(|&s| s == site).expect("weights use window sites");
                for &(e, p) in &self.loss[loc.atom as usize][pos][variant_slot(variant)] {
                    match node_acc.iter_mut().find(|x| x.0 == e) {
                        Some(x) => x.1 += weight * p,
                        None => node_acc.push((e, weight * p)),
                    }
                }
            }
            for &(e, p) in &node_acc {
                let i = *slot.entry(e).or_insert_with(|| {
                    touched.push((e, self.base_prob[e as usize]));
                    touched.len() - 1
                });
                touched[i].1 = xor_probability(touched[i].1, p.min(1.0));
            }
        }
        touched
    }

    /// Full pipeline for one shot.
    pub fn decode(&self, kind: DecoderKind, rec: &ShotRecord) -> DecodeOutcome {
        let t0 = Instant::now();
        let g = match build_loss_graph(&self.circuit, &rec.loss_syndrome, &self.params) {
            Ok(g) => g,
            Err(err) => {
                log::warn!("loss graph failed: {err}");
                return DecodeOutcome { prediction: false, failed: true, t_graph: t0.elapsed(), t_post: Duration::ZERO, loss_edges: 0 };
            }
        };
        let t_graph = t0.elapsed();
        let (w, t_weights, mut failed) = self.location_weights(kind, &g);
        // Reweighting the loss models counts towards the posterior stage.
        let t1 = Instant::now();
        let mut weights = self.matcher.base_weights().to_vec();
        for (e, p) in self.overlay(&w) {
            weights[e as usize] = weight_of(p);
        }
        let t_post = t_weights + t1.elapsed();
        let prediction = match self.matcher.decode_with(&weights, &Syndrome::from_bits(&rec.detectors)) {
            Ok(b) => b,
            Err(err) => {
                log::debug!("matching failed: {err}");
                failed = true;
                false
            }
        };
        DecodeOutcome { prediction, failed, t_graph, t_post, loss_edges: g.edges.len() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::build_memory_circuit;
    use crate::dem::{mix_loss_dems, LossLocationDem};
    use crate::sim::simulate_shot;

    #[test]
    fn noiseless_shots_decode_to_zero() {
        let c = build_memory_circuit(3, 3).unwrap();
        let ctx = DecodingContext::new(c, NoiseParams::new(0.01, 0.5, 0.001).unwrap()).unwrap();
        let rec = crate::sim::run_noiseless(&ctx.circuit, 0);
        for kind in [DecoderKind::Independent, DecoderKind::Fast, DecoderKind::Accurate] {
            let out = ctx.decode(kind, &rec);
            assert!(!out.prediction && !out.failed);
        }
    }

    #[test]
    fn overlay_matches_mixed_dem_for_one_node() {
        // For a single node the overlay is the decomposed mixture of its models.
        let c = build_memory_circuit(3, 2).unwrap();
        let params = NoiseParams::new(0.01, 0.0, 0.0).unwrap();
        let ctx = DecodingContext::new(c.clone(), params).unwrap();
        let atom = c.atom_at(9 + 4, 1).unwrap();
        let herald = crate::sim::Herald { qubit: 9 + 4, round: 1 };
        let g = build_loss_graph(&c, &[herald], &params).unwrap();
        let (w, _, _) = ctx.location_weights(DecoderKind::Independent, &g);
        let overlay = ctx.overlay(&w);
        let effects = SiteEffects::new(&c);
        let parts: Vec<LossLocationDem> =
            w.nodes[0].entries.iter().map(|&(s, v, _)| build_loss_dem(&c, &effects, atom, s, v).unwrap()).collect();
        let mix: Vec<(&LossLocationDem, f64)> = parts.iter().zip(&w.nodes[0].entries).map(|(p, e)| (p, e.2)).collect();
        let mixed = mix_loss_dems(&mix).unwrap();
        // A boundary mechanism of the mixture lands on its own edge with at
        // least its mixed probability; other mechanisms can only add to it.
        let mut checked = 0;
        for m in mixed.mechanisms().iter().filter(|m| m.detectors.len() == 1) {
            let key = crate::matching::EdgeKey::from_detectors(&m.detectors, m.flips_observable);
            let id = ctx.graph().edge_id(&key).unwrap() as u32;
            let got = overlay.iter().find(|x| x.0 == id).unwrap().1;
            assert!(got >= m.probability - 1e-12 && got <= 0.5 + 1e-12, "{got} vs {}", m.probability);
            checked += 1;
        }
        assert!(checked > 0);
        assert!(overlay.iter().all(|x| x.1 > 0.0 && x.1 <= 0.5 + 1e-12));
    }

    #[test]
    fn decoders_agree_on_no_loss() {
        let c = build_memory_circuit(3, 3).unwrap();
        let params = NoiseParams::new(0.0, 0.0, 0.01).unwrap();
        let ctx = DecodingContext::new(c, params).unwrap();
        for shot in 0..200 {
            let rec = simulate_shot(&ctx.circuit, &params, 3, shot);
            let a = ctx.decode(DecoderKind::Fast, &rec).prediction;
            assert_eq!(a, ctx.decode(DecoderKind::Independent, &rec).prediction);
            assert_eq!(a, ctx.decode(DecoderKind::Accurate, &rec).prediction);
        }
    }
}
