//! Monte Carlo execution of one grid point: shots are simulated once and
//! decoded by every selected decoder.

use super::config::NoisePoint;
use super::metrics::{binomial_stderr, logical_error_per_round, per_round_stderr, TimingStats};
use crate::decoder::{DecoderKind, DecodingContext};
use crate::sim::simulate_shot;
use serde::{Deserialize, Serialize};

/// How shots of a batch are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Data-parallel over shots; same as `Sequential` without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSpec {
    pub distance: usize,
    pub rounds: usize,
    pub noise: NoisePoint,
    pub decoders: Vec<DecoderKind>,
    pub min_shots: u64,
    pub max_shots: u64,
    pub target_errors: Option<u64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoderResult {
    pub decoder: DecoderKind,
    pub shots: u64,
    pub errors: u64,
    /// Shots where the decoder fell back or the matcher failed.
    pub failures: u64,
    pub eps: f64,
    pub eps_r: f64,
    pub stderr: f64,
    pub stderr_r: f64,
    /// Loss-graph construction time per round.
    pub t_graph: TimingStats,
    /// Posterior estimation time per loss-graph edge.
    pub t_post: TimingStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub distance: usize,
    pub rounds: usize,
    pub noise: NoisePoint,
    pub results: Vec<DecoderResult>,
}

impl PointResult {
    pub fn result(&self, kind: DecoderKind) -> Option<&DecoderResult> {
        self.results.iter().find(|r| r.decoder == kind)
    }
}

#[derive(Debug, Clone, Copy)]
struct ShotDecode {
    wrong: bool,
    failed: bool,
    t_graph_us: f64,
    t_post_us: Option<f64>,
}

fn decode_shot(ctx: &DecodingContext, decoders: &[DecoderKind], seed: u64, shot: u64) -> Vec<ShotDecode> {
    let rec = simulate_shot(&ctx.circuit, &ctx.params, seed, shot);
    let rounds = ctx.circuit.rounds.max(1) as f64;
    decoders
        .iter()
        .map(|&k| {
            let out = ctx.decode(k, &rec);
            ShotDecode {
                wrong: out.prediction != rec.observable,
                failed: out.failed,
                t_graph_us: out.t_graph.as_secs_f64() * 1e6 / rounds,
                t_post_us: (out.loss_edges > 0).then(|| out.t_post.as_secs_f64() * 1e6 / out.loss_edges as f64),
            }
        })
        .collect()
}

fn decode_range(ctx: &DecodingContext, decoders: &[DecoderKind], seed: u64, range: std::ops::Range<u64>, exec: Execution) -> Vec<Vec<ShotDecode>> {
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        use rayon::prelude::*;
        return range.into_par_iter().map(|s| decode_shot(ctx, decoders, seed, s)).collect();
    }
    let _ = exec;
    range.map(|s| decode_shot(ctx, decoders, seed, s)).collect()
}

const BATCH: u64 = 1024;

/// Run one grid point on a prepared context. Sampling continues past
/// `min_shots` until every decoder has `target_errors` errors or `max_shots`
/// is reached.
pub fn run_point(ctx: &DecodingContext, spec: &PointSpec, exec: Execution) -> PointResult {
    let k = spec.decoders.len();
    let mut errors = vec![0u64; k];
    let mut failures = vec![0u64; k];
    let mut t_graph: Vec<Vec<f64>> = vec![Vec::new(); k];
    let mut t_post: Vec<Vec<f64>> = vec![Vec::new(); k];
    let mut shots = 0u64;
    let max = spec.max_shots.max(spec.min_shots);
    while shots < max {
        let enough = shots >= spec.min_shots && spec.target_errors.is_none_or(|t| errors.iter().all(|&e| e >= t));
        if enough {
            break;
        }
        let end = if shots < spec.min_shots { (shots + BATCH).min(spec.min_shots) } else { (shots + BATCH).min(max) };
        for per_shot in decode_range(ctx, &spec.decoders, spec.seed, shots..end, exec) {
            for (i, d) in per_shot.into_iter().enumerate() {
                errors[i] += u64::from(d.wrong);
                failures[i] += u64::from(d.failed);
                t_graph[i].push(d.t_graph_us);
                if let Some(t) = d.t_post_us {
                    t_post[i].push(t);
                }
            }
        }
        shots = end;
    }
    let results = spec
        .decoders
        .iter()
        .enumerate()
        .map(|(i, &decoder)| {
            let eps = if shots > 0 { errors[i] as f64 / shots as f64 } else { 0.0 };
            let stderr = binomial_stderr(eps, shots);
            DecoderResult {
                decoder,
                shots,
                errors: errors[i],
                failures: failures[i],
                eps,
                eps_r: logical_error_per_round(eps, spec.rounds),
                stderr,
                stderr_r: per_round_stderr(eps, spec.rounds, stderr),
                t_graph: TimingStats::from_samples(&t_graph[i]),
                t_post: TimingStats::from_samples(&t_post[i]),
            }
        })
        .collect();
    PointResult { distance: spec.distance, rounds: spec.rounds, noise: spec.noise, results }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::build_memory_circuit;

    fn ctx(p: NoisePoint) -> DecodingContext {
        DecodingContext::new(build_memory_circuit(3, 3).unwrap(), p.params().unwrap()).unwrap()
    }

    fn spec(noise: NoisePoint, shots: u64) -> PointSpec {
        PointSpec {
            distance: 3,
            rounds: 3,
            noise,
            decoders: vec![DecoderKind::Fast, DecoderKind::Independent],
            min_shots: shots,
            max_shots: shots,
            target_errors: None,
            seed: 11,
        }
    }

    #[test]
    fn noiseless_point_has_no_errors() {
        let n = NoisePoint { p_l: 0.0, p_c: 1.0, p_d: 0.0 };
        let r = run_point(&ctx(n), &spec(n, 300), Execution::default());
        for d in &r.results {
            assert_eq!((d.shots, d.errors, d.eps), (300, 0, 0.0));
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let n = NoisePoint { p_l: 0.03, p_c: 1.0, p_d: 0.0 };
        let c = ctx(n);
        let a = run_point(&c, &spec(n, 200), Execution::Sequential);
        let b = run_point(&c, &spec(n, 200), Execution::Parallel);
        for (x, y) in a.results.iter().zip(&b.results) {
            assert_eq!((x.errors, x.failures, x.shots), (y.errors, y.failures, y.shots));
        }
    }

    #[test]
    fn adaptive_budget_stops_at_cap() {
        let n = NoisePoint { p_l: 0.002, p_c: 1.0, p_d: 0.0 };
        let mut s = spec(n, 100);
        s.max_shots = 1500;
        s.target_errors = Some(1_000_000);
        let r = run_point(&ctx(n), &s, Execution::default());
        assert_eq!(r.results[0].shots, 1500);
    }
}
