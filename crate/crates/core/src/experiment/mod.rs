//! Sweeps over code distance and noise, with logical-error metrics, threshold
//! and power-law fits, and machine-readable reports.

mod config;
mod metrics;
mod report;
mod runner;
mod threshold;

pub use config::{ExperimentConfig, Grid, NoisePoint};
pub use metrics::{binomial_stderr, gain, logical_error_per_round, per_round_stderr, TimingStats};
pub use report::{write_outputs, write_points_csv, ExperimentReport, GainEntry, PowerLawEntry, ReportMeta, ThresholdEntry};
pub use runner::{run_point, DecoderResult, Execution, PointResult, PointSpec};
pub use threshold::{crossing, estimate_threshold, fit_powerlaw, Curve, CurvePoint, PowerLawFit, ThresholdEstimate, THRESHOLD_METHOD};

use crate::circuit::build_memory_circuit;
use crate::decoder::{DecoderKind, DecodingContext};
use crate::error::{Error, Result};
use crate::loss_graph::{build_loss_graph, connected_components};
use crate::sim::simulate_shot;

/// Mean size of the largest loss-graph component over `shots` pilot shots.
pub fn pilot_component_size(ctx: &DecodingContext, shots: u64, seed: u64) -> f64 {
    let mut total = 0usize;
    for s in 0..shots {
        let rec = simulate_shot(&ctx.circuit, &ctx.params, seed ^ 0x9e37_79b9, s);
        if let Ok(g) = build_loss_graph(&ctx.circuit, &rec.loss_syndrome, &ctx.params) {
            total += connected_components(&g).iter().map(|c| c.nodes.len()).max().unwrap_or(0);
        }
    }
    total as f64 / shots.max(1) as f64
}

fn point_seed(seed: u64, d: usize, index: usize) -> u64 {
    seed ^ (d as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ (index as u64 + 1).wrapping_mul(0xc2b2_ae3d_27d4_eb4f)
}

/// Run every grid point of `cfg` and derive thresholds, power laws and gains.
pub fn run_experiment(cfg: &ExperimentConfig, exec: Execution) -> Result<ExperimentReport> {
    cfg.validate()?;
    let grid = cfg.grid.expand();
    let mut points = Vec::new();
    for &d in &cfg.distances {
        let rounds = cfg.rounds_for(d);
        let circuit = build_memory_circuit(d, rounds)?;
        for (i, noise) in grid.iter().enumerate() {
            let ctx = DecodingContext::new(circuit.clone(), noise.params()?)?;
            if cfg.decoders.contains(&DecoderKind::Accurate) {
                let cap = cfg.accurate_max_nodes.unwrap_or(ctx.accurate.max_nodes);
                let size = pilot_component_size(&ctx, 200, cfg.seed);
                if size > cap as f64 {
                    return Err(Error::Config(format!(
                        "accurate decoder refused at d={d}, p_l={}: expected component size {size:.1} exceeds cap {cap}",
                        noise.p_l
                    )));
                }
            }
            let spec = PointSpec {
                distance: d,
                rounds,
                noise: *noise,
                decoders: cfg.decoders.clone(),
                min_shots: cfg.shots,
                max_shots: cfg.max_shots(),
                target_errors: cfg.target_errors,
                seed: point_seed(cfg.seed, d, i),
            };
            let r = run_point(&ctx, &spec, exec);
            for x in &r.results {
                log::info!("d={d} p_l={} p_c={} p_d={} {}: {}/{} eps_r={:.3e}", noise.p_l, noise.p_c, noise.p_d, x.decoder, x.errors, x.shots, x.eps_r);
            }
            points.push(r);
        }
    }
    Ok(ExperimentReport::assemble(cfg, exec, points))
}
