use super::config::ExperimentConfig;
use super::metrics::gain;
use super::runner::{Execution, PointResult};
use super::threshold::{estimate_threshold, fit_powerlaw, Curve, CurvePoint, PowerLawFit, ThresholdEstimate, THRESHOLD_METHOD};
use crate::decoder::DecoderKind;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub version: String,
    pub seed: u64,
    pub shots: u64,
    pub max_shots: u64,
    pub target_errors: Option<u64>,
    pub execution: String,
    pub threshold_method: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEntry {
    pub decoder: DecoderKind,
    pub p_c: f64,
    pub p_d: f64,
    pub estimate: Option<ThresholdEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawEntry {
    pub decoder: DecoderKind,
    pub distance: usize,
    pub p_c: f64,
    pub p_d: f64,
    /// Largest p_l included in the fit.
    pub max_p_l: f64,
    pub fit: Option<PowerLawFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainEntry {
    pub distance: usize,
    pub p_l: f64,
    pub p_c: f64,
    pub p_d: f64,
    pub decoder: DecoderKind,
    /// `None` marks an undefined gain (no errors observed by one decoder).
    pub gain: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub meta: ReportMeta,
    pub points: Vec<PointResult>,
    pub thresholds: Vec<ThresholdEntry>,
    pub powerlaws: Vec<PowerLawEntry>,
    pub gains: Vec<GainEntry>,
}

/// Curves of one decoder at fixed (p_c, p_d), one per distance, against p_l.
pub fn curves(points: &[PointResult], decoder: DecoderKind, p_c: f64, p_d: f64) -> Vec<Curve> {
    let mut ds: Vec<usize> = points.iter().map(|p| p.distance).collect();
    ds.sort_unstable();
    ds.dedup();
    ds.into_iter()
        .map(|d| {
            let mut pts: Vec<CurvePoint> = points
                .iter()
                .filter(|p| p.distance == d && p.noise.p_c == p_c && p.noise.p_d == p_d)
                .filter_map(|p| {
                    p.result(decoder).map(|r| CurvePoint { p: p.noise.p_l, eps_r: r.eps_r, errors: r.errors, shots: r.shots, rounds: p.rounds })
                })
                .collect();
            pts.sort_by(|a, b| a.p.total_cmp(&b.p));
            Curve { distance: d, points: pts }
        })
        .filter(|c| !c.points.is_empty())
        .collect()
}

impl ExperimentReport {
    pub fn assemble(cfg: &ExperimentConfig, exec: Execution, points: Vec<PointResult>) -> Self {
        let meta = ReportMeta {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: cfg.seed,
            shots: cfg.shots,
            max_shots: cfg.max_shots(),
            target_errors: cfg.target_errors,
            execution: format!("{exec:?}").to_lowercase(),
            threshold_method: THRESHOLD_METHOD.to_string(),
        };
        let mut groups: Vec<(f64, f64)> = Vec::new();
        for p in &points {
            if !groups.contains(&(p.noise.p_c, p.noise.p_d)) {
                groups.push((p.noise.p_c, p.noise.p_d));
            }
        }
        let mut thresholds = Vec::new();
        let mut powerlaws = Vec::new();
        for &decoder in &cfg.decoders {
            for &(p_c, p_d) in &groups {
                let cs = curves(&points, decoder, p_c, p_d);
                let estimate = estimate_threshold(&cs, cfg.bootstrap, cfg.seed);
                let limit = estimate.as_ref().map_or(f64::INFINITY, |e| e.value);
                for c in &cs {
                    let sub: Vec<(f64, f64)> = c.points.iter().filter(|p| p.p < limit).map(|p| (p.p, p.eps_r)).collect();
                    let max_p_l = sub.iter().map(|p| p.0).fold(0.0, f64::max);
                    powerlaws.push(PowerLawEntry { decoder, distance: c.distance, p_c, p_d, max_p_l, fit: fit_powerlaw(&sub).ok() });
                }
                if cs.len() >= 2 {
                    thresholds.push(ThresholdEntry { decoder, p_c, p_d, estimate });
                }
            }
        }
        let mut gains = Vec::new();
        for p in &points {
            if let Some(ind) = p.result(DecoderKind::Independent) {
                for r in p.results.iter().filter(|r| r.decoder != DecoderKind::Independent) {
                    gains.push(GainEntry {
                        distance: p.distance,
                        p_l: p.noise.p_l,
                        p_c: p.noise.p_c,
                        p_d: p.noise.p_d,
                        decoder: r.decoder,
                        gain: gain(ind.eps_r, r.eps_r),
                    });
                }
            }
        }
        ExperimentReport { meta, points, thresholds, powerlaws, gains }
    }
}

/// `points.csv`: one row per (grid point, decoder).
pub fn write_points_csv<W: std::io::Write>(out: W, report: &ExperimentReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["d", "rounds", "p_l", "p_c", "p_d", "decoder", "shots", "errors", "eps", "eps_r", "stderr", "t_graph_us_mean", "t_post_us_mean"])
        .map_err(io)?;
    for p in &report.points {
        for r in &p.results {
            w.write_record([
                p.distance.to_string(),
                p.rounds.to_string(),
                p.noise.p_l.to_string(),
                p.noise.p_c.to_string(),
                p.noise.p_d.to_string(),
                r.decoder.to_string(),
                r.shots.to_string(),
                r.errors.to_string(),
                r.eps.to_string(),
                r.eps_r.to_string(),
                r.stderr.to_string(),
                r.t_graph.mean_us.to_string(),
                r.t_post.mean_us.to_string(),
            ])
            .map_err(io)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Write `report.json` and `points.csv` into `dir`.
pub fn write_outputs(report: &ExperimentReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let json = serde_json::to_string_pretty(report).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(dir.join("report.json"), json)?;
    write_points_csv(std::fs::File::create(dir.join("points.csv"))?, report)
}

#[cfg(test)]
mod tests {
    use super::super::{run_experiment, ExperimentConfig};
    use super::*;

    #[test]
    fn tiny_sweep_is_deterministic_and_written() {
        let cfg = ExperimentConfig::from_toml(
            "distances = [3]\ndecoders = [\"fast\", \"independent\"]\nshots = 200\nseed = 5\n[grid]\np_loss = [0.0, 0.02]\np_corr = [1.0]\np_depol = [0.0]\n",
        )
        .unwrap();
        let a = run_experiment(&cfg, Execution::default()).unwrap();
        let b = run_experiment(&cfg, Execution::Sequential).unwrap();
        let counts = |r: &ExperimentReport| r.points.iter().flat_map(|p| p.results.iter().map(|x| (x.errors, x.shots))).collect::<Vec<_>>();
        assert_eq!(counts(&a), counts(&b));
        assert_eq!(a.points[0].results[0].errors, 0);
        assert!(a.gains.iter().any(|g| g.gain.is_none()));
        let dir = tempfile::tempdir().unwrap();
        write_outputs(&a, dir.path()).unwrap();
        let csv = std::fs::read_to_string(dir.path().join("points.csv")).unwrap();
        assert!(csv.starts_with("d,rounds,p_l,p_c,p_d,decoder,shots,errors,eps,eps_r,stderr,t_graph_us_mean,t_post_us_mean\n"));
        assert_eq!(csv.lines().count(), 5);
        let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
        assert!(json["meta"]["threshold_method"].as_str().unwrap().contains("bootstrap"));
    }
}
