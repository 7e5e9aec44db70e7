//! Declarative sweep configuration (TOML).

use crate::decoder::DecoderKind;
use crate::error::{Error, Result};
use crate::noise::NoiseParams;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisePoint {
    pub p_l: f64,
    pub p_c: f64,
    pub p_d: f64,
}

impl NoisePoint {
    pub fn params(&self) -> Result<NoiseParams> {
        NoiseParams::new(self.p_l, self.p_c, self.p_d)
    }
}

/// Cartesian grid; `points` are appended after the product.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Grid {
    pub p_loss: Vec<f64>,
    pub p_corr: Vec<f64>,
    pub p_depol: Vec<f64>,
    pub points: Vec<NoisePoint>,
}

impl Grid {
    pub fn expand(&self) -> Vec<NoisePoint> {
        let mut out = Vec::new();
        for &p_l in &self.p_loss {
            for &p_c in &self.p_corr {
                for &p_d in &self.p_depol {
                    out.push(NoisePoint { p_l, p_c, p_d });
                }
            }
        }
        out.extend(self.points.iter().copied());
        out
    }
}

fn default_shots() -> u64 {
    10_000
}

fn default_bootstrap() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub distances: Vec<usize>,
    /// Rounds per distance, keyed by the distance as a string; default d.
    #[serde(default)]
    pub rounds: BTreeMap<String, usize>,
    pub grid: Grid,
    pub decoders: Vec<DecoderKind>,
    /// Minimum shots per point.
    #[serde(default = "default_shots")]
    pub shots: u64,
    /// Cap for adaptive budgeting; defaults to `shots` (no adaptation).
    #[serde(default)]
    pub max_shots: Option<u64>,
    /// Keep sampling until every decoder has this many errors (or the cap).
    #[serde(default)]
    pub target_errors: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default = "default_bootstrap")]
    pub bootstrap: usize,
    /// Refuse accurate-decoder points whose pilot mean largest loss-graph
    /// component exceeds this many nodes.
    #[serde(default)]
    pub accurate_max_nodes: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn rounds_for(&self, d: usize) -> usize {
        self.rounds.get(&d.to_string()).copied().unwrap_or(d)
    }

    pub fn max_shots(&self) -> u64 {
        self.max_shots.unwrap_or(self.shots).max(self.shots)
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::Config("shots must be at least 1".into()));
        }
        if self.distances.is_empty() {
            return Err(Error::Config("no distances".into()));
        }
        for &d in &self.distances {
            if d < 3 || d % 2 == 0 {
                return Err(Error::InvalidDistance(d));
            }
            if self.rounds_for(d) == 0 {
                return Err(Error::InvalidRounds(0));
            }
        }
        let pts = self.grid.expand();
        if pts.is_empty() {
            return Err(Error::Config("empty noise grid".into()));
        }
        for p in &pts {
            p.params()?;
        }
        if self.decoders.is_empty() {
            return Err(Error::Config("no decoders".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_sweep() {
        let cfg = ExperimentConfig::from_toml(
            r#"
            distances = [3, 5]
            decoders = ["fast", "independent"]
            shots = 100
            seed = 7
            [rounds]
            "5" = 3
            [grid]
            p_loss = [0.01, 0.02]
            p_corr = [1.0]
            p_depol = [0.0]
            points = [{ p_l = 0.03, p_c = 0.5, p_d = 0.001 }]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.grid.expand().len(), 3);
        assert_eq!(cfg.rounds_for(3), 3);
        assert_eq!(cfg.rounds_for(5), 3);
        assert_eq!(cfg.max_shots(), 100);
    }

    #[test]
    fn rejects_bad_configs() {
        let base = "distances = [3]\ndecoders = [\"fast\"]\n";
        assert!(ExperimentConfig::from_toml(&format!("{base}shots = 0\n[grid]\np_loss=[0.1]\np_corr=[1.0]\np_depol=[0.0]\n")).is_err());
        assert!(ExperimentConfig::from_toml(&format!("{base}[grid]\n")).is_err());
        assert!(ExperimentConfig::from_toml(&format!("{base}[grid]\np_loss=[1.5]\np_corr=[1.0]\np_depol=[0.0]\n")).is_err());
        assert!(ExperimentConfig::from_toml("distances = [4]\ndecoders = [\"fast\"]\n[grid]\np_loss=[0.1]\np_corr=[1.0]\np_depol=[0.0]\n").is_err());
        assert!(ExperimentConfig::from_toml("distances = [3]\ndecoders = [\"slow\"]\n[grid]\np_loss=[0.1]\np_corr=[1.0]\np_depol=[0.0]\n").is_err());
    }
}
