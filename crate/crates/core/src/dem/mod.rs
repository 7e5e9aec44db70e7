//! Detector error models: independent mechanisms, each flipping a set of
//! detectors and possibly the logical observable.

mod decompose;
mod loss;

pub use decompose::{decompose_mechanisms, decompose_to_graph, EdgeContribution, KnownEdges};
pub use loss::{build_loss_dem, build_pauli_dem, mix_loss_dems, LossLocationDem, LossVariant};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt::Write as _;

/// Probability that an odd number of two independent events happen.
pub fn xor_probability(p1: f64, p2: f64) -> f64 {
    p1 * (1.0 - p2) + p2 * (1.0 - p1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorMechanism {
    pub probability: f64,
    /// Sorted, duplicate free.
    pub detectors: Vec<u32>,
    pub flips_observable: bool,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DetectorErrorModel {
    pub detector_count: usize,
    mechanisms: Vec<ErrorMechanism>,
    #[serde(skip)]
    index: HashMap<(Vec<u32>, bool), usize>,
}

impl PartialEq for DetectorErrorModel {
    fn eq(&self, other: &Self) -> bool {
        self.detector_count == other.detector_count && self.mechanisms == other.mechanisms
    }
}

impl DetectorErrorModel {
    pub fn new(detector_count: usize) -> Self {
        DetectorErrorModel { detector_count, mechanisms: Vec::new(), index: HashMap::new() }
    }

    pub fn mechanisms(&self) -> &[ErrorMechanism] {
        &self.mechanisms
    }

    pub fn len(&self) -> usize {
        self.mechanisms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mechanisms.is_empty()
    }

    /// Add a mechanism, combining it with an existing one that has the same
    /// detectors and observable flip. Zero-probability and no-effect
    /// mechanisms are dropped.
    pub fn add(&mut self, probability: f64, detectors: Vec<u32>, flips_observable: bool) -> Result<()> {
        if let Some(&bad) = detectors.iter().find(|&&d| d as usize >= self.detector_count) {
            return Err(Error::UnknownDetector(bad));
        }
        if probability <= 0.0 || (detectors.is_empty() && !flips_observable) {
            return Ok(());
        }
        let key = (detectors, flips_observable);
        match self.index.get(&key) {
            Some(&i) => {
                let m = &mut self.mechanisms[i];
                m.probability = xor_probability(m.probability, probability);
            }
            None => {
                self.index.insert(key.clone(), self.mechanisms.len());
                self.mechanisms.push(ErrorMechanism { probability, detectors: key.0, flips_observable: key.1 });
            }
        }
        Ok(())
    }

    fn rebuild_index(&mut self) {
        self.index = self
            .mechanisms
            .iter()
            .enumerate()
            .map(|(i, m)| ((m.detectors.clone(), m.flips_observable), i))
            .collect();
    }

    /// Exact probability that detector `d` fires.
    pub fn detector_marginal(&self, d: u32) -> f64 {
        let prod: f64 = self.mechanisms.iter().filter(|m| m.detectors.contains(&d)).map(|m| 1.0 - 2.0 * m.probability).product();
        (1.0 - prod) / 2.0
    }

    /// Exact probability that both `a` and `b` fire.
    pub fn detector_pair(&self, a: u32, b: u32) -> f64 {
        let mut ea = 1.0;
        let mut eb = 1.0;
        let mut eab = 1.0;
        for m in &self.mechanisms {
            let (ha, hb) = (m.detectors.contains(&a), m.detectors.contains(&b));
            let f = 1.0 - 2.0 * m.probability;
            if ha {
                ea *= f;
            }
            if hb {
                eb *= f;
            }
            if ha ^ hb {
                eab *= f;
            }
        }
        (1.0 - ea - eb + eab) / 4.0
    }

    /// One mechanism per line: `error <p> D<i> ... [L0]`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for m in &self.mechanisms {
            let _ = write!(out, "error {}", m.probability);
            for d in &m.detectors {
                let _ = write!(out, " D{d}");
            }
            if m.flips_observable {
                out.push_str(" L0");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(detector_count: usize, text: &str) -> Result<Self> {
        let mut dem = DetectorErrorModel::new(detector_count);
        for (ln, line) in text.lines().enumerate() {
            let err = |m: &str| Error::Parse { line: ln + 1, message: m.to_string() };
            let mut words = line.split_whitespace();
            match words.next() {
                None => continue,
                Some("error") => {}
                Some(other) => return Err(err(&format!("unknown instruction `{other}`"))),
            }
            let p: f64 = words.next().and_then(|w| w.parse().ok()).ok_or_else(|| err("bad probability"))?;
            let mut dets = Vec::new();
            let mut obs = false;
            for w in words {
                if w == "L0" {
                    obs = true;
                } else {
                    dets.push(w.strip_prefix('D').and_then(|v| v.parse().ok()).ok_or_else(|| err("bad target"))?);
                }
            }
            dets.sort_unstable();
            dem.add(p, dets, obs)?;
        }
        Ok(dem)
    }
}

/// Concatenate models and merge repeated mechanisms with the XOR rule.
pub fn merge(dems: &[&DetectorErrorModel]) -> Result<DetectorErrorModel> {
    let Some(first) = dems.first() else {
        return Ok(DetectorErrorModel::new(0));
    };
    let mut out = DetectorErrorModel::new(first.detector_count);
    for d in dems {
        if d.detector_count != first.detector_count {
            return Err(Error::DetectorCountMismatch { left: first.detector_count, right: d.detector_count });
        }
        for m in &d.mechanisms {
            out.add(m.probability, m.detectors.clone(), m.flips_observable)?;
        }
    }
    Ok(out)
}

impl DetectorErrorModel {
    /// Scale every mechanism probability by `w`.
    pub fn scaled(&self, w: f64) -> DetectorErrorModel {
        let mut out = self.clone();
        for m in &mut out.mechanisms {
            m.probability *= w;
        }
        out.mechanisms.retain(|m| m.probability > 0.0);
        out.rebuild_index();
        out
    }
}
