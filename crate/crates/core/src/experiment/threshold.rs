//! Threshold crossing and power-law fits on logical-error curves.

use super::metrics::logical_error_per_round;
use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub p: f64,
    pub eps_r: f64,
    pub errors: u64,
    pub shots: u64,
    pub rounds: usize,
}

/// Logical error per round against a physical parameter for one distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub distance: usize,
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub value: f64,
    /// Bootstrap standard deviation; 0 without resampling.
    pub error: f64,
    /// Crossing of each distance pair.
    pub pairs: Vec<(usize, usize, f64)>,
    pub method: String,
}

pub const THRESHOLD_METHOD: &str = "pairwise crossing of log-linear interpolants of eps_r(p), averaged over distance pairs; parametric binomial bootstrap";

/// First point where the larger distance stops beating the smaller one, with
/// `ln eps_r` interpolated linearly in `p` between shared grid points.
pub fn crossing(small: &[(f64, f64)], large: &[(f64, f64)]) -> Option<f64> {
    let mut diff = Vec::new();
    for &(p, a) in small {
        if let Some(&(_, b)) = large.iter().find(|x| x.0 == p) {
            if a > 0.0 && b > 0.0 {
                diff.push((p, a.ln() - b.ln()));
            }
        }
    }
    diff.sort_by(|x, y| x.0.total_cmp(&y.0));
    for w in diff.windows(2) {
        let ((p0, d0), (p1, d1)) = (w[0], w[1]);
        if d0 > 0.0 && d1 <= 0.0 {
            return Some(p0 + (p1 - p0) * d0 / (d0 - d1));
        }
    }
    None
}

fn pairwise(curves: &[Curve], values: &[Vec<(f64, f64)>]) -> Option<(f64, Vec<(usize, usize, f64)>)> {
    let mut pairs = Vec::new();
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            let (s, l) = if curves[i].distance < curves[j].distance { (i, j) } else { (j, i) };
            if let Some(x) = crossing(&values[s], &values[l]) {
                pairs.push((curves[s].distance, curves[l].distance, x));
            }
        }
    }
    if pairs.is_empty() {
        return None;
    }
    let mean = pairs.iter().map(|p| p.2).sum::<f64>() / pairs.len() as f64;
    Some((mean, pairs))
}

/// Threshold estimate from at least two curves with four or more points each.
/// `bootstrap` resamples the error counts binomially to get an error bar.
pub fn estimate_threshold(curves: &[Curve], bootstrap: usize, seed: u64) -> Option<ThresholdEstimate> {
    if curves.len() < 2 || curves.iter().any(|c| c.points.len() < 4) {
        return None;
    }
    let values: Vec<Vec<(f64, f64)>> = curves.iter().map(|c| c.points.iter().map(|p| (p.p, p.eps_r)).collect()).collect();
    let (value, pairs) = pairwise(curves, &values)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(bootstrap);
    for _ in 0..bootstrap {
        let resampled: Vec<Vec<(f64, f64)>> = curves
            .iter()
            .map(|c| {
                c.points
                    .iter()
                    .map(|pt| {
                        if pt.shots == 0 {
                            return (pt.p, 0.0);
                        }
                        let eps = pt.errors as f64 / pt.shots as f64;
                        let k = Binomial::new(pt.shots, eps).map_or(pt.errors, |b| b.sample(&mut rng));
                        (pt.p, logical_error_per_round(k as f64 / pt.shots as f64, pt.rounds))
                    })
                    .collect()
            })
            .collect();
        if let Some((v, _)) = pairwise(curves, &resampled) {
            samples.push(v);
        }
    }
    let error = if samples.len() >= 2 {
        let m = samples.iter().sum::<f64>() / samples.len() as f64;
        (samples.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (samples.len() - 1) as f64).sqrt()
    } else {
        0.0
    };
    Some(ThresholdEstimate { value, error, pairs, method: THRESHOLD_METHOD.to_string() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub error: f64,
    /// `ln` of the prefactor.
    pub intercept: f64,
    pub points: usize,
}

/// Least-squares slope of `ln eps_r` against `ln p`.
pub fn fit_powerlaw(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(p, e)| *p > 0.0 && *e > 0.0).map(|(p, e)| (p.ln(), e.ln())).collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!("{} usable points, need 3", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all points share one p".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let error = if pts.len() > 2 { (ssr / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok(PowerLawFit { exponent: slope, error, intercept, points: pts.len() })
}
