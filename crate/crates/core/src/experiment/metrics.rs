//! Scalar metrics: logical error per round, gain, sampling errors and timing
//! summaries.

use serde::{Deserialize, Serialize};

/// Per-round failure rate implied by total failure probability `eps` over
/// `rounds` cycles: `1 - (1 - eps)^(1/rounds)`.
pub fn logical_error_per_round(eps: f64, rounds: usize) -> f64 {
    assert!(rounds >= 1, "at least one round");
    debug_assert!((0.0..=1.0).contains(&eps));
    if eps <= 0.0 {
        return 0.0;
    }
    // ln_1p/exp_m1 keep precision for small eps.
    -((1.0 - eps).ln() / rounds as f64).exp_m1()
}

/// Standard error of a binomial proportion.
pub fn binomial_stderr(eps: f64, shots: u64) -> f64 {
    if shots == 0 {
        return 0.0;
    }
    (eps * (1.0 - eps) / shots as f64).sqrt()
}

/// Standard error of the per-round rate, propagated from that of `eps`.
pub fn per_round_stderr(eps: f64, rounds: usize, stderr: f64) -> f64 {
    let n = rounds as f64;
    if eps >= 1.0 {
        return 0.0;
    }
    (1.0 - eps).powf(1.0 / n - 1.0) / n * stderr
}

/// `log10(eps_r_indpt / eps_r_corr)`; `None` when either rate is zero or not
/// finite (no errors observed).
pub fn gain(eps_r_indpt: f64, eps_r_corr: f64) -> Option<f64> {
    let ok = |x: f64| x.is_finite() && x > 0.0;
    (ok(eps_r_indpt) && ok(eps_r_corr)).then(|| (eps_r_indpt / eps_r_corr).log10())
}

/// Summary of latency samples in microseconds.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TimingStats {
    pub count: usize,
    pub mean_us: f64,
    pub p50_us: f64,
    pub p90_us: f64,
    pub p99_us: f64,
    pub max_us: f64,
    /// Log-spaced histogram: `(upper edge in µs, count)`.
    pub histogram: Vec<(f64, usize)>,
}

impl TimingStats {
    pub fn from_samples(samples: &[f64]) -> Self {
        if samples.is_empty() {
            return TimingStats::default();
        }
        let mut s = samples.to_vec();
        s.sort_by(f64::total_cmp);
        let q = |f: f64| s[((s.len() - 1) as f64 * f).round() as usize];
        let mut histogram: Vec<(f64, usize)> = (-2..=4).flat_map(|e| [1.0, 2.0, 5.0].map(|m| m * 10f64.powi(e))).map(|u| (u, 0)).collect();
        histogram.push((f64::INFINITY, 0));
        for &x in &s {
            let bin = histogram.iter().position(|h| x <= h.0).expect("last bin is unbounded");
            histogram[bin].1 += 1;
        }
        TimingStats {
            count: s.len(),
            mean_us: s.iter().sum::<f64>() / s.len() as f64,
            p50_us: q(0.5),
            p90_us: q(0.9),
            p99_us: q(0.99),
            max_us: *s.last().unwrap(),
            histogram,
        }
    }
}
