use corrloss::circuit::build_memory_circuit;
use corrloss::noise::{marginal_loss_probability, sample_depolarizing, sample_losses, sample_pauli_faults, LossConfig, NoiseParams, SiteStatus};
use corrloss::pauli::{Pauli, TwoQubitPauli};
use corrloss::rng::shot_rng;
use corrloss::sim::simulate_shot;

fn within(observed: f64, expected: f64, sigma: f64, k: f64) -> bool {
    (observed - expected).abs() <= k * sigma
}

#[test]
fn marginal_loss_frequency_matches_closed_form() {
    let c = build_memory_circuit(3, 3).unwrap();
    let (p_l, p_c) = (0.02, 0.5);
    let params = NoiseParams::new(p_l, p_c, 0.0).unwrap();
    let (mut opportunities, mut lost) = (0u64, 0u64);
    for shot in 0..100_000 {
        let cfg = sample_losses(&c, &params, &mut shot_rng(5, shot));
        for status in &cfg.site_status {
            match *status {
                SiteStatus::Clean => opportunities += 1,
                SiteStatus::Event(n) => {
                    let e = &cfg.events[n as usize];
                    if !e.forced {
                        opportunities += 1;
                        lost += e.lost.len() as u64;
                    }
                }
                SiteStatus::Bypassed => {}
            }
        }
    }
    let expected = marginal_loss_probability(p_l, p_c);
    assert!((expected - 0.015).abs() < 1e-15);
    // Atoms lost per gate is 0, 1 or 2; its variance sets the error bar.
    let second_moment = p_l * (1.0 - p_c) + 4.0 * p_l * p_c;
    let var = second_moment - (2.0 * expected).powi(2);
    let sigma = (var / opportunities as f64).sqrt() / 2.0;
    let observed = lost as f64 / (2 * opportunities) as f64;
    assert!(within(observed, expected, sigma, 3.0), "{observed} vs {expected} ± {sigma}");
}

#[test]
fn depolarizing_outcomes_are_uniform() {
    let p = 0.01;
    let n = 1_000_000u64;
    let mut rng = shot_rng(9, 0);
    let all: Vec<TwoQubitPauli> = TwoQubitPauli::non_identity().collect();
    let mut counts = vec![0u64; all.len()];
    for _ in 0..n {
        let f = sample_depolarizing(p, &mut rng);
        if let Some(i) = all.iter().position(|&x| x == f) {
            counts[i] += 1;
        }
    }
    let q = p / 15.0;
    let sigma = (q * (1.0 - q) / n as f64).sqrt();
    for (pauli, &k) in all.iter().zip(&counts) {
        assert!(within(k as f64 / n as f64, q, sigma, 3.0), "{pauli:?}: {k}");
    }
}

#[test]
fn survivor_channel_frequencies() {
    let c = build_memory_circuit(3, 1).unwrap();
    let site = 5u32;
    let [a, b] = c.sites()[site as usize].operands;
    let loss = LossConfig::injected(&c, &[(site, vec![a])]);
    assert_eq!(loss.events[0].survivor([a, b]), Some(b));
    let n = 100_000u64;
    let mut counts = [0u64; 4];
    for shot in 0..n {
        let faults = sample_pauli_faults(&c, &NoiseParams::noiseless(), &loss, &mut shot_rng(13, shot));
        let f = faults.faults[site as usize];
        assert_eq!(f.0, Pauli::I, "no fault on the lost atom");
        counts[Pauli::ALL.iter().position(|&p| p == f.1).unwrap()] += 1;
    }
    for (&k, expected) in counts.iter().zip([3.0 / 8.0, 1.0 / 8.0, 1.0 / 8.0, 3.0 / 8.0]) {
        let sigma = (expected * (1.0 - expected) / n as f64).sqrt();
        assert!(within(k as f64 / n as f64, expected, sigma, 3.0), "{counts:?}");
    }
}

#[test]
fn noiseless_shots_are_deterministic() {
    let c = build_memory_circuit(3, 3).unwrap();
    for shot in 0..10_000 {
        let rec = simulate_shot(&c, &NoiseParams::noiseless(), 1, shot);
        assert!(rec.detectors.iter().all(|&d| !d) && !rec.observable && rec.loss_syndrome.is_empty());
    }
}
