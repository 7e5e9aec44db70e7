mod common;

use common::{conditional_frequencies, true_loss_dem, worst_deviation};
use corrloss::circuit::{build_memory_circuit, SiteContext};
use corrloss::dem::{build_loss_dem, build_pauli_dem, LossVariant};
use corrloss::noise::{LossConfig, NoiseParams};
use corrloss::pauli::Pauli;
use corrloss::propagate::SiteEffects;

#[test]
fn pauli_dem_marginals_and_pairs_match_simulation() {
    let c = build_memory_circuit(3, 3).unwrap();
    let params = NoiseParams::new(0.0, 0.0, 0.001).unwrap();
    let dem = build_pauli_dem(&c, &SiteEffects::new(&c), &params);
    let f = conditional_frequencies(&c, &params, &LossConfig::none(&c), 100_000, 21, true);
    let (z, at) = worst_deviation(&dem, &f);
    assert!(z < 3.0, "{at} deviates by {z:.2} sigma");
}

#[test]
fn single_loss_models_match_conditional_simulation() {
    let c = build_memory_circuit(3, 2).unwrap();
    let effects = SiteEffects::new(&c);
    let params = NoiseParams::noiseless();
    let mut checked = 0;
    for (s, info) in c.sites().iter().enumerate() {
        if info.id.round != 1 {
            continue;
        }
        for lost in [vec![info.operands[0], info.operands[1]], vec![info.operands[0]], vec![info.operands[1]]] {
            let loss = LossConfig::injected(&c, &[(s as u32, lost.clone())]);
            // Losses that cascade are covered by the merge approximation and
            // are not expected to be exact.
            if loss.events.len() != 1 {
                continue;
            }
            let dem = true_loss_dem(&c, &effects, &loss);
            let f = conditional_frequencies(&c, &params, &loss, 20_000, 11, false);
            let (z, at) = worst_deviation(&dem, &f);
            assert!(z < 3.0, "site {} lost {lost:?}: {at} deviates by {z:.2} sigma", info.id);
            checked += 1;
        }
    }
    assert!(checked >= 20, "only {checked} cascade-free locations");
}

#[test]
fn first_gate_loss_reaches_every_later_partner() {
    let c = build_memory_circuit(3, 2).unwrap();
    let effects = SiteEffects::new(&c);
    // Bulk data qubit 4 of round 1 lives on slot 9 + 4.
    let atom = c.atom_at(13, 1).unwrap();
    let a = &c.atoms()[atom as usize];
    let first = a.window.iter().copied().find(|&s| c.sites()[s as usize].id.context == SiteContext::SyndromeExtraction && c.sites()[s as usize].id.round == 1).unwrap();
    let pos = a.window.iter().position(|&s| s == first).unwrap();
    let dem = build_loss_dem(&c, &effects, atom, first, LossVariant::Pair).unwrap();
    let later = a.window.len() - pos - 1;
    // Four syndrome gates in the round then the teleport gate.
    assert_eq!(later, 4);
    assert!(dem.dem.mechanisms().iter().all(|m| m.probability == 0.5));
    for &s in &a.window[pos + 1..] {
        let info = c.sites()[s as usize];
        let partner = if info.atoms[0] == Some(atom) { 1 } else { 0 };
        let e = effects.single(s as usize, partner, true, Pauli::Z);
        if !e.is_empty() {
            assert!(dem.dem.mechanisms().iter().any(|m| m.detectors == e.detectors && m.flips_observable == e.observable), "{}", info.id);
        }
    }
}
