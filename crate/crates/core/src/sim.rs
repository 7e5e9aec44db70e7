//! Shot execution: a circuit plus sampled losses and Pauli faults become
//! detector bits, the logical observable and the loss heralds.

use crate::circuit::{Circuit, OpKind};
use crate::error::{Error, Result};
use crate::noise::{sample_losses, sample_pauli_faults, FaultAssignment, LossConfig, NoiseParams, SiteStatus};
use crate::pauli::Pauli;
use crate::rng::shot_rng;
use crate::tableau::Tableau;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// An atom reported absent by its measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Herald {
    pub qubit: u32,
    pub round: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub detectors: Vec<bool>,
    pub observable: bool,
    /// Heralded losses in measurement order.
    pub loss_syndrome: Vec<Herald>,
    /// `None` marks a measurement that reported the atom lost.
    pub raw_measurements: Vec<Option<bool>>,
}

impl ShotRecord {
    pub fn flipped_detectors(&self) -> Vec<u32> {
        self.detectors.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as u32).collect()
    }

    /// Detector bits as lowercase hex, detector 0 in the least significant bit.
    pub fn detectors_hex(&self) -> String {
        let mut out = String::with_capacity(self.detectors.len().div_ceil(4));
        for chunk in self.detectors.chunks(4).rev() {
            let nibble = chunk.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | (u8::from(b) << i));
            out.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        out
    }
}

fn apply(t: &mut Tableau, q: u32, p: Pauli) {
    if !p.is_identity() {
        t.apply_pauli(q as usize, p.has_x(), p.has_z());
    }
}

/// Run one shot. Lost atoms are skipped by every gate until their slot is
/// prepared again; their measurements report `lost` and contribute a fair
/// random bit to detector parities.
pub fn run_shot<R: Rng + ?Sized>(c: &Circuit, loss: &LossConfig, faults: &FaultAssignment, rng: &mut R) -> Result<ShotRecord> {
    if loss.fingerprint != c.fingerprint() || loss.site_status.len() != c.sites().len() {
        return Err(Error::ProvenanceMismatch("loss configuration".into()));
    }
    if faults.fingerprint != c.fingerprint() || faults.faults.len() != c.sites().len() {
        return Err(Error::ProvenanceMismatch("fault assignment".into()));
    }
    let mut t = Tableau::new(c.num_qubits());
    let mut absent = vec![false; c.num_qubits()];
    let mut raw = Vec::with_capacity(c.num_measurements());
    let mut bits = Vec::with_capacity(c.num_measurements());
    let mut heralds = Vec::new();

    for (i, op) in c.operations.iter().enumerate() {
        let q = op.targets[0];
        match op.kind {
            OpKind::Prep0 | OpKind::PrepPlus => {
                absent[q as usize] = false;
                t.reset(q as usize, rng);
                if op.kind == OpKind::PrepPlus {
                    t.h(q as usize);
                }
            }
            OpKind::Hadamard => {
                if !absent[q as usize] {
                    t.h(q as usize);
                }
            }
            OpKind::Cz => {
                let s = c.site_of_op(i).expect("cz has a site") as usize;
                let [a, b] = op.targets;
                let fault = faults.faults[s];
                match loss.site_status[s] {
                    SiteStatus::Clean => {
                        if absent[a as usize] || absent[b as usize] {
                            return Err(Error::ProvenanceMismatch(format!("site {} marked clean with an absent operand", c.sites()[s].id)));
                        }
                        t.cz(a as usize, b as usize);
                        apply(&mut t, a, fault.0);
                        apply(&mut t, b, fault.1);
                    }
                    SiteStatus::Bypassed => {}
                    SiteStatus::Event(e) => {
                        let ev = loss.events.get(e as usize).ok_or_else(|| Error::ProvenanceMismatch("dangling loss event".into()))?;
                        for &l in &ev.lost {
                            absent[l as usize] = true;
                        }
                        if !absent[a as usize] {
                            apply(&mut t, a, fault.0);
                        }
                        if !absent[b as usize] {
                            apply(&mut t, b, fault.1);
                        }
                    }
                }
            }
            OpKind::MeasureZ | OpKind::MeasureX | OpKind::LduMeasure => {
                if absent[q as usize] {
                    raw.push(None);
                    bits.push(rng.gen::<bool>());
                    heralds.push(Herald { qubit: q, round: op.round });
                } else {
                    let (v, _) = if op.kind == OpKind::MeasureZ { t.measure_z(q as usize, rng) } else { t.measure_x(q as usize, rng) };
                    raw.push(Some(v));
                    bits.push(v);
                }
            }
        }
    }

    let parity = |refs: &[u32]| refs.iter().fold(false, |acc, &m| acc ^ bits[m as usize]);
    Ok(ShotRecord {
        detectors: c.detectors.iter().map(|d| parity(&d.measurement_refs)).collect(),
        observable: parity(&c.observable.measurement_refs),
        loss_syndrome: heralds,
        raw_measurements: raw,
    })
}

/// Sample losses and faults for shot `shot` and run it.
pub fn simulate_shot(c: &Circuit, params: &NoiseParams, seed: u64, shot: u64) -> ShotRecord {
    let mut rng = shot_rng(seed, shot);
    let loss = sample_losses(c, params, &mut rng);
    let faults = sample_pauli_faults(c, params, &loss, &mut rng);
    run_shot(c, &loss, &faults, &mut rng).expect("configuration sampled from the same circuit")
}

pub fn run_noiseless(c: &Circuit, seed: u64) -> ShotRecord {
    simulate_shot(c, &NoiseParams::noiseless(), seed, 0)
}

/// Simulate `n_shots` shots; record `i` depends only on `(seed, i)`.
pub fn run_batch(c: &Circuit, params: &NoiseParams, n_shots: usize, seed: u64) -> Vec<ShotRecord> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n_shots as u64).into_par_iter().map(|s| simulate_shot(c, params, seed, s)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n_shots as u64).map(|s| simulate_shot(c, params, seed, s)).collect()
    }
}

/// CSV sink: `detectors_hex,observable,heralds` with heralds as `q@r` joined by `;`.
pub fn write_records<W: Write>(out: W, records: &[ShotRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["detectors", "observable", "heralds"]).map_err(|e| Error::Io(e.to_string()))?;
    for r in records {
        let heralds: Vec<String> = r.loss_syndrome.iter().map(|h| format!("{}@{}", h.qubit, h.round)).collect();
        w.write_record([r.detectors_hex(), u8::from(r.observable).to_string(), heralds.join(";")])
            .map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_memory_circuit, DetectorBasis, SiteContext};
    use crate::pauli::TwoQubitPauli;

    #[test]
    fn noiseless_detectors_are_zero() {
        for (d, r) in [(3, 1), (3, 3), (5, 2)] {
            let c = build_memory_circuit(d, r).unwrap();
            for seed in 0..20 {
                let rec = run_noiseless(&c, seed);
                assert!(rec.detectors.iter().all(|&b| !b));
                assert!(!rec.observable);
                assert!(rec.loss_syndrome.is_empty());
            }
        }
    }

    #[test]
    fn empty_batch() {
        let c = build_memory_circuit(3, 1).unwrap();
        assert!(run_batch(&c, &NoiseParams::noiseless(), 0, 1).is_empty());
    }

    #[test]
    fn batch_is_deterministic() {
        let c = build_memory_circuit(3, 2).unwrap();
        let p = NoiseParams::new(0.02, 0.5, 0.01).unwrap();
        assert_eq!(run_batch(&c, &p, 50, 4), run_batch(&c, &p, 50, 4));
    }

    #[test]
    fn provenance_is_checked() {
        let c = build_memory_circuit(3, 1).unwrap();
        let other = build_memory_circuit(3, 2).unwrap();
        let loss = LossConfig::none(&other);
        let faults = FaultAssignment::none(&c);
        assert!(matches!(run_shot(&c, &loss, &faults, &mut shot_rng(0, 0)), Err(Error::ProvenanceMismatch(_))));
    }

    #[test]
    fn z_fault_on_bulk_data_flips_two_x_detectors() {
        let c = build_memory_circuit(3, 3).unwrap();
        // X on the fresh atom right after the round-0 LDU gate of the centre qubit
        // becomes Z on the round-1 data atom after the closing Hadamard.
        let s = c.sites().iter().position(|s| s.id.context == SiteContext::LduTeleport && s.id.round == 0 && s.id.gate_index == 4).unwrap();
        let mut faults = FaultAssignment::none(&c);
        faults.faults[s] = TwoQubitPauli(Pauli::I, Pauli::X);
        let rec = run_shot(&c, &LossConfig::none(&c), &faults, &mut shot_rng(0, 0)).unwrap();
        let flipped = rec.flipped_detectors();
        assert_eq!(flipped.len(), 2);
        for d in flipped {
            let det = &c.detectors[d as usize];
            assert_eq!(det.basis, DetectorBasis::X);
            assert_eq!(det.round, 1);
        }
    }

    #[test]
    fn correlated_loss_heralded_at_next_measurements() {
        let c = build_memory_circuit(3, 2).unwrap();
        let s = 0u32;
        let [a, b] = c.sites()[0].operands;
        let loss = LossConfig::injected(&c, &[(s, vec![a, b])]);
        let rec = run_shot(&c, &loss, &FaultAssignment::none(&c), &mut shot_rng(0, 0)).unwrap();
        assert!(rec.loss_syndrome.contains(&Herald { qubit: a, round: 0 }));
        assert!(rec.loss_syndrome.contains(&Herald { qubit: b, round: 0 }));
        assert_eq!(rec.raw_measurements.iter().filter(|m| m.is_none()).count(), rec.loss_syndrome.len());
    }

    #[test]
    fn heralds_complete_and_sound() {
        let c = build_memory_circuit(3, 3).unwrap();
        let p = NoiseParams::new(0.03, 0.5, 0.0).unwrap();
        for shot in 0..300 {
            let mut rng = shot_rng(8, shot);
            let loss = sample_losses(&c, &p, &mut rng);
            let faults = sample_pauli_faults(&c, &p, &loss, &mut rng);
            let rec = run_shot(&c, &loss, &faults, &mut rng).unwrap();
            let mut expected: Vec<Herald> = loss
                .absences
                .iter()
                .map(|a| {
                    let op = c.operations.iter().find(|o| o.kind.is_measurement() && o.targets[0] == a.qubit && o.time_step == a.until).unwrap();
                    Herald { qubit: a.qubit, round: op.round }
                })
                .collect();
            let mut got = rec.loss_syndrome.clone();
            expected.sort();
            got.sort();
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn hex_and_csv_sink() {
        let rec = ShotRecord {
            detectors: vec![true, false, false, false, false, true],
            observable: true,
            loss_syndrome: vec![Herald { qubit: 3, round: 1 }],
            raw_measurements: vec![],
        };
        assert_eq!(rec.detectors_hex(), "21");
        let mut buf = Vec::new();
        write_records(&mut buf, &[rec]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "detectors,observable,heralds\n21,1,3@1\n");
    }
}
