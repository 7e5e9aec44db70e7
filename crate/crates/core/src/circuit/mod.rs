//! Noisy-Clifford circuit representation and the surface-code memory experiment
//! with one teleportation loss-detection unit (LDU) per data qubit per round.
//!
//! Physical qubits come in three groups: two banks of `d²` atom slots that take
//! turns holding the data (bank 0 is labelled [`Role::Data`], bank 1
//! [`Role::Fresh`]) and one ancilla per stabilizer. Each LDU prepares the idle
//! bank in |+⟩, entangles it with the current data bank through a single CZ,
//! measures the old data atom in the X basis and applies a Hadamard to the
//! fresh atom. The fresh atom then carries `Z^m |ψ⟩`; the byproduct `Z^m` is
//! never corrected, instead the outcome `m` is folded into the next round's
//! X-type detectors.

mod layout;
mod text;
mod validate;

pub use layout::{Corner, Layout, Stabilizer, StabilizerKind};
pub use validate::{validate, Diagnostic};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    Data,
    Ancilla,
    Fresh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QubitId {
    pub index: u32,
    pub role: Role,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OpKind {
    Prep0,
    PrepPlus,
    Hadamard,
    Cz,
    MeasureZ,
    MeasureX,
    /// X-basis measurement of the outgoing data atom inside an LDU.
    LduMeasure,
}

impl OpKind {
    pub fn arity(self) -> usize {
        if self == OpKind::Cz {
            2
        } else {
            1
        }
    }

    pub fn is_measurement(self) -> bool {
        matches!(self, OpKind::MeasureZ | OpKind::MeasureX | OpKind::LduMeasure)
    }

    pub fn is_preparation(self) -> bool {
        matches!(self, OpKind::Prep0 | OpKind::PrepPlus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SiteContext {
    SyndromeExtraction,
    LduTeleport,
}

/// Identity of one entangling gate: where atom loss can happen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CzSiteId {
    pub round: u32,
    pub gate_index: u32,
    pub context: SiteContext,
}

impl fmt::Display for CzSiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ctx = match self.context {
            SiteContext::SyndromeExtraction => "syndrome",
            SiteContext::LduTeleport => "ldu",
        };
        write!(f, "{}:{}:{}", self.round, ctx, self.gate_index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Operation {
    pub kind: OpKind,
    /// Second entry is only meaningful for two-qubit gates.
    pub targets: [u32; 2],
    pub time_step: u32,
    pub round: u32,
    pub cz_site: Option<CzSiteId>,
}

impl Operation {
    pub fn single(kind: OpKind, q: u32, time_step: u32, round: u32) -> Self {
        Operation { kind, targets: [q, q], time_step, round, cz_site: None }
    }

    pub fn cz(a: u32, b: u32, time_step: u32, site: CzSiteId) -> Self {
        Operation { kind: OpKind::Cz, targets: [a, b], time_step, round: site.round, cz_site: Some(site) }
    }

    pub fn operands(&self) -> &[u32] {
        &self.targets[..self.kind.arity()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DetectorBasis {
    X,
    Z,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectorDef {
    /// Indices into the circuit's measurement sequence whose parity is the detector.
    pub measurement_refs: Vec<u32>,
    pub stabilizer: Option<u32>,
    pub round: u32,
    pub basis: DetectorBasis,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ObservableDef {
    pub measurement_refs: Vec<u32>,
}

/// One entangling gate with its position in the circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SiteInfo {
    pub id: CzSiteId,
    pub op_index: usize,
    pub operands: [u32; 2],
    /// Atom (see [`Atom`]) occupying each operand slot at this gate.
    pub atoms: [Option<u32>; 2],
}

/// One physical atom instance: everything between a preparation of a qubit slot
/// and the measurement that reports it present or lost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub qubit: u32,
    pub round: u32,
    pub measurement: u32,
    /// Dense site indices of every CZ this atom takes part in, in time order.
    pub window: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub distance: usize,
    pub rounds: usize,
    pub qubits: Vec<QubitId>,
    pub operations: Vec<Operation>,
    pub detectors: Vec<DetectorDef>,
    pub observable: ObservableDef,
    measurement_ops: Vec<usize>,
    sites: Vec<SiteInfo>,
    site_of_op: Vec<Option<u32>>,
    atoms: Vec<Atom>,
    atom_lookup: HashMap<(u32, u32), u32>,
    fingerprint: u64,
}

impl Circuit {
    /// Assemble a circuit and compute its derived indices. No invariants are
    /// enforced here; see [`validate`].
    pub fn from_parts(
        distance: usize,
        rounds: usize,
        qubits: Vec<QubitId>,
        operations: Vec<Operation>,
        detectors: Vec<DetectorDef>,
        observable: ObservableDef,
    ) -> Self {
        let mut measurement_ops = Vec::new();
        let mut sites = Vec::new();
        let mut site_of_op = vec![None; operations.len()];
        for (i, op) in operations.iter().enumerate() {
            if op.kind.is_measurement() {
                measurement_ops.push(i);
            }
            if op.kind == OpKind::Cz {
                let id = op.cz_site.unwrap_or(CzSiteId {
                    round: op.round,
                    gate_index: sites.len() as u32,
                    context: SiteContext::SyndromeExtraction,
                });
                site_of_op[i] = Some(sites.len() as u32);
                sites.push(SiteInfo { id, op_index: i, operands: op.targets, atoms: [None, None] });
            }
        }

        // Walk the circuit once, collecting each slot's entangling gates until it
        // is measured; a preparation starts a new atom.
        let nq = qubits.iter().map(|q| q.index as usize + 1).max().unwrap_or(0);
        let mut pending: Vec<Vec<u32>> = vec![Vec::new(); nq];
        let mut atoms = Vec::new();
        let mut atom_lookup = HashMap::new();
        let mut meas_counter = 0u32;
        for (i, op) in operations.iter().enumerate() {
            match op.kind {
                k if k.is_preparation() => {
                    if let Some(p) = pending.get_mut(op.targets[0] as usize) {
                        p.clear();
                    }
                }
                OpKind::Cz => {
                    let s = site_of_op[i].expect("cz has a site");
                    for &q in op.operands() {
                        if let Some(p) = pending.get_mut(q as usize) {
                            p.push(s);
                        }
                    }
                }
                k if k.is_measurement() => {
                    let q = op.targets[0];
                    let window = pending.get_mut(q as usize).map(std::mem::take).unwrap_or_default();
                    let atom_index = atoms.len() as u32;
                    for &s in &window {
                        let site: &mut SiteInfo = &mut sites[s as usize];
                        let slot = if site.operands[0] == q { 0 } else { 1 };
                        site.atoms[slot] = Some(atom_index);
                    }
                    atom_lookup.insert((q, op.round), atom_index);
                    atoms.push(Atom { qubit: q, round: op.round, measurement: meas_counter, window });
                    meas_counter += 1;
                }
                _ => {}
            }
        }

        let mut hasher = std::collections::hash_map::DefaultHasher::new();
        distance.hash(&mut hasher);
        rounds.hash(&mut hasher);
        qubits.hash(&mut hasher);
        for op in &operations {
            (op.kind, op.targets, op.time_step, op.round, op.cz_site).hash(&mut hasher);
        }
        for det in &detectors {
            det.measurement_refs.hash(&mut hasher);
        }
        observable.measurement_refs.hash(&mut hasher);

        Circuit {
            distance,
            rounds,
            qubits,
            operations,
            detectors,
            observable,
            measurement_ops,
            sites,
            site_of_op,
            atoms,
            atom_lookup,
            fingerprint: hasher.finish(),
        }
    }

    pub fn empty() -> Self {
        Circuit::from_parts(0, 0, Vec::new(), Vec::new(), Vec::new(), ObservableDef::default())
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.iter().map(|q| q.index as usize + 1).max().unwrap_or(0)
    }

    pub fn num_measurements(&self) -> usize {
        self.measurement_ops.len()
    }

    pub fn num_detectors(&self) -> usize {
        self.detectors.len()
    }

    pub fn measurement_op(&self, m: usize) -> Option<&Operation> {
        self.measurement_ops.get(m).map(|&i| &self.operations[i])
    }

    pub fn measurement_ops(&self) -> &[usize] {
        &self.measurement_ops
    }

    pub fn sites(&self) -> &[SiteInfo] {
        &self.sites
    }

    pub fn site_of_op(&self, op_index: usize) -> Option<u32> {
        self.site_of_op[op_index]
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom_at(&self, qubit: u32, round: u32) -> Option<u32> {
        self.atom_lookup.get(&(qubit, round)).copied()
    }

    pub fn data_count(&self) -> usize {
        self.distance * self.distance
    }

    /// Hash over the operation list, used to tie sampled noise to its circuit.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn site_index(&self, id: CzSiteId) -> Option<usize> {
        self.sites.iter().position(|s| s.id == id)
    }
}

/// List every entangling gate in circuit order with its operand pair.
pub fn enumerate_cz_sites(c: &Circuit) -> Vec<(CzSiteId, [u32; 2])> {
    c.sites().iter().map(|s| (s.id, s.operands)).collect()
}

/// Build the distance-`d` memory experiment: logical |0⟩ preparation, `rounds`
/// cycles of (X and Z stabilizer extraction, one LDU per data qubit) and a
/// final transversal Z measurement.
pub fn build_memory_circuit(d: usize, rounds: usize) -> Result<Circuit> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::InvalidDistance(d));
    }
    if rounds < 1 {
        return Err(Error::InvalidRounds(rounds));
    }
    let layout = Layout::rotated(d);
    let n = layout.data_count() as u32;
    let m = layout.stabilizers.len() as u32;

    let mut qubits = Vec::with_capacity((2 * n + m) as usize);
    qubits.extend((0..n).map(|i| QubitId { index: i, role: Role::Data }));
    qubits.extend((n..2 * n).map(|i| QubitId { index: i, role: Role::Fresh }));
    qubits.extend((2 * n..2 * n + m).map(|i| QubitId { index: i, role: Role::Ancilla }));
    let ancilla = |s: usize| 2 * n + s as u32;

    let mut ops = Vec::new();
    let mut t = 0u32;
    let mut meas = 0u32;
    let mut anc_meas = vec![vec![0u32; m as usize]; rounds];
    let mut ldu_meas = vec![vec![0u32; n as usize]; rounds];

    for p in 0..n {
        ops.push(Operation::single(OpKind::Prep0, p, t, 0));
    }
    let mut bank = 0u32;
    for r in 0..rounds {
        let r32 = r as u32;
        let data = |p: usize| bank * n + p as u32;
        t += 1;
        for s in 0..m as usize {
            ops.push(Operation::single(OpKind::PrepPlus, ancilla(s), t, r32));
        }
        let mut gate_index = 0u32;
        for step in 0..4 {
            let x_partners: Vec<u32> = layout
                .stabilizers
                .iter()
                .filter(|s| s.kind == StabilizerKind::X)
                .filter_map(|s| s.schedule[step])
                .map(data)
                .collect();
            t += 1;
            for &q in &x_partners {
                ops.push(Operation::single(OpKind::Hadamard, q, t, r32));
            }
            t += 1;
            for (s, stab) in layout.stabilizers.iter().enumerate() {
                if let Some(p) = stab.schedule[step] {
                    let site = CzSiteId { round: r32, gate_index, context: SiteContext::SyndromeExtraction };
                    ops.push(Operation::cz(ancilla(s), data(p), t, site));
                    gate_index += 1;
                }
            }
            t += 1;
            for &q in &x_partners {
                ops.push(Operation::single(OpKind::Hadamard, q, t, r32));
            }
        }
        t += 1;
        for s in 0..m as usize {
            ops.push(Operation::single(OpKind::MeasureX, ancilla(s), t, r32));
            anc_meas[r][s] = meas;
            meas += 1;
        }

        let fresh = |p: usize| (1 - bank) * n + p as u32;
        t += 1;
        for p in 0..n as usize {
            ops.push(Operation::single(OpKind::PrepPlus, fresh(p), t, r32));
        }
        t += 1;
        for p in 0..n as usize {
            let site = CzSiteId { round: r32, gate_index: p as u32, context: SiteContext::LduTeleport };
            ops.push(Operation::cz(data(p), fresh(p), t, site));
        }
        t += 1;
        for p in 0..n as usize {
            ops.push(Operation::single(OpKind::LduMeasure, data(p), t, r32));
            ldu_meas[r][p] = meas;
            meas += 1;
            ops.push(Operation::single(OpKind::Hadamard, fresh(p), t, r32));
        }
        bank = 1 - bank;
    }
    t += 1;
    let mut final_meas = vec![0u32; n as usize];
    for p in 0..n {
        ops.push(Operation::single(OpKind::MeasureZ, bank * n + p, t, rounds as u32));
        final_meas[p as usize] = meas;
        meas += 1;
    }

    let mut detectors = Vec::new();
    for r in 0..rounds {
        for (s, stab) in layout.stabilizers.iter().enumerate() {
            let basis = match stab.kind {
                StabilizerKind::X => DetectorBasis::X,
                StabilizerKind::Z => DetectorBasis::Z,
            };
            let mut refs = vec![anc_meas[r][s]];
            match (stab.kind, r) {
                (StabilizerKind::X, 0) => continue,
                (StabilizerKind::Z, 0) => {}
                (StabilizerKind::Z, _) => refs.push(anc_meas[r - 1][s]),
                (StabilizerKind::X, _) => {
                    refs.push(anc_meas[r - 1][s]);
                    refs.extend(stab.support().map(|p| ldu_meas[r - 1][p]));
                }
            }
            refs.sort_unstable();
            detectors.push(DetectorDef { measurement_refs: refs, stabilizer: Some(s as u32), round: r as u32, basis });
        }
    }
    for (s, stab) in layout.stabilizers.iter().enumerate() {
        if stab.kind != StabilizerKind::Z {
            continue;
        }
        let mut refs: Vec<u32> = stab.support().map(|p| final_meas[p]).collect();
        refs.push(anc_meas[rounds - 1][s]);
        refs.sort_unstable();
        detectors.push(DetectorDef {
            measurement_refs: refs,
            stabilizer: Some(s as u32),
            round: rounds as u32,
            basis: DetectorBasis::Z,
        });
    }
    let observable = ObservableDef { measurement_refs: layout.logical_z.iter().map(|&p| final_meas[p]).collect() };

    Ok(Circuit::from_parts(d, rounds, qubits, ops, detectors, observable))
}

/// Number of detectors produced by [`build_memory_circuit`]: Z detectors every
/// round plus the final readout comparison, X detectors from the second round.
pub fn memory_detector_count(d: usize, rounds: usize) -> usize {
    (d * d - 1) * rounds
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(build_memory_circuit(4, 1).unwrap_err(), Error::InvalidDistance(4));
        assert_eq!(build_memory_circuit(1, 1).unwrap_err(), Error::InvalidDistance(1));
        assert_eq!(build_memory_circuit(3, 0).unwrap_err(), Error::InvalidRounds(0));
    }

    #[test]
    fn data_count_is_distance_squared() {
        let c = build_memory_circuit(3, 1).unwrap();
        assert_eq!(c.qubits.iter().filter(|q| q.role == Role::Data).count(), 9);
        assert_eq!(c.data_count(), 9);
    }

    #[test]
    fn syndrome_sites_per_round() {
        let c = build_memory_circuit(3, 2).unwrap();
        for r in 0..2 {
            let n = enumerate_cz_sites(&c)
                .iter()
                .filter(|(id, _)| id.round == r && id.context == SiteContext::SyndromeExtraction)
                .count();
            assert_eq!(n, 24);
        }
    }

    #[test]
    fn ldu_sites_one_per_data_qubit() {
        let c = build_memory_circuit(3, 1).unwrap();
        let ldu = enumerate_cz_sites(&c).iter().filter(|(id, _)| id.context == SiteContext::LduTeleport).count();
        assert_eq!(ldu, 9);
    }

    #[test]
    fn site_rounds_within_range() {
        let c = build_memory_circuit(3, 2).unwrap();
        assert!(enumerate_cz_sites(&c).iter().all(|(id, _)| id.round < 2));
    }

    #[test]
    fn empty_circuit_has_no_sites() {
        assert!(enumerate_cz_sites(&Circuit::empty()).is_empty());
    }

    #[test]
    fn site_enumeration_is_bijective() {
        let c = build_memory_circuit(5, 3).unwrap();
        let sites = enumerate_cz_sites(&c);
        let cz_ops = c.operations.iter().filter(|o| o.kind == OpKind::Cz).count();
        assert_eq!(sites.len(), cz_ops);
        let unique: std::collections::HashSet<_> = sites.iter().map(|(id, _)| *id).collect();
        assert_eq!(unique.len(), cz_ops);
    }

    #[test]
    fn detector_count_regression() {
        for (d, r) in [(3, 1), (3, 3), (5, 5), (7, 2)] {
            let c = build_memory_circuit(d, r).unwrap();
            assert_eq!(c.num_detectors(), memory_detector_count(d, r));
        }
        assert_eq!(build_memory_circuit(3, 3).unwrap().num_detectors(), 24);
    }

    #[test]
    fn atom_windows() {
        let c = build_memory_circuit(3, 2).unwrap();
        // Round-1 data atom at position 4: LDU-0 as fresh, four syndrome gates, LDU-1.
        let q = 9 + 4;
        let atom = &c.atoms()[c.atom_at(q, 1).unwrap() as usize];
        assert_eq!(atom.window.len(), 6);
        let first = c.sites()[atom.window[0] as usize].id;
        assert_eq!(first.context, SiteContext::LduTeleport);
        assert_eq!(first.round, 0);
        // Final-readout atom only saw the last LDU.
        let fin = &c.atoms()[c.atom_at(4, 2).unwrap() as usize];
        assert_eq!(fin.window.len(), 1);
        // Every site has both operand atoms resolved.
        assert!(c.sites().iter().all(|s| s.atoms.iter().all(Option::is_some)));
        assert_eq!(c.atoms().len(), c.num_measurements());
    }

    #[test]
    fn time_steps_non_decreasing() {
        let c = build_memory_circuit(5, 2).unwrap();
        assert!(c.operations.windows(2).all(|w| w[0].time_step <= w[1].time_step));
    }
}
