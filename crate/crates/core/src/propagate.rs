//! Forward Pauli-frame propagation of single-qubit faults through the ideal
//! circuit, 64 faults per pass.

use crate::circuit::{Circuit, OpKind};
use crate::pauli::Pauli;

/// Detectors flipped by a fault, sorted, plus whether it flips the observable.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Effect {
    pub detectors: Vec<u32>,
    pub observable: bool,
}

impl Effect {
    pub fn is_empty(&self) -> bool {
        self.detectors.is_empty() && !self.observable
    }

    /// Combined effect of two faults (symmetric difference).
    pub fn xor(&self, other: &Effect) -> Effect {
        let (a, b) = (&self.detectors, &other.detectors);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) if x == y => {
                    i += 1;
                    j += 1;
                }
                (Some(x), Some(y)) if x < y => {
                    out.push(*x);
                    i += 1;
                }
                (Some(x), None) => {
                    out.push(*x);
                    i += 1;
                }
                (_, Some(y)) => {
                    out.push(*y);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Effect { detectors: out, observable: self.observable ^ other.observable }
    }
}

/// A Pauli injected on `qubit` right before (`after == false`) or right after
/// operation `op`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Injection {
    pub op: usize,
    pub after: bool,
    pub qubit: u32,
    pub pauli: Pauli,
}

/// Propagate each injection independently and report its effect.
pub fn propagate(c: &Circuit, injections: &[Injection]) -> Vec<Effect> {
    let mut out = Vec::with_capacity(injections.len());
    for chunk in injections.chunks(64) {
        out.extend(propagate_lanes(c, chunk));
    }
    out
}

fn propagate_lanes(c: &Circuit, injections: &[Injection]) -> Vec<Effect> {
    let nq = c.num_qubits();
    let mut xs = vec![0u64; nq];
    let mut zs = vec![0u64; nq];
    let mut flips = Vec::with_capacity(c.num_measurements());
    // Injections sorted by insertion point: (op, after) ordering.
    let mut order: Vec<usize> = (0..injections.len()).collect();
    order.sort_by_key(|&i| (injections[i].op, injections[i].after));
    let mut next = 0;
    let inject = |xs: &mut [u64], zs: &mut [u64], lane: usize| {
        let inj = injections[lane];
        let bit = 1u64 << lane;
        if inj.pauli.has_x() {
            xs[inj.qubit as usize] ^= bit;
        }
        if inj.pauli.has_z() {
            zs[inj.qubit as usize] ^= bit;
        }
    };
    for (i, op) in c.operations.iter().enumerate() {
        while next < order.len() && injections[order[next]].op == i && !injections[order[next]].after {
            inject(&mut xs, &mut zs, order[next]);
            next += 1;
        }
        let q = op.targets[0] as usize;
        match op.kind {
            OpKind::Prep0 | OpKind::PrepPlus => {
                xs[q] = 0;
                zs[q] = 0;
            }
            OpKind::Hadamard => std::mem::swap(&mut xs[q], &mut zs[q]),
            OpKind::Cz => {
                let b = op.targets[1] as usize;
                zs[q] ^= xs[b];
                zs[b] ^= xs[q];
            }
            OpKind::MeasureZ => flips.push(xs[q]),
            OpKind::MeasureX | OpKind::LduMeasure => flips.push(zs[q]),
        }
        while next < order.len() && injections[order[next]].op == i {
            inject(&mut xs, &mut zs, order[next]);
            next += 1;
        }
    }
    let parity = |refs: &[u32]| refs.iter().fold(0u64, |acc, &m| acc ^ flips[m as usize]);
    let det_bits: Vec<u64> = c.detectors.iter().map(|d| parity(&d.measurement_refs)).collect();
    let obs = parity(&c.observable.measurement_refs);
    (0..injections.len())
        .map(|lane| Effect {
            detectors: det_bits.iter().enumerate().filter(|(_, &b)| b >> lane & 1 == 1).map(|(d, _)| d as u32).collect(),
            observable: obs >> lane & 1 == 1,
        })
        .collect()
}

/// Effects of X and Z on either operand of every CZ site, before and after the
/// gate. Indexed by `[site][slot][after][basis]` with basis 0 = X, 1 = Z.
#[derive(Debug, Clone)]
pub struct SiteEffects {
    table: Vec<[[[Effect; 2]; 2]; 2]>,
}

impl SiteEffects {
    pub fn new(c: &Circuit) -> Self {
        let mut injections = Vec::with_capacity(c.sites().len() * 8);
        for s in c.sites() {
            for slot in 0..2 {
                for after in [false, true] {
                    for pauli in [Pauli::X, Pauli::Z] {
                        injections.push(Injection { op: s.op_index, after, qubit: s.operands[slot], pauli });
                    }
                }
            }
        }
        let effects = propagate(c, &injections);
        let mut it = effects.into_iter();
        let table = c
            .sites()
            .iter()
            .map(|_| {
                std::array::from_fn(|_| std::array::from_fn(|_| std::array::from_fn(|_| it.next().expect("one effect per injection"))))
            })
            .collect();
        SiteEffects { table }
    }

    /// Effect of Pauli `p` on operand `slot` of site `site`.
    pub fn single(&self, site: usize, slot: usize, after: bool, p: Pauli) -> Effect {
        let e = &self.table[site][slot][after as usize];
        match p {
            Pauli::I => Effect::default(),
            Pauli::X => e[0].clone(),
            Pauli::Z => e[1].clone(),
            Pauli::Y => e[0].xor(&e[1]),
        }
    }

    /// Effect of a two-qubit Pauli right after site `site`.
    pub fn pair(&self, site: usize, p: crate::pauli::TwoQubitPauli) -> Effect {
        self.single(site, 0, true, p.0).xor(&self.single(site, 1, true, p.1))
    }
}
