//! Gate-by-gate correlated atom loss and the Pauli channels that accompany it.
//!
//! At every CZ, with both atoms present, one atom (chosen uniformly) is lost
//! with probability `p_loss`; given that, its partner is lost too with
//! probability `p_corr`, otherwise the partner survives and receives the
//! remaining-atom channel. An atom that meets an already-absent partner at a
//! syndrome-extraction CZ is lost with certainty. Without loss the gate is
//! followed by two-qubit depolarizing noise of strength `p_depol`.

use crate::circuit::{Circuit, OpKind, SiteContext};
use crate::error::{check_probability, Error, Result};
use crate::pauli::{Pauli, TwoQubitPauli};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// Probability that an atom is lost during one CZ gate.
    pub p_loss: f64,
    /// Probability that the partner is also lost, given a loss at the gate.
    pub p_corr: f64,
    /// Two-qubit depolarizing probability after a loss-free CZ.
    pub p_depol: f64,
}

impl NoiseParams {
    pub fn new(p_loss: f64, p_corr: f64, p_depol: f64) -> Result<Self> {
        check_probability("p_loss", p_loss)?;
        check_probability("p_corr", p_corr)?;
        check_probability("p_depol", p_depol)?;
        Ok(NoiseParams { p_loss, p_corr, p_depol })
    }

    pub fn noiseless() -> Self {
        NoiseParams { p_loss: 0.0, p_corr: 0.0, p_depol: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        NoiseParams::new(self.p_loss, self.p_corr, self.p_depol).map(|_| ())
    }
}

/// Per-atom probability of being lost in a gate where both atoms start present.
pub fn marginal_loss_probability(p_loss: f64, p_corr: f64) -> f64 {
    p_loss * (1.0 + p_corr) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliChannel {
    pub p_i: f64,
    pub p_x: f64,
    pub p_y: f64,
    pub p_z: f64,
}

impl PauliChannel {
    pub fn total(&self) -> f64 {
        self.p_i + self.p_x + self.p_y + self.p_z
    }

    pub fn probability(&self, p: Pauli) -> f64 {
        match p {
            Pauli::I => self.p_i,
            Pauli::X => self.p_x,
            Pauli::Y => self.p_y,
            Pauli::Z => self.p_z,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Pauli {
        let u: f64 = rng.gen();
        let mut acc = self.p_x;
        if u < acc {
            return Pauli::X;
        }
        acc += self.p_y;
        if u < acc {
            return Pauli::Y;
        }
        acc += self.p_z;
        if u < acc {
            return Pauli::Z;
        }
        Pauli::I
    }
}

/// Channel on the atom left behind when its partner is lost: 3/8 I, 1/8 X, 1/8 Y, 3/8 Z.
pub fn remaining_atom_channel() -> PauliChannel {
    PauliChannel { p_i: 3.0 / 8.0, p_x: 1.0 / 8.0, p_y: 1.0 / 8.0, p_z: 3.0 / 8.0 }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMatrix2(pub [[Complex64; 2]; 2]);

impl ComplexMatrix2 {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        ComplexMatrix2([[a, b], [c, d]])
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        ComplexMatrix2::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn pauli(p: Pauli) -> Self {
        let i = Complex64::i();
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        match p {
            Pauli::I => ComplexMatrix2::new(o, z, z, o),
            Pauli::X => ComplexMatrix2::new(z, o, o, z),
            Pauli::Y => ComplexMatrix2::new(z, -i, i, z),
            Pauli::Z => ComplexMatrix2::new(o, z, z, -o),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        ComplexMatrix2(self.0.map(|row| row.map(|x| x * s)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        ComplexMatrix2(out)
    }

    pub fn adjoint(&self) -> Self {
        let a = &self.0;
        ComplexMatrix2([[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Kraus operators of the decay of a re-excited atom back into the qubit
/// subspace with an even 0/1 branching, with the Rydberg level identified with |1⟩:
/// `|0⟩⟨0|`, `|0⟩⟨1|/√2` and `|1⟩⟨1|/√2`.
pub fn decay_kraus() -> Vec<ComplexMatrix2> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        ComplexMatrix2::real(1.0, 0.0, 0.0, 0.0),
        ComplexMatrix2::real(0.0, h, 0.0, 0.0),
        ComplexMatrix2::real(0.0, 0.0, 0.0, h),
    ]
}

/// Pauli-twirl a single-qubit channel: `p_σ = Σ_k |Tr(σ† K_k)|² / 4`.
pub fn pauli_twirl(kraus: &[ComplexMatrix2]) -> Result<PauliChannel> {
    let mut sum = ComplexMatrix2::real(0.0, 0.0, 0.0, 0.0);
    for k in kraus {
        if !k.is_finite() {
            return Err(Error::NotTracePreserving { deviation: f64::INFINITY });
        }
        let kk = k.adjoint().mul(k);
        for i in 0..2 {
            for j in 0..2 {
                sum.0[i][j] += kk.0[i][j];
            }
        }
    }
    let ident = ComplexMatrix2::pauli(Pauli::I);
    let deviation = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| (sum.0[i][j] - ident.0[i][j]).norm())
        .fold(0.0, f64::max);
    if deviation > 1e-9 {
        return Err(Error::NotTracePreserving { deviation });
    }
    let weight = |p: Pauli| -> f64 {
        let s = ComplexMatrix2::pauli(p).adjoint();
        kraus.iter().map(|k| s.mul(k).trace().norm_sqr()).sum::<f64>() / 4.0
    };
    Ok(PauliChannel { p_i: weight(Pauli::I), p_x: weight(Pauli::X), p_y: weight(Pauli::Y), p_z: weight(Pauli::Z) })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LossEvent {
    pub site: crate::circuit::CzSiteId,
    pub site_index: u32,
    /// Qubits whose atoms disappear at this gate (one or two).
    pub lost: Vec<u32>,
    pub first_lost: u32,
    /// The partner was already absent when the gate started.
    pub forced: bool,
}

impl LossEvent {
    /// The partner that stays behind after an uncorrelated loss.
    pub fn survivor(&self, operands: [u32; 2]) -> Option<u32> {
        if self.forced || self.lost.len() != 1 {
            return None;
        }
        operands.into_iter().find(|&q| q != self.lost[0])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Absence {
    pub qubit: u32,
    /// Time step of the gate where the atom was lost.
    pub from: u32,
    /// Time step of the measurement that reports it lost.
    pub until: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SiteStatus {
    /// Both atoms present and nothing lost: the gate acts and may depolarize.
    Clean,
    /// Loss event number `n` happened here.
    Event(u32),
    /// At least one operand was absent and nothing new was lost.
    Bypassed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LossConfig {
    pub events: Vec<LossEvent>,
    pub absences: Vec<Absence>,
    pub site_status: Vec<SiteStatus>,
    pub fingerprint: u64,
}

impl LossConfig {
    pub fn none(c: &Circuit) -> Self {
        LossConfig {
            events: Vec::new(),
            absences: Vec::new(),
            site_status: vec![SiteStatus::Clean; c.sites().len()],
            fingerprint: c.fingerprint(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn lost_atom_count(&self) -> usize {
        self.events.iter().map(|e| e.lost.len()).sum()
    }

    /// One line per event: `site=<id> lost=<q>[,<q>] first=<q> forced=<bool>`.
    pub fn to_records(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            let lost: Vec<String> = e.lost.iter().map(|q| q.to_string()).collect();
            let _ = writeln!(out, "site={} lost={} first={} forced={}", e.site, lost.join(","), e.first_lost, e.forced);
        }
        out
    }
}

/// Sample gate-by-gate loss events for one shot.
///
/// A data atom that is already absent when its LDU gate runs leaves the fresh
/// atom untouched: the LDU then reloads the slot rather than propagating the loss.
pub fn sample_losses<R: Rng + ?Sized>(c: &Circuit, params: &NoiseParams, rng: &mut R) -> LossConfig {
    if params.p_loss == 0.0 {
        return LossConfig::none(c);
    }
    replay_losses(c, |_, a, b| {
        if rng.gen::<f64>() >= params.p_loss {
            return None;
        }
        let first = if rng.gen::<bool>() { a } else { b };
        let other = if first == a { b } else { a };
        let lost = if rng.gen::<f64>() < params.p_corr { vec![first, other] } else { vec![first] };
        Some((first, lost))
    })
}

impl LossConfig {
    /// Loss configuration with spontaneous losses only at the given sites
    /// (`(site index, lost qubits)`, first entry triggering); forced losses
    /// follow from the usual rule.
    pub fn injected(c: &Circuit, losses: &[(u32, Vec<u32>)]) -> Self {
        replay_losses(c, |s, _, _| losses.iter().find(|(site, _)| *site == s).map(|(_, lost)| (lost[0], lost.clone())))
    }
}

/// Walk the circuit tracking presence. `spontaneous(site, a, b)` decides new
/// losses at gates where both atoms are present.
fn replay_losses(c: &Circuit, mut spontaneous: impl FnMut(u32, u32, u32) -> Option<(u32, Vec<u32>)>) -> LossConfig {
    let mut cfg = LossConfig::none(c);
    let mut absent_since: Vec<Option<u32>> = vec![None; c.num_qubits()];
    for (i, op) in c.operations.iter().enumerate() {
        match op.kind {
            OpKind::Prep0 | OpKind::PrepPlus => absent_since[op.targets[0] as usize] = None,
            OpKind::MeasureX | OpKind::MeasureZ | OpKind::LduMeasure => {
                let q = op.targets[0];
                if let Some(from) = absent_since[q as usize].take() {
                    cfg.absences.push(Absence { qubit: q, from, until: op.time_step });
                }
            }
            OpKind::Cz => {
                let s = c.site_of_op(i).expect("cz has a site");
                let site = c.sites()[s as usize];
                let [a, b] = op.targets;
                let gone = [absent_since[a as usize].is_some(), absent_since[b as usize].is_some()];
                let event = match gone {
                    [true, true] => None,
                    [true, false] | [false, true] => {
                        let present = if gone[0] { b } else { a };
                        if site.id.context == SiteContext::LduTeleport && gone[0] {
                            None
                        } else {
                            Some(LossEvent { site: site.id, site_index: s, lost: vec![present], first_lost: present, forced: true })
                        }
                    }
                    [false, false] => spontaneous(s, a, b).map(|(first_lost, lost)| LossEvent {
                        site: site.id,
                        site_index: s,
                        lost,
                        first_lost,
                        forced: false,
                    }),
                };
                cfg.site_status[s as usize] = match event {
                    Some(e) => {
                        for &q in &e.lost {
                            absent_since[q as usize] = Some(op.time_step);
                        }
                        cfg.events.push(e);
                        SiteStatus::Event(cfg.events.len() as u32 - 1)
                    }
                    None if gone.iter().any(|&g| g) => SiteStatus::Bypassed,
                    None => SiteStatus::Clean,
                };
            }
            OpKind::Hadamard => {}
        }
    }
    cfg
}

/// Pauli fault applied right after each CZ site, in operand order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultAssignment {
    pub faults: Vec<TwoQubitPauli>,
    pub fingerprint: u64,
}

impl FaultAssignment {
    pub fn none(c: &Circuit) -> Self {
        FaultAssignment { faults: vec![TwoQubitPauli::IDENTITY; c.sites().len()], fingerprint: c.fingerprint() }
    }

    pub fn count(&self) -> usize {
        self.faults.iter().filter(|p| !p.is_identity()).count()
    }
}

pub fn sample_depolarizing<R: Rng + ?Sized>(p: f64, rng: &mut R) -> TwoQubitPauli {
    if p > 0.0 && rng.gen::<f64>() < p {
        let k = rng.gen_range(1..16u8);
        TwoQubitPauli(Pauli::ALL[(k >> 2) as usize], Pauli::ALL[(k & 3) as usize])
    } else {
        TwoQubitPauli::IDENTITY
    }
}

/// Sample the Pauli faults that accompany a loss configuration: depolarizing
/// noise on loss-free gates, the remaining-atom channel on the survivor of an
/// uncorrelated loss, nothing where an operand was absent.
pub fn sample_pauli_faults<R: Rng + ?Sized>(
    c: &Circuit,
    params: &NoiseParams,
    loss: &LossConfig,
    rng: &mut R,
) -> FaultAssignment {
    let mut out = FaultAssignment::none(c);
    let survivor_channel = remaining_atom_channel();
    for (s, status) in loss.site_status.iter().enumerate() {
        out.faults[s] = match *status {
            SiteStatus::Clean => sample_depolarizing(params.p_depol, rng),
            SiteStatus::Bypassed => TwoQubitPauli::IDENTITY,
            SiteStatus::Event(e) => {
                let ops = c.sites()[s].operands;
                match loss.events[e as usize].survivor(ops) {
                    Some(q) => {
                        let p = survivor_channel.sample(rng);
                        if q == ops[0] {
                            TwoQubitPauli(p, Pauli::I)
                        } else {
                            TwoQubitPauli(Pauli::I, p)
                        }
                    }
                    None => TwoQubitPauli::IDENTITY,
                }
            }
        };
    }
    out
}
