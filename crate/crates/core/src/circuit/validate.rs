use super::*;
use std::collections::HashSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    UnknownQubit { op: usize, qubit: u32 },
    DuplicateQubit(u32),
    CzSameOperands { op: usize },
    CzWithoutSite { op: usize },
    SiteOnNonCz { op: usize },
    DuplicateSite(CzSiteId),
    TimeDecreases { op: usize },
    EmptyDetector(usize),
    DanglingRef { detector: Option<usize>, measurement: u32 },
    NonDeterministicDetector(usize),
    NonDeterministicObservable,
}

/// Report every violated structural invariant. A noiseless run is attempted only
/// when the structure is sound, to catch detectors that are not deterministic.
pub fn validate(c: &Circuit) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut known = HashSet::new();
    for q in &c.qubits {
        if !known.insert(q.index) {
            out.push(Diagnostic::DuplicateQubit(q.index));
        }
    }
    let mut sites = HashSet::new();
    let mut last_t = 0;
    for (i, op) in c.operations.iter().enumerate() {
        for &q in op.operands() {
            if !known.contains(&q) {
                out.push(Diagnostic::UnknownQubit { op: i, qubit: q });
            }
        }
        if op.time_step < last_t {
            out.push(Diagnostic::TimeDecreases { op: i });
        }
        last_t = op.time_step;
        match (op.kind, op.cz_site) {
            (OpKind::Cz, None) => out.push(Diagnostic::CzWithoutSite { op: i }),
            (OpKind::Cz, Some(id)) => {
                if op.targets[0] == op.targets[1] {
                    out.push(Diagnostic::CzSameOperands { op: i });
                }
                if !sites.insert(id) {
                    out.push(Diagnostic::DuplicateSite(id));
                }
            }
            (_, Some(_)) => out.push(Diagnostic::SiteOnNonCz { op: i }),
            _ => {}
        }
    }
    let nm = c.num_measurements() as u32;
    for (i, det) in c.detectors.iter().enumerate() {
        if det.measurement_refs.is_empty() {
            out.push(Diagnostic::EmptyDetector(i));
        }
        for &m in &det.measurement_refs {
            if m >= nm {
                out.push(Diagnostic::DanglingRef { detector: Some(i), measurement: m });
            }
        }
    }
    for &m in &c.observable.measurement_refs {
        if m >= nm {
            out.push(Diagnostic::DanglingRef { detector: None, measurement: m });
        }
    }
    if out.is_empty() {
        for seed in 0..8 {
            let rec = crate::sim::run_noiseless(c, seed);
            for (i, &bit) in rec.detectors.iter().enumerate() {
                if bit {
                    let d = Diagnostic::NonDeterministicDetector(i);
                    if !out.contains(&d) {
                        out.push(d);
                    }
                }
            }
            if rec.observable && !out.contains(&Diagnostic::NonDeterministicObservable) {
                out.push(Diagnostic::NonDeterministicObservable);
            }
        }
    }
    out
}
