//! Line-oriented text form of a [`Circuit`]. The format is stable: golden files
//! in the test suite pin it byte for byte.
//!
//! ```text
//! circuit distance=3 rounds=1
//! qubit 0 data
//! prep_0 0 t=0 r=0
//! cz 18 0 t=3 r=0 site=0:syndrome:0
//! detector r=0 basis=Z stab=1 refs=1
//! observable 29 30 31
//! ```

use super::*;
use std::fmt::Write as _;

fn kind_name(k: OpKind) -> &'static str {
    match k {
        OpKind::Prep0 => "prep_0",
        OpKind::PrepPlus => "prep_plus",
        OpKind::Hadamard => "hadamard",
        OpKind::Cz => "cz",
        OpKind::MeasureZ => "measure_z",
        OpKind::MeasureX => "measure_x",
        OpKind::LduMeasure => "ldu_measure",
    }
}

fn parse_kind(s: &str) -> Option<OpKind> {
    Some(match s {
        "prep_0" => OpKind::Prep0,
        "prep_plus" => OpKind::PrepPlus,
        "hadamard" => OpKind::Hadamard,
        "cz" => OpKind::Cz,
        "measure_z" => OpKind::MeasureZ,
        "measure_x" => OpKind::MeasureX,
        "ldu_measure" => OpKind::LduMeasure,
        _ => return None,
    })
}

fn role_name(r: Role) -> &'static str {
    match r {
        Role::Data => "data",
        Role::Ancilla => "ancilla",
        Role::Fresh => "fresh",
    }
}

impl Circuit {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "circuit distance={} rounds={}", self.distance, self.rounds);
        for q in &self.qubits {
            let _ = writeln!(out, "qubit {} {}", q.index, role_name(q.role));
        }
        for op in &self.operations {
            let _ = write!(out, "{}", kind_name(op.kind));
            for q in op.operands() {
                let _ = write!(out, " {q}");
            }
            let _ = write!(out, " t={} r={}", op.time_step, op.round);
            if let Some(site) = op.cz_site {
                let _ = write!(out, " site={site}");
            }
            out.push('\n');
        }
        for det in &self.detectors {
            let basis = match det.basis {
                DetectorBasis::X => "X",
                DetectorBasis::Z => "Z",
            };
            let stab = det.stabilizer.map_or("-".to_string(), |s| s.to_string());
            let refs: Vec<String> = det.measurement_refs.iter().map(|m| m.to_string()).collect();
            let _ = writeln!(out, "detector r={} basis={} stab={} refs={}", det.round, basis, stab, refs.join(","));
        }
        let _ = write!(out, "observable");
        for m in &self.observable.measurement_refs {
            let _ = write!(out, " {m}");
        }
        out.push('\n');
        out
    }

    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut distance = 0;
        let mut rounds = 0;
        let mut qubits = Vec::new();
        let mut ops = Vec::new();
        let mut detectors = Vec::new();
        let mut observable = ObservableDef::default();

        for (ln, line) in text.lines().enumerate() {
            let line_no = ln + 1;
            let err = |message: &str| Error::Parse { line: line_no, message: message.to_string() };
            let mut words = line.split_whitespace();
            let Some(head) = words.next() else { continue };
            let rest: Vec<&str> = words.collect();
            let kv = |key: &str| -> Option<&str> {
                rest.iter().find_map(|w| w.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
            };
            let num = |key: &str| -> Result<u32> {
                kv(key).and_then(|v| v.parse().ok()).ok_or_else(|| err(&format!("missing or bad `{key}`")))
            };
            match head {
                "circuit" => {
                    distance = num("distance")? as usize;
                    rounds = num("rounds")? as usize;
                }
                "qubit" => {
                    let index = rest.first().and_then(|v| v.parse().ok()).ok_or_else(|| err("bad qubit index"))?;
                    let role = match rest.get(1).copied() {
                        Some("data") => Role::Data,
                        Some("ancilla") => Role::Ancilla,
                        Some("fresh") => Role::Fresh,
                        _ => return Err(err("bad qubit role")),
                    };
                    qubits.push(QubitId { index, role });
                }
                "detector" => {
                    let basis = match kv("basis") {
                        Some("X") => DetectorBasis::X,
                        Some("Z") => DetectorBasis::Z,
                        _ => return Err(err("bad detector basis")),
                    };
                    let stabilizer = match kv("stab") {
                        Some("-") => None,
                        Some(v) => Some(v.parse().map_err(|_| err("bad stabilizer"))?),
                        None => return Err(err("missing stab")),
                    };
                    let refs = kv("refs").ok_or_else(|| err("missing refs"))?;
                    let measurement_refs = refs
                        .split(',')
                        .filter(|s| !s.is_empty())
                        .map(|s| s.parse().map_err(|_| err("bad measurement ref")))
                        .collect::<Result<Vec<u32>>>()?;
                    detectors.push(DetectorDef { measurement_refs, stabilizer, round: num("r")?, basis });
                }
                "observable" => {
                    observable.measurement_refs = rest
                        .iter()
                        .map(|s| s.parse().map_err(|_| err("bad measurement ref")))
                        .collect::<Result<Vec<u32>>>()?;
                }
                kind => {
                    let kind = parse_kind(kind).ok_or_else(|| err(&format!("unknown operation `{kind}`")))?;
                    let targets: Vec<u32> = rest.iter().take_while(|w| !w.contains('=')).filter_map(|w| w.parse().ok()).collect();
                    if targets.len() != kind.arity() {
                        return Err(err("wrong operand count"));
                    }
                    let time_step = num("t")?;
                    let round = num("r")?;
                    let cz_site = match kv("site") {
                        None => None,
                        Some(v) => {
                            let parts: Vec<&str> = v.split(':').collect();
                            if parts.len() != 3 {
                                return Err(err("bad site id"));
                            }
                            let context = match parts[1] {
                                "syndrome" => SiteContext::SyndromeExtraction,
                                "ldu" => SiteContext::LduTeleport,
                                _ => return Err(err("bad site context")),
                            };
                            Some(CzSiteId {
                                round: parts[0].parse().map_err(|_| err("bad site round"))?,
                                gate_index: parts[2].parse().map_err(|_| err("bad site index"))?,
                                context,
                            })
                        }
                    };
                    let b = *targets.get(1).unwrap_or(&targets[0]);
                    ops.push(Operation { kind, targets: [targets[0], b], time_step, round, cz_site });
                }
            }
        }
        Ok(Circuit::from_parts(distance, rounds, qubits, ops, detectors, observable))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let c = build_memory_circuit(3, 2).unwrap();
        let text = c.to_text();
        let back = Circuit::from_text(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn parse_errors_carry_line() {
        let err = Circuit::from_text("circuit distance=3 rounds=1\nfrobnicate 1 t=0 r=0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = Circuit::from_text("cz 1 t=0 r=0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }
}
