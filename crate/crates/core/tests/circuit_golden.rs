use corrloss::circuit::{build_memory_circuit, memory_detector_count, validate, Circuit};
use std::path::PathBuf;

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compares against the checked-in text; `UPDATE_GOLDEN=1` rewrites it.
fn check_golden(name: &str, actual: &str) {
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(expected, actual, "circuit text changed; rerun with UPDATE_GOLDEN=1 if intended");
}

#[test]
fn d3_single_round_matches_golden_text() {
    let c = build_memory_circuit(3, 1).unwrap();
    check_golden("memory_d3_r1.txt", &c.to_text());
}

#[test]
fn golden_text_round_trips() {
    let text = std::fs::read_to_string(golden_path("memory_d3_r1.txt")).unwrap();
    let c = Circuit::from_text(&text).unwrap();
    assert_eq!(c.to_text(), text);
    assert_eq!(c.fingerprint(), build_memory_circuit(3, 1).unwrap().fingerprint());
}

#[test]
fn detector_counts_do_not_regress() {
    for (d, r, n) in [(3, 1, 8), (3, 3, 24), (5, 5, 120), (7, 7, 336)] {
        let c = build_memory_circuit(d, r).unwrap();
        assert_eq!(c.num_detectors(), n, "d={d} r={r}");
        assert_eq!(memory_detector_count(d, r), n);
        assert!(validate(&c).is_empty(), "d={d} r={r}");
    }
}
