//! Replays the checked-in fuzz seeds through the same round-trip checks the
//! fuzz targets make, so regressions show up without cargo-fuzz.

use std::fs;
use std::path::PathBuf;

use qnth::format::{format_rational, parse_indices, parse_rational, parse_recurrence, parse_system, recurrence_to_json, system_to_json};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fuzz", "corpus", target].iter().collect();
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.display().to_string(), fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn recurrence_seeds() {
    let mut accepted = 0;
    for (name, text) in seeds("recurrence") {
        if let Ok(rec) = parse_recurrence(&text) {
            accepted += 1;
            assert_eq!(parse_recurrence(&recurrence_to_json(&rec)).unwrap(), rec, "{name}");
        }
    }
    assert!(accepted >= 2);
}

#[test]
fn system_seeds() {
    let mut accepted = 0;
    for (name, text) in seeds("system") {
        if let Ok(sys) = parse_system(&text) {
            accepted += 1;
            assert_eq!(parse_system(&system_to_json(&sys)).unwrap(), sys, "{name}");
        }
    }
    assert!(accepted >= 3);
}

#[test]
fn rational_seeds() {
    for (name, text) in seeds("rational") {
        if let Ok(v) = parse_rational(&text) {
            assert_eq!(parse_rational(&format_rational(&v)).unwrap(), v, "{name}");
        }
    }
}

#[test]
fn indices_seeds() {
    for (name, text) in seeds("indices") {
        if let Ok(idx) = parse_indices(&text) {
            let joined = idx.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
            assert_eq!(parse_indices(&joined).unwrap(), idx, "{name}");
        }
    }
}
