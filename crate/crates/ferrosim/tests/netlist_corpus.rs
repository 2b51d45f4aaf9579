//! Golden-corpus and robustness tests for the netlist front-end.

use ferrosim::netlist::{elaborate, parse, unparse, ModelLibrary};
use proptest::prelude::*;
use std::fs;
use std::path::Path;

fn fixtures() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures"))
}

#[test]
fn golden_corpus_round_trips() {
    let mut seen = 0;
    for entry in fs::read_dir(fixtures()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().map(|e| e != "cir").unwrap_or(true) {
            continue;
        }
        seen += 1;
        let text = fs::read_to_string(&path).unwrap();
        let n1 = parse(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let emitted = unparse(&n1);
        let n2 = parse(&emitted).unwrap_or_else(|e| panic!("re-parse {}: {e}", path.display()));
        assert_eq!(n1, n2, "{} does not round-trip", path.display());
        // canonical emission is a fixed point
        assert_eq!(emitted, unparse(&n2));
    }
    assert!(seen >= 4, "expected golden fixtures, found {seen}");
}

#[test]
fn golden_corpus_elaborates() {
    for name in ["rc_charge.cir", "divider.cir", "nvsram_cell.cir", "pulse_divider.cir"] {
        let text = fs::read_to_string(fixtures().join(name)).unwrap();
        let n = parse(&text).unwrap();
        let lib = ModelLibrary::from_netlist(&n).unwrap();
        let e = elaborate(&n, &lib).unwrap_or_else(|err| panic!("{name}: {err}"));
        assert!(e.circuit.node_count() > 0);
    }
}

#[test]
fn malformed_fixtures_error_with_line_numbers() {
    let dir = fixtures().join("malformed");
    let mut count = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        count += 1;
        let text = fs::read_to_string(&path).unwrap();
        let err = match parse(&text) {
            Err(e) => e,
            Ok(n) => panic!("{} unexpectedly parsed: {n:?}", path.display()),
        };
        assert!(err.line >= 1, "{}: error lacks a line number", path.display());
        // the message renders with its position
        assert!(err.to_string().contains("line"), "{}", err);
    }
    assert!(count >= 10, "expected at least ten malformed fixtures, found {count}");
}

/// Fuzz smoke: random mutations of a golden netlist must never panic the
/// parser, only produce values or structured errors.
#[test]
fn fuzz_mutations_never_crash() {
    let base = fs::read_to_string(fixtures().join("nvsram_cell.cir")).unwrap();
    let bytes: Vec<u8> = base.into_bytes();
    // deterministic xorshift so the corpus is reproducible
    let mut state = 0x243F6A8885A308D3u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    for _ in 0..10_000 {
        let mut mutated = bytes.clone();
        let edits = (next() % 4) + 1;
        for _ in 0..edits {
            let pos = (next() as usize) % mutated.len();
            match next() % 3 {
                0 => mutated[pos] = (next() % 128) as u8,
                1 => {
                    mutated.insert(pos, (next() % 128) as u8);
                }
                _ => {
                    mutated.remove(pos);
                    if mutated.is_empty() {
                        mutated.push(b'x');
                    }
                }
            }
        }
        let text = String::from_utf8_lossy(&mutated).into_owned();
        let _ = parse(&text); // Ok or Err, never a panic
    }
}

proptest! {
    /// Round-trip property over generated netlists.
    #[test]
    fn generated_netlists_round_trip(
        rvals in prop::collection::vec(1.0f64..1e6, 1..5),
        cvals in prop::collection::vec(1e-15f64..1e-9, 0..3),
        dc in -5.0f64..5.0,
    ) {
        let mut text = String::from("generated\n");
        text.push_str(&format!("v1 n0 0 {dc}\n"));
        for (i, r) in rvals.iter().enumerate() {
            text.push_str(&format!("r{i} n{i} n{} {r}\n", i + 1));
        }
        for (i, c) in cvals.iter().enumerate() {
            text.push_str(&format!("c{i} n{} 0 {c}\n", i + 1));
        }
        text.push_str(".end\n");
        let n1 = parse(&text).unwrap();
        let n2 = parse(&unparse(&n1)).unwrap();
        prop_assert_eq!(n1, n2);
    }
}
