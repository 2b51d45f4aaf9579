//! End-to-end CLI tests: exit codes, manifest completeness, and output
//! determinism across repeated invocations.

use std::fs;
use std::path::Path;
use std::process::Command;

fn ferrosim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ferrosim"))
}

fn collect(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn identical_runs_are_byte_identical() {
    // identical command line + config + seed, run from two directories
    let tmp1 = tempfile::tempdir().unwrap();
    let tmp2 = tempfile::tempdir().unwrap();
    for dir in [tmp1.path(), tmp2.path()] {
        let status = ferrosim()
            .current_dir(dir)
            .args(["--out", "o", "bench", "mc-yield", "--runs", "50", "--seed", "7"])
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let a = collect(&tmp1.path().join("o"));
    let b = collect(&tmp2.path().join("o"));
    assert_eq!(a.len(), b.len());
    for ((name_a, bytes_a), (name_b, bytes_b)) in a.iter().zip(&b) {
        assert_eq!(name_a, name_b);
        assert_eq!(bytes_a, bytes_b, "{name_a} differs between identical runs");
    }
}

#[test]
fn manifest_lists_every_emitted_file() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("halid");
    let status = ferrosim()
        .args(["--out", out.to_str().unwrap(), "analyze", "halid"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let listed: Vec<String> = manifest["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    for entry in fs::read_dir(&out).unwrap() {
        let name = entry.unwrap().file_name().to_string_lossy().into_owned();
        assert!(listed.contains(&name), "{name} missing from manifest");
    }
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let out_s = out.to_str().unwrap();

    // malformed netlist: exit 1 with a line number on stderr
    let bad = tmp.path().join("bad.cir");
    fs::write(&bad, "broken\nc1 bl 0 17q\n").unwrap();
    let r = ferrosim().args(["--out", out_s, "sim", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(r.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&r.stderr);
    assert!(stderr.contains("line 2"), "stderr: {stderr}");

    // missing file: exit 1
    let r = ferrosim().args(["--out", out_s, "sim", "/nonexistent.cir"]).output().unwrap();
    assert_eq!(r.status.code(), Some(1));

    // unknown scenario: exit 1 listing valid names
    let r = ferrosim().args(["--out", out_s, "bench", "warp-drive"]).output().unwrap();
    assert_eq!(r.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&r.stderr);
    assert!(stderr.contains("restore-matrix"), "stderr: {stderr}");

    // healthy scenario: exit 0
    let r = ferrosim()
        .args(["--out", out_s, "bench", "mc-yield", "--runs", "5", "--sigma-vth", "0"])
        .output()
        .unwrap();
    assert_eq!(r.status.code(), Some(0));
}

#[test]
fn sim_runs_golden_netlist_against_analytic_solution() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("rc");
    let fixture = Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/rc_charge.cir"));
    let status = ferrosim()
        .args(["--out", out.to_str().unwrap(), "sim", fixture.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let csv = fs::read_to_string(out.join("tran_1.csv")).unwrap();
    let mut max_err = 0.0f64;
    for line in csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let t: f64 = cols[0].parse().unwrap();
        let v: f64 = cols[2].parse().unwrap();
        let exact = 1.0 - (-t / 1e-9).exp();
        max_err = max_err.max((v - exact).abs());
    }
    assert!(max_err < 1e-3, "max error vs analytic {max_err:.2e}");
}

#[test]
fn config_overlay_changes_behavior() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("override.ini");
    fs::write(&cfg, "[protocol]\ntargets = 0.5,1.0\nrepetitions = 1\n").unwrap();
    let out = tmp.path().join("o");
    let r = ferrosim()
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "bench",
            "silicon-protocol",
        ])
        .output()
        .unwrap();
    assert_eq!(r.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&r.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["metrics"]["stored_1_readouts"]["total"], 2);
}
