//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line (visible with `cargo test --test acceptance -- --nocapture`).
//! Every tolerance is pinned here in code.

use ferrosim::analysis::{
    butterfly, disturb_projection, emit_mw_comparison, read_latency, ButterflyMode,
};
use ferrosim::cellbench::{
    build_cell, monte_carlo_restore, run_hold_disturb, run_power_off, run_power_off_for,
    run_read, run_restore_one_step, run_silicon_protocol, run_write, CellConfig, Logic,
};
use ferrosim::device::{
    calibrate_kinetics, fefet_current, switching_boundary_width, FeFetState,
};
use ferrosim::engine::{dc_operating_point, verify_kcl_residual, Circuit, NodeId, SolverConfig, SourceWave};
use ferrosim::netlist::parse;
use ferrosim::SimConfig;
use std::time::Instant;

struct Criterion {
    name: &'static str,
    limit_seconds: f64,
    start: Instant,
}

impl Criterion {
    fn new(name: &'static str, limit_seconds: f64) -> Self {
        Self { name, limit_seconds, start: Instant::now() }
    }

    fn pass(self, detail: String) {
        let dt = self.start.elapsed().as_secs_f64();
        println!("[PASS] {}: {} ({:.2} s)", self.name, detail, dt);
        assert!(
            dt < self.limit_seconds,
            "{} exceeded its runtime budget: {dt:.2} s >= {} s",
            self.name,
            self.limit_seconds
        );
    }
}

#[test]
fn criterion_01_read_latency_parity() {
    let c = Criterion::new("read-latency parity", 5.0);
    let cfg = SimConfig::default_config();

    let mut base = build_cell(&CellConfig::baseline(&cfg)).unwrap();
    run_write(&mut base, true).unwrap();
    let (_, wave_b) = run_read(&mut base).unwrap();
    let lat_base = read_latency(&wave_b, &base.circuit, cfg.read_threshold).unwrap().latency;

    let mut nv = build_cell(&CellConfig::nvsram(&cfg)).unwrap();
    run_write(&mut nv, true).unwrap();
    let (_, wave_n) = run_read(&mut nv).unwrap();
    let lat_nv = read_latency(&wave_n, &nv.circuit, cfg.read_threshold).unwrap().latency;

    assert!(
        (50e-12..=90e-12).contains(&lat_base),
        "baseline latency {:.1} ps outside [50, 90] ps",
        lat_base * 1e12
    );
    let rel = (lat_nv - lat_base).abs() / lat_base;
    assert!(rel <= 0.05, "nonvolatile latency off by {:.2}%", rel * 100.0);
    c.pass(format!(
        "baseline {:.1} ps, nonvolatile {:.1} ps ({:+.2}%)",
        lat_base * 1e12,
        lat_nv * 1e12,
        (lat_nv / lat_base - 1.0) * 100.0
    ));
}

#[test]
fn criterion_02_monostability() {
    let c = Criterion::new("butterfly monostability", 10.0);
    let cfg = SimConfig::default_config();

    // programmed nonvolatile cell: hold and read, both stored states
    for data in [true, false] {
        let mut cell = build_cell(&CellConfig::nvsram(&cfg)).unwrap();
        run_write(&mut cell, data).unwrap();
        for mode in [ButterflyMode::Hold, ButterflyMode::Read] {
            let b = butterfly(&cell, mode, cfg.snm_step, cfg.bleed_siemens, cfg.selfsustain_floor)
                .unwrap();
            let stable =
                b.intersections.iter().filter(|i| i.stable && i.self_sustained).count();
            assert_eq!(stable, 1, "state {} {:?}: {stable} stable points", data as u8, mode);
            assert!(b.monostable);
            // reported stable points satisfy the loop-gain bound
            for i in b.intersections.iter().filter(|i| i.stable && i.self_sustained) {
                assert!(i.loop_gain.abs() < 1.0);
            }
        }
    }

    // baseline: exactly two stable points, lobes equal to under a millivolt
    let mut base = build_cell(&CellConfig::baseline(&cfg)).unwrap();
    run_write(&mut base, true).unwrap();
    let mut detail = String::new();
    for mode in [ButterflyMode::Hold, ButterflyMode::Read] {
        let b = butterfly(&base, mode, cfg.snm_step, cfg.bleed_siemens, cfg.selfsustain_floor)
            .unwrap();
        let stable = b.intersections.iter().filter(|i| i.stable && i.self_sustained).count();
        assert_eq!(stable, 2, "baseline {mode:?}: {stable} stable points");
        assert_eq!(b.snm_lobes.len(), 2, "baseline {mode:?} lobes: {:?}", b.snm_lobes);
        let asym = (b.snm_lobes[0] - b.snm_lobes[1]).abs();
        assert!(asym < 1e-3, "baseline {mode:?} lobe asymmetry {asym:.2e} V");
        detail = format!("baseline lobes {:.0} mV each", b.snm_lobes[0] * 1e3);
    }
    c.pass(format!("4/4 programmed cases monostable; {detail}"));
}

#[test]
fn criterion_03_programming_scheme_asymmetry() {
    let c = Criterion::new("programming-scheme asymmetry", 5.0);
    let cfg = SimConfig::default_config();
    let out = emit_mw_comparison(&cfg).unwrap();
    let mw_full = out.summary["mw_full_gate_volts"].as_f64().unwrap();
    let mw_gd = out.summary["mw_gate_drain_volts"].as_f64().unwrap();
    assert!(
        mw_gd < mw_full,
        "gate-drain window {mw_gd} V not smaller than full-gate {mw_full} V"
    );
    // the fully written device is completely off at zero gate bias
    let hvt = FeFetState::hvt(cfg.segments);
    let off = fefet_current(&hvt, &cfg.fefet, 0.0, -1.0, 0.0).abs();
    assert!(off < 1e-9, "HVT off current {off:.3e} A");
    c.pass(format!(
        "window {:.3} V (full gate) vs {:.3} V (gate-drain); off current {:.1e} A",
        mw_full, mw_gd, off
    ));
}

#[test]
fn criterion_04_restore_matrix_stepped_protocol() {
    let c = Criterion::new("stepped restore matrix", 10.0);
    let cfg = SimConfig::default_config();
    let mut detail = Vec::new();
    for data in [true, false] {
        let mut cell = build_cell(&CellConfig::nvsram(&cfg)).unwrap();
        run_write(&mut cell, data).unwrap();
        run_power_off(&mut cell).unwrap();
        let trace = run_silicon_protocol(
            &mut cell,
            &cfg.protocol_targets,
            cfg.protocol_i_bias,
            cfg.protocol_repetitions,
            cfg.protocol_wl_boost,
            cfg.protocol_step,
        )
        .unwrap();
        assert_eq!(trace.readouts, 8, "expected 4 targets x 2 repetitions");
        assert_eq!(
            trace.correct_readouts, trace.readouts,
            "stored {}: {}/{} correct",
            data as u8, trace.correct_readouts, trace.readouts
        );
        detail.push(format!("stored {}: 8/8", data as u8));
    }
    c.pass(detail.join(", "));
}

#[test]
fn criterion_05_write_semantics() {
    let c = Criterion::new("write semantics", 10.0);
    let cfg = SimConfig::default_config();
    let mut cell = build_cell(&CellConfig::nvsram(&cfg)).unwrap();
    run_write(&mut cell, true).unwrap();

    // rewriting the stored value barely moves the polarization
    let rewrite = run_write(&mut cell, true).unwrap();
    assert!(
        rewrite.max_seg_delta_p < 1e-3,
        "same-state write moved polarization by {:.2e}",
        rewrite.max_seg_delta_p
    );

    // the opposite write swaps the roles
    let before_m2 = cell.circuit.fefet_state("m2").unwrap().mean();
    let flip = run_write(&mut cell, false).unwrap();
    let m2 = flip.state.m2_mean_p.unwrap();
    let m4 = flip.state.m4_mean_p.unwrap();
    assert!(before_m2 < 0.0, "stored-1 state should hold a partial HVT on m2");
    assert!(m2 >= 0.95, "new LVT load reaches {m2:.4}");
    assert!(m4 < 0.0 && m4 > -1.0, "new HVT load partial: {m4:.4}");
    c.pass(format!(
        "same-state |dp| {:.1e}; swap -> m2 {:+.3}, m4 {:+.3}",
        rewrite.max_seg_delta_p, m2, m4
    ));
}

#[test]
fn criterion_06_power_off_persistence_and_volatility_contrast() {
    let c = Criterion::new("power-off persistence", 20.0);
    let cfg = SimConfig::default_config();

    let mut cell = build_cell(&CellConfig::nvsram(&cfg)).unwrap();
    run_write(&mut cell, true).unwrap();
    let off = run_power_off(&mut cell).unwrap();
    assert!(off.q_abs < 0.05 && off.qb_abs < 0.05, "nodes did not collapse: {off:?}");
    assert!(off.max_seg_delta_p < 1e-6, "polarization moved {:.2e}", off.max_seg_delta_p);
    let r = run_restore_one_step(&mut cell, cfg.vdd_nominal, cfg.restore_ramp).unwrap();
    assert_eq!(r.state.logic, Logic::One, "restore lost the bit");

    // identical pipeline on the baseline, with the power-off held long
    // enough that residual charge memory is gone: the outcome must not
    // track the written data
    let mut outcomes = Vec::new();
    for data in [true, false] {
        let mut base = build_cell(&CellConfig::baseline(&cfg)).unwrap();
        run_write(&mut base, data).unwrap();
        run_power_off_for(&mut base, 20e-6).unwrap();
        let rb = run_restore_one_step(&mut base, cfg.vdd_nominal, cfg.restore_ramp).unwrap();
        outcomes.push(rb.state.logic);
    }
    let recovered = outcomes[0] == Logic::One && outcomes[1] == Logic::Zero;
    assert!(
        !recovered,
        "baseline recovered both bits after deep power-off: {outcomes:?}"
    );
    c.pass(format!(
        "|q| {:.1} mV, |dp| {:.1e}, restored One; baseline outcomes {outcomes:?}",
        off.q_abs * 1e3,
        off.max_seg_delta_p
    ));
}

#[test]
fn criterion_07_kinetics_calibration() {
    let c = Criterion::new("kinetics calibration", 5.0);
    let cfg = SimConfig::default_config();
    let k = calibrate_kinetics((4.0, 10e-9), (2.0, 100.0)).unwrap();

    let w4 = switching_boundary_width(&k, 4.0).unwrap();
    let w2 = switching_boundary_width(&k, 2.0).unwrap();
    assert!(((w4 - 10e-9) / 10e-9).abs() < 1e-9, "w(4V) = {w4:.12e}");
    assert!(((w2 - 100.0) / 100.0).abs() < 1e-9, "w(2V) = {w2:.12e}");

    // strict monotonicity across the emitted amplitude range
    let mut last = f64::INFINITY;
    for i in 10..=90 {
        let a = 0.05 * i as f64;
        let w = switching_boundary_width(&k, a).unwrap();
        assert!(w < last, "boundary not strictly monotone at {a} V");
        last = w;
    }

    // a 1000 s hold at nominal supply moves nothing
    let mut cell = build_cell(&CellConfig::nvsram(&cfg)).unwrap();
    run_write(&mut cell, true).unwrap();
    let d = run_hold_disturb(&mut cell, 1000.0).unwrap();
    assert!(d.worst_opposing < 0.01, "opposing drift {:.2e}", d.worst_opposing);
    let projected = disturb_projection(&k, 1.0, 1000.0);
    assert!(projected < 1e-10, "projected switched fraction {projected:.2e}");
    assert!(
        (1e-20..1e-18).contains(&projected),
        "projection should evaluate near 7e-20, got {projected:.2e}"
    );
    c.pass(format!(
        "anchors exact; monotone; 1000 s @ 1 V opposing {:.1e}, projection {projected:.1e}",
        d.worst_opposing
    ));
}

#[test]
fn criterion_08_solver_oracles() {
    let c = Criterion::new("solver oracles", 10.0);
    let cfg = SimConfig::default_config();

    // RC transient against the analytic exponential
    let rc_error = |dtmax: f64| -> f64 {
        let mut circuit = Circuit::new();
        let vin = circuit.node("in");
        let out = circuit.node("out");
        circuit.add_vsource("v1", vin, NodeId::GROUND, SourceWave::Dc(1.0));
        circuit.add_resistor("r1", vin, out, 1e3);
        circuit.add_capacitor("c1", out, NodeId::GROUND, 1e-12);
        circuit.set_initial_condition(out, 0.0);
        let solver = SolverConfig { dtmax, ..cfg.solver };
        let tau = 1e-9;
        let wave = ferrosim::engine::transient(&mut circuit, 5.0 * tau, &solver).unwrap();
        let v = wave.node_series(&circuit, "out").unwrap();
        wave.times
            .iter()
            .zip(v)
            .map(|(t, v)| (v - (1.0 - (-t / tau).exp())).abs())
            .fold(0.0, f64::max)
    };
    let e1 = rc_error(1e-11); // tau/100
    assert!(e1 < 1e-3, "RC max error {e1:.3e} at dt = tau/100");
    let e2 = rc_error(5e-12);
    let ratio = e1 / e2;
    assert!((1.5..=2.5).contains(&ratio), "convergence ratio {ratio:.2}");

    // voltage divider exact to vntol, with the residual verified
    let mut div = Circuit::new();
    let a = div.node("a");
    let mid = div.node("mid");
    div.add_vsource("vs", a, NodeId::GROUND, SourceWave::Dc(1.0));
    div.add_resistor("r1", a, mid, 1e3);
    div.add_resistor("r2", mid, NodeId::GROUND, 1e3);
    let op = dc_operating_point(&div, &cfg.solver, None).unwrap();
    assert!((op.voltage(mid) - 0.5).abs() < cfg.solver.vntol);
    let resid = verify_kcl_residual(&div, &op, &cfg.solver);
    assert!(resid < 1e-9, "KCL residual {resid:.3e} A");

    // residual also holds on a solved nonlinear cell operating point
    let mut cell = build_cell(&CellConfig::nvsram(&cfg)).unwrap();
    run_write(&mut cell, true).unwrap();
    let mut circuit = cell.circuit.clone();
    circuit.initial_conditions.clear();
    for (name, v) in [("vvdd", 1.0), ("vwl", 0.0), ("vbl", 1.0), ("vblb", 1.0)] {
        circuit.set_source_wave(name, SourceWave::Dc(v));
    }
    let op = dc_operating_point(&circuit, &cfg.solver, None).unwrap();
    let resid_cell = verify_kcl_residual(&circuit, &op, &cfg.solver);
    assert!(resid_cell < 1e-9, "cell KCL residual {resid_cell:.3e} A");

    c.pass(format!(
        "RC err {e1:.2e} (ratio {ratio:.2}); divider exact; residuals {resid:.1e}/{resid_cell:.1e} A"
    ));
}

#[test]
fn criterion_09_parser_robustness() {
    let c = Criterion::new("parser robustness", 10.0);
    let fixtures = std::path::Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures"));

    // golden round-trip equality
    let mut goldens = 0;
    for entry in std::fs::read_dir(fixtures).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().map(|e| e == "cir").unwrap_or(false) {
            let text = std::fs::read_to_string(&path).unwrap();
            let n1 = parse(&text).unwrap();
            let n2 = parse(&ferrosim::netlist::unparse(&n1)).unwrap();
            assert_eq!(n1, n2, "{}", path.display());
            goldens += 1;
        }
    }

    // malformed fixtures all carry line numbers
    let mut malformed = 0;
    for entry in std::fs::read_dir(fixtures.join("malformed")).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let err = parse(&text).expect_err("malformed fixture parsed");
        assert!(err.line >= 1);
        malformed += 1;
    }
    assert!(malformed >= 10);

    // fuzz smoke: structured errors only, no panics
    let base = std::fs::read_to_string(fixtures.join("nvsram_cell.cir")).unwrap().into_bytes();
    let mut state = 0x9E3779B97F4A7C15u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    for _ in 0..10_000 {
        let mut m = base.clone();
        for _ in 0..=(next() % 3) {
            let pos = (next() as usize) % m.len();
            m[pos] = (next() % 256) as u8;
        }
        let _ = parse(&String::from_utf8_lossy(&m));
    }
    c.pass(format!("{goldens} goldens round-trip, {malformed} malformed diagnosed, 1e4 fuzz ok"));
}

#[test]
fn criterion_10_monte_carlo_regression() {
    let c = Criterion::new("Monte Carlo regression", 60.0);
    let cfg = SimConfig::default_config();
    let run = || {
        monte_carlo_restore(
            &CellConfig::nvsram(&cfg),
            cfg.mc_sigma_vth,
            cfg.mc_sigma_mw_rel,
            200,
            cfg.mc_seed,
        )
        .unwrap()
    };
    let a = run();
    assert!(a.yield_fraction >= 0.99, "yield {:.4}", a.yield_fraction);
    assert_eq!(a.runs, 200);
    // determinism: repeated invocations serialize byte-identically
    let b = run();
    let ja = serde_json::to_string(&a).unwrap();
    let jb = serde_json::to_string(&b).unwrap();
    assert_eq!(ja, jb, "Monte Carlo outcome not reproducible");
    c.pass(format!("yield {:.4} over {} runs, byte-identical rerun", a.yield_fraction, a.runs));
}
