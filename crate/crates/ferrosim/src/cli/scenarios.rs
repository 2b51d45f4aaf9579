//! `bench` scenarios and `analyze` emitters behind the CLI.

use super::outdir::OutDir;
use super::{CliError, EXIT_ASSERTION, EXIT_OK};
use crate::analysis::{
    butterfly, disturb_projection, emit_butterfly_set, emit_idvg_shift, emit_mw_comparison,
    emit_switching_boundary, read_latency, AnalysisError, ButterflyMode,
    EmitOutput,
};
use crate::cellbench::{
    build_cell, monte_carlo_restore, run_hold_disturb, run_power_off, run_read,
    run_restore_one_step, run_silicon_protocol, run_write, BenchError, CellConfig, Logic,
    ScenarioReport,
};
use crate::config::SimConfig;
use serde_json::json;

pub struct BenchOverrides {
    pub data: Option<bool>,
    pub vdd_targets: Option<Vec<f64>>,
    pub runs: Option<usize>,
    pub sigma_vth: Option<f64>,
    pub duration: Option<f64>,
    pub i_bias: Option<f64>,
    pub seed: u64,
}

fn bench_err(e: BenchError) -> CliError {
    match e {
        BenchError::Solver(s) => CliError::Solver(s.to_string()),
        other => CliError::Solver(other.to_string()),
    }
}

fn analysis_err(e: AnalysisError) -> CliError {
    CliError::Solver(e.to_string())
}

pub fn cmd_bench(
    scenario: &str,
    cfg: &SimConfig,
    ov: BenchOverrides,
    mut out: OutDir,
    command_echo: &str,
) -> Result<i32, CliError> {
    let mut report = ScenarioReport::new(scenario, &cfg.digest);
    match scenario {
        "write-read" => write_read(cfg, &ov, &mut report, &mut out)?,
        "power-cycle" => power_cycle(cfg, &ov, &mut report)?,
        "restore-matrix" => restore_matrix(cfg, &ov, &mut report)?,
        "silicon-protocol" => silicon_protocol(cfg, &ov, &mut report, &mut out)?,
        "disturb" => disturb(cfg, &ov, &mut report)?,
        "mc-yield" => mc_yield(cfg, &ov, &mut report)?,
        other => {
            return Err(CliError::Usage(format!(
                "unknown scenario '{other}' (valid: write-read, power-cycle, restore-matrix, \
                 silicon-protocol, disturb, mc-yield)"
            )))
        }
    }
    let passed = report.all_passed();
    for a in &report.assertions {
        println!("[{}] {}: {}", if a.pass { "pass" } else { "FAIL" }, a.name, a.detail);
    }
    out.write_json("report.json", &serde_json::to_value(&report).unwrap())?;
    out.finish(command_echo.to_string(), &cfg.digest, ov.seed)?;
    if passed {
        Ok(EXIT_OK)
    } else {
        eprintln!("failing assertions: {}", report.failing_names().join(", "));
        Ok(EXIT_ASSERTION)
    }
}

fn write_read(
    cfg: &SimConfig,
    ov: &BenchOverrides,
    report: &mut ScenarioReport,
    out: &mut OutDir,
) -> Result<(), CliError> {
    let data = ov.data.unwrap_or(true);
    let mut cell = build_cell(&CellConfig::nvsram(cfg)).map_err(bench_err)?;
    let w = run_write(&mut cell, data).map_err(bench_err)?;
    let want = if data { Logic::One } else { Logic::Zero };
    report.assert_that(
        "write_latches_data",
        w.state.logic == want,
        format!("logic {:?} after writing {}", w.state.logic, data as u8),
    );
    let (lvt_p, hvt_p) = if data {
        (w.state.m4_mean_p.unwrap(), w.state.m2_mean_p.unwrap())
    } else {
        (w.state.m2_mean_p.unwrap(), w.state.m4_mean_p.unwrap())
    };
    report.assert_that(
        "source_drain_written_load_saturates",
        lvt_p >= 0.95,
        format!("mean(p) = {lvt_p:.4}"),
    );
    report.assert_that(
        "gate_drain_written_load_partial",
        hvt_p < 0.0 && hvt_p > -1.0,
        format!("mean(p) = {hvt_p:.4}"),
    );
    let (r, wave) = run_read(&mut cell).map_err(bench_err)?;
    let rep = read_latency(&wave, &cell.circuit, cfg.read_threshold).map_err(analysis_err)?;
    report.assert_that("read_value_matches", r.value == want, format!("read {:?}", r.value));
    report.assert_that(
        "read_non_destructive",
        r.non_destructive,
        format!("logic preserved, max |dp| = {:.2e}", r.max_seg_delta_p),
    );
    report.assert_that(
        "read_polarization_undisturbed",
        r.max_seg_delta_p < 1e-6,
        format!("max |dp| = {:.2e}", r.max_seg_delta_p),
    );
    report.metric_num("read_latency_seconds", rep.latency);
    report.metric_num("m2_mean_p", w.state.m2_mean_p.unwrap());
    report.metric_num("m4_mean_p", w.state.m4_mean_p.unwrap());
    let mut buf = Vec::new();
    wave.write_csv(&mut buf, &cell.circuit).map_err(CliError::Io)?;
    out.write("read_waveform.csv", &String::from_utf8(buf).unwrap())?;
    report.outputs.push("read_waveform.csv".into());
    Ok(())
}

fn power_cycle(
    cfg: &SimConfig,
    ov: &BenchOverrides,
    report: &mut ScenarioReport,
) -> Result<(), CliError> {
    let data = ov.data.unwrap_or(true);
    let want = if data { Logic::One } else { Logic::Zero };
    let mut cell = build_cell(&CellConfig::nvsram(cfg)).map_err(bench_err)?;
    run_write(&mut cell, data).map_err(bench_err)?;
    let off = run_power_off(&mut cell).map_err(bench_err)?;
    report.assert_that(
        "nodes_collapse",
        off.nodes_collapsed,
        format!("|q| = {:.1} mV, |qb| = {:.1} mV", off.q_abs * 1e3, off.qb_abs * 1e3),
    );
    report.assert_that(
        "polarization_preserved",
        off.max_seg_delta_p < 1e-6,
        format!("max |dp| = {:.2e}", off.max_seg_delta_p),
    );
    let r = run_restore_one_step(&mut cell, cfg.vdd_nominal, cfg.restore_ramp).map_err(bench_err)?;
    report.assert_that(
        "restore_recovers_bit",
        r.state.logic == want,
        format!("restored {:?}", r.state.logic),
    );
    report.metric_num("q_after_off_volts", off.q_abs);
    report.metric_num("q_after_restore_volts", r.state.q);
    Ok(())
}

fn restore_matrix(
    cfg: &SimConfig,
    ov: &BenchOverrides,
    report: &mut ScenarioReport,
) -> Result<(), CliError> {
    let targets = ov.vdd_targets.clone().unwrap_or_else(|| cfg.protocol_targets.clone());
    let reps = cfg.protocol_repetitions;
    let mut total = 0usize;
    let mut correct = 0usize;
    for data in [true, false] {
        let want = if data { Logic::One } else { Logic::Zero };
        for &target in &targets {
            for _rep in 0..reps {
                let mut cell = build_cell(&CellConfig::nvsram(cfg)).map_err(bench_err)?;
                run_write(&mut cell, data).map_err(bench_err)?;
                run_power_off(&mut cell).map_err(bench_err)?;
                let r = run_restore_one_step(&mut cell, target, cfg.restore_ramp)
                    .map_err(bench_err)?;
                total += 1;
                if r.state.logic == want {
                    correct += 1;
                }
            }
        }
    }
    report.assert_that(
        "all_restores_latch_correctly",
        correct == total,
        format!("{correct}/{total} correct"),
    );
    report.metric_num("correct", correct as f64);
    report.metric_num("total", total as f64);
    Ok(())
}

fn silicon_protocol(
    cfg: &SimConfig,
    ov: &BenchOverrides,
    report: &mut ScenarioReport,
    out: &mut OutDir,
) -> Result<(), CliError> {
    let targets = ov.vdd_targets.clone().unwrap_or_else(|| cfg.protocol_targets.clone());
    let i_bias = ov.i_bias.unwrap_or(cfg.protocol_i_bias);
    for data in [true, false] {
        let mut cell = build_cell(&CellConfig::nvsram(cfg)).map_err(bench_err)?;
        run_write(&mut cell, data).map_err(bench_err)?;
        run_power_off(&mut cell).map_err(bench_err)?;
        let trace = run_silicon_protocol(
            &mut cell,
            &targets,
            i_bias,
            cfg.protocol_repetitions,
            cfg.protocol_wl_boost,
            cfg.protocol_step,
        )
        .map_err(bench_err)?;
        report.assert_that(
            &format!("stored_{}_all_readouts_correct", data as u8),
            trace.correct_readouts == trace.readouts,
            format!("{}/{} correct", trace.correct_readouts, trace.readouts),
        );
        report.metric(
            &format!("stored_{}_readouts", data as u8),
            json!({"correct": trace.correct_readouts, "total": trace.readouts}),
        );
        // step trace as CSV via the shared emitter format
        let mut csv = String::from(
            "step_index,phase,target_volts,repetition,vdd_volts,wl_volts,bl_volts,blb_volts,correct,weak_cell\n",
        );
        for r in &trace.records {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                r.index,
                r.phase,
                crate::units::fmt_sig(r.target, 9),
                r.repetition,
                crate::units::fmt_sig(r.vdd, 9),
                crate::units::fmt_sig(r.wl, 9),
                crate::units::fmt_sig(r.bl, 9),
                crate::units::fmt_sig(r.blb, 9),
                r.correct.map(|b| b.to_string()).unwrap_or_default(),
                r.weak_cell.map(|b| b.to_string()).unwrap_or_default(),
            ));
        }
        let name = format!("step_trace_data{}.csv", data as u8);
        out.write(&name, &csv)?;
        report.outputs.push(name);
    }
    Ok(())
}

fn disturb(cfg: &SimConfig, ov: &BenchOverrides, report: &mut ScenarioReport) -> Result<(), CliError> {
    let duration = ov.duration.unwrap_or(1000.0);
    let mut cell = build_cell(&CellConfig::nvsram(cfg)).map_err(bench_err)?;
    run_write(&mut cell, true).map_err(bench_err)?;
    let d = run_hold_disturb(&mut cell, duration).map_err(bench_err)?;
    report.assert_that(
        "hold_opposing_drift_below_one_percent",
        d.worst_opposing < 0.01,
        format!("worst opposing |dp| = {:.2e} over {duration} s", d.worst_opposing),
    );
    report.metric_num("worst_opposing", d.worst_opposing);
    report.metric_num("worst_reinforcing", d.worst_reinforcing);
    // kinetics-law projections at the hold and overdrive levels
    report.metric_num(
        "projection_1v",
        disturb_projection(&cfg.kinetics, cfg.vdd_nominal, duration),
    );
    report.metric_num("projection_2v", disturb_projection(&cfg.kinetics, 2.0, duration));
    report.metric_num(
        "projection_1v_ten_years",
        disturb_projection(&cfg.kinetics, cfg.vdd_nominal, 3.156e8),
    );
    Ok(())
}

fn mc_yield(cfg: &SimConfig, ov: &BenchOverrides, report: &mut ScenarioReport) -> Result<(), CliError> {
    let sigma = ov.sigma_vth.unwrap_or(cfg.mc_sigma_vth);
    let runs = ov.runs.unwrap_or(cfg.mc_runs);
    let outcome = monte_carlo_restore(
        &CellConfig::nvsram(cfg),
        sigma,
        cfg.mc_sigma_mw_rel,
        runs,
        ov.seed,
    )
    .map_err(bench_err)?;
    report.seed = Some(ov.seed);
    if sigma <= cfg.mc_sigma_vth {
        report.assert_that(
            "yield_floor",
            outcome.yield_fraction >= 0.99,
            format!("yield {:.4} over {} runs", outcome.yield_fraction, outcome.runs),
        );
    }
    report.metric_num("yield_fraction", outcome.yield_fraction);
    report.metric_num("sigma_vth_volts", sigma);
    report.metric_num("runs", outcome.runs as f64);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_analyze(
    kind: &str,
    mode: Option<&str>,
    topology: Option<&str>,
    state: Option<u8>,
    scheme: Option<&str>,
    cfg: &SimConfig,
    mut out: OutDir,
    command_echo: &str,
    seed: u64,
) -> Result<i32, CliError> {
    let emitted: EmitOutput = match kind {
        "halid" => emit_switching_boundary(cfg).map_err(analysis_err)?,
        "idvg" => emit_idvg_shift(cfg).map_err(analysis_err)?,
        "mw" => {
            let mut e = emit_mw_comparison(cfg).map_err(analysis_err)?;
            if let Some(s) = scheme {
                let key = match s {
                    "gate" => "mw_full_gate_volts",
                    "gate-drain" => "mw_gate_drain_volts",
                    other => {
                        return Err(CliError::Usage(format!(
                            "unknown scheme '{other}' (valid: gate, gate-drain)"
                        )))
                    }
                };
                let value = e.summary[key].clone();
                e.summary = json!({ "scheme": s, "mw_volts": value });
            }
            e
        }
        "snm" => {
            if mode.is_none() && topology.is_none() && state.is_none() {
                emit_butterfly_set(cfg).map_err(analysis_err)?
            } else {
                analyze_single_snm(cfg, mode, topology, state)?
            }
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown analysis '{other}' (valid: snm, idvg, halid, mw)"
            )))
        }
    };
    for (name, content) in &emitted.files {
        out.write(name, content)?;
    }
    out.write_json("summary.json", &emitted.summary)?;
    println!("{}", serde_json::to_string_pretty(&super::outdir::round_json(emitted.summary)).unwrap());
    out.finish(command_echo.to_string(), &cfg.digest, seed)?;
    Ok(EXIT_OK)
}

fn analyze_single_snm(
    cfg: &SimConfig,
    mode: Option<&str>,
    topology: Option<&str>,
    state: Option<u8>,
) -> Result<EmitOutput, CliError> {
    let bmode = match mode.unwrap_or("hold") {
        "hold" => ButterflyMode::Hold,
        "read" => ButterflyMode::Read,
        "write" => ButterflyMode::Write,
        other => return Err(CliError::Usage(format!("unknown mode '{other}'"))),
    };
    let nvsram = match topology.unwrap_or("nvsram") {
        "nvsram" => true,
        "baseline" => false,
        other => return Err(CliError::Usage(format!("unknown topology '{other}'"))),
    };
    let data = state.unwrap_or(1) != 0;
    let config =
        if nvsram { CellConfig::nvsram(cfg) } else { CellConfig::baseline(cfg) };
    let mut cell = build_cell(&config).map_err(bench_err)?;
    run_write(&mut cell, data).map_err(bench_err)?;
    let b = butterfly(&cell, bmode, cfg.snm_step, cfg.bleed_siemens, cfg.selfsustain_floor)
        .map_err(analysis_err)?;
    let mut csv = String::from("curve,x_volts,y_volts\n");
    for (q, qb) in &b.vtc_forward.points {
        csv.push_str(&format!(
            "forward,{},{}\n",
            crate::units::fmt_sig(*q, 9),
            crate::units::fmt_sig(*qb, 9)
        ));
    }
    for (qb, q) in &b.vtc_mirrored.points {
        csv.push_str(&format!(
            "mirrored,{},{}\n",
            crate::units::fmt_sig(*q, 9),
            crate::units::fmt_sig(*qb, 9)
        ));
    }
    Ok(EmitOutput {
        files: vec![("butterfly.csv".into(), csv)],
        summary: serde_json::to_value(&b).expect("butterfly json"),
    })
}
