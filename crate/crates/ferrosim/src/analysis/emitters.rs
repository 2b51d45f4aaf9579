//! Figure-ready data emitters. Each returns named CSV payloads plus a JSON
//! summary; the CLI decides where the files land and records them in the
//! run manifest.

use super::butterfly::{butterfly, ButterflyMode};
use super::AnalysisError;
use crate::cellbench::{build_cell, run_power_off, run_silicon_protocol, run_write, CellConfig};
use crate::config::SimConfig;
use crate::curve::Curve;
use crate::device::{
    apply_program_pulse, idvg_sweep, memory_window, Device, FeFetState, ProgramPulse,
    SweepProtocol,
};
use crate::units::fmt_sig;
use serde_json::{json, Value};

/// Named text payloads plus a machine-readable summary.
#[derive(Debug, Clone)]
pub struct EmitOutput {
    pub files: Vec<(String, String)>,
    pub summary: Value,
}

fn curve_csv(curve: &Curve, xname: &str, yname: &str) -> String {
    let mut buf = Vec::new();
    curve.write_csv(&mut buf, xname, yname).expect("in-memory write");
    String::from_utf8(buf).unwrap()
}

fn state_csv(state: &FeFetState) -> String {
    let mut out = String::from("segment_index,polarization\n");
    for (i, p) in state.segments.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i, fmt_sig(*p, 9)));
    }
    out
}

/// Switching-boundary curve over an amplitude grid, clamped at 1e12 s in
/// the CSV (with a flag column) so plots stay finite.
pub fn emit_switching_boundary(cfg: &SimConfig) -> Result<EmitOutput, AnalysisError> {
    const CLAMP: f64 = 1e12;
    let amplitudes: Vec<f64> = (2..=9).map(|i| 0.5 * i as f64).collect();
    let curve = super::emit_halid(&cfg.kinetics, &amplitudes)?;
    let mut csv = String::from("amplitude_volts,width_seconds,clamped\n");
    for (a, w) in &curve.points {
        let clamped = *w > CLAMP;
        csv.push_str(&format!(
            "{},{},{}\n",
            fmt_sig(*a, 9),
            fmt_sig(if clamped { CLAMP } else { *w }, 9),
            clamped as u8
        ));
    }
    let w4 = crate::device::switching_boundary_width(&cfg.kinetics, 4.0)?;
    let w2 = crate::device::switching_boundary_width(&cfg.kinetics, 2.0)?;
    Ok(EmitOutput {
        files: vec![("halid_boundary.csv".into(), csv)],
        summary: json!({
            "anchor_4v_width_seconds": w4,
            "anchor_2v_width_seconds": w2,
            "tau0_seconds": cfg.kinetics.tau0,
            "v0_volts": cfg.kinetics.v0,
        }),
    })
}

/// Memory-window comparison between the conventional full-gate write and
/// the gate-drain write used inside the cell: the partially polarized
/// device opens a strictly smaller window.
pub fn emit_mw_comparison(cfg: &SimConfig) -> Result<EmitOutput, AnalysisError> {
    let dev = Device::Fefet(cfg.fefet);
    let vp = cfg.vdd_program;

    // LVT reference and full-gate HVT via saturating conditioning pulses
    let (lvt_curve, _) = idvg_sweep(&dev, None, &SweepProtocol::p_type_reverse(true))?;
    let (hvt_full_curve, _) = idvg_sweep(&dev, None, &SweepProtocol::p_type_reverse(false))?;

    // gate-drain HVT: the in-cell bias (gate and source at the programming
    // rail, drain grounded) applied to a saturated LVT device
    let lvt = FeFetState::lvt(cfg.segments);
    let gd_pulse = ProgramPulse { vg: vp, vs: vp, vd: 0.0, width: cfg.t_program };
    let gd_state = apply_program_pulse(&lvt, &cfg.fefet, &gd_pulse);
    let mut sweep = SweepProtocol::p_type_reverse(false);
    sweep.reset_pulse = None;
    sweep.set_pulse = None;
    let (hvt_gd_curve, _) = idvg_sweep(&dev, Some(&gd_state), &sweep)?;

    let mw_full = memory_window(&lvt_curve, &hvt_full_curve, cfg.i_crit)?;
    let mw_gd = memory_window(&lvt_curve, &hvt_gd_curve, cfg.i_crit)?;

    Ok(EmitOutput {
        files: vec![
            ("idvg_lvt.csv".into(), curve_csv(&lvt_curve, "vg_volts", "id_amperes")),
            ("idvg_hvt_full_gate.csv".into(), curve_csv(&hvt_full_curve, "vg_volts", "id_amperes")),
            ("idvg_hvt_gate_drain.csv".into(), curve_csv(&hvt_gd_curve, "vg_volts", "id_amperes")),
            ("state_hvt_gate_drain.csv".into(), state_csv(&gd_state)),
        ],
        summary: json!({
            "mw_full_gate_volts": mw_full,
            "mw_gate_drain_volts": mw_gd,
            "gate_drain_mean_p": gd_state.mean(),
            "i_crit_amperes": cfg.i_crit,
        }),
    })
}

/// Transfer-curve shift sequence of the two load devices through a write
/// series: pre-write, same-state rewrite, opposite-state write.
pub fn emit_idvg_shift(cfg: &SimConfig) -> Result<EmitOutput, AnalysisError> {
    let mut cell = build_cell(&CellConfig::nvsram(cfg))?;
    let mut files = Vec::new();
    let mut stages = Vec::new();
    let mut sweep = SweepProtocol::p_type_reverse(false);
    sweep.reset_pulse = None;
    sweep.set_pulse = None;

    let dump = |cell: &crate::cellbench::Cell,
                    stage: &str,
                    files: &mut Vec<(String, String)>|
     -> Result<Value, AnalysisError> {
        let mut means = serde_json::Map::new();
        for dev_name in ["m2", "m4"] {
            let state = cell.circuit.fefet_state(dev_name).expect("fefet present").clone();
            let (curve, _) = idvg_sweep(&Device::Fefet(cfg.fefet), Some(&state), &sweep)?;
            files.push((
                format!("idvg_{stage}_{dev_name}.csv"),
                curve_csv(&curve, "vg_volts", "id_amperes"),
            ));
            files.push((format!("state_{stage}_{dev_name}.csv"), state_csv(&state)));
            means.insert(format!("{dev_name}_mean_p"), json!(state.mean()));
        }
        means.insert("stage".into(), json!(stage));
        Ok(Value::Object(means))
    };

    run_write(&mut cell, true).map_err(AnalysisError::Bench)?;
    stages.push(dump(&cell, "pre_write", &mut files)?);
    run_write(&mut cell, true).map_err(AnalysisError::Bench)?;
    stages.push(dump(&cell, "same_write", &mut files)?);
    run_write(&mut cell, false).map_err(AnalysisError::Bench)?;
    stages.push(dump(&cell, "opposite_write", &mut files)?);

    Ok(EmitOutput { files, summary: json!({ "stages": stages }) })
}

/// Butterfly set: baseline hold/read plus the programmed nonvolatile cell
/// in both stored states, hold and read, plus the comparative write-mode
/// curves.
pub fn emit_butterfly_set(cfg: &SimConfig) -> Result<EmitOutput, AnalysisError> {
    let mut files = Vec::new();
    let mut cases = Vec::new();

    let mut push_case = |label: String,
                         cell: &crate::cellbench::Cell,
                         mode: ButterflyMode,
                         files: &mut Vec<(String, String)>|
     -> Result<(), AnalysisError> {
        let b = butterfly(cell, mode, cfg.snm_step, cfg.bleed_siemens, cfg.selfsustain_floor)?;
        let mut csv = String::from("curve,x_volts,y_volts\n");
        for (q, qb) in &b.vtc_forward.points {
            csv.push_str(&format!("forward,{},{}\n", fmt_sig(*q, 9), fmt_sig(*qb, 9)));
        }
        for (qb, q) in &b.vtc_mirrored.points {
            csv.push_str(&format!("mirrored,{},{}\n", fmt_sig(*q, 9), fmt_sig(*qb, 9)));
        }
        files.push((format!("butterfly_{label}.csv"), csv));
        cases.push(json!({
            "case": label,
            "mode": format!("{:?}", b.mode),
            "snm_volts_per_lobe": b.snm_lobes,
            "snm_volts": b.snm,
            "monostable": b.monostable,
            "non_operational": b.non_operational,
            "stable_points": b.intersections.iter().filter(|i| i.stable && i.self_sustained)
                .map(|i| json!({"q": i.q, "qb": i.qb, "loop_gain": i.loop_gain}))
                .collect::<Vec<_>>(),
            "pseudo_points": b.intersections.iter().filter(|i| i.stable && !i.self_sustained)
                .map(|i| json!({"q": i.q, "qb": i.qb})).collect::<Vec<_>>(),
        }));
        Ok(())
    };

    // baseline: latch a one, then trace
    let mut base = build_cell(&CellConfig::baseline(cfg))?;
    run_write(&mut base, true).map_err(AnalysisError::Bench)?;
    for mode in [ButterflyMode::Hold, ButterflyMode::Read, ButterflyMode::Write] {
        push_case(format!("baseline_{}", mode_tag(mode)), &base, mode, &mut files)?;
    }

    // nonvolatile cell in both programmed states
    for data in [true, false] {
        let mut cell = build_cell(&CellConfig::nvsram(cfg))?;
        run_write(&mut cell, data).map_err(AnalysisError::Bench)?;
        for mode in [ButterflyMode::Hold, ButterflyMode::Read, ButterflyMode::Write] {
            push_case(
                format!("nvsram_state{}_{}", data as u8, mode_tag(mode)),
                &cell,
                mode,
                &mut files,
            )?;
        }
    }

    Ok(EmitOutput { files, summary: json!({ "cases": cases }) })
}

fn mode_tag(mode: ButterflyMode) -> &'static str {
    match mode {
        ButterflyMode::Hold => "hold",
        ButterflyMode::Read => "read",
        ButterflyMode::Write => "write",
    }
}

/// Stepped restore trace: write, power off, then the stepped supply-ramp
/// readout across all configured targets.
pub fn emit_restore_trace(cfg: &SimConfig, data: bool) -> Result<EmitOutput, AnalysisError> {
    let mut cell = build_cell(&CellConfig::nvsram(cfg))?;
    run_write(&mut cell, data).map_err(AnalysisError::Bench)?;
    run_power_off(&mut cell).map_err(AnalysisError::Bench)?;
    let trace = run_silicon_protocol(
        &mut cell,
        &cfg.protocol_targets,
        cfg.protocol_i_bias,
        cfg.protocol_repetitions,
        cfg.protocol_wl_boost,
        cfg.protocol_step,
    )
    .map_err(AnalysisError::Bench)?;

    let mut csv = String::from(
        "step_index,phase,target_volts,repetition,vdd_volts,wl_volts,bl_volts,blb_volts,correct,weak_cell\n",
    );
    for r in &trace.records {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.index,
            r.phase,
            fmt_sig(r.target, 9),
            r.repetition,
            fmt_sig(r.vdd, 9),
            fmt_sig(r.wl, 9),
            fmt_sig(r.bl, 9),
            fmt_sig(r.blb, 9),
            r.correct.map(|b| b.to_string()).unwrap_or_default(),
            r.weak_cell.map(|b| b.to_string()).unwrap_or_default(),
        ));
    }
    Ok(EmitOutput {
        files: vec![(format!("restore_trace_data{}.csv", data as u8), csv)],
        summary: json!({
            "stored": format!("{:?}", trace.stored),
            "readouts": trace.readouts,
            "correct_readouts": trace.correct_readouts,
            "targets": cfg.protocol_targets,
        }),
    })
}
