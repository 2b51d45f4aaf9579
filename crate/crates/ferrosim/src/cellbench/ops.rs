//! Executable cell operations: write, power-off, restore (one-step and
//! two-phase), read, hold disturb, and the stepped supply-ramp readout
//! protocol.

use super::build::Cell;
use super::schedule::{OperationSchedule, Phase, RailBias};
use super::{BenchError, CellState, Logic};
use crate::device::{fefet_current, step_polarization, FeFetState};
use crate::engine::{dc_operating_point, transient, Element, SourceWave, Waveform};
use serde::Serialize;

const RAMP: f64 = 1e-9;
const SETTLE: f64 = 5e-9;

impl Cell {
    /// Runs a bias schedule as one transient, carrying node voltages in and
    /// out. `float_bitlines` disconnects the bitline drivers for the run.
    pub(super) fn run_schedule(
        &mut self,
        schedule: &OperationSchedule,
        dtmax: f64,
        float_bitlines: bool,
        bitline_ic: Option<f64>,
    ) -> Result<Waveform, BenchError> {
        let rail_names = ["vvdd", "vwl", "vbl", "vblb"];
        for (i, name) in rail_names.iter().enumerate() {
            self.circuit.set_source_wave(name, SourceWave::Pwl(schedule.rail_pwl(i)));
        }
        if float_bitlines {
            self.circuit.set_source_enabled("vbl", false);
            self.circuit.set_source_enabled("vblb", false);
        }

        // initial conditions from the carried state
        self.circuit.initial_conditions.clear();
        if let Some(x) = self.last_x.clone() {
            let n = self.nodes;
            for node in [n.q, n.qb, n.bl, n.blb] {
                self.circuit.set_initial_condition(node, self.voltage_of(&x, node));
            }
        }
        if let Some(v) = bitline_ic {
            self.circuit.set_initial_condition(self.nodes.bl, v);
            self.circuit.set_initial_condition(self.nodes.blb, v);
        }

        let mut solver = self.config.solver;
        solver.dtmax = dtmax;
        let result = transient(&mut self.circuit, schedule.total_duration(), &solver);

        // restore driver connectivity before propagating errors
        if float_bitlines {
            self.circuit.set_source_enabled("vbl", true);
            self.circuit.set_source_enabled("vblb", true);
        }
        let wave = result?;

        // carry final state
        let last = wave.times.len() - 1;
        let mut x = Vec::with_capacity(self.circuit.unknown_count());
        x.extend(wave.node_voltages.iter().map(|s| s[last]));
        x.extend(wave.branch_currents.iter().map(|s| s[last]));
        self.last_x = Some(x);
        self.rails = schedule.final_levels();
        if float_bitlines {
            // a floated rail carries its node voltage forward
            let xl = self.last_x.as_ref().unwrap();
            self.rails[2] = self.voltage_of(xl, self.nodes.bl);
            self.rails[3] = self.voltage_of(xl, self.nodes.blb);
        }
        Ok(wave)
    }

    fn fefet_snapshot(&self) -> Vec<(String, FeFetState)> {
        self.circuit.fefet_states()
    }
}

fn max_seg_delta(before: &[(String, FeFetState)], after: &[(String, FeFetState)]) -> f64 {
    before
        .iter()
        .zip(after)
        .map(|((_, a), (_, b))| a.max_abs_delta(b))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct WriteReport {
    pub data: bool,
    pub state: CellState,
    /// Largest per-segment polarization change over the whole operation.
    pub max_seg_delta_p: f64,
    pub waveform_points: usize,
}

/// Programs `data` into the cell: raise VDD, WL and the data-side bitline
/// to the programming level, hold for the programming pulse, release WL,
/// then return every rail to nominal hold conditions. For the baseline
/// topology the same sequence runs at nominal voltage (a plain write).
pub fn run_write(cell: &mut Cell, data: bool) -> Result<WriteReport, BenchError> {
    let (vp, wlp) = if cell.is_nvsram() {
        (cell.config.vdd_program, cell.config.vdd_program + cell.config.wl_program_boost)
    } else {
        (cell.config.vdd_nominal, cell.config.vdd_nominal)
    };
    let vn = cell.config.vdd_nominal;
    let (bl_w, blb_w) = if data { (vp, 0.0) } else { (0.0, vp) };
    let before = cell.fefet_snapshot();

    let schedule = OperationSchedule::new(
        cell.rails,
        vec![
            Phase::ramp(
                RAMP,
                RailBias::RampTo(vp),
                RailBias::RampTo(wlp),
                RailBias::RampTo(bl_w),
                RailBias::RampTo(blb_w),
            ),
            Phase::hold(cell.config.t_program),
            Phase::ramp(RAMP, RailBias::Hold, RailBias::RampTo(0.0), RailBias::Hold, RailBias::Hold),
            Phase::ramp(
                RAMP,
                RailBias::RampTo(vn),
                RailBias::Hold,
                RailBias::RampTo(vn),
                RailBias::RampTo(vn),
            ),
            Phase::hold(SETTLE),
        ],
    )?;
    let wave = cell.run_schedule(&schedule, 100e-12, false, None)?;
    let after = cell.fefet_snapshot();
    Ok(WriteReport {
        data,
        state: cell.state(vn),
        max_seg_delta_p: max_seg_delta(&before, &after),
        waveform_points: wave.times.len(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PowerOffReport {
    pub q_abs: f64,
    pub qb_abs: f64,
    /// Polarization movement across the power-down.
    pub max_seg_delta_p: f64,
    pub nodes_collapsed: bool,
}

/// Pulls the supply (and bitlines) to ground and holds until the storage
/// nodes have bled out through the subthreshold floor; polarization is the
/// only survivor. The default hold is long because the calibrated
/// desk-scale devices leak far less than production silicon.
pub fn run_power_off(cell: &mut Cell) -> Result<PowerOffReport, BenchError> {
    run_power_off_for(cell, 500e-9)
}

/// Power-off with an explicit hold duration. Longer holds erase residual
/// charge memory entirely (relevant when demonstrating that the baseline
/// topology cannot restore).
pub fn run_power_off_for(cell: &mut Cell, hold: f64) -> Result<PowerOffReport, BenchError> {
    let before = cell.fefet_snapshot();
    let schedule = OperationSchedule::new(
        cell.rails,
        vec![
            Phase::ramp(
                RAMP,
                RailBias::RampTo(0.0),
                RailBias::RampTo(0.0),
                RailBias::RampTo(0.0),
                RailBias::RampTo(0.0),
            ),
            Phase::hold(hold),
        ],
    )?;
    cell.run_schedule(&schedule, (hold / 200.0).max(2e-9), false, None)?;
    let after = cell.fefet_snapshot();
    let s = cell.state(cell.config.vdd_nominal);
    Ok(PowerOffReport {
        q_abs: s.q.abs(),
        qb_abs: s.qb.abs(),
        max_seg_delta_p: max_seg_delta(&before, &after),
        nodes_collapsed: s.q.abs() < 0.05 && s.qb.abs() < 0.05,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RestoreReport {
    pub target_vdd: f64,
    pub state: CellState,
    pub two_phase: bool,
}

/// Ramp the supply from ground to `target_vdd` and let the polarization
/// imbalance steer the latch. An incorrect or Invalid latch is a reported
/// outcome, not an error.
pub fn run_restore_one_step(
    cell: &mut Cell,
    target_vdd: f64,
    ramp_time: f64,
) -> Result<RestoreReport, BenchError> {
    let schedule = OperationSchedule::new(
        cell.rails,
        vec![
            Phase::ramp(ramp_time, RailBias::RampTo(target_vdd), RailBias::Hold, RailBias::Hold, RailBias::Hold),
            Phase::hold(0.1 * ramp_time),
        ],
    )?;
    cell.run_schedule(&schedule, ramp_time / 100.0, false, None)?;
    Ok(RestoreReport { target_vdd, state: cell.state(target_vdd), two_phase: false })
}

/// Two-phase restore: first equalize both bitlines at ground with the
/// wordline asserted (wiping residual charge off the storage nodes), then
/// ramp the supply as in the one-step restore.
pub fn run_restore_two_phase(
    cell: &mut Cell,
    target_vdd: f64,
) -> Result<RestoreReport, BenchError> {
    let wl_on = cell.config.vdd_nominal;
    let equalize = OperationSchedule::new(
        cell.rails,
        vec![
            Phase::ramp(
                RAMP,
                RailBias::Hold,
                RailBias::RampTo(wl_on),
                RailBias::RampTo(0.0),
                RailBias::RampTo(0.0),
            ),
            Phase::hold(10e-9),
            Phase::ramp(RAMP, RailBias::Hold, RailBias::RampTo(0.0), RailBias::Hold, RailBias::Hold),
        ],
    )?;
    cell.run_schedule(&equalize, 100e-12, false, None)?;
    let mut report = run_restore_one_step(cell, target_vdd, cell.config.restore_ramp)?;
    report.two_phase = true;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct ReadReport {
    /// Seconds from the wordline half-swing crossing to a full read
    /// threshold of bitline differential.
    pub latency: f64,
    pub value: Logic,
    pub non_destructive: bool,
    pub max_seg_delta_p: f64,
}

/// Differential read: precharge and float the bitlines, assert the
/// wordline, and time the bitline split. The read must not flip the latch
/// or move the polarization.
pub fn run_read(cell: &mut Cell) -> Result<(ReadReport, Waveform), BenchError> {
    let vn = cell.config.vdd_nominal;
    let before_logic = cell.state(vn).logic;
    let before_p = cell.fefet_snapshot();

    let lead = 0.1e-9;
    let wl_ramp = 10e-12;
    let window = cell.config.read_window;
    let schedule = OperationSchedule::new(
        [cell.rails[0], 0.0, vn, vn],
        vec![
            Phase::hold(lead),
            Phase::ramp(wl_ramp, RailBias::Hold, RailBias::RampTo(vn), RailBias::Hold, RailBias::Hold),
            Phase::hold(window),
            Phase::ramp(RAMP, RailBias::Hold, RailBias::RampTo(0.0), RailBias::Hold, RailBias::Hold),
            Phase::hold(RAMP),
        ],
    )?;
    let wave = cell.run_schedule(&schedule, 1e-12, true, Some(vn))?;

    let bl = wave.node_series(&cell.circuit, "bl").unwrap();
    let blb = wave.node_series(&cell.circuit, "blb").unwrap();
    let wl = wave.node_series(&cell.circuit, "wl").unwrap();
    let t_wl = wave
        .first_crossing(wl, 0.5 * vn)
        .ok_or_else(|| BenchError::Protocol("wordline never asserted".into()))?;
    let diff: Vec<f64> = bl.iter().zip(blb).map(|(a, b)| (a - b).abs()).collect();
    let threshold = cell.config.read_threshold;
    // only look inside the assertion window
    let t_cross = wave
        .first_crossing(&diff, threshold)
        .filter(|t| *t <= lead + wl_ramp + window)
        .ok_or(BenchError::ReadTimeout(threshold))?;
    let latency = t_cross - t_wl;

    // sign of the differential at the crossing decides the read value
    let signed = wave.sample(bl, t_cross) - wave.sample(blb, t_cross);
    let value = if signed > 0.0 { Logic::One } else { Logic::Zero };

    let after_logic = cell.state(vn).logic;
    let after_p = cell.fefet_snapshot();
    Ok((
        ReadReport {
            latency,
            value,
            non_destructive: before_logic == after_logic,
            max_seg_delta_p: max_seg_delta(&before_p, &after_p),
        },
        wave,
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct DisturbReport {
    pub duration: f64,
    /// Worst per-segment movement away from each device's stored state.
    pub worst_opposing: f64,
    /// Worst per-segment movement toward the stored state.
    pub worst_reinforcing: f64,
}

/// Quasi-static hold: one DC operating point at the hold bias, then a
/// single polarization update over the full duration (valid because the
/// bias is constant). Drift toward the stored state is reinforcement and
/// reported separately from opposing drift.
pub fn run_hold_disturb(cell: &mut Cell, duration: f64) -> Result<DisturbReport, BenchError> {
    let n = cell.nodes;
    let rails = cell.rails;
    for (name, v) in [("vvdd", rails[0]), ("vwl", rails[1]), ("vbl", rails[2]), ("vblb", rails[3])]
    {
        cell.circuit.set_source_wave(name, SourceWave::Dc(v));
    }
    cell.circuit.initial_conditions.clear();
    let op = dc_operating_point(&cell.circuit, &cell.config.solver, cell.last_x.as_deref())?;
    let v = |node| op.voltage(node);
    let terminals = [
        ("m2", v(n.q), v(n.qb), v(n.vdd)),
        ("m4", v(n.qb), v(n.q), v(n.vdd)),
    ];
    let mut worst_opposing = 0.0f64;
    let mut worst_reinforcing = 0.0f64;
    for (name, vg, vd, vs) in terminals {
        let Some(state) = cell.circuit.fefet_state(name).cloned() else { continue };
        let params = match cell.circuit.element(name) {
            Some(Element::Fefet { params, .. }) => *params,
            _ => continue,
        };
        let new = if duration > 0.0 {
            step_polarization(&state, &params, vg, vd, vs, duration)
        } else {
            state.clone()
        };
        let stored = if state.mean() >= 0.0 { 1.0 } else { -1.0 };
        for (old_p, new_p) in state.segments.iter().zip(&new.segments) {
            let m = new_p - old_p;
            if m * stored < 0.0 {
                worst_opposing = worst_opposing.max(m.abs());
            } else {
                worst_reinforcing = worst_reinforcing.max(m.abs());
            }
        }
        cell.circuit.set_fefet_state(name, new);
    }
    cell.last_x = Some(op.x);
    Ok(DisturbReport { duration, worst_opposing, worst_reinforcing })
}

#[derive(Debug, Clone, Serialize)]
pub struct StepRecord {
    pub index: usize,
    pub target: f64,
    pub repetition: usize,
    pub phase: &'static str,
    pub vdd: f64,
    pub wl: f64,
    pub bl: f64,
    pub blb: f64,
    /// Readout steps only: did the latch read back the stored bit.
    pub correct: Option<bool>,
    /// Readout steps only: the bias sink exceeds the load's deliverable
    /// current at the restored operating point.
    pub weak_cell: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StepTrace {
    pub stored: Logic,
    pub records: Vec<StepRecord>,
    pub readouts: usize,
    pub correct_readouts: usize,
}

/// Replicates the stepped measurement: for each target supply, step VDD up
/// from ground in fixed increments as a sequence of operating points
/// (polarization frozen), hold one extra step, assert the wordline with
/// constant current sinks loading both bitlines, record, release, and power
/// off; repeated per target. The x-axis of the resulting trace is the step
/// index, not time.
pub fn run_silicon_protocol(
    cell: &mut Cell,
    targets: &[f64],
    i_bias: f64,
    repetitions: usize,
    wl_boost: f64,
    step_size: f64,
) -> Result<StepTrace, BenchError> {
    let n = cell.nodes;
    // stored bit from the load polarization (M4 more LVT means Q-side wins)
    let stored = match (cell.circuit.fefet_state("m2"), cell.circuit.fefet_state("m4")) {
        (Some(m2), Some(m4)) => {
            if m4.mean() > m2.mean() + 1e-9 {
                Logic::One
            } else if m2.mean() > m4.mean() + 1e-9 {
                Logic::Zero
            } else {
                Logic::Invalid
            }
        }
        _ => Logic::Invalid,
    };

    cell.circuit.set_source_enabled("vbl", false);
    cell.circuit.set_source_enabled("vblb", false);
    cell.circuit.set_source_wave("vwl", SourceWave::Dc(0.0));
    cell.circuit.initial_conditions.clear();

    let mut records = Vec::new();
    let mut warm: Option<Vec<f64>> = cell.last_x.clone();
    let mut index = 0usize;
    let mut correct_readouts = 0usize;
    let mut readouts = 0usize;

    let solve_step = |cell: &mut Cell,
                          warm: &mut Option<Vec<f64>>,
                          index: &mut usize,
                          target: f64,
                          rep: usize,
                          phase: &'static str|
     -> Result<(f64, f64, f64, f64), BenchError> {
        let op = dc_operating_point(&cell.circuit, &cell.config.solver, warm.as_deref())
            .map_err(|e| BenchError::Protocol(format!("step {index}: {e}")))?;
        let vals = (op.voltage(n.vdd), op.voltage(n.wl), op.voltage(n.bl), op.voltage(n.blb));
        *warm = Some(op.x);
        *index += 1;
        let _ = (target, rep, phase);
        Ok(vals)
    };

    for &target in targets {
        for rep in 0..repetitions {
            // supply ramp in fixed increments
            let steps = (target / step_size).round() as usize;
            for k in 0..=steps {
                let v = (k as f64 * step_size).min(target);
                cell.circuit.set_source_wave("vvdd", SourceWave::Dc(v));
                let (vdd, wl, bl, blb) =
                    solve_step(cell, &mut warm, &mut index, target, rep, "ramp")?;
                records.push(StepRecord {
                    index: index - 1,
                    target,
                    repetition: rep,
                    phase: "ramp",
                    vdd,
                    wl,
                    bl,
                    blb,
                    correct: None,
                    weak_cell: None,
                });
            }
            // settle one extra step at the target before the wordline
            let (vdd, wl, bl, blb) = solve_step(cell, &mut warm, &mut index, target, rep, "hold")?;
            records.push(StepRecord {
                index: index - 1,
                target,
                repetition: rep,
                phase: "hold",
                vdd,
                wl,
                bl,
                blb,
                correct: None,
                weak_cell: None,
            });

            // readout: wordline on, sinks loading both bitlines
            cell.circuit.set_source_wave("vwl", SourceWave::Dc(target + wl_boost));
            cell.circuit.set_source_wave("ibl", SourceWave::Dc(i_bias));
            cell.circuit.set_source_wave("iblb", SourceWave::Dc(i_bias));
            cell.circuit.set_source_enabled("ibl", true);
            cell.circuit.set_source_enabled("iblb", true);
            let (vdd, wl, bl, blb) =
                solve_step(cell, &mut warm, &mut index, target, rep, "readout")?;
            let diff = bl - blb;
            let correct = match stored {
                Logic::One => diff >= 0.1,
                Logic::Zero => diff <= -0.1,
                Logic::Invalid => false,
            };
            // can the data-side load deliver the sink current at the
            // restored operating point?
            let weak = {
                let load = if stored == Logic::Zero { "m2" } else { "m4" };
                match (cell.circuit.fefet_state(load), cell.circuit.element(load)) {
                    (Some(state), Some(Element::Fefet { params, .. })) => {
                        fefet_current(state, params, 0.0, 0.0, target).abs() < i_bias
                    }
                    _ => false,
                }
            };
            readouts += 1;
            if correct {
                correct_readouts += 1;
            }
            records.push(StepRecord {
                index: index - 1,
                target,
                repetition: rep,
                phase: "readout",
                vdd,
                wl,
                bl,
                blb,
                correct: Some(correct),
                weak_cell: Some(weak),
            });

            // release and power off for the next cycle
            cell.circuit.set_source_wave("vwl", SourceWave::Dc(0.0));
            cell.circuit.set_source_enabled("ibl", false);
            cell.circuit.set_source_enabled("iblb", false);
            cell.circuit.set_source_wave("vvdd", SourceWave::Dc(0.0));
            let (vdd, wl, bl, blb) =
                solve_step(cell, &mut warm, &mut index, target, rep, "poweroff")?;
            records.push(StepRecord {
                index: index - 1,
                target,
                repetition: rep,
                phase: "poweroff",
                vdd,
                wl,
                bl,
                blb,
                correct: None,
                weak_cell: None,
            });
        }
    }

    // leave the cell powered off with bitlines driven low again
    cell.circuit.set_source_enabled("vbl", true);
    cell.circuit.set_source_enabled("vblb", true);
    cell.circuit.set_source_wave("vbl", SourceWave::Dc(0.0));
    cell.circuit.set_source_wave("vblb", SourceWave::Dc(0.0));
    cell.rails = [0.0; 4];
    cell.last_x = warm;

    Ok(StepTrace { stored, records, readouts, correct_readouts })
}
