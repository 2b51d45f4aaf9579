//! Full nonvolatile power cycle: write a bit, cut the power, ramp it back,
//! and read the restored value.

use ferrosim::cellbench::{
    build_cell, run_power_off, run_read, run_restore_one_step, run_write, CellConfig,
};
use ferrosim::SimConfig;

fn main() {
    let cfg = SimConfig::default_config();
    let mut cell = build_cell(&CellConfig::nvsram(&cfg)).expect("build");

    let w = run_write(&mut cell, true).expect("write");
    println!(
        "after write 1:   q = {:+.3} V  qb = {:+.3} V  logic = {:?}",
        w.state.q, w.state.qb, w.state.logic
    );
    println!(
        "  load polarization: m2 = {:+.3}  m4 = {:+.3}",
        w.state.m2_mean_p.unwrap(),
        w.state.m4_mean_p.unwrap()
    );

    let off = run_power_off(&mut cell).expect("power off");
    println!(
        "after power-off: |q| = {:.1} mV  |qb| = {:.1} mV  max |dp| = {:.2e}",
        off.q_abs * 1e3,
        off.qb_abs * 1e3,
        off.max_seg_delta_p
    );

    let r = run_restore_one_step(&mut cell, cfg.vdd_nominal, cfg.restore_ramp).expect("restore");
    println!(
        "after restore:   q = {:+.3} V  qb = {:+.3} V  logic = {:?}",
        r.state.q, r.state.qb, r.state.logic
    );

    let (read, _wave) = run_read(&mut cell).expect("read");
    println!(
        "read back:       value = {:?}  latency = {:.1} ps  non-destructive = {}",
        read.value,
        read.latency * 1e12,
        read.non_destructive
    );
}
