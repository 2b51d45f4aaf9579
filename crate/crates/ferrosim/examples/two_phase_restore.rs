//! Restore hardening: residual charge parked on the wrong storage node can
//! defeat the plain supply ramp. The two-phase sequence (bitlines grounded
//! with the wordline asserted, then the ramp) wipes the residual first.

use ferrosim::cellbench::{
    build_cell, run_power_off, run_restore_one_step, run_restore_two_phase, run_write,
    CellConfig, Logic,
};
use ferrosim::SimConfig;

fn prepare(cfg: &SimConfig, residual_on_qb: f64) -> ferrosim::cellbench::Cell {
    let mut cell = build_cell(&CellConfig::nvsram(cfg)).unwrap();
    run_write(&mut cell, true).unwrap();
    run_power_off(&mut cell).unwrap();
    cell.override_node(cell.nodes.qb, residual_on_qb);
    cell
}

fn main() {
    let cfg = SimConfig::default_config();
    println!("stored bit: 1 (restore should latch One)\n");
    println!("{:>12} {:>12} {:>12}", "residual", "one-step", "two-phase");
    for offset in [0.0, 0.2, 0.4, 0.6, 0.8] {
        let mut a = prepare(&cfg, offset);
        let one = run_restore_one_step(&mut a, cfg.vdd_nominal, cfg.restore_ramp).unwrap();
        let mut b = prepare(&cfg, offset);
        let two = run_restore_two_phase(&mut b, cfg.vdd_nominal).unwrap();
        println!(
            "{:>10.1} V {:>12} {:>12}",
            offset,
            format!("{:?}", one.state.logic),
            format!("{:?}", two.state.logic)
        );
        assert_eq!(two.state.logic, Logic::One, "two-phase must always recover");
    }
}
