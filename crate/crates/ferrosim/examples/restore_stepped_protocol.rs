//! Stepped supply-ramp readout: the measurement-style protocol that ramps
//! VDD in 100 mV operating-point steps, holds, asserts the wordline with
//! 1 uA sinks loading both bitlines, and records the latched levels —
//! repeated twice per target supply for both stored bits.

use ferrosim::cellbench::{
    build_cell, run_power_off, run_silicon_protocol, run_write, CellConfig,
};
use ferrosim::SimConfig;

fn main() {
    let cfg = SimConfig::default_config();
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
        println!(
            "stored {}: {}/{} readouts latched correctly",
            data as u8, trace.correct_readouts, trace.readouts
        );
        for r in trace.records.iter().filter(|r| r.phase == "readout") {
            println!(
                "  target {:.2} V rep {}: bl = {:+.3} V, blb = {:+.3} V{}",
                r.target,
                r.repetition,
                r.bl,
                r.blb,
                if r.weak_cell == Some(true) { "  (sink exceeds load drive)" } else { "" }
            );
        }
    }
}
