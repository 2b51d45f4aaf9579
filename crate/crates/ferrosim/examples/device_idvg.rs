//! Device-level Id–Vg characterization: condition the ferroelectric FET
//! into its LVT and HVT states with saturating gate pulses, reverse-sweep
//! the gate, and extract the memory window at the reference current.

use ferrosim::device::{idvg_sweep, memory_window, Device, SweepProtocol};
use ferrosim::SimConfig;
use std::fs;

fn main() {
    let cfg = SimConfig::default_config();
    let dev = Device::Fefet(cfg.fefet);

    let (lvt, _) = idvg_sweep(&dev, None, &SweepProtocol::p_type_reverse(true)).unwrap();
    let (hvt, _) = idvg_sweep(&dev, None, &SweepProtocol::p_type_reverse(false)).unwrap();
    let mw = memory_window(&lvt, &hvt, cfg.i_crit).unwrap();

    println!("reverse sweep 1.0 -> -1.5 V, 50 mV steps, vds = -50 mV");
    println!("  LVT current at vg = -1.0 V: {:.2} uA", lvt.y_at(-1.0).abs() * 1e6);
    println!("  HVT current at vg = -1.0 V: {:.3e} A", hvt.y_at(-1.0).abs());
    println!("  memory window at {:.0e} A: {:.3} V", cfg.i_crit, mw);

    fs::create_dir_all("target/example-out").unwrap();
    for (name, curve) in [("idvg_lvt.csv", &lvt), ("idvg_hvt.csv", &hvt)] {
        let mut f = fs::File::create(format!("target/example-out/{name}")).unwrap();
        curve.write_csv(&mut f, "vg_volts", "id_amperes").unwrap();
    }
    println!("curves written to target/example-out/");
}
