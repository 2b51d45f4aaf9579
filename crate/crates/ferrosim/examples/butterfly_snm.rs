//! Butterfly curves and static noise margins. The baseline cell shows the
//! classic two-lobe bistable butterfly; the programmed nonvolatile cell is
//! monostable — one visible lobe, one stable intersection — because the
//! gate-drain-written load cannot pull its node up at operating bias.

use ferrosim::analysis::{butterfly, ButterflyMode};
use ferrosim::cellbench::{build_cell, run_write, CellConfig};
use ferrosim::SimConfig;
use std::fs;

fn main() {
    let cfg = SimConfig::default_config();
    fs::create_dir_all("target/example-out").unwrap();

    let mut base = build_cell(&CellConfig::baseline(&cfg)).unwrap();
    run_write(&mut base, true).unwrap();
    let mut nv = build_cell(&CellConfig::nvsram(&cfg)).unwrap();
    run_write(&mut nv, true).unwrap();

    for (label, cell) in [("baseline", &base), ("nvsram_state1", &nv)] {
        for mode in [ButterflyMode::Hold, ButterflyMode::Read] {
            let b = butterfly(cell, mode, cfg.snm_step, cfg.bleed_siemens, cfg.selfsustain_floor)
                .unwrap();
            let stable = b.intersections.iter().filter(|i| i.stable && i.self_sustained).count();
            println!(
                "{label:>14} {mode:?}: {} stable point(s), lobes {:?} V, monostable = {}",
                stable,
                b.snm_lobes.iter().map(|s| (s * 1e3).round() / 1e3).collect::<Vec<_>>(),
                b.monostable
            );
            let name = format!("target/example-out/butterfly_{label}_{mode:?}.csv");
            let mut csv = String::from("curve,q_volts,qb_volts\n");
            for (q, qb) in &b.vtc_forward.points {
                csv.push_str(&format!("forward,{q},{qb}\n"));
            }
            for (qb, q) in &b.vtc_mirrored.points {
                csv.push_str(&format!("mirrored,{q},{qb}\n"));
            }
            fs::write(&name, csv).unwrap();
        }
    }
    println!("curves written to target/example-out/");
}
