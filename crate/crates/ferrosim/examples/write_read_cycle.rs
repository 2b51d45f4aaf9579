//! Nonvolatile write followed by a timed differential read, with the read
//! waveform exported for plotting. Also runs the baseline cell for the
//! latency comparison.

use ferrosim::analysis::read_latency;
use ferrosim::cellbench::{build_cell, run_read, run_write, CellConfig};
use ferrosim::SimConfig;

fn main() {
    let cfg = SimConfig::default_config();

    let mut nv = build_cell(&CellConfig::nvsram(&cfg)).unwrap();
    let w = run_write(&mut nv, true).unwrap();
    println!(
        "programmed: q = {:.3} V, qb = {:.3} V, m2 p = {:+.3}, m4 p = {:+.3}",
        w.state.q,
        w.state.qb,
        w.state.m2_mean_p.unwrap(),
        w.state.m4_mean_p.unwrap()
    );
    let (read, wave) = run_read(&mut nv).unwrap();
    let lat = read_latency(&wave, &nv.circuit, cfg.read_threshold).unwrap();
    println!(
        "nonvolatile read: value {:?}, latency {:.1} ps (100 mV differential)",
        read.value,
        lat.latency * 1e12
    );

    let mut base = build_cell(&CellConfig::baseline(&cfg)).unwrap();
    run_write(&mut base, true).unwrap();
    let (_, wave_b) = run_read(&mut base).unwrap();
    let lat_b = read_latency(&wave_b, &base.circuit, cfg.read_threshold).unwrap();
    println!(
        "baseline read:    latency {:.1} ps ({:+.2}% difference)",
        lat_b.latency * 1e12,
        (lat.latency / lat_b.latency - 1.0) * 100.0
    );

    std::fs::create_dir_all("target/example-out").unwrap();
    let mut f = std::fs::File::create("target/example-out/read_waveform.csv").unwrap();
    wave.write_csv(&mut f, &nv.circuit).unwrap();
    println!("read waveform written to target/example-out/read_waveform.csv");
}
