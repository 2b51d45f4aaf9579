//! Restore yield under device variation: every transistor's threshold gets
//! an independent gaussian perturbation (plus relative memory-window spread
//! on the ferroelectric loads), and each sampled cell runs the full
//! write / power-off / restore pipeline.

use ferrosim::cellbench::{monte_carlo_restore, CellConfig};
use ferrosim::SimConfig;

fn main() {
    let cfg = SimConfig::default_config();
    let config = CellConfig::nvsram(&cfg);
    println!("200 cells per point, seed {}\n", cfg.mc_seed);
    println!("{:>12} {:>8}", "sigma_vth", "yield");
    for sigma_mv in [0.0, 30.0, 60.0, 120.0, 300.0] {
        let out = monte_carlo_restore(
            &config,
            sigma_mv * 1e-3,
            cfg.mc_sigma_mw_rel,
            200,
            cfg.mc_seed,
        )
        .unwrap();
        println!("{:>9} mV {:>8.3}", sigma_mv, out.yield_fraction);
    }
}
