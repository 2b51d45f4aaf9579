//! Monte Carlo restore-yield analysis under threshold-voltage variation.

use super::build::build_cell;
use super::ops::{run_power_off, run_restore_one_step, run_write};
use super::{BenchError, CellConfig, Logic, PullUp};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct McOutcome {
    pub runs: usize,
    pub correct: usize,
    pub yield_fraction: f64,
    pub sigma_vth: f64,
    pub sigma_mw_rel: f64,
    pub seed: u64,
}

/// Samples a zero-mean gaussian via Box–Muller from the run's own stream,
/// so results are independent of thread scheduling.
fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn perturb(config: &CellConfig, sigma_vth: f64, sigma_mw_rel: f64, rng: &mut ChaCha8Rng) -> CellConfig {
    let mut c = config.clone();
    for p in [&mut c.m1, &mut c.m3, &mut c.m5, &mut c.m6] {
        p.vth0 += sigma_vth * gauss(rng);
    }
    for pu in [&mut c.pu_m2, &mut c.pu_m4] {
        match pu {
            PullUp::Mosfet(p) => p.vth0 += sigma_vth * gauss(rng),
            PullUp::Fefet(p) => {
                p.base.vth0 += sigma_vth * gauss(rng);
                p.mw *= 1.0 + sigma_mw_rel * gauss(rng);
            }
        }
    }
    c
}

/// Runs `n_runs` independent cells, each with per-transistor threshold
/// perturbations (and relative memory-window spread for the ferroelectric
/// loads), through write(1) -> power-off -> one-step restore. Returns the
/// fraction that restore the written bit. Deterministic for a fixed seed:
/// every run draws from its own counter-derived stream.
pub fn monte_carlo_restore(
    config: &CellConfig,
    sigma_vth: f64,
    sigma_mw_rel: f64,
    n_runs: usize,
    seed: u64,
) -> Result<McOutcome, BenchError> {
    if n_runs == 0 {
        return Err(BenchError::Config("n_runs must be > 0".into()));
    }
    let results: Vec<bool> = (0..n_runs)
        .into_par_iter()
        .map(|run| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(run as u64 + 1);
            let cfg = perturb(config, sigma_vth, sigma_mw_rel, &mut rng);
            let ok = (|| -> Result<bool, BenchError> {
                let mut cell = build_cell(&cfg)?;
                run_write(&mut cell, true)?;
                run_power_off(&mut cell)?;
                let r =
                    run_restore_one_step(&mut cell, cfg.vdd_nominal, cfg.restore_ramp)?;
                Ok(r.state.logic == Logic::One)
            })();
            // a run that fails to converge counts as a failed restore
            ok.unwrap_or(false)
        })
        .collect();
    let correct = results.iter().filter(|b| **b).count();
    Ok(McOutcome {
        runs: n_runs,
        correct,
        yield_fraction: correct as f64 / n_runs as f64,
        sigma_vth,
        sigma_mw_rel,
        seed,
    })
}
