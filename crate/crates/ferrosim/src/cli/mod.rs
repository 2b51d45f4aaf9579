//! Command-line front end: `sim` runs netlists, `bench` runs cell
//! scenarios with pass/fail assertions, `analyze` emits figure-ready data,
//! and `device` shortcuts the device-level emitters.
//!
//! Exit codes: 0 success, 1 usage/parse errors, 2 solver errors,
//! 3 failed scenario assertions.

mod outdir;
mod scenarios;
mod simcmd;

pub use outdir::{OutDir, RunManifest};

use crate::config::SimConfig;
use crate::units::parse_si;
use clap::{Parser, Subcommand};
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_ASSERTION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ferrosim", version, about = "Ferroelectric nonvolatile 6T SRAM cell simulator")]
pub struct Args {
    /// Configuration file overlaying the built-in defaults
    /// (FERRO_CONFIG is honored as a lower-priority overlay).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory for CSV/JSON results and the run manifest.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Random seed (Monte Carlo scenarios).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and run a netlist file; directives drive the analyses.
    Sim { netlist: PathBuf },
    /// Run a cell scenario and emit a pass/fail report.
    Bench {
        /// write-read | power-cycle | restore-matrix | silicon-protocol |
        /// disturb | mc-yield
        scenario: String,
        /// Data bit for write-based scenarios (0 or 1).
        #[arg(long)]
        data: Option<u8>,
        /// Restore targets, e.g. `0.25,0.5,0.75,1.0`.
        #[arg(long)]
        vdd_targets: Option<String>,
        /// Monte Carlo run count.
        #[arg(long)]
        runs: Option<usize>,
        /// Threshold-voltage sigma with SI suffix, e.g. `30m`.
        #[arg(long)]
        sigma_vth: Option<String>,
        /// Hold duration for the disturb scenario, e.g. `1000`.
        #[arg(long)]
        duration: Option<String>,
        /// Bitline bias-sink current for the stepped protocol, e.g. `1u`.
        #[arg(long)]
        i_bias: Option<String>,
    },
    /// Emit figure-ready analysis data.
    Analyze {
        /// snm | idvg | halid | mw
        kind: String,
        /// Butterfly bias mode: hold | read | write.
        #[arg(long)]
        mode: Option<String>,
        /// Cell topology: baseline | nvsram.
        #[arg(long)]
        topology: Option<String>,
        /// Stored state for the nonvolatile cell (0 or 1).
        #[arg(long)]
        state: Option<u8>,
        /// Memory-window write scheme: gate | gate-drain.
        #[arg(long)]
        scheme: Option<String>,
    },
    /// Device-level shortcuts: idvg | halid.
    Device {
        kind: String,
    },
}

/// Entry point for the binary; returns the process exit code.
pub fn run() -> i32 {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            // clap prints its own help/version on stdout with code 0
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let command_echo = std::env::args().collect::<Vec<_>>().join(" ");

    let cfg = match SimConfig::resolve(args.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let seed = args.seed.unwrap_or(cfg.mc_seed);

    let out = match OutDir::create(args.out.clone()) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: cannot create output directory: {e}");
            return EXIT_USAGE;
        }
    };

    let result = match &args.command {
        Command::Sim { netlist } => simcmd::cmd_sim(netlist, &cfg, out, &command_echo),
        Command::Bench { scenario, data, vdd_targets, runs, sigma_vth, duration, i_bias } => {
            let overrides = scenarios::BenchOverrides {
                data: data.map(|d| d != 0),
                vdd_targets: match vdd_targets {
                    Some(t) => match parse_list(t) {
                        Ok(v) => Some(v),
                        Err(e) => {
                            eprintln!("error: --vdd-targets: {e}");
                            return EXIT_USAGE;
                        }
                    },
                    None => None,
                },
                runs: *runs,
                sigma_vth: match parse_opt_si(sigma_vth, "--sigma-vth") {
                    Ok(v) => v,
                    Err(code) => return code,
                },
                duration: match parse_opt_si(duration, "--duration") {
                    Ok(v) => v,
                    Err(code) => return code,
                },
                i_bias: match parse_opt_si(i_bias, "--i-bias") {
                    Ok(v) => v,
                    Err(code) => return code,
                },
                seed,
            };
            scenarios::cmd_bench(scenario, &cfg, overrides, out, &command_echo)
        }
        Command::Analyze { kind, mode, topology, state, scheme } => scenarios::cmd_analyze(
            kind,
            mode.as_deref(),
            topology.as_deref(),
            *state,
            scheme.as_deref(),
            &cfg,
            out,
            &command_echo,
            seed,
        ),
        Command::Device { kind } => {
            let mapped = match kind.as_str() {
                "idvg" => "idvg",
                "halid" => "halid",
                other => {
                    eprintln!("error: unknown device analysis '{other}' (valid: idvg, halid)");
                    return EXIT_USAGE;
                }
            };
            scenarios::cmd_analyze(mapped, None, None, None, None, &cfg, out, &command_echo, seed)
        }
    };

    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn parse_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|s| parse_si(s.trim()).map_err(|e| e.to_string()))
        .collect()
}

fn parse_opt_si(value: &Option<String>, flag: &str) -> Result<Option<f64>, i32> {
    match value {
        None => Ok(None),
        Some(text) => match parse_si(text) {
            Ok(v) => Ok(Some(v)),
            Err(e) => {
                eprintln!("error: {flag}: {e}");
                Err(EXIT_USAGE)
            }
        },
    }
}

/// Error wrapper carrying the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Solver(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Solver(_) => EXIT_SOLVER,
            CliError::Io(_) => EXIT_USAGE,
        }
    }
}
