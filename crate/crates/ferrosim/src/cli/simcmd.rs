//! `sim` subcommand: parse a netlist and run its analysis directives.

use super::outdir::OutDir;
use super::{CliError, EXIT_OK};
use crate::config::SimConfig;
use crate::engine::{dc_operating_point, dc_sweep, transient};
use crate::netlist::{elaborate, parse, AnalysisDirective, ModelLibrary};
use crate::units::fmt_sig;
use std::path::Path;

pub fn cmd_sim(
    path: &Path,
    cfg: &SimConfig,
    mut out: OutDir,
    command_echo: &str,
) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let netlist = parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let models =
        ModelLibrary::from_netlist(&netlist).map_err(|e| CliError::Usage(e.to_string()))?;
    let elaborated =
        elaborate(&netlist, &models).map_err(|e| CliError::Usage(e.to_string()))?;
    for w in &elaborated.warnings {
        eprintln!("warning: {w}");
    }
    let mut circuit = elaborated.circuit;
    let mut solver = cfg.solver;

    for (idx, directive) in elaborated.plan.iter().enumerate() {
        match directive {
            AnalysisDirective::Ic { .. } => {} // applied during elaboration
            AnalysisDirective::Op => {
                let op = dc_operating_point(&circuit, &solver, None)
                    .map_err(|e| CliError::Solver(e.to_string()))?;
                let mut csv = String::from("name,value\n");
                for (i, name) in circuit.node_names().iter().enumerate() {
                    csv.push_str(&format!("v_{name}_volts,{}\n", fmt_sig(op.x[i], 9)));
                }
                for b in 0..circuit.vsource_count() {
                    csv.push_str(&format!(
                        "i_branch{b}_amperes,{}\n",
                        fmt_sig(op.branch_current(b), 9)
                    ));
                }
                out.write(&format!("op_{idx}.csv"), &csv)?;
            }
            AnalysisDirective::Dc { source, start, stop, step } => {
                let pts = dc_sweep(&mut circuit, source, *start, *stop, *step, &solver)
                    .map_err(|e| CliError::Solver(e.to_string()))?;
                let mut csv = String::from("sweep_value");
                for name in circuit.node_names() {
                    csv.push_str(&format!(",v_{name}_volts"));
                }
                csv.push('\n');
                for (v, op) in &pts {
                    csv.push_str(&fmt_sig(*v, 9));
                    for i in 0..circuit.node_count() {
                        csv.push_str(&format!(",{}", fmt_sig(op.x[i], 9)));
                    }
                    csv.push('\n');
                }
                out.write(&format!("dc_{idx}.csv"), &csv)?;
            }
            AnalysisDirective::Tran { dtmax, tstop } => {
                solver.dtmax = *dtmax;
                let wave = transient(&mut circuit, *tstop, &solver)
                    .map_err(|e| CliError::Solver(e.to_string()))?;
                let mut buf = Vec::new();
                wave.write_csv(&mut buf, &circuit).map_err(CliError::Io)?;
                out.write(&format!("tran_{idx}.csv"), &String::from_utf8(buf).unwrap())?;
            }
        }
    }
    out.finish(command_echo.to_string(), &cfg.digest, 0)?;
    Ok(EXIT_OK)
}
