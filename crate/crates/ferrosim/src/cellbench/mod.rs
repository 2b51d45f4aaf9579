//! Programmatic 6T SRAM cells and executable operation schedules.
//!
//! Two topologies share one netlist shape: the baseline cell with PMOS
//! loads, and the nonvolatile variant with ferroelectric PMOS loads (M2,
//! M4). Cross-coupling: M1 (pull-down of Q, gate QB), M3 (pull-down of QB,
//! gate Q), M2 (load of QB, gate Q), M4 (load of Q, gate QB), access
//! transistors M5 (BL–Q) and M6 (BLB–QB) gated by WL.

mod build;
mod monte_carlo;
mod ops;
mod report;
mod schedule;

pub use build::{build_cell, Cell, CellNodes};
pub use monte_carlo::{monte_carlo_restore, McOutcome};
pub use ops::{
    run_hold_disturb, run_power_off, run_power_off_for, run_read, run_restore_one_step,
    run_restore_two_phase, run_silicon_protocol, run_write, DisturbReport, PowerOffReport,
    ReadReport, RestoreReport, StepRecord, StepTrace, WriteReport,
};
pub use report::{Assertion, ScenarioReport};
pub use schedule::{OperationSchedule, Phase, RailBias, ScheduleError};

use crate::config::SimConfig;
use crate::device::{FeFetParams, MosfetParams};
use crate::engine::{SolverConfig, SolverError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellTopology {
    Baseline6T,
    Nvsram6T,
}

/// Load transistor flavor.
#[derive(Debug, Clone)]
pub enum PullUp {
    Mosfet(MosfetParams),
    Fefet(FeFetParams),
}

/// Full cell parameterization, per transistor instance so Monte Carlo can
/// perturb each device independently.
#[derive(Debug, Clone)]
pub struct CellConfig {
    pub topology: CellTopology,
    /// Pull-downs of Q and QB.
    pub m1: MosfetParams,
    pub m3: MosfetParams,
    /// Access transistors BL–Q and BLB–QB.
    pub m5: MosfetParams,
    pub m6: MosfetParams,
    /// Loads of QB and Q.
    pub pu_m2: PullUp,
    pub pu_m4: PullUp,
    pub segments: usize,
    pub c_bitline: f64,
    pub c_node: f64,
    pub vdd_nominal: f64,
    pub vdd_program: f64,
    pub t_program: f64,
    pub wl_program_boost: f64,
    pub restore_ramp: f64,
    pub read_threshold: f64,
    pub read_window: f64,
    pub solver: SolverConfig,
}

impl CellConfig {
    pub fn baseline(cfg: &SimConfig) -> Self {
        Self::build(cfg, CellTopology::Baseline6T)
    }

    pub fn nvsram(cfg: &SimConfig) -> Self {
        Self::build(cfg, CellTopology::Nvsram6T)
    }

    fn build(cfg: &SimConfig, topology: CellTopology) -> Self {
        let pu = match topology {
            CellTopology::Baseline6T => PullUp::Mosfet(cfg.pu_baseline),
            CellTopology::Nvsram6T => PullUp::Fefet(cfg.fefet),
        };
        Self {
            topology,
            m1: cfg.pd,
            m3: cfg.pd,
            m5: cfg.pg,
            m6: cfg.pg,
            pu_m2: pu.clone(),
            pu_m4: pu,
            segments: cfg.segments,
            c_bitline: cfg.c_bitline,
            c_node: cfg.c_node,
            vdd_nominal: cfg.vdd_nominal,
            vdd_program: cfg.vdd_program,
            t_program: cfg.t_program,
            wl_program_boost: cfg.wl_program_boost,
            restore_ramp: cfg.restore_ramp,
            read_threshold: cfg.read_threshold,
            read_window: cfg.read_window,
            solver: cfg.solver,
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if !(self.c_bitline > 0.0 && self.c_node > 0.0) {
            return Err(BenchError::Config("capacitances must be > 0".into()));
        }
        if !(self.vdd_program > self.vdd_nominal) {
            return Err(BenchError::Config("vdd_program must exceed vdd_nominal".into()));
        }
        Ok(())
    }
}

/// Derived logic value of the latch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Logic {
    One,
    Zero,
    Invalid,
}

/// Snapshot of the storage nodes plus load polarization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellState {
    pub q: f64,
    pub qb: f64,
    pub logic: Logic,
    /// Mean polarization of the QB-side load (None for baseline).
    pub m2_mean_p: Option<f64>,
    /// Mean polarization of the Q-side load.
    pub m4_mean_p: Option<f64>,
}

impl CellState {
    /// One iff q - qb > 0.8 vdd, Zero mirrored, Invalid otherwise. The 80%
    /// threshold is an artifact convention for "latched".
    pub fn classify(q: f64, qb: f64, vdd: f64) -> Logic {
        if q - qb > 0.8 * vdd {
            Logic::One
        } else if qb - q > 0.8 * vdd {
            Logic::Zero
        } else {
            Logic::Invalid
        }
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("cell configuration: {0}")]
    Config(String),
    #[error("schedule: {0}")]
    Schedule(#[from] ScheduleError),
    #[error("solver: {0}")]
    Solver(#[from] SolverError),
    #[error("{0}")]
    Protocol(String),
    #[error("read failed: differential never reached {0} V within the window")]
    ReadTimeout(f64),
}
