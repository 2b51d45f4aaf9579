//! Transistor-level circuit simulator and benchmark harness for a
//! ferroelectric nonvolatile 6T SRAM cell.
//!
//! The crate is organized as a library with one thin command-line binary.
//! The main subsystems:
//!
//! * [`device`] — compact models: a smooth EKV-flavored MOSFET and a
//!   multi-segment ferroelectric FET with Merz-law switching kinetics,
//!   plus device-level measurement protocols (Id–Vg sweeps, memory window,
//!   switching-boundary calibration).
//! * [`netlist`] — a SPICE-subset netlist parser and elaborator.
//! * [`engine`] — modified nodal analysis with Newton–Raphson, DC operating
//!   point / DC sweep, and damped-implicit transient integration coupled to
//!   polarization updates by operator splitting.
//! * [`cellbench`] — programmatic construction of baseline 6T SRAM and the
//!   FeFET-based nonvolatile variant, with executable bias schedules for
//!   write / power-off / restore / read / hold, a stepped measurement
//!   protocol, and Monte Carlo yield analysis.
//! * [`analysis`] — metric extraction: butterfly curves and static noise
//!   margin, read latency, memory window, switching-boundary curves and
//!   disturb projections, emitted as figure-ready CSV/JSON.
//! * [`config`] — one INI-style configuration file holding every default;
//!   models never hard-code electrical parameters.
//!
//! Runnable examples for each major capability live under `examples/`.

pub mod analysis;
pub mod cellbench;
pub mod cli;
pub mod config;
pub mod curve;
pub mod device;
pub mod engine;
pub mod netlist;
pub mod units;

pub use config::SimConfig;
