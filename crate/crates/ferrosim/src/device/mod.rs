//! Compact device models and device-level measurement protocols.
//!
//! All types here are immutable-in / new-out value objects and every
//! operation is a pure function, safe to call from any number of threads.

mod fefet;
mod kinetics;
mod mosfet;
mod sweep;

pub use fefet::{
    apply_program_pulse, effective_mosfet, fefet_current, fefet_effective_vth, segment_fields,
    step_polarization, FeFetParams, FeFetState, ProgramPulse,
};
pub use kinetics::{calibrate_kinetics, switching_boundary_width, SwitchingKinetics};
pub use mosfet::{calibrate_drive, mosfet_current, mosfet_eval, MosfetEval, MosfetParams, Polarity};
pub use sweep::{idvg_sweep, memory_window, Device, SweepProtocol};

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum DeviceError {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("kinetics calibration unsolvable: {0}")]
    KineticsCalibration(String),
    #[error("drive calibration failed: {0}")]
    DriveCalibration(String),
    #[error("boundary width undefined at zero amplitude")]
    ZeroAmplitude,
    #[error("sweep protocol invalid: {0}")]
    InvalidProtocol(String),
    #[error("curve never crosses {level:.3e} A ({which})")]
    NoCrossing { which: String, level: f64 },
}
