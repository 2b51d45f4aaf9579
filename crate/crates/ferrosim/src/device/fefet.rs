//! Multi-segment ferroelectric FET model.
//!
//! The ferroelectric layer is discretized into channel segments ordered
//! source-side to drain-side, each carrying a polarization in [-1, +1]
//! (+1 fully LVT, -1 fully HVT for both polarities). The mean polarization
//! shifts the threshold by up to half the memory window in either
//! direction, with +1 always the more conductive state.
//!
//! Programming fields: each segment sees `v_fe = vg - v_ch(x)` where
//! `v_ch(x)` is the local channel potential. With the channel off (the only
//! condition under which source and drain differ during programming in this
//! cell), the reverse-biased junction's depletion region dominates the
//! 30 nm-class channel: away from a short pinning sliver at each terminal,
//! the surface tracks the depleted-junction potential (the lower terminal
//! for P devices, the higher one for N). The sliver width is the
//! `pinning_fraction` of the channel. A conducting channel has vs = vd in
//! every cell operating condition, where the profile is uniform anyway.
//!
//! Sign convention for p-FeFETs: positive gate-to-channel field drives
//! toward HVT (p -> -1), negative toward LVT (p -> +1); n-FeFETs mirror.

use super::kinetics::SwitchingKinetics;
use super::mosfet::{mosfet_current, MosfetParams, Polarity};
use super::DeviceError;
use serde::{Deserialize, Serialize};

/// Per-channel-segment polarization ensemble; the nonvolatile bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeFetState {
    /// Source-side to drain-side polarization values, each in [-1, +1].
    pub segments: Vec<f64>,
}

impl FeFetState {
    pub fn uniform(p: f64, segment_count: usize) -> Self {
        assert!(segment_count > 0);
        assert!((-1.0..=1.0).contains(&p));
        Self { segments: vec![p; segment_count] }
    }

    /// Fully LVT (+1) state.
    pub fn lvt(segment_count: usize) -> Self {
        Self::uniform(1.0, segment_count)
    }

    /// Fully HVT (-1) state.
    pub fn hvt(segment_count: usize) -> Self {
        Self::uniform(-1.0, segment_count)
    }

    pub fn mean(&self) -> f64 {
        self.segments.iter().sum::<f64>() / self.segments.len() as f64
    }

    pub fn validate(&self) -> Result<(), DeviceError> {
        if self.segments.is_empty() {
            return Err(DeviceError::InvalidParams("state needs at least one segment".into()));
        }
        if self.segments.iter().any(|p| !(-1.0..=1.0).contains(p)) {
            return Err(DeviceError::InvalidParams("segment polarization outside [-1, 1]".into()));
        }
        Ok(())
    }

    /// Largest per-segment |delta| between two states.
    pub fn max_abs_delta(&self, other: &FeFetState) -> f64 {
        self.segments
            .iter()
            .zip(&other.segments)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// FeFET parameters: an underlying MOSFET plus the memory window and
/// switching kinetics.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FeFetParams {
    pub base: MosfetParams,
    /// Full memory window [V], symmetric about `base.vth0`.
    pub mw: f64,
    pub kinetics: SwitchingKinetics,
    /// Fraction of the channel over which the potential relaxes from a
    /// terminal to the depleted-junction potential (see module docs).
    pub pinning_fraction: f64,
}

impl FeFetParams {
    pub fn new(base: MosfetParams, mw: f64, kinetics: SwitchingKinetics) -> Self {
        Self { base, mw, kinetics, pinning_fraction: 0.125 }
    }

    pub fn validate(&self) -> Result<(), DeviceError> {
        self.base.validate()?;
        if !(self.mw > 0.0) {
            return Err(DeviceError::InvalidParams("mw must be > 0".into()));
        }
        if !(0.0..0.5).contains(&self.pinning_fraction) {
            return Err(DeviceError::InvalidParams("pinning_fraction must be in [0, 0.5)".into()));
        }
        Ok(())
    }
}

/// Terminal biases held for a fixed-width programming pulse.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProgramPulse {
    pub vg: f64,
    pub vs: f64,
    pub vd: f64,
    /// Pulse width [s], >= 0.
    pub width: f64,
}

/// Effective threshold: `vth0` shifted by half the memory window times the
/// mean polarization, signed so p = +1 is always the more conductive state
/// (lower |vth| for P, lower vth for N).
pub fn fefet_effective_vth(state: &FeFetState, params: &FeFetParams) -> f64 {
    let shift = 0.5 * params.mw * state.mean();
    match params.base.polarity {
        Polarity::N => params.base.vth0 - shift,
        Polarity::P => params.base.vth0 + shift,
    }
}

/// Underlying MOSFET with the polarization-shifted threshold substituted.
pub fn effective_mosfet(state: &FeFetState, params: &FeFetParams) -> MosfetParams {
    let mut m = params.base;
    m.vth0 = fefet_effective_vth(state, params);
    m
}

/// Drain current of the FeFET in its present polarization state, using the
/// same sign convention as [`mosfet_current`].
pub fn fefet_current(state: &FeFetState, params: &FeFetParams, vg: f64, vd: f64, vs: f64) -> f64 {
    mosfet_current(&effective_mosfet(state, params), vg, vd, vs)
}

/// Local channel potential at normalized position `x` (0 = source edge,
/// 1 = drain edge) for polarization purposes.
fn channel_potential(params: &FeFetParams, x: f64, vs: f64, vd: f64) -> f64 {
    // Depleted-junction potential the mid-channel surface tracks.
    let v_pin = match params.base.polarity {
        Polarity::P => vs.min(vd),
        Polarity::N => vs.max(vd),
    };
    let l = params.pinning_fraction;
    if l == 0.0 {
        return v_pin;
    }
    if x < l {
        vs + (v_pin - vs) * (x / l)
    } else if x > 1.0 - l {
        vd + (v_pin - vd) * ((1.0 - x) / l)
    } else {
        v_pin
    }
}

/// Field across the ferroelectric at each segment midpoint.
pub fn segment_fields(params: &FeFetParams, n: usize, vg: f64, vd: f64, vs: f64) -> Vec<f64> {
    (0..n)
        .map(|s| {
            let x = (s as f64 + 0.5) / n as f64;
            vg - channel_potential(params, x, vs, vd)
        })
        .collect()
}

/// Advances the polarization ensemble under constant terminal bias for
/// `dt` seconds. Each segment relaxes first-order toward the field-selected
/// target: `p <- p_tgt + (p - p_tgt) * exp(-dt / tau(|v_fe|))`. Zero field
/// or zero time leaves a segment exactly unchanged.
pub fn step_polarization(
    state: &FeFetState,
    params: &FeFetParams,
    vg: f64,
    vd: f64,
    vs: f64,
    dt: f64,
) -> FeFetState {
    assert!(dt >= 0.0, "dt must be >= 0");
    if dt == 0.0 {
        return state.clone();
    }
    let n = state.segments.len();
    let fields = segment_fields(params, n, vg, vd, vs);
    let mut out = state.clone();
    for (p, &v_fe) in out.segments.iter_mut().zip(&fields) {
        if v_fe == 0.0 {
            continue;
        }
        // p-FeFET: positive field -> HVT (-1); n-FeFET mirrored.
        let p_tgt = match params.base.polarity {
            Polarity::P => -v_fe.signum(),
            Polarity::N => v_fe.signum(),
        };
        let ln_rate = params.kinetics.ln_rate(v_fe.abs(), dt);
        let new = if ln_rate > 6.6 {
            // dt >> tau: fully switched to target.
            p_tgt
        } else {
            let rate = ln_rate.exp(); // dt / tau
            if rate < 1e-12 {
                // first-order progress, keeps sub-1e-12 drifts measurable
                *p + (p_tgt - *p) * rate
            } else {
                p_tgt + (*p - p_tgt) * (-rate).exp()
            }
        };
        *p = new.clamp(-1.0, 1.0);
    }
    out
}

/// Single quasi-static polarization step over the pulse width; the
/// exponential relaxation is exact for constant bias, so no substepping.
pub fn apply_program_pulse(
    state: &FeFetState,
    params: &FeFetParams,
    pulse: &ProgramPulse,
) -> FeFetState {
    assert!(pulse.width >= 0.0);
    step_polarization(state, params, pulse.vg, pulse.vd, pulse.vs, pulse.width)
}
