//! Device-level Id–Vg measurement protocol and memory-window extraction.

use super::fefet::{
    apply_program_pulse, fefet_current, step_polarization, FeFetParams, FeFetState, ProgramPulse,
};
use super::mosfet::{mosfet_current, MosfetParams};
use super::DeviceError;
use crate::curve::Curve;

/// Either kind of device can be swept.
#[derive(Debug, Clone)]
pub enum Device {
    Mosfet(MosfetParams),
    Fefet(FeFetParams),
}

/// Id–Vg sweep protocol: optional reset/set conditioning pulses, a settle
/// wait (modeled as a no-op; charge de-trapping is out of scope), then a
/// stepped gate sweep at fixed vds with a per-step dwell. Polarization is
/// updated during the sweep, so sweep direction matters for FeFETs; the
/// reverse sweep (positive toward negative for p-type) avoids disturbing
/// the state at operating-range amplitudes.
#[derive(Debug, Clone)]
pub struct SweepProtocol {
    pub reset_pulse: Option<ProgramPulse>,
    pub set_pulse: Option<ProgramPulse>,
    /// De-trap wait before the sweep [s]; no-op in this model.
    pub settle: f64,
    pub vg_start: f64,
    pub vg_stop: f64,
    /// Signed step [V]; sign must match stop - start.
    pub vg_step: f64,
    /// Drain bias [V] (source grounded).
    pub vds: f64,
    /// Dwell per step [s]; the polarization update window.
    pub dwell: f64,
}

impl SweepProtocol {
    /// Measurement-style sweep for a p-type device: reset to HVT with +4 V,
    /// set to LVT with -4.5 V when `set` is requested, then reverse-sweep
    /// the gate 1 V -> -1.5 V in 50 mV steps at -50 mV drain bias.
    pub fn p_type_reverse(set_to_lvt: bool) -> Self {
        Self {
            reset_pulse: Some(ProgramPulse { vg: 4.0, vs: 0.0, vd: 0.0, width: 1e-3 }),
            set_pulse: set_to_lvt
                .then_some(ProgramPulse { vg: -4.5, vs: 0.0, vd: 0.0, width: 1e-3 }),
            settle: 2.0,
            vg_start: 1.0,
            vg_stop: -1.5,
            vg_step: -0.05,
            vds: -0.05,
            dwell: 1e-3,
        }
    }

    fn validate(&self) -> Result<(), DeviceError> {
        if self.vg_step == 0.0 {
            return Err(DeviceError::InvalidProtocol("zero step".into()));
        }
        if (self.vg_stop - self.vg_start) * self.vg_step < 0.0 {
            return Err(DeviceError::InvalidProtocol("step sign fights sweep direction".into()));
        }
        if self.dwell < 0.0 || self.settle < 0.0 {
            return Err(DeviceError::InvalidProtocol("negative time".into()));
        }
        Ok(())
    }

    fn gate_points(&self) -> Vec<f64> {
        if self.vg_start == self.vg_stop {
            return Vec::new();
        }
        let n = ((self.vg_stop - self.vg_start) / self.vg_step).round() as usize;
        (0..=n).map(|i| self.vg_start + self.vg_step * i as f64).collect()
    }
}

/// Runs the sweep, returning the Id–Vg curve and the final polarization
/// state (unchanged for plain MOSFETs). Currents use the device-polarity
/// sign convention, so conduction reads positive for both polarities.
pub fn idvg_sweep(
    device: &Device,
    initial_state: Option<&FeFetState>,
    protocol: &SweepProtocol,
) -> Result<(Curve, Option<FeFetState>), DeviceError> {
    protocol.validate()?;
    let gates = protocol.gate_points();
    match device {
        Device::Mosfet(p) => {
            p.validate()?;
            let pts = gates
                .iter()
                .map(|&vg| (vg, mosfet_current(p, vg, protocol.vds, 0.0)))
                .collect();
            Ok((Curve::new(pts), None))
        }
        Device::Fefet(p) => {
            p.validate()?;
            let mut state = initial_state
                .cloned()
                .unwrap_or_else(|| FeFetState::lvt(8));
            state.validate()?;
            if let Some(reset) = &protocol.reset_pulse {
                state = apply_program_pulse(&state, p, reset);
            }
            if let Some(set) = &protocol.set_pulse {
                state = apply_program_pulse(&state, p, set);
            }
            // settle: de-trap wait, zero-bias -> state untouched
            let mut pts = Vec::with_capacity(gates.len());
            for &vg in &gates {
                state = step_polarization(&state, p, vg, protocol.vds, 0.0, protocol.dwell);
                pts.push((vg, fefet_current(&state, p, vg, protocol.vds, 0.0)));
            }
            Ok((Curve::new(pts), Some(state)))
        }
    }
}

/// Gate-voltage separation of two transfer curves at the reference current
/// `i_crit`, by linear interpolation between samples. Currents are compared
/// by magnitude so either sign convention works.
pub fn memory_window(curve_lvt: &Curve, curve_hvt: &Curve, i_crit: f64) -> Result<f64, DeviceError> {
    let vg_of = |c: &Curve, which: &str| -> Result<f64, DeviceError> {
        let mag = Curve::new(c.points.iter().map(|&(x, y)| (x, y.abs())).collect());
        // first crossing along the sweep; curves are swept monotonically
        for w in mag.points.windows(2) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            if (y0 - i_crit) * (y1 - i_crit) <= 0.0 && y0 != y1 {
                return Ok(x0 + (x1 - x0) * (i_crit - y0) / (y1 - y0));
            }
        }
        Err(DeviceError::NoCrossing { which: which.into(), level: i_crit })
    };
    let v_lvt = vg_of(curve_lvt, "lvt curve")?;
    let v_hvt = vg_of(curve_hvt, "hvt curve")?;
    Ok((v_lvt - v_hvt).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::kinetics::calibrate_kinetics;
    use crate::device::mosfet::Polarity;

    fn pfefet(mw: f64) -> FeFetParams {
        let base = MosfetParams::new(Polarity::P, -1.0, 9e-5, 1.5, 0.1);
        let kin = calibrate_kinetics((4.0, 10e-9), (2.0, 100.0)).unwrap();
        FeFetParams::new(base, mw, kin)
    }

    #[test]
    fn lvt_hvt_separation_matches_memory_window() {
        let p = pfefet(1.0);
        let dev = Device::Fefet(p);
        let (hvt_curve, _) = idvg_sweep(&dev, None, &SweepProtocol::p_type_reverse(false)).unwrap();
        let (lvt_curve, _) = idvg_sweep(&dev, None, &SweepProtocol::p_type_reverse(true)).unwrap();
        let mw = memory_window(&lvt_curve, &hvt_curve, 1e-8).unwrap();
        assert!((mw - 1.0).abs() <= 0.05, "extracted window {mw}");
    }

    #[test]
    fn zero_length_sweep_is_empty() {
        let mut proto = SweepProtocol::p_type_reverse(true);
        proto.vg_stop = proto.vg_start;
        let (curve, _) = idvg_sweep(&Device::Fefet(pfefet(1.0)), None, &proto).unwrap();
        assert!(curve.is_empty());
    }

    #[test]
    fn reverse_sweep_does_not_disturb_lvt() {
        let p = pfefet(1.0);
        let s0 = FeFetState::lvt(8);
        let mut proto = SweepProtocol::p_type_reverse(true);
        proto.reset_pulse = None;
        proto.set_pulse = None;
        let (_, s1) = idvg_sweep(&Device::Fefet(p), Some(&s0), &proto).unwrap();
        let drift = (s1.unwrap().mean() - s0.mean()).abs();
        assert!(drift < 1e-6, "sweep disturbed state by {drift:.3e}");
    }

    #[test]
    fn bad_protocols_rejected() {
        let mut proto = SweepProtocol::p_type_reverse(true);
        proto.vg_step = 0.05; // wrong direction for 1 -> -1.5
        assert!(idvg_sweep(&Device::Fefet(pfefet(1.0)), None, &proto).is_err());
    }

    #[test]
    fn identical_curves_have_zero_window() {
        let p = pfefet(1.0);
        let (c, _) = idvg_sweep(&Device::Fefet(p), None, &SweepProtocol::p_type_reverse(true)).unwrap();
        assert_eq!(memory_window(&c, &c, 1e-8).unwrap(), 0.0);
    }

    #[test]
    fn no_crossing_names_the_curve() {
        let flat = Curve::new(vec![(0.0, 1e-12), (1.0, 1e-12)]);
        let err = memory_window(&flat, &flat, 1e-7).unwrap_err();
        assert!(matches!(err, DeviceError::NoCrossing { .. }));
    }
}
