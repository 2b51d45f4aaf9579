//! Merz-law ferroelectric switching kinetics.
//!
//! The characteristic switching time is `tau(V) = tau0 * exp(v0 / |V|)`,
//! strictly decreasing in field magnitude; polarization relaxes toward its
//! target first-order with that time constant. Two (amplitude, width)
//! anchors on the 50%-switching boundary determine `tau0` and `v0` exactly.

use super::DeviceError;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SwitchingKinetics {
    /// Merz prefactor [s].
    pub tau0: f64,
    /// Merz activation voltage [V].
    pub v0: f64,
    /// Switched fraction defining the boundary (fixed 0.5).
    pub boundary_fraction: f64,
}

impl SwitchingKinetics {
    pub fn new(tau0: f64, v0: f64) -> Result<Self, DeviceError> {
        if !(tau0 > 0.0) || !(v0 > 0.0) {
            return Err(DeviceError::InvalidParams("tau0 and v0 must be > 0".into()));
        }
        Ok(Self { tau0, v0, boundary_fraction: 0.5 })
    }

    /// Characteristic switching time at field magnitude `v_abs` [s].
    /// Returns +inf as the field goes to zero.
    pub fn tau(&self, v_abs: f64) -> f64 {
        let v = v_abs.abs();
        if v == 0.0 {
            return f64::INFINITY;
        }
        let ln_tau = self.tau0.ln() + self.v0 / v;
        if ln_tau > 700.0 {
            f64::INFINITY
        } else {
            ln_tau.exp()
        }
    }

    /// `ln(dt / tau(v))`, usable even where `tau` overflows to infinity.
    pub fn ln_rate(&self, v_abs: f64, dt: f64) -> f64 {
        let v = v_abs.abs();
        if v == 0.0 || dt <= 0.0 {
            return f64::NEG_INFINITY;
        }
        dt.ln() - self.tau0.ln() - self.v0 / v
    }
}

/// Pulse width at which a saturated opposite-state segment under a uniform
/// field of `amplitude` reaches the boundary switched fraction:
/// `w = tau(|amplitude|) * ln(1 / (1 - fraction))` (ln 2 at 50%).
pub fn switching_boundary_width(
    kinetics: &SwitchingKinetics,
    amplitude: f64,
) -> Result<f64, DeviceError> {
    if amplitude == 0.0 {
        return Err(DeviceError::ZeroAmplitude);
    }
    let factor = (1.0 / (1.0 - kinetics.boundary_fraction)).ln();
    Ok(kinetics.tau(amplitude.abs()) * factor)
}

/// Solves for the unique `(tau0, v0)` whose boundary passes exactly through
/// both anchors, each an `(amplitude [V], width [s])` pair.
pub fn calibrate_kinetics(
    anchor1: (f64, f64),
    anchor2: (f64, f64),
) -> Result<SwitchingKinetics, DeviceError> {
    let (v1, w1) = anchor1;
    let (v2, w2) = anchor2;
    if !(v1 > 0.0 && v2 > 0.0 && w1 > 0.0 && w2 > 0.0) {
        return Err(DeviceError::KineticsCalibration(
            "anchors need positive amplitudes and widths".into(),
        ));
    }
    if v1 == v2 {
        return Err(DeviceError::KineticsCalibration("equal anchor amplitudes".into()));
    }
    // ln w = ln(tau0 * ln2) + v0 / v  — linear in (ln(tau0*ln2), v0).
    let v0 = (w2.ln() - w1.ln()) / (1.0 / v2 - 1.0 / v1);
    if !(v0 > 0.0) {
        return Err(DeviceError::KineticsCalibration(
            "anchors imply non-positive activation voltage".into(),
        ));
    }
    let ln2 = std::f64::consts::LN_2;
    let tau0 = (w1.ln() - v0 / v1).exp() / ln2;
    SwitchingKinetics::new(tau0, v0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn default_kinetics() -> SwitchingKinetics {
        calibrate_kinetics((4.0, 10e-9), (2.0, 100.0)).unwrap()
    }

    #[test]
    fn calibration_matches_closed_form() {
        // Independent oracle: solve the 2x2 linear system by hand.
        // v0 = ln(w2/w1)/(1/v2 - 1/v1) = ln(1e10)/0.25 = 40 ln 10
        // tau0 = w1 / (ln2 * exp(v0/4)) = 1e-18 / ln 2
        let k = default_kinetics();
        assert_relative_eq!(k.v0, 40.0 * std::f64::consts::LN_10, max_relative = 1e-12);
        assert_relative_eq!(k.tau0, 1e-18 / std::f64::consts::LN_2, max_relative = 1e-12);
    }

    #[test]
    fn boundary_round_trip() {
        let k = default_kinetics();
        assert_relative_eq!(switching_boundary_width(&k, 4.0).unwrap(), 10e-9, max_relative = 1e-12);
        assert_relative_eq!(switching_boundary_width(&k, 2.0).unwrap(), 100.0, max_relative = 1e-12);
    }

    #[test]
    fn low_field_widths_are_astronomical() {
        let k = default_kinetics();
        let w1v = switching_boundary_width(&k, 1.0).unwrap();
        assert!(w1v > 1e20, "w(1V) = {w1v:.3e}");
        // exact closed form: 1e22 s
        assert_relative_eq!(w1v, 1e22, max_relative = 1e-9);
    }

    #[test]
    fn degenerate_anchors_rejected() {
        assert!(calibrate_kinetics((4.0, 1e-8), (4.0, 1e-8)).is_err());
        // equal widths at different amplitudes imply v0 = 0
        assert!(calibrate_kinetics((4.0, 1e-8), (2.0, 1e-8)).is_err());
        assert!(switching_boundary_width(&default_kinetics(), 0.0).is_err());
    }

    #[test]
    fn boundary_monotone_decreasing() {
        let k = default_kinetics();
        let mut last = f64::INFINITY;
        for i in 1..=40 {
            let a = 0.5 + 0.1 * i as f64;
            let w = switching_boundary_width(&k, a).unwrap();
            assert!(w < last);
            last = w;
        }
    }
}
