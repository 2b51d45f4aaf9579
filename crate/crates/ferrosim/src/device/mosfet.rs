//! Smooth single-expression MOSFET compact model.
//!
//! Drain current uses a soft-plus-squared (EKV-flavored) interpolation of
//! the square law that is C¹-continuous across subthreshold, triode and
//! saturation — a requirement of the Newton solver. The forward/reverse
//! channel terms provide the saturation transition; channel-length
//! modulation multiplies in as `(1 + lambda*|vds|)`.
//!
//! In source-referenced form for an N device with `vds >= 0`:
//!
//! ```text
//! I = 2*n*kprime*Vt^2 * (sp(xf)^2 - sp(xr)^2) * (1 + lambda*vds)
//! xf = (vgs - vth) / (2*n*Vt)
//! xr = (vgs - vth - n*vds) / (2*n*Vt)
//! sp(x) = ln(1 + e^x)
//! ```
//!
//! Limits: subthreshold slope `n*Vt*ln10` per decade, triode
//! `kprime*(vov - n*vds/2)*vds`, saturation `kprime/(2n)*vov^2`.

use super::DeviceError;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarity {
    N,
    P,
}

/// MOSFET model parameters. Width/length are absorbed into `kprime`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MosfetParams {
    pub polarity: Polarity,
    /// Nominal threshold voltage [V]; negative for P devices.
    pub vth0: f64,
    /// Transconductance factor [A/V^2].
    pub kprime: f64,
    /// Subthreshold slope factor (>= 1).
    pub n_sub: f64,
    /// Channel-length modulation [1/V].
    pub lambda: f64,
    /// Thermal voltage [V].
    pub vt_thermal: f64,
}

impl MosfetParams {
    pub fn new(polarity: Polarity, vth0: f64, kprime: f64, n_sub: f64, lambda: f64) -> Self {
        Self { polarity, vth0, kprime, n_sub, lambda, vt_thermal: 0.02585 }
    }

    pub fn validate(&self) -> Result<(), DeviceError> {
        if !(self.kprime > 0.0) {
            return Err(DeviceError::InvalidParams("kprime must be > 0".into()));
        }
        if !(self.n_sub >= 1.0) {
            return Err(DeviceError::InvalidParams("n_sub must be >= 1".into()));
        }
        if !(self.lambda >= 0.0) {
            return Err(DeviceError::InvalidParams("lambda must be >= 0".into()));
        }
        match self.polarity {
            Polarity::N if self.vth0 < 0.0 => {
                Err(DeviceError::InvalidParams("N device requires vth0 >= 0".into()))
            }
            Polarity::P if self.vth0 > 0.0 => {
                Err(DeviceError::InvalidParams("P device requires vth0 <= 0".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Numerically safe ln(1 + e^x).
#[inline]
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Logistic sigmoid, the derivative of softplus.
#[inline]
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Current and conductances of the device, with `ids` defined as the
/// conventional current flowing drain -> source through the channel.
/// `g_*` are partial derivatives of `ids` w.r.t. the terminal voltages.
#[derive(Debug, Clone, Copy, Default)]
pub struct MosfetEval {
    pub ids: f64,
    pub g_g: f64,
    pub g_d: f64,
    pub g_s: f64,
}

/// Normalized N-channel current for `vds >= 0`.
/// Returns (i, di/dvgs, di/dvds).
fn nmos_core(p: &MosfetParams, vth: f64, vgs: f64, vds: f64) -> (f64, f64, f64) {
    debug_assert!(vds >= 0.0);
    let nvt = p.n_sub * p.vt_thermal;
    let k0 = 2.0 * p.n_sub * p.kprime * p.vt_thermal * p.vt_thermal;
    let xf = (vgs - vth) / (2.0 * nvt);
    let xr = (vgs - vth - p.n_sub * vds) / (2.0 * nvt);
    let (sf, ss_f) = (softplus(xf), sigmoid(xf));
    let (sr, ss_r) = (softplus(xr), sigmoid(xr));
    let core = sf * sf - sr * sr;
    let clm = 1.0 + p.lambda * vds;
    let i = k0 * core * clm;
    let di_dvgs = k0 * clm * (sf * ss_f - sr * ss_r) / nvt;
    let di_dvds = k0 * clm * (sr * ss_r) / p.vt_thermal + k0 * core * p.lambda;
    (i, di_dvgs, di_dvds)
}

/// Evaluates drain-source current and conductances at arbitrary terminal
/// voltages, valid for both polarities and both vds signs (the channel is
/// symmetric; source and drain swap roles when vds reverses).
pub fn mosfet_eval(p: &MosfetParams, vg: f64, vd: f64, vs: f64) -> MosfetEval {
    // Map P onto the N-normalized core by negating all voltages.
    let (vg, vd, vs, vth, sign) = match p.polarity {
        Polarity::N => (vg, vd, vs, p.vth0, 1.0),
        Polarity::P => (-vg, -vd, -vs, -p.vth0, -1.0),
    };
    if vd >= vs {
        let (i, gg, gd) = nmos_core(p, vth, vg - vs, vd - vs);
        MosfetEval {
            ids: sign * i,
            g_g: gg,
            g_d: gd,
            g_s: -(gg + gd),
        }
    } else {
        // Swapped operation: the physical source is the drain terminal.
        let (i, gg, gd) = nmos_core(p, vth, vg - vd, vs - vd);
        MosfetEval {
            ids: -sign * i,
            g_g: -gg,
            g_d: gg + gd,
            g_s: -gd,
        }
    }
}

/// Drain current with the device-polarity sign convention: positive means
/// conventional current flows drain -> source for N and source -> drain
/// for P (each polarity's normal conduction direction reads positive).
pub fn mosfet_current(p: &MosfetParams, vg: f64, vd: f64, vs: f64) -> f64 {
    let e = mosfet_eval(p, vg, vd, vs);
    match p.polarity {
        Polarity::N => e.ids,
        Polarity::P => -e.ids,
    }
}

/// Scales `kprime` so the device carries `target_current` at the given
/// bias. The model is strictly proportional to `kprime`, so the root is
/// closed-form; the result is re-evaluated and bounds-checked so that a
/// physically senseless fit (e.g. amps demanded deep in subthreshold)
/// reports an error instead of returning an absurd device.
pub fn calibrate_drive(
    target_current: f64,
    at_vgs: f64,
    at_vds: f64,
    template: &MosfetParams,
) -> Result<MosfetParams, DeviceError> {
    const KPRIME_MIN: f64 = 1e-9;
    const KPRIME_MAX: f64 = 1e4;
    if !(target_current > 0.0) {
        return Err(DeviceError::DriveCalibration("target current must be > 0".into()));
    }
    let i0 = mosfet_current(template, at_vgs, at_vds, 0.0).abs();
    if i0 <= 0.0 || !i0.is_finite() {
        return Err(DeviceError::DriveCalibration(
            "model carries no current at the calibration bias".into(),
        ));
    }
    let kprime = template.kprime * target_current / i0;
    if !(KPRIME_MIN..=KPRIME_MAX).contains(&kprime) {
        return Err(DeviceError::DriveCalibration(format!(
            "required kprime {kprime:.3e} A/V^2 outside [{KPRIME_MIN:.0e}, {KPRIME_MAX:.0e}]"
        )));
    }
    let mut out = *template;
    out.kprime = kprime;
    let check = mosfet_current(&out, at_vgs, at_vds, 0.0).abs();
    let rel = (check - target_current).abs() / target_current;
    if rel > 1e-3 {
        return Err(DeviceError::DriveCalibration(format!(
            "re-evaluation off by {rel:.2e} relative"
        )));
    }
    Ok(out)
}
