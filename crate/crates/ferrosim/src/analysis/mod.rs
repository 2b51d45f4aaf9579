//! Metric extraction: butterfly curves and static noise margins, read
//! latency, switching-boundary curves and disturb projections — all pure
//! post-processing over solved circuits and waveforms, emitted as
//! figure-ready CSV/JSON.

mod butterfly;
mod emitters;
mod latency;

pub use butterfly::{butterfly, ButterflyMode, ButterflyResult, Intersection};
pub use emitters::{
    emit_butterfly_set, emit_idvg_shift, emit_mw_comparison, emit_restore_trace,
    emit_switching_boundary, EmitOutput,
};
pub use latency::{read_latency, LatencyReport};

use crate::curve::Curve;
use crate::device::SwitchingKinetics;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("solver: {0}")]
    Solver(#[from] crate::engine::SolverError),
    #[error("bench: {0}")]
    Bench(#[from] crate::cellbench::BenchError),
    #[error("device: {0}")]
    Device(#[from] crate::device::DeviceError),
    #[error("waveform lacks required series '{0}'")]
    MissingSeries(String),
    #[error("threshold {0} V never reached")]
    ThresholdNotReached(f64),
}

/// Switching-boundary curve: (amplitude, boundary width) for both field
/// polarities. Symmetric in this model, emitted for both branches.
pub fn emit_halid(kinetics: &SwitchingKinetics, amplitudes: &[f64]) -> Result<Curve, AnalysisError> {
    let mut pts = Vec::with_capacity(amplitudes.len() * 2);
    for &a in amplitudes {
        let w = crate::device::switching_boundary_width(kinetics, a)?;
        pts.push((-a.abs(), w));
        pts.push((a.abs(), w));
    }
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(Curve::new(pts))
}

/// Switched fraction of a saturated opposite-state segment after `horizon`
/// seconds at constant |bias|: `1 - exp(-horizon / tau(|bias|))`.
pub fn disturb_projection(kinetics: &SwitchingKinetics, bias: f64, horizon: f64) -> f64 {
    assert!(horizon >= 0.0);
    if horizon == 0.0 {
        return 0.0;
    }
    let ln_rate = kinetics.ln_rate(bias.abs(), horizon);
    if ln_rate > 6.6 {
        1.0
    } else {
        let rate = ln_rate.exp();
        if rate < 1e-12 {
            rate
        } else {
            -(-rate).exp_m1()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::calibrate_kinetics;

    fn kin() -> SwitchingKinetics {
        calibrate_kinetics((4.0, 10e-9), (2.0, 100.0)).unwrap()
    }

    #[test]
    fn boundary_curve_anchors_and_monotonicity() {
        let k = kin();
        let c = emit_halid(&k, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(c.len(), 8);
        // symmetric in amplitude sign
        assert_eq!(c.points[0].1, c.points[7].1);
        // anchor widths
        let at = |a: f64| c.points.iter().find(|p| (p.0 - a).abs() < 1e-12).unwrap().1;
        assert!((at(4.0) - 10e-9).abs() < 1e-17);
        assert!((at(2.0) - 100.0).abs() < 1e-7);
        assert!(at(1.0) > 1e20);
        // strictly decreasing for positive amplitudes
        let pos: Vec<f64> = c.points.iter().filter(|p| p.0 > 0.0).map(|p| p.1).collect();
        for w in pos.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn disturb_projection_anchors() {
        let k = kin();
        assert_eq!(disturb_projection(&k, 1.0, 0.0), 0.0);
        // boundary definition: 50% at the anchor
        assert!((disturb_projection(&k, 4.0, 10e-9) - 0.5).abs() < 1e-9);
        // ten years at 1 V
        let ten_years = disturb_projection(&k, 1.0, 3.156e8);
        assert!(ten_years < 1e-10, "{ten_years:.3e}");
        // 1000 s at 1 V evaluates around 7e-20
        let hold = disturb_projection(&k, 1.0, 1000.0);
        assert!(hold < 1e-18 && hold > 1e-21, "{hold:.3e}");
        // the kinetics cliff: 1000 s at 2 V flips well past half
        assert!(disturb_projection(&k, 2.0, 1000.0) > 0.5);
    }
}
