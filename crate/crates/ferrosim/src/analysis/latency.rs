//! Read-latency extraction from transient waveforms.

use super::AnalysisError;
use crate::engine::{Circuit, Waveform};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct LatencyReport {
    /// Seconds from the wordline half-swing to the threshold differential.
    pub latency: f64,
    pub threshold: f64,
    pub t_wordline: f64,
    pub t_threshold: f64,
}

/// Linear-interpolated first crossing of `|v(bl) - v(blb)| >= threshold`,
/// measured from the wordline's crossing of half its final level.
pub fn read_latency(
    wave: &Waveform,
    circuit: &Circuit,
    threshold: f64,
) -> Result<LatencyReport, AnalysisError> {
    let series = |name: &str| {
        wave.node_series(circuit, name)
            .ok_or_else(|| AnalysisError::MissingSeries(name.to_string()))
    };
    let bl = series("bl")?;
    let blb = series("blb")?;
    let wl = series("wl")?;
    let wl_high = wl.iter().cloned().fold(0.0f64, f64::max);
    let t_wordline = wave
        .first_crossing(wl, 0.5 * wl_high)
        .ok_or(AnalysisError::ThresholdNotReached(0.5 * wl_high))?;
    let diff: Vec<f64> = bl.iter().zip(blb).map(|(a, b)| (a - b).abs()).collect();
    if threshold <= diff[0] {
        return Ok(LatencyReport { latency: 0.0, threshold, t_wordline, t_threshold: t_wordline });
    }
    let t_threshold = wave
        .first_crossing(&diff, threshold)
        .ok_or(AnalysisError::ThresholdNotReached(threshold))?;
    Ok(LatencyReport { latency: t_threshold - t_wordline, threshold, t_wordline, t_threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{NodeId, SourceWave};

    /// Synthetic ramp: 1 mV/ps differential must take exactly 100 ps to
    /// reach 100 mV.
    #[test]
    fn synthetic_ramp_latency_is_exact() {
        let mut c = Circuit::new();
        let bl = c.node("bl");
        let blb = c.node("blb");
        let wl = c.node("wl");
        // wl steps immediately; bl ramps down 1 mV/ps; blb holds
        c.add_vsource("vwl", wl, NodeId::GROUND, SourceWave::Pwl(vec![(0.0, 0.0), (1e-15, 1.0)]));
        c.add_vsource(
            "vbl",
            bl,
            NodeId::GROUND,
            SourceWave::Pwl(vec![(0.0, 1.0), (200e-12, 0.8)]),
        );
        c.add_vsource("vblb", blb, NodeId::GROUND, SourceWave::Dc(1.0));
        for (name, node) in [("rbl", bl), ("rblb", blb), ("rwl", wl)] {
            c.add_resistor(name, node, NodeId::GROUND, 1e6);
        }
        let cfg = crate::engine::SolverConfig { dtmax: 1e-12, ..Default::default() };
        let w = crate::engine::transient(&mut c, 200e-12, &cfg).unwrap();
        let rep = read_latency(&w, &c, 0.1).unwrap();
        assert!((rep.latency - 100e-12).abs() < 1e-12, "latency {:.3e}", rep.latency);
        // zero threshold reads as zero latency
        assert_eq!(read_latency(&w, &c, 0.0).unwrap().latency, 0.0);
        // unreachable threshold errors
        assert!(read_latency(&w, &c, 0.5).is_err());
    }
}
