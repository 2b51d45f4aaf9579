//! Time-stamped simulation results.

use super::{Circuit, Element};
use crate::units::fmt_sig;
use std::io::Write;

/// Node-voltage, branch-current and polarization series from a transient
/// run. Immutable once the run completes; safe to share across threads.
#[derive(Debug, Clone, Default)]
pub struct Waveform {
    pub times: Vec<f64>,
    /// One series per non-ground node, indexed like circuit node ids - 1.
    pub node_voltages: Vec<Vec<f64>>,
    /// One series per voltage source branch.
    pub branch_currents: Vec<Vec<f64>>,
    /// Mean polarization per FeFET element, in element order.
    pub polarization: Vec<Vec<f64>>,
    pub fefet_names: Vec<String>,
}

impl Waveform {
    pub fn for_circuit(circuit: &Circuit) -> Self {
        Self {
            times: Vec::new(),
            node_voltages: vec![Vec::new(); circuit.node_count()],
            branch_currents: vec![Vec::new(); circuit.vsource_count()],
            polarization: vec![
                Vec::new();
                circuit
                    .elements
                    .iter()
                    .filter(|(_, e)| matches!(e, Element::Fefet { .. }))
                    .count()
            ],
            fefet_names: circuit
                .elements
                .iter()
                .filter_map(|(n, e)| matches!(e, Element::Fefet { .. }).then(|| n.clone()))
                .collect(),
        }
    }

    pub(crate) fn push(&mut self, t: f64, x: &[f64], circuit: &Circuit) {
        if let Some(&last) = self.times.last() {
            debug_assert!(t > last, "times must be strictly increasing");
        }
        self.times.push(t);
        let nn = circuit.node_count();
        for (i, series) in self.node_voltages.iter_mut().enumerate() {
            series.push(x[i]);
        }
        for (b, series) in self.branch_currents.iter_mut().enumerate() {
            series.push(x[nn + b]);
        }
        let mut fi = 0;
        for (_, e) in &circuit.elements {
            if let Element::Fefet { state, .. } = e {
                self.polarization[fi].push(state.mean());
                fi += 1;
            }
        }
    }

    /// Voltage series of a named node.
    pub fn node_series<'a>(&'a self, circuit: &Circuit, name: &str) -> Option<&'a [f64]> {
        let id = circuit.find_node(name)?;
        match id.0 {
            0 => None,
            i => Some(&self.node_voltages[i - 1]),
        }
    }

    /// Value of a node series at time `t` by linear interpolation.
    pub fn sample(&self, series: &[f64], t: f64) -> f64 {
        if self.times.is_empty() {
            return 0.0;
        }
        if t <= self.times[0] {
            return series[0];
        }
        for i in 1..self.times.len() {
            if t <= self.times[i] {
                let (t0, t1) = (self.times[i - 1], self.times[i]);
                let (v0, v1) = (series[i - 1], series[i]);
                return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
            }
        }
        *series.last().unwrap()
    }

    /// First time where `f(sample)` crosses zero from its initial sign,
    /// linearly interpolated between stored points.
    pub fn first_crossing(&self, series: &[f64], level: f64) -> Option<f64> {
        for i in 1..self.times.len() {
            let (y0, y1) = (series[i - 1], series[i]);
            if (y0 - level) * (y1 - level) <= 0.0 && y0 != y1 {
                let t0 = self.times[i - 1];
                let t1 = self.times[i];
                return Some(t0 + (t1 - t0) * (level - y0) / (y1 - y0));
            }
        }
        None
    }

    /// CSV export: time, node voltages, branch currents, mean polarizations.
    pub fn write_csv<W: Write>(&self, w: &mut W, circuit: &Circuit) -> std::io::Result<()> {
        let mut header = vec!["time_seconds".to_string()];
        header.extend(circuit.node_names().iter().map(|n| format!("v_{n}_volts")));
        let vnames: Vec<String> = circuit
            .elements
            .iter()
            .filter_map(|(n, e)| matches!(e, Element::VSource { .. }).then(|| n.clone()))
            .collect();
        header.extend(vnames.iter().map(|n| format!("i_{n}_amperes")));
        header.extend(self.fefet_names.iter().map(|n| format!("p_{n}_mean")));
        writeln!(w, "{}", header.join(","))?;
        for (i, t) in self.times.iter().enumerate() {
            let mut row = vec![fmt_sig(*t, 9)];
            row.extend(self.node_voltages.iter().map(|s| fmt_sig(s[i], 9)));
            row.extend(self.branch_currents.iter().map(|s| fmt_sig(s[i], 9)));
            row.extend(self.polarization.iter().map(|s| fmt_sig(s[i], 9)));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}
