//! Cell circuit construction.

use super::{BenchError, CellConfig, CellState, CellTopology, Logic, PullUp};
use crate::device::FeFetState;
use crate::engine::{Circuit, NodeId, SourceWave};

/// Node handles of the built cell.
#[derive(Debug, Clone, Copy)]
pub struct CellNodes {
    pub vdd: NodeId,
    pub wl: NodeId,
    pub bl: NodeId,
    pub blb: NodeId,
    pub q: NodeId,
    pub qb: NodeId,
}

/// A built cell: the circuit, its node handles, and the carried operating
/// state between operations (rail drive levels and last solved unknowns).
#[derive(Debug, Clone)]
pub struct Cell {
    pub circuit: Circuit,
    pub config: CellConfig,
    pub nodes: CellNodes,
    /// Unknown vector after the last completed operation.
    pub(super) last_x: Option<Vec<f64>>,
    /// Driven rail levels after the last operation: vdd, wl, bl, blb.
    pub(super) rails: [f64; 4],
}

/// Builds the cell with both loads initially LVT (nonvolatile topology).
///
/// Rail drivers `vvdd`, `vwl`, `vbl`, `vblb` and per-bitline current sinks
/// `ibl`, `iblb` (disabled until a protocol enables them) are included so
/// operations only retarget waveforms.
pub fn build_cell(config: &CellConfig) -> Result<Cell, BenchError> {
    config.validate()?;
    let mut c = Circuit::new();
    let vdd = c.node("vdd");
    let wl = c.node("wl");
    let bl = c.node("bl");
    let blb = c.node("blb");
    let q = c.node("q");
    let qb = c.node("qb");

    c.add_vsource("vvdd", vdd, NodeId::GROUND, SourceWave::Dc(0.0));
    c.add_vsource("vwl", wl, NodeId::GROUND, SourceWave::Dc(0.0));
    c.add_vsource("vbl", bl, NodeId::GROUND, SourceWave::Dc(0.0));
    c.add_vsource("vblb", blb, NodeId::GROUND, SourceWave::Dc(0.0));
    c.add_isource("ibl", bl, NodeId::GROUND, SourceWave::Dc(0.0));
    c.add_isource("iblb", blb, NodeId::GROUND, SourceWave::Dc(0.0));
    c.set_source_enabled("ibl", false);
    c.set_source_enabled("iblb", false);

    // cross-coupled inverters
    c.add_mosfet("m1", qb, q, NodeId::GROUND, config.m1);
    c.add_mosfet("m3", q, qb, NodeId::GROUND, config.m3);
    match &config.pu_m2 {
        PullUp::Mosfet(p) => c.add_mosfet("m2", q, qb, vdd, *p),
        PullUp::Fefet(p) => {
            c.add_fefet("m2", q, qb, vdd, *p, FeFetState::lvt(config.segments))
        }
    }
    match &config.pu_m4 {
        PullUp::Mosfet(p) => c.add_mosfet("m4", qb, q, vdd, *p),
        PullUp::Fefet(p) => {
            c.add_fefet("m4", qb, q, vdd, *p, FeFetState::lvt(config.segments))
        }
    }
    // access
    c.add_mosfet("m5", wl, bl, q, config.m5);
    c.add_mosfet("m6", wl, blb, qb, config.m6);
    // bitline and storage-node capacitance
    c.add_capacitor("cbl", bl, NodeId::GROUND, config.c_bitline);
    c.add_capacitor("cblb", blb, NodeId::GROUND, config.c_bitline);
    c.add_capacitor("cq", q, NodeId::GROUND, config.c_node);
    c.add_capacitor("cqb", qb, NodeId::GROUND, config.c_node);

    Ok(Cell {
        circuit: c,
        config: config.clone(),
        nodes: CellNodes { vdd, wl, bl, blb, q, qb },
        last_x: None,
        rails: [0.0; 4],
    })
}

impl Cell {
    pub fn is_nvsram(&self) -> bool {
        self.config.topology == CellTopology::Nvsram6T
    }

    pub(super) fn voltage_of(&self, x: &[f64], node: NodeId) -> f64 {
        match node.0 {
            0 => 0.0,
            i => x[i - 1],
        }
    }

    /// Current storage-node snapshot; `vdd_now` selects the logic
    /// classification scale.
    pub fn state(&self, vdd_now: f64) -> CellState {
        let (q, qb) = match &self.last_x {
            Some(x) => (self.voltage_of(x, self.nodes.q), self.voltage_of(x, self.nodes.qb)),
            None => (0.0, 0.0),
        };
        CellState {
            q,
            qb,
            logic: CellState::classify(q, qb, vdd_now),
            m2_mean_p: self.circuit.fefet_state("m2").map(|s| s.mean()),
            m4_mean_p: self.circuit.fefet_state("m4").map(|s| s.mean()),
        }
    }

    /// Classification of the freshly computed state at vdd_nominal.
    pub fn logic(&self) -> Logic {
        self.state(self.config.vdd_nominal).logic
    }

    /// Forces a node voltage into the carried state, e.g. residual charge
    /// deposited on a storage node before a restore.
    pub fn override_node(&mut self, node: NodeId, volts: f64) {
        let n = self.circuit.unknown_count();
        let x = self.last_x.get_or_insert_with(|| vec![0.0; n]);
        if node.0 > 0 {
            x[node.0 - 1] = volts;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SimConfig;
    use crate::engine::Element;

    #[test]
    fn nvsram_has_two_fefets_baseline_none() {
        let cfg = SimConfig::default_config();
        let nv = build_cell(&CellConfig::nvsram(&cfg)).unwrap();
        assert_eq!(nv.circuit.fefet_states().len(), 2);
        let base = build_cell(&CellConfig::baseline(&cfg)).unwrap();
        assert_eq!(base.circuit.fefet_states().len(), 0);
        // six transistors in both
        let count = |c: &Circuit| {
            c.elements
                .iter()
                .filter(|(_, e)| matches!(e, Element::Mosfet { .. } | Element::Fefet { .. }))
                .count()
        };
        assert_eq!(count(&nv.circuit), 6);
        assert_eq!(count(&base.circuit), 6);
    }

    #[test]
    fn cross_coupling_topology() {
        let cfg = SimConfig::default_config();
        let cell = build_cell(&CellConfig::nvsram(&cfg)).unwrap();
        // M4 gate node must equal M3 drain node (both QB)
        let m4_gate = match cell.circuit.element("m4") {
            Some(Element::Fefet { g, .. }) => *g,
            _ => panic!(),
        };
        let m3_drain = match cell.circuit.element("m3") {
            Some(Element::Mosfet { d, .. }) => *d,
            _ => panic!(),
        };
        assert_eq!(m4_gate, m3_drain);
        assert_eq!(m4_gate, cell.nodes.qb);
    }
}
