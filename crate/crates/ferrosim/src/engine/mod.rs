//! Circuit representation and nonlinear MNA solver.
//!
//! Unknowns are the non-ground node voltages plus one branch current per
//! voltage source. A simulation run owns its [`Circuit`] exclusively
//! (FeFET state mutates during transient analysis); independent runs may
//! proceed in parallel.

mod dc;
mod linalg;
mod transient;
mod waveform;

pub use dc::{dc_operating_point, dc_sweep, verify_kcl_residual, OperatingPoint};
pub use transient::transient;
pub use waveform::Waveform;

use crate::device::{FeFetParams, FeFetState, MosfetParams};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Node handle; 0 is ground.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    pub const GROUND: NodeId = NodeId(0);

    /// Index into the unknown vector, None for ground.
    fn unknown(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0 - 1)
        }
    }
}

/// Time-dependent source waveform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SourceWave {
    Dc(f64),
    /// (time, value) knots, strictly increasing times; holds the first
    /// value before the first knot and the last value after the last.
    Pwl(Vec<(f64, f64)>),
    Pulse {
        v1: f64,
        v2: f64,
        delay: f64,
        rise: f64,
        fall: f64,
        width: f64,
        period: f64,
    },
}

impl SourceWave {
    pub fn value_at(&self, t: f64) -> f64 {
        match self {
            SourceWave::Dc(v) => *v,
            SourceWave::Pwl(pts) => {
                if pts.is_empty() {
                    return 0.0;
                }
                if t <= pts[0].0 {
                    return pts[0].1;
                }
                for w in pts.windows(2) {
                    let (t0, v0) = w[0];
                    let (t1, v1) = w[1];
                    if t <= t1 {
                        return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
                    }
                }
                pts[pts.len() - 1].1
            }
            SourceWave::Pulse { v1, v2, delay, rise, fall, width, period } => {
                if t <= *delay {
                    return *v1;
                }
                let tc = (t - delay) % period.max(f64::MIN_POSITIVE);
                if tc < *rise {
                    v1 + (v2 - v1) * tc / rise
                } else if tc < rise + width {
                    *v2
                } else if tc < rise + width + fall {
                    v2 + (v1 - v2) * (tc - rise - width) / fall
                } else {
                    *v1
                }
            }
        }
    }

    /// Time points where the waveform has corners; transient steps land on
    /// these exactly.
    pub fn breakpoints(&self, tstop: f64, out: &mut Vec<f64>) {
        match self {
            SourceWave::Dc(_) => {}
            SourceWave::Pwl(pts) => out.extend(pts.iter().map(|p| p.0).filter(|&t| t <= tstop)),
            SourceWave::Pulse { delay, rise, fall, width, period, .. } => {
                let mut t0 = *delay;
                while t0 < tstop {
                    for t in [t0, t0 + rise, t0 + rise + width, t0 + rise + width + fall] {
                        if t <= tstop {
                            out.push(t);
                        }
                    }
                    if *period <= 0.0 {
                        break;
                    }
                    t0 += period;
                }
            }
        }
    }
}

/// One circuit element.
#[derive(Debug, Clone)]
pub enum Element {
    Resistor {
        a: NodeId,
        b: NodeId,
        ohms: f64,
    },
    Capacitor {
        a: NodeId,
        b: NodeId,
        farads: f64,
    },
    /// Voltage source with an MNA branch current. When gated off it is
    /// disconnected: the branch equation becomes I = 0.
    VSource {
        plus: NodeId,
        minus: NodeId,
        wave: SourceWave,
        branch: usize,
        enabled: bool,
    },
    ISource {
        /// Current flows from `from` through the source into `to`.
        from: NodeId,
        to: NodeId,
        wave: SourceWave,
        enabled: bool,
    },
    Mosfet {
        g: NodeId,
        d: NodeId,
        s: NodeId,
        params: MosfetParams,
    },
    Fefet {
        g: NodeId,
        d: NodeId,
        s: NodeId,
        params: FeFetParams,
        state: FeFetState,
    },
}

/// Elaborated node/device graph; input to the solver.
#[derive(Debug, Clone, Default)]
pub struct Circuit {
    /// Names of non-ground nodes; node id i+1 has name node_names[i].
    node_names: Vec<String>,
    pub elements: Vec<(String, Element)>,
    vsource_count: usize,
    /// Node-voltage initial conditions applied at t = 0 of a transient.
    pub initial_conditions: Vec<(NodeId, f64)>,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    /// Interns a node name; "0" and "gnd" are ground.
    pub fn node(&mut self, name: &str) -> NodeId {
        let lower = name.to_ascii_lowercase();
        if lower == "0" || lower == "gnd" {
            return NodeId::GROUND;
        }
        if let Some(idx) = self.node_names.iter().position(|n| *n == lower) {
            NodeId(idx + 1)
        } else {
            self.node_names.push(lower);
            NodeId(self.node_names.len())
        }
    }

    pub fn find_node(&self, name: &str) -> Option<NodeId> {
        let lower = name.to_ascii_lowercase();
        if lower == "0" || lower == "gnd" {
            return Some(NodeId::GROUND);
        }
        self.node_names.iter().position(|n| *n == lower).map(|i| NodeId(i + 1))
    }

    pub fn node_count(&self) -> usize {
        self.node_names.len()
    }

    pub fn node_names(&self) -> &[String] {
        &self.node_names
    }

    pub fn vsource_count(&self) -> usize {
        self.vsource_count
    }

    pub fn unknown_count(&self) -> usize {
        self.node_count() + self.vsource_count
    }

    pub fn add_resistor(&mut self, name: &str, a: NodeId, b: NodeId, ohms: f64) {
        self.elements.push((name.to_string(), Element::Resistor { a, b, ohms }));
    }

    pub fn add_capacitor(&mut self, name: &str, a: NodeId, b: NodeId, farads: f64) {
        self.elements.push((name.to_string(), Element::Capacitor { a, b, farads }));
    }

    pub fn add_vsource(&mut self, name: &str, plus: NodeId, minus: NodeId, wave: SourceWave) {
        let branch = self.vsource_count;
        self.vsource_count += 1;
        self.elements
            .push((name.to_string(), Element::VSource { plus, minus, wave, branch, enabled: true }));
    }

    pub fn add_isource(&mut self, name: &str, from: NodeId, to: NodeId, wave: SourceWave) {
        self.elements.push((name.to_string(), Element::ISource { from, to, wave, enabled: true }));
    }

    pub fn add_mosfet(&mut self, name: &str, g: NodeId, d: NodeId, s: NodeId, params: MosfetParams) {
        self.elements.push((name.to_string(), Element::Mosfet { g, d, s, params }));
    }

    pub fn add_fefet(
        &mut self,
        name: &str,
        g: NodeId,
        d: NodeId,
        s: NodeId,
        params: FeFetParams,
        state: FeFetState,
    ) {
        self.elements.push((name.to_string(), Element::Fefet { g, d, s, params, state }));
    }

    pub fn element(&self, name: &str) -> Option<&Element> {
        self.elements.iter().find(|(n, _)| n.eq_ignore_ascii_case(name)).map(|(_, e)| e)
    }

    fn element_mut(&mut self, name: &str) -> Option<&mut Element> {
        self.elements.iter_mut().find(|(n, _)| n.eq_ignore_ascii_case(name)).map(|(_, e)| e)
    }

    /// Replaces a source's waveform (DC sweeps, schedule phases).
    pub fn set_source_wave(&mut self, name: &str, new_wave: SourceWave) -> bool {
        match self.element_mut(name) {
            Some(Element::VSource { wave, .. }) | Some(Element::ISource { wave, .. }) => {
                *wave = new_wave;
                true
            }
            _ => false,
        }
    }

    /// Connects or disconnects a source.
    pub fn set_source_enabled(&mut self, name: &str, on: bool) -> bool {
        match self.element_mut(name) {
            Some(Element::VSource { enabled, .. }) | Some(Element::ISource { enabled, .. }) => {
                *enabled = on;
                true
            }
            _ => false,
        }
    }

    pub fn set_initial_condition(&mut self, node: NodeId, volts: f64) {
        self.initial_conditions.retain(|(n, _)| *n != node);
        self.initial_conditions.push((node, volts));
    }

    /// FeFET states by element name, for reports.
    pub fn fefet_states(&self) -> Vec<(String, FeFetState)> {
        self.elements
            .iter()
            .filter_map(|(n, e)| match e {
                Element::Fefet { state, .. } => Some((n.clone(), state.clone())),
                _ => None,
            })
            .collect()
    }

    pub fn fefet_state(&self, name: &str) -> Option<&FeFetState> {
        match self.element(name) {
            Some(Element::Fefet { state, .. }) => Some(state),
            _ => None,
        }
    }

    pub fn set_fefet_state(&mut self, name: &str, new_state: FeFetState) -> bool {
        match self.element_mut(name) {
            Some(Element::Fefet { state, .. }) => {
                *state = new_state;
                true
            }
            _ => false,
        }
    }
}

/// Solver tolerances and stepping controls.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolverConfig {
    pub reltol: f64,
    /// Voltage tolerance [V].
    pub vntol: f64,
    /// KCL residual tolerance [A].
    pub abstol: f64,
    pub max_newton_iters: usize,
    /// Conductance from every node to ground [S].
    pub gmin: f64,
    /// Largest transient step [s].
    pub dtmax: f64,
    pub dt_shrink_factor: f64,
    pub max_dt_retries: usize,
    /// Implicit integrator blend: 1.0 backward Euler, 0.5 trapezoidal.
    /// The default 0.75 keeps strong damping on stiff programming edges
    /// while halving backward Euler's first-order error constant.
    pub theta: f64,
    /// Newton per-iteration voltage step clamp [V].
    pub vstep_limit: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            reltol: 1e-3,
            vntol: 1e-6,
            abstol: 1e-9,
            max_newton_iters: 100,
            gmin: 1e-12,
            dtmax: 1e-9,
            dt_shrink_factor: 2.0,
            max_dt_retries: 20,
            theta: 0.75,
            vstep_limit: 1.0,
        }
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("singular MNA matrix (floating subcircuit?){0}")]
    Singular(String),
    #[error("Newton iteration did not converge{0}")]
    NonConvergence(String),
    #[error("transient timestep underflow at t = {0:.3e} s")]
    TimestepUnderflow(f64),
    #[error("unknown source '{0}'")]
    UnknownSource(String),
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}
