//! Netlist elaboration into a solvable [`Circuit`].

use super::{AnalysisDirective, Element as Card, ElementKind, ElementValue, ModelFamily, Netlist, PolarizationTag};
use crate::device::{FeFetParams, FeFetState, MosfetParams, Polarity};
use crate::engine::Circuit;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ElaborateError {
    #[error("unknown model '{model}' referenced by element '{element}'")]
    UnknownModel { element: String, model: String },
    #[error("no ground node: nothing connects to node 0/gnd")]
    NoGround,
    #[error("unknown model parameter '{param}' in model '{model}'")]
    UnknownModelParam { model: String, param: String },
    #[error(".ic names unknown node '{0}'")]
    UnknownIcNode(String),
}

/// Device parameter record behind a `.model` name.
#[derive(Debug, Clone)]
pub enum ModelCard {
    Mosfet(MosfetParams),
    Fefet(FeFetParams),
}

/// Named model cards; netlist `.model` directives produce one, and callers
/// may pre-seed standard models.
#[derive(Debug, Clone, Default)]
pub struct ModelLibrary {
    pub cards: BTreeMap<String, ModelCard>,
}

impl ModelLibrary {
    pub fn insert(&mut self, name: &str, card: ModelCard) {
        self.cards.insert(name.to_ascii_lowercase(), card);
    }

    pub fn get(&self, name: &str) -> Option<&ModelCard> {
        self.cards.get(&name.to_ascii_lowercase())
    }

    /// Builds a library from the netlist's own `.model` cards, on top of
    /// baseline parameter defaults for each family.
    pub fn from_netlist(netlist: &Netlist) -> Result<Self, ElaborateError> {
        let mut lib = ModelLibrary::default();
        for m in &netlist.models {
            let card = match m.family {
                ModelFamily::Nmos | ModelFamily::Pmos => {
                    let mut p = match m.family {
                        ModelFamily::Nmos => MosfetParams::new(Polarity::N, 0.4, 1e-4, 1.5, 0.1),
                        _ => MosfetParams::new(Polarity::P, -0.4, 1e-4, 1.5, 0.1),
                    };
                    for (k, v) in &m.params {
                        apply_mosfet_param(&mut p, k, *v).ok_or_else(|| {
                            ElaborateError::UnknownModelParam {
                                model: m.name.clone(),
                                param: k.clone(),
                            }
                        })?;
                    }
                    ModelCard::Mosfet(p)
                }
                ModelFamily::Pfefet | ModelFamily::Nfefet => {
                    let base = match m.family {
                        ModelFamily::Pfefet => MosfetParams::new(Polarity::P, -1.0, 1e-4, 1.5, 0.1),
                        _ => MosfetParams::new(Polarity::N, 1.0, 1e-4, 1.5, 0.1),
                    };
                    // default kinetics anchors: (4 V, 10 ns) and (2 V, 100 s)
                    let kinetics =
                        crate::device::calibrate_kinetics((4.0, 10e-9), (2.0, 100.0)).unwrap();
                    let mut p = FeFetParams::new(base, 1.2, kinetics);
                    for (k, v) in &m.params {
                        let known = match k.as_str() {
                            "mw" => {
                                p.mw = *v;
                                true
                            }
                            "pinning" => {
                                p.pinning_fraction = *v;
                                true
                            }
                            "tau0" => {
                                p.kinetics.tau0 = *v;
                                true
                            }
                            "v0" => {
                                p.kinetics.v0 = *v;
                                true
                            }
                            _ => apply_mosfet_param(&mut p.base, k, *v).is_some(),
                        };
                        if !known {
                            return Err(ElaborateError::UnknownModelParam {
                                model: m.name.clone(),
                                param: k.clone(),
                            });
                        }
                    }
                    ModelCard::Fefet(p)
                }
            };
            lib.insert(&m.name, card);
        }
        Ok(lib)
    }
}

fn apply_mosfet_param(p: &mut MosfetParams, key: &str, v: f64) -> Option<()> {
    match key {
        "vth0" => p.vth0 = v,
        "kprime" => p.kprime = v,
        "nsub" | "n_sub" => p.n_sub = v,
        "lambda" => p.lambda = v,
        "vt" | "vt_thermal" => p.vt_thermal = v,
        _ => return None,
    }
    Some(())
}

/// Elaboration result: the circuit, the analysis plan, and any warnings
/// (dangling nodes referenced exactly once).
#[derive(Debug)]
pub struct Elaborated {
    pub circuit: Circuit,
    pub plan: Vec<AnalysisDirective>,
    pub warnings: Vec<String>,
}

/// Number of FeFET segments when an element is tagged `LVT`/`HVT`.
const DEFAULT_SEGMENTS: usize = 8;

pub fn elaborate(netlist: &Netlist, models: &ModelLibrary) -> Result<Elaborated, ElaborateError> {
    let mut circuit = Circuit::new();
    let mut touches_ground = false;
    let mut node_refs: BTreeMap<String, usize> = BTreeMap::new();

    for card in &netlist.elements {
        for n in &card.nodes {
            let lower = n.to_ascii_lowercase();
            if lower == "0" || lower == "gnd" {
                touches_ground = true;
            } else {
                *node_refs.entry(lower).or_insert(0) += 1;
            }
        }
        add_card(&mut circuit, card, models)?;
    }
    if !touches_ground {
        return Err(ElaborateError::NoGround);
    }

    let mut warnings: Vec<String> = node_refs
        .iter()
        .filter(|(_, &count)| count == 1)
        .map(|(n, _)| format!("node '{n}' is referenced only once (dangling)"))
        .collect();
    warnings.sort();

    for d in &netlist.directives {
        if let AnalysisDirective::Ic { pairs } = d {
            for (node, v) in pairs {
                let id = circuit
                    .find_node(node)
                    .ok_or_else(|| ElaborateError::UnknownIcNode(node.clone()))?;
                circuit.set_initial_condition(id, *v);
            }
        }
    }

    Ok(Elaborated { circuit, plan: netlist.directives.clone(), warnings })
}

fn add_card(circuit: &mut Circuit, card: &Card, models: &ModelLibrary) -> Result<(), ElaborateError> {
    let node = |c: &mut Circuit, i: usize| c.node(&card.nodes[i]);
    match (&card.kind, &card.value) {
        (ElementKind::Resistor, ElementValue::Number(v)) => {
            let a = node(circuit, 0);
            let b = node(circuit, 1);
            circuit.add_resistor(&card.name, a, b, *v);
        }
        (ElementKind::Capacitor, ElementValue::Number(v)) => {
            let a = node(circuit, 0);
            let b = node(circuit, 1);
            circuit.add_capacitor(&card.name, a, b, *v);
        }
        (ElementKind::VSource, ElementValue::Wave(w)) => {
            let p = node(circuit, 0);
            let m = node(circuit, 1);
            circuit.add_vsource(&card.name, p, m, w.clone());
        }
        (ElementKind::ISource, ElementValue::Wave(w)) => {
            let f = node(circuit, 0);
            let t = node(circuit, 1);
            circuit.add_isource(&card.name, f, t, w.clone());
        }
        (ElementKind::Mosfet, ElementValue::Model { name, .. }) => {
            let params = match models.get(name) {
                Some(ModelCard::Mosfet(p)) => *p,
                _ => {
                    return Err(ElaborateError::UnknownModel {
                        element: card.name.clone(),
                        model: name.clone(),
                    })
                }
            };
            let g = node(circuit, 0);
            let d = node(circuit, 1);
            let s = node(circuit, 2);
            circuit.add_mosfet(&card.name, g, d, s, params);
        }
        (ElementKind::Fefet, ElementValue::Model { name, tag }) => {
            let params = match models.get(name) {
                Some(ModelCard::Fefet(p)) => *p,
                _ => {
                    return Err(ElaborateError::UnknownModel {
                        element: card.name.clone(),
                        model: name.clone(),
                    })
                }
            };
            let state = match tag {
                Some(PolarizationTag::Lvt) | None => FeFetState::lvt(DEFAULT_SEGMENTS),
                Some(PolarizationTag::Hvt) => FeFetState::hvt(DEFAULT_SEGMENTS),
                Some(PolarizationTag::Explicit(vals)) => FeFetState { segments: vals.clone() },
            };
            let g = node(circuit, 0);
            let d = node(circuit, 1);
            let s = node(circuit, 2);
            circuit.add_fefet(&card.name, g, d, s, params, state);
        }
        _ => unreachable!("parser pairs kinds with value shapes"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn empty_netlist_has_no_ground() {
        let n = parse("title only\n.end\n").unwrap();
        let lib = ModelLibrary::from_netlist(&n).unwrap();
        assert!(matches!(elaborate(&n, &lib), Err(ElaborateError::NoGround)));
    }

    #[test]
    fn fefet_tags_set_initial_polarization() {
        let src = "t\n.model pf pfefet vth0=-1 mw=1.0\nf1 g d 0 pf lvt\nf2 g d 0 pf hvt\nf3 g d 0 pf 0.5;-0.5\n";
        let n = parse(src).unwrap();
        let lib = ModelLibrary::from_netlist(&n).unwrap();
        let e = elaborate(&n, &lib).unwrap();
        let states = e.circuit.fefet_states();
        assert_eq!(states[0].1.segments, vec![1.0; 8]);
        assert_eq!(states[1].1.segments, vec![-1.0; 8]);
        assert_eq!(states[2].1.segments, vec![0.5, -0.5]);
    }

    #[test]
    fn unknown_model_is_an_error() {
        let n = parse("t\nm1 a b 0 nosuch\n").unwrap();
        let lib = ModelLibrary::default();
        assert!(matches!(elaborate(&n, &lib), Err(ElaborateError::UnknownModel { .. })));
    }

    #[test]
    fn dangling_node_warns() {
        let src = "t\nv1 a 0 1\nr1 a b 1k\nr2 a 0 1k\n";
        let n = parse(src).unwrap();
        let lib = ModelLibrary::default();
        let e = elaborate(&n, &lib).unwrap();
        assert_eq!(e.warnings.len(), 1);
        assert!(e.warnings[0].contains("'b'"));
    }

    #[test]
    fn nvsram_topology_node_count() {
        // six transistors, two of them FeFETs, bitline and node capacitors
        let src = "nv cell\n\
            .model nm nmos vth0=0.4\n\
            .model pf pfefet vth0=-1 mw=1.2\n\
            vdd vdd 0 1\nvwl wl 0 0\nvbl bl 0 1\nvblb blb 0 1\n\
            m1 qb q 0 nm\nm3 q qb 0 nm\n\
            f2 q qb vdd pf hvt\nf4 qb q vdd pf lvt\n\
            m5 wl bl q nm\nm6 wl blb qb nm\n\
            c1 bl 0 17f\nc2 blb 0 17f\nc3 q 0 0.1f\nc4 qb 0 0.1f\n";
        let n = parse(src).unwrap();
        let lib = ModelLibrary::from_netlist(&n).unwrap();
        let e = elaborate(&n, &lib).unwrap();
        // q, qb, bl, blb, wl, vdd
        assert_eq!(e.circuit.node_count(), 6);
        assert_eq!(e.circuit.fefet_states().len(), 2);
        assert!(e.warnings.is_empty());
    }
}
