//! SPICE-subset netlist front-end.
//!
//! Grammar (line oriented): the first non-comment line is the title; `*`
//! starts a comment line; a leading `+` continues the previous line;
//! keywords are case-insensitive; numbers take SI suffixes
//! `f p n u m k meg g`. Supported cards:
//!
//! ```text
//! r<name> <a> <b> <ohms>
//! c<name> <a> <b> <farads>
//! v<name> <+> <-> <dc-value> | pwl(t v t v ...) | pulse(v1 v2 td tr tf pw per)
//! i<name> <from> <to> <dc-value> | pwl(...) | pulse(...)
//! m<name> <gate> <drain> <source> <model>
//! f<name> <gate> <drain> <source> <model> <LVT|HVT|p1;p2;...>
//! .model <name> nmos|pmos|pfefet|nfefet [param=value ...]
//! .tran <dtmax> <tstop>     .dc <src> <start> <stop> <step>
//! .op                       .ic <node>=<v> ...
//! .end
//! ```
//!
//! Differences from classic SPICE, on purpose: MOS terminals are ordered
//! gate, drain, source (no bulk), and the element letter `F` is a
//! ferroelectric FET with a mandatory model card and initial polarization
//! tag, not a current-controlled current source. Node names are arbitrary
//! identifiers; `0` and `gnd` both mean ground.

mod elaborate;
mod parser;
mod unparse;

pub use elaborate::{elaborate, ElaborateError, Elaborated, ModelCard, ModelLibrary};
pub use parser::parse;
pub use unparse::unparse;

use crate::engine::SourceWave;
use thiserror::Error;

/// Parsed netlist: a title, element cards and analysis directives.
#[derive(Debug, Clone, PartialEq)]
pub struct Netlist {
    pub title: String,
    pub elements: Vec<Element>,
    pub directives: Vec<AnalysisDirective>,
    pub models: Vec<ModelDef>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    Resistor,
    Capacitor,
    VSource,
    ISource,
    Mosfet,
    Fefet,
}

/// Initial polarization tag on a FeFET card.
#[derive(Debug, Clone, PartialEq)]
pub enum PolarizationTag {
    Lvt,
    Hvt,
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ElementValue {
    /// Plain numeric value (resistance, capacitance).
    Number(f64),
    /// Source waveform.
    Wave(SourceWave),
    /// Model reference, with polarization tag for FeFETs.
    Model { name: String, tag: Option<PolarizationTag> },
}

#[derive(Debug, Clone)]
pub struct Element {
    pub kind: ElementKind,
    pub name: String,
    pub nodes: Vec<String>,
    pub value: ElementValue,
    /// 1-based source line, for diagnostics.
    pub line: usize,
}

// Structural equality ignores the diagnostic line number, so a parsed
// netlist equals its re-parsed canonical emission.
impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.name == other.name
            && self.nodes == other.nodes
            && self.value == other.value
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisDirective {
    Tran { dtmax: f64, tstop: f64 },
    Dc { source: String, start: f64, stop: f64, step: f64 },
    Op,
    Ic { pairs: Vec<(String, f64)> },
}

/// `.model` card: name, device family, parameter overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelDef {
    pub name: String,
    pub family: ModelFamily,
    pub params: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelFamily {
    Nmos,
    Pmos,
    Pfefet,
    Nfefet,
}

/// Parse failure with source position; every error names a line.
#[derive(Debug, Clone, Error, PartialEq)]
#[error("{message} at line {line}{}", column.map(|c| format!(", column {c}")).unwrap_or_default())]
pub struct ParseError {
    pub message: String,
    pub line: usize,
    pub column: Option<usize>,
}

impl ParseError {
    pub(crate) fn new(message: impl Into<String>, line: usize) -> Self {
        Self { message: message.into(), line, column: None }
    }

    pub(crate) fn at(message: impl Into<String>, line: usize, column: usize) -> Self {
        Self { message: message.into(), line, column: Some(column) }
    }
}
