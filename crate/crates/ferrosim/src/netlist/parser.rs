//! Line-oriented netlist parser.

use super::{
    AnalysisDirective, Element, ElementKind, ElementValue, ModelDef, ModelFamily, Netlist,
    ParseError, PolarizationTag,
};
use crate::engine::SourceWave;
use crate::units::parse_si;

/// A logical line: continuations folded in, comments stripped.
struct Logical {
    text: String,
    line: usize,
}

fn logical_lines(text: &str) -> Vec<Logical> {
    let mut out: Vec<Logical> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('*') {
            continue;
        }
        if let Some(cont) = trimmed.strip_prefix('+') {
            // element cards may continue; the title line may not
            if out.len() >= 2 {
                let prev = out.last_mut().unwrap();
                prev.text.push(' ');
                prev.text.push_str(cont.trim());
                continue;
            }
            // keeps its own line number so the error points at it
            out.push(Logical { text: format!("+{}", cont.trim()), line: line_no });
            continue;
        }
        out.push(Logical { text: trimmed.to_string(), line: line_no });
    }
    out
}

/// Splits a card into tokens, keeping `pwl(...)`/`pulse(...)` argument
/// groups attached to their keyword.
fn tokenize(text: &str, line: usize) -> Result<Vec<String>, ParseError> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    let mut depth = 0usize;
    for (idx, ch) in text.chars().enumerate() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                if depth == 0 {
                    return Err(ParseError::at("unbalanced ')'", line, idx + 1));
                }
                depth -= 1;
                cur.push(ch);
            }
            c if c.is_whitespace() && depth == 0 => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
            }
            _ => cur.push(ch),
        }
    }
    if depth != 0 {
        return Err(ParseError::new("unbalanced '('", line));
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    Ok(tokens)
}

fn number(tok: &str, line: usize) -> Result<f64, ParseError> {
    parse_si(tok).map_err(|e| ParseError::new(e.to_string(), line))
}

/// Parses a source value: bare number (DC), `dc <v>`, `pwl(...)`, `pulse(...)`.
fn source_wave(tokens: &[String], line: usize) -> Result<SourceWave, ParseError> {
    if tokens.is_empty() {
        return Err(ParseError::new("missing source value", line));
    }
    let first = tokens[0].to_ascii_lowercase();
    if first == "dc" {
        if tokens.len() != 2 {
            return Err(ParseError::new("dc takes one value", line));
        }
        return Ok(SourceWave::Dc(number(&tokens[1], line)?));
    }
    if let Some(args) = shape_args(&first, "pwl") {
        let vals = args_list(args, line)?;
        if vals.is_empty() || vals.len() % 2 != 0 {
            return Err(ParseError::new("pwl needs time/value pairs", line));
        }
        let pts: Vec<(f64, f64)> = vals.chunks(2).map(|c| (c[0], c[1])).collect();
        for w in pts.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(ParseError::new("pwl times must be strictly increasing", line));
            }
        }
        return Ok(SourceWave::Pwl(pts));
    }
    if let Some(args) = shape_args(&first, "pulse") {
        let v = args_list(args, line)?;
        if v.len() != 7 {
            return Err(ParseError::new("pulse takes v1 v2 delay rise fall width period", line));
        }
        if v[3] <= 0.0 || v[4] <= 0.0 {
            return Err(ParseError::new("pulse rise/fall must be > 0", line));
        }
        return Ok(SourceWave::Pulse {
            v1: v[0],
            v2: v[1],
            delay: v[2],
            rise: v[3],
            fall: v[4],
            width: v[5],
            period: v[6],
        });
    }
    if tokens.len() == 1 {
        return Ok(SourceWave::Dc(number(&tokens[0], line)?));
    }
    Err(ParseError::new(format!("cannot parse source value '{}'", tokens.join(" ")), line))
}

fn shape_args<'a>(token: &'a str, keyword: &str) -> Option<&'a str> {
    token
        .strip_prefix(keyword)
        .and_then(|rest| rest.strip_prefix('('))
        .and_then(|rest| rest.strip_suffix(')'))
}

fn args_list(args: &str, line: usize) -> Result<Vec<f64>, ParseError> {
    args.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| number(s, line))
        .collect()
}

fn expect_nodes(tokens: &[String], n: usize, line: usize) -> Result<Vec<String>, ParseError> {
    if tokens.len() < n {
        return Err(ParseError::new(format!("expected {n} node names"), line));
    }
    Ok(tokens[..n].iter().map(|s| s.to_ascii_lowercase()).collect())
}

pub fn parse(text: &str) -> Result<Netlist, ParseError> {
    let logical = logical_lines(text);
    if logical.is_empty() {
        return Err(ParseError::new("empty netlist (no title line)", 1));
    }
    if logical[0].text.starts_with('+') {
        return Err(ParseError::new("continuation with nothing to continue", logical[0].line));
    }
    let title = logical[0].text.clone();
    let mut netlist = Netlist {
        title,
        elements: Vec::new(),
        directives: Vec::new(),
        models: Vec::new(),
    };
    let mut ended = false;

    for l in &logical[1..] {
        if ended {
            return Err(ParseError::new("content after .end", l.line));
        }
        if l.text.starts_with('+') {
            return Err(ParseError::new("continuation with nothing to continue", l.line));
        }
        let tokens = tokenize(&l.text, l.line)?;
        if tokens.is_empty() {
            continue;
        }
        let head = tokens[0].to_ascii_lowercase();
        if let Some(directive) = head.strip_prefix('.') {
            match directive {
                "end" => ended = true,
                "op" => netlist.directives.push(AnalysisDirective::Op),
                "tran" => {
                    if tokens.len() != 3 {
                        return Err(ParseError::new(".tran takes dtmax tstop", l.line));
                    }
                    let dtmax = number(&tokens[1], l.line)?;
                    let tstop = number(&tokens[2], l.line)?;
                    if tstop <= 0.0 || dtmax <= 0.0 {
                        return Err(ParseError::new(".tran times must be > 0", l.line));
                    }
                    netlist.directives.push(AnalysisDirective::Tran { dtmax, tstop });
                }
                "dc" => {
                    if tokens.len() != 5 {
                        return Err(ParseError::new(".dc takes source start stop step", l.line));
                    }
                    let start = number(&tokens[2], l.line)?;
                    let stop = number(&tokens[3], l.line)?;
                    let step = number(&tokens[4], l.line)?;
                    if step == 0.0 || (stop - start) * step < 0.0 {
                        return Err(ParseError::new(".dc step sign inconsistent", l.line));
                    }
                    netlist.directives.push(AnalysisDirective::Dc {
                        source: tokens[1].to_ascii_lowercase(),
                        start,
                        stop,
                        step,
                    });
                }
                "ic" => {
                    let mut pairs = Vec::new();
                    for tok in &tokens[1..] {
                        let (node, val) = tok.split_once('=').ok_or_else(|| {
                            ParseError::new(".ic entries take node=value form", l.line)
                        })?;
                        pairs.push((node.to_ascii_lowercase(), number(val, l.line)?));
                    }
                    if pairs.is_empty() {
                        return Err(ParseError::new(".ic needs node=value pairs", l.line));
                    }
                    netlist.directives.push(AnalysisDirective::Ic { pairs });
                }
                "model" => {
                    if tokens.len() < 3 {
                        return Err(ParseError::new(".model takes name family [params]", l.line));
                    }
                    let family = match tokens[2].to_ascii_lowercase().as_str() {
                        "nmos" => ModelFamily::Nmos,
                        "pmos" => ModelFamily::Pmos,
                        "pfefet" => ModelFamily::Pfefet,
                        "nfefet" => ModelFamily::Nfefet,
                        other => {
                            return Err(ParseError::new(
                                format!("unknown model family '{other}'"),
                                l.line,
                            ))
                        }
                    };
                    let mut params = Vec::new();
                    for tok in &tokens[3..] {
                        let (k, v) = tok.split_once('=').ok_or_else(|| {
                            ParseError::new("model parameters take key=value form", l.line)
                        })?;
                        params.push((k.to_ascii_lowercase(), number(v, l.line)?));
                    }
                    netlist.models.push(ModelDef {
                        name: tokens[1].to_ascii_lowercase(),
                        family,
                        params,
                    });
                }
                other => {
                    return Err(ParseError::new(format!("unknown directive '.{other}'"), l.line))
                }
            }
            continue;
        }

        // element card
        let kind = match head.chars().next().unwrap() {
            'r' => ElementKind::Resistor,
            'c' => ElementKind::Capacitor,
            'v' => ElementKind::VSource,
            'i' => ElementKind::ISource,
            'm' => ElementKind::Mosfet,
            'f' => ElementKind::Fefet,
            other => {
                return Err(ParseError::at(
                    format!("unknown element letter '{other}'"),
                    l.line,
                    1,
                ))
            }
        };
        let name = head.clone();
        if netlist.elements.iter().any(|e| e.name == name) {
            return Err(ParseError::new(format!("duplicate element name '{name}'"), l.line));
        }
        let rest = &tokens[1..];
        let element = match kind {
            ElementKind::Resistor | ElementKind::Capacitor => {
                let nodes = expect_nodes(rest, 2, l.line)?;
                if rest.len() != 3 {
                    return Err(ParseError::new("expected two nodes and a value", l.line));
                }
                let v = number(&rest[2], l.line)?;
                if !v.is_finite() || v <= 0.0 {
                    return Err(ParseError::new("value must be finite and > 0", l.line));
                }
                Element { kind, name, nodes, value: ElementValue::Number(v), line: l.line }
            }
            ElementKind::VSource | ElementKind::ISource => {
                let nodes = expect_nodes(rest, 2, l.line)?;
                let wave = source_wave(&rest[2..], l.line)?;
                Element { kind, name, nodes, value: ElementValue::Wave(wave), line: l.line }
            }
            ElementKind::Mosfet => {
                let nodes = expect_nodes(rest, 3, l.line)?;
                if rest.len() != 4 {
                    return Err(ParseError::new(
                        "expected gate drain source and a model name",
                        l.line,
                    ));
                }
                Element {
                    kind,
                    name,
                    nodes,
                    value: ElementValue::Model { name: rest[3].to_ascii_lowercase(), tag: None },
                    line: l.line,
                }
            }
            ElementKind::Fefet => {
                let nodes = expect_nodes(rest, 3, l.line)?;
                if rest.len() != 5 {
                    return Err(ParseError::new(
                        "expected gate drain source, a model name and a polarization tag",
                        l.line,
                    ));
                }
                let tag = match rest[4].to_ascii_lowercase().as_str() {
                    "lvt" => PolarizationTag::Lvt,
                    "hvt" => PolarizationTag::Hvt,
                    list => {
                        let vals: Result<Vec<f64>, _> =
                            list.split(';').map(|s| number(s, l.line)).collect();
                        let vals = vals.map_err(|_| {
                            ParseError::new(
                                format!("polarization tag must be LVT, HVT or p1;p2;... (got '{}')", rest[4]),
                                l.line,
                            )
                        })?;
                        if vals.iter().any(|p| !(-1.0..=1.0).contains(p)) {
                            return Err(ParseError::new(
                                "polarization values must lie in [-1, 1]",
                                l.line,
                            ));
                        }
                        PolarizationTag::Explicit(vals)
                    }
                };
                Element {
                    kind,
                    name,
                    nodes,
                    value: ElementValue::Model {
                        name: rest[3].to_ascii_lowercase(),
                        tag: Some(tag),
                    },
                    line: l.line,
                }
            }
        };
        netlist.elements.push(element);
    }
    Ok(netlist)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitline_capacitor_card() {
        let n = parse("test\nc1 bl 0 17f\n.end\n").unwrap();
        assert_eq!(n.elements.len(), 1);
        assert_eq!(n.elements[0].kind, ElementKind::Capacitor);
        match n.elements[0].value {
            ElementValue::Number(v) => assert!((v - 1.7e-14).abs() < 1e-22),
            _ => panic!(),
        }
    }

    #[test]
    fn pwl_source_card() {
        let n = parse("t\nvwl wl 0 pwl(0 0 1n 4)\n").unwrap();
        match &n.elements[0].value {
            ElementValue::Wave(SourceWave::Pwl(pts)) => {
                assert_eq!(pts.len(), 2);
                assert_eq!(pts[1], (1e-9, 4.0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_suffix_names_line() {
        let err = parse("t\nc1 bl 0 17q\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("unknown suffix 'q'"), "{}", err.message);
    }

    #[test]
    fn duplicate_names_rejected() {
        let err = parse("t\nr1 a 0 1k\nr1 b 0 2k\n").unwrap_err();
        assert!(err.message.contains("duplicate"));
        assert_eq!(err.line, 3);
    }

    #[test]
    fn pwl_times_must_increase() {
        let err = parse("t\nv1 a 0 pwl(0 0 1n 1 0.5n 2)\n").unwrap_err();
        assert!(err.message.contains("strictly increasing"));
    }

    #[test]
    fn unknown_directive_is_an_error() {
        let err = parse("t\n.nodeset v(a)=1\n").unwrap_err();
        assert!(err.message.contains("unknown directive"));
    }

    #[test]
    fn continuation_lines_fold() {
        let n = parse("t\nv1 a 0 pwl(0 0\n+ 1n 4)\n.end").unwrap();
        match &n.elements[0].value {
            ElementValue::Wave(SourceWave::Pwl(pts)) => assert_eq!(pts.len(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fefet_card_with_tag() {
        let n = parse("t\n.model pf pfefet vth0=-1 mw=1.2\nfm4 qb q vdd pf LVT\n").unwrap();
        assert_eq!(n.models.len(), 1);
        match &n.elements[0].value {
            ElementValue::Model { name, tag } => {
                assert_eq!(name, "pf");
                assert_eq!(*tag, Some(PolarizationTag::Lvt));
            }
            other => panic!("{other:?}"),
        }
    }
}
