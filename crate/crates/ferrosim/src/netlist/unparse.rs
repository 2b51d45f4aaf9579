//! Canonical netlist text emission. `parse(unparse(parse(t)))` is a fixed
//! point: the emitted form is already normalized.

use super::{AnalysisDirective, ElementValue, ModelFamily, Netlist, PolarizationTag};
use crate::engine::SourceWave;

/// Shortest decimal form that parses back to exactly the same float, so
/// the canonical emission is lossless.
fn fmt_sig(x: f64, _digits: usize) -> String {
    format!("{x}")
}

fn wave_text(wave: &SourceWave) -> String {
    match wave {
        SourceWave::Dc(v) => fmt_sig(*v, 9),
        SourceWave::Pwl(pts) => {
            let body: Vec<String> =
                pts.iter().flat_map(|(t, v)| [fmt_sig(*t, 9), fmt_sig(*v, 9)]).collect();
            format!("pwl({})", body.join(" "))
        }
        SourceWave::Pulse { v1, v2, delay, rise, fall, width, period } => format!(
            "pulse({} {} {} {} {} {} {})",
            fmt_sig(*v1, 9),
            fmt_sig(*v2, 9),
            fmt_sig(*delay, 9),
            fmt_sig(*rise, 9),
            fmt_sig(*fall, 9),
            fmt_sig(*width, 9),
            fmt_sig(*period, 9)
        ),
    }
}

pub fn unparse(netlist: &Netlist) -> String {
    let mut out = String::new();
    out.push_str(&netlist.title);
    out.push('\n');
    for m in &netlist.models {
        let family = match m.family {
            ModelFamily::Nmos => "nmos",
            ModelFamily::Pmos => "pmos",
            ModelFamily::Pfefet => "pfefet",
            ModelFamily::Nfefet => "nfefet",
        };
        out.push_str(&format!(".model {} {}", m.name, family));
        for (k, v) in &m.params {
            out.push_str(&format!(" {}={}", k, fmt_sig(*v, 9)));
        }
        out.push('\n');
    }
    for e in &netlist.elements {
        out.push_str(&e.name);
        for n in &e.nodes {
            out.push(' ');
            out.push_str(n);
        }
        match &e.value {
            ElementValue::Number(v) => out.push_str(&format!(" {}", fmt_sig(*v, 9))),
            ElementValue::Wave(w) => out.push_str(&format!(" {}", wave_text(w))),
            ElementValue::Model { name, tag } => {
                out.push_str(&format!(" {name}"));
                match tag {
                    None => {}
                    Some(PolarizationTag::Lvt) => out.push_str(" lvt"),
                    Some(PolarizationTag::Hvt) => out.push_str(" hvt"),
                    Some(PolarizationTag::Explicit(vals)) => {
                        let body: Vec<String> = vals.iter().map(|p| fmt_sig(*p, 9)).collect();
                        out.push_str(&format!(" {}", body.join(";")));
                    }
                }
            }
        }
        out.push('\n');
    }
    for d in &netlist.directives {
        match d {
            AnalysisDirective::Op => out.push_str(".op\n"),
            AnalysisDirective::Tran { dtmax, tstop } => {
                out.push_str(&format!(".tran {} {}\n", fmt_sig(*dtmax, 9), fmt_sig(*tstop, 9)))
            }
            AnalysisDirective::Dc { source, start, stop, step } => out.push_str(&format!(
                ".dc {} {} {} {}\n",
                source,
                fmt_sig(*start, 9),
                fmt_sig(*stop, 9),
                fmt_sig(*step, 9)
            )),
            AnalysisDirective::Ic { pairs } => {
                let body: Vec<String> =
                    pairs.iter().map(|(n, v)| format!("{}={}", n, fmt_sig(*v, 9))).collect();
                out.push_str(&format!(".ic {}\n", body.join(" ")));
            }
        }
    }
    out.push_str(".end\n");
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn round_trip_is_a_fixed_point() {
        let src = "ring test\n\
                   * a comment\n\
                   .model nm NMOS vth0=0.4 kprime=1.8e-4\n\
                   vdd vdd 0 1.0\n\
                   vin in 0 pulse(0 1 1n 10p 10p 2n 5n)\n\
                   m1 in out 0 nm\n\
                   r1 vdd out 10k\n\
                   c1 out 0 17f\n\
                   .ic out=1\n\
                   .tran 1p 10n\n\
                   .end\n";
        let n1 = parse(src).unwrap();
        let text = unparse(&n1);
        let n2 = parse(&text).unwrap();
        assert_eq!(n1, n2);
        assert_eq!(text, unparse(&n2));
    }
}
