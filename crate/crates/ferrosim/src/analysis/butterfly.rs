//! Butterfly-curve extraction and static-noise-margin analysis.
//!
//! The latch loop is broken at each storage node in turn: a forcing source
//! sweeps one node while the opposite inverter's response is recorded,
//! with mode-dependent peripheral bias (hold, read, or the comparative
//! write condition). A small measurement bleed loads each storage node so
//! levels held by nothing but sub-picoamp leakage race read as what they
//! are. Stable points must additionally be self-sustained: the high node's
//! own load transistor has to deliver more than a floor current there,
//! otherwise the intersection only exists courtesy of access-transistor
//! leakage against the clamped bitlines and is flagged as a pseudo-state.

use super::AnalysisError;
use crate::cellbench::Cell;
use crate::curve::Curve;
use crate::device::{fefet_current, mosfet_current};
use crate::engine::{dc_sweep, Element, SourceWave};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ButterflyMode {
    Hold,
    Read,
    Write,
}

/// One VTC intersection in the (q, qb) plane.
#[derive(Debug, Clone, Serialize)]
pub struct Intersection {
    pub q: f64,
    pub qb: f64,
    /// Product of the two local VTC slopes; |gain| < 1 means the loop
    /// returns to this point after a small perturbation.
    pub loop_gain: f64,
    pub stable: bool,
    /// High side held up by its own load transistor (not just leakage).
    pub self_sustained: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ButterflyResult {
    pub mode: ButterflyMode,
    /// Force Q, record QB.
    #[serde(skip)]
    pub vtc_forward: Curve,
    /// Force QB, record Q (plot mirrored for the butterfly).
    #[serde(skip)]
    pub vtc_mirrored: Curve,
    /// Side length of the largest inscribed square per lobe.
    pub snm_lobes: Vec<f64>,
    /// Smallest reported lobe (the cell's noise margin).
    pub snm: f64,
    pub intersections: Vec<Intersection>,
    /// Exactly one stable, self-sustained operating point.
    pub monostable: bool,
    /// Write-mode curves are produced at nominal voltage purely for
    /// comparison; actual nonvolatile writes run at the programming level.
    pub non_operational: bool,
}

/// Extracts both VTCs and the SNM for the given cell and mode. The cell is
/// cloned; polarization state is frozen throughout (operating points are
/// instantaneous measurements).
pub fn butterfly(
    cell: &Cell,
    mode: ButterflyMode,
    snm_step: f64,
    bleed_siemens: f64,
    selfsustain_floor: f64,
) -> Result<ButterflyResult, AnalysisError> {
    let vn = cell.config.vdd_nominal;
    let (wl, bl, blb) = match mode {
        ButterflyMode::Hold => (0.0, vn, vn),
        ButterflyMode::Read => (vn, vn, vn),
        ButterflyMode::Write => (vn, 0.0, vn),
    };

    let sweep_one = |force_q: bool| -> Result<Curve, AnalysisError> {
        let mut c = cell.circuit.clone();
        c.initial_conditions.clear();
        c.set_source_wave("vvdd", SourceWave::Dc(vn));
        c.set_source_wave("vwl", SourceWave::Dc(wl));
        c.set_source_wave("vbl", SourceWave::Dc(bl));
        c.set_source_wave("vblb", SourceWave::Dc(blb));
        for name in ["ibl", "iblb"] {
            c.set_source_enabled(name, false);
        }
        if bleed_siemens > 0.0 {
            let q = cell.nodes.q;
            let qb = cell.nodes.qb;
            c.add_resistor("rbleed_q", q, crate::engine::NodeId::GROUND, 1.0 / bleed_siemens);
            c.add_resistor("rbleed_qb", qb, crate::engine::NodeId::GROUND, 1.0 / bleed_siemens);
        }
        let (forced, measured) =
            if force_q { (cell.nodes.q, cell.nodes.qb) } else { (cell.nodes.qb, cell.nodes.q) };
        c.add_vsource("vforce", forced, crate::engine::NodeId::GROUND, SourceWave::Dc(0.0));
        let pts = dc_sweep(&mut c, "vforce", 0.0, vn, snm_step, &cell.config.solver)?;
        Ok(Curve::new(pts.iter().map(|(v, op)| (*v, op.voltage(measured))).collect()))
    };

    let vtc_forward = sweep_one(true)?;
    let vtc_mirrored = sweep_one(false)?;

    // intersections of A = {(q, A(q))} and B = {(B(qb), qb)} in (q, qb)
    let a_pts = &vtc_forward.points;
    let b_pts: Vec<(f64, f64)> = vtc_mirrored.points.iter().map(|&(qb, q)| (q, qb)).collect();
    let mut crossings: Vec<(f64, f64, f64, f64)> = Vec::new(); // q, qb, slope_a, slope_b
    for wa in a_pts.windows(2) {
        for wb in b_pts.windows(2) {
            if let Some((x, y)) = seg_intersect(wa[0], wa[1], wb[0], wb[1]) {
                let sa = slope(wa[0], wa[1]);
                // slope of B as dQ/dQB from the original mirrored curve
                let sb = slope((wb[0].1, wb[0].0), (wb[1].1, wb[1].0));
                if !crossings.iter().any(|c| (c.0 - x).abs() < 1e-6 && (c.1 - y).abs() < 1e-6) {
                    crossings.push((x, y, sa, sb));
                }
            }
        }
    }
    crossings.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let intersections: Vec<Intersection> = crossings
        .iter()
        .map(|&(q, qb, sa, sb)| {
            let loop_gain = sa * sb;
            let stable = loop_gain.abs() < 1.0;
            let self_sustained = pullup_current(cell, q, qb, vn) >= selfsustain_floor;
            Intersection { q, qb, loop_gain, stable, self_sustained }
        })
        .collect();

    let stable_count =
        intersections.iter().filter(|i| i.stable && i.self_sustained).count();

    // lobes: intervals between consecutive crossings plus the box ends
    let mut bounds = vec![0.0];
    bounds.extend(crossings.iter().map(|c| c.0));
    bounds.push(vn);
    let mut snm_lobes = Vec::new();
    for w in bounds.windows(2) {
        let side = lobe_square_side(a_pts, &b_pts, w[0], w[1]);
        if side > 1e-3 {
            snm_lobes.push(side);
        }
    }
    let snm = snm_lobes.iter().cloned().fold(f64::INFINITY, f64::min);
    let snm = if snm.is_finite() { snm } else { 0.0 };

    Ok(ButterflyResult {
        mode,
        vtc_forward,
        vtc_mirrored,
        snm_lobes,
        snm,
        intersections,
        monostable: stable_count == 1,
        non_operational: mode == ButterflyMode::Write && cell.is_nvsram(),
    })
}

/// Drive the high node's load transistor could deliver at the candidate
/// operating point, evaluated with the drain pulled to half rail (at the
/// settled corner the delivered current is just leakage regardless of how
/// strong the device is, so capability is what distinguishes a real latch
/// state from one propped up by access leakage).
fn pullup_current(cell: &Cell, q: f64, qb: f64, vdd: f64) -> f64 {
    // M4 loads Q (gate QB); M2 loads QB (gate Q)
    let (name, vg) = if q >= qb { ("m4", qb) } else { ("m2", q) };
    let vd = 0.5 * vdd;
    match cell.circuit.element(name) {
        Some(Element::Fefet { params, state, .. }) => {
            fefet_current(state, params, vg, vd, vdd).abs()
        }
        Some(Element::Mosfet { params, .. }) => mosfet_current(params, vg, vd, vdd).abs(),
        _ => 0.0,
    }
}

fn slope(p0: (f64, f64), p1: (f64, f64)) -> f64 {
    let dx = p1.0 - p0.0;
    let dy = p1.1 - p0.1;
    if dx.abs() < 1e-12 {
        1e9_f64.copysign(dy * dx.signum())
    } else {
        dy / dx
    }
}

/// Segment intersection in the plane (inclusive of endpoints).
fn seg_intersect(
    a0: (f64, f64),
    a1: (f64, f64),
    b0: (f64, f64),
    b1: (f64, f64),
) -> Option<(f64, f64)> {
    let d1 = (a1.0 - a0.0, a1.1 - a0.1);
    let d2 = (b1.0 - b0.0, b1.1 - b0.1);
    let denom = d1.0 * d2.1 - d1.1 * d2.0;
    if denom.abs() < 1e-18 {
        return None;
    }
    let dx = b0.0 - a0.0;
    let dy = b0.1 - a0.1;
    let t = (dx * d2.1 - dy * d2.0) / denom;
    let s = (dx * d1.1 - dy * d1.0) / denom;
    if (-1e-9..=1.0 + 1e-9).contains(&t) && (-1e-9..=1.0 + 1e-9).contains(&s) {
        Some((a0.0 + t * d1.0, a0.1 + t * d1.1))
    } else {
        None
    }
}

/// Largest inscribed square between the two VTCs over a q-interval, by the
/// standard 45-degree construction: the maximal square's diagonal lies
/// along the rotated vertical, so its side is the longest in-lobe diagonal
/// chord / sqrt(2). Chords are taken between consecutive curve crossings of
/// each diagonal line and accepted only when their midpoint lies between
/// the curves, which keeps folded curve branches from pairing across lobes.
///
/// `a` is the forward VTC as (q, qb) samples (a function of q); `b_mirror`
/// is the mirrored VTC as (q, qb) samples whose underlying sweep makes it
/// a function of qb.
fn lobe_square_side(a: &[(f64, f64)], b_mirror: &[(f64, f64)], q_lo: f64, q_hi: f64) -> f64 {
    if q_hi - q_lo < 1e-9 {
        return 0.0;
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let rot = |pts: Vec<(f64, f64)>| -> Vec<(f64, f64)> {
        pts.iter().map(|&(x, y)| ((x + y) * s, (y - x) * s)).collect()
    };
    let ra = rot(clip(a, q_lo, q_hi));
    let rb = rot(clip(b_mirror, q_lo, q_hi));
    if ra.len() < 2 || rb.len() < 2 {
        return 0.0;
    }
    // interpolators over the full curves for the between-ness test:
    // A as qb = f(q), B as q = g(qb)
    let a_of = Curve::new(a.to_vec());
    let b_of = Curve::new(b_mirror.iter().map(|&(q, qb)| (qb, q)).collect());
    let inside = |x: f64, y: f64| -> bool {
        let da = y - a_of.y_at(x);
        let db = x - b_of.y_at(y);
        da * db <= 1e-12
    };

    let u_range = |pts: &[(f64, f64)]| {
        pts.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)))
    };
    let (alo, ahi) = u_range(&ra);
    let (blo, bhi) = u_range(&rb);
    let lo = alo.max(blo);
    let hi = ahi.min(bhi);
    if hi <= lo {
        return 0.0;
    }

    let mut best = 0.0f64;
    let n = 800;
    let mut vs: Vec<f64> = Vec::new();
    for i in 0..=n {
        let u = lo + (hi - lo) * i as f64 / n as f64;
        vs.clear();
        crossings_at(&ra, u, &mut vs);
        crossings_at(&rb, u, &mut vs);
        vs.sort_by(|p, q| p.partial_cmp(q).unwrap());
        for w in vs.windows(2) {
            let gap = w[1] - w[0];
            if gap <= best {
                continue;
            }
            let vm = 0.5 * (w[0] + w[1]);
            // inverse rotation of the chord midpoint
            let x = (u - vm) * s;
            let y = (u + vm) * s;
            if inside(x, y) {
                best = gap;
            }
        }
    }
    best / std::f64::consts::SQRT_2
}

/// All v-coordinates where a rotated polyline crosses the vertical at `u`.
fn crossings_at(pts: &[(f64, f64)], u: f64, out: &mut Vec<f64>) {
    for w in pts.windows(2) {
        let (u0, v0) = w[0];
        let (u1, v1) = w[1];
        if (u0 - u) * (u1 - u) <= 0.0 {
            if (u1 - u0).abs() < 1e-15 {
                out.push(v0);
                out.push(v1);
            } else {
                out.push(v0 + (v1 - v0) * (u - u0) / (u1 - u0));
            }
        }
    }
}

/// Clips a polyline to x (= q) in [lo, hi], interpolating boundary points.
fn clip(pts: &[(f64, f64)], lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for w in pts.windows(2) {
        let (mut p0, mut p1) = (w[0], w[1]);
        let (x0, x1) = (p0.0.min(p1.0), p0.0.max(p1.0));
        if x1 < lo || x0 > hi {
            continue;
        }
        let lerp_at = |a: (f64, f64), b: (f64, f64), x: f64| {
            let t = (x - a.0) / (b.0 - a.0);
            (x, a.1 + t * (b.1 - a.1))
        };
        if p0.0 != p1.0 {
            if p0.0 < lo {
                p0 = lerp_at(w[0], w[1], lo);
            } else if p0.0 > hi {
                p0 = lerp_at(w[0], w[1], hi);
            }
            if p1.0 < lo {
                p1 = lerp_at(w[0], w[1], lo);
            } else if p1.0 > hi {
                p1 = lerp_at(w[0], w[1], hi);
            }
        }
        if out.last() != Some(&p0) {
            out.push(p0);
        }
        out.push(p1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ideal_step_inverters_have_half_supply_snm() {
        // analytic construction: ideal inverters tripping at 0.5 with full
        // swing enclose two 0.5 x 0.5 lobes; the mirrored curve in the
        // (q, qb) plane traces left edge then bottom edge
        let a = vec![(0.0, 1.0), (0.5, 1.0), (0.5, 0.0), (1.0, 0.0)];
        let b_mirror = vec![(0.0, 1.0), (0.0, 0.5), (1.0, 0.5), (1.0, 0.0)];
        let side = lobe_square_side(&a, &b_mirror, 0.0, 0.5);
        assert!((side - 0.5).abs() < 2e-3, "side {side}");
        let side2 = lobe_square_side(&a, &b_mirror, 0.5, 1.0);
        assert!((side2 - 0.5).abs() < 2e-3, "side {side2}");
    }

    #[test]
    fn offset_trip_points_give_exact_rectangle_square() {
        // inverter A trips at 0.4, inverter B at 0.6: the upper-left eye is
        // the rectangle [0, 0.4] x [0.6, 1.0]; the largest inscribed square
        // has side 0.4 exactly
        let a = vec![(0.0, 1.0), (0.4, 1.0), (0.4, 0.0), (1.0, 0.0)];
        let b_mirror = vec![(0.0, 1.0), (0.0, 0.6), (1.0, 0.6), (1.0, 0.0)];
        let side = lobe_square_side(&a, &b_mirror, 0.0, 0.4);
        assert!((side - 0.4).abs() < 2e-3, "side {side}");
    }

    #[test]
    fn segment_intersection() {
        let p = seg_intersect((0.0, 0.0), (1.0, 1.0), (0.0, 1.0), (1.0, 0.0)).unwrap();
        assert!((p.0 - 0.5).abs() < 1e-12 && (p.1 - 0.5).abs() < 1e-12);
        assert!(seg_intersect((0.0, 0.0), (0.4, 0.4), (0.0, 1.0), (0.4, 0.6)).is_none());
    }
}
