//! Newton–Raphson DC solving: operating points with gmin/source-stepping
//! homotopies, and warm-started DC sweeps. Polarization state is frozen
//! during all DC analyses; operating points are instantaneous measurements.

use super::linalg::solve_in_place;
use super::{Circuit, Element, NodeId, SolverConfig, SolverError, SourceWave};
use crate::device::mosfet_eval;

/// Per-capacitor integration history (terminal voltage and branch current
/// at the previous accepted time point).
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CapHist {
    pub v: f64,
    pub i: f64,
}

pub(crate) struct TranCtx<'a> {
    pub h: f64,
    pub theta: f64,
    pub cap_hist: &'a [CapHist],
}

/// Everything the residual assembler needs besides the unknown vector.
pub(crate) struct AssembleCtx<'a> {
    pub time: f64,
    pub gmin: f64,
    /// Source scaling for source-stepping homotopy (1.0 normally).
    pub source_scale: f64,
    pub tran: Option<TranCtx<'a>>,
    /// Hard node-voltage clamps (initial-condition enforcement at t = 0),
    /// applied as a large Norton conductance.
    pub ic_clamps: Option<&'a [(NodeId, f64)]>,
}

const IC_CLAMP_SIEMENS: f64 = 1e6;

/// Solution of one DC solve: node voltages then branch currents.
#[derive(Debug, Clone)]
pub struct OperatingPoint {
    pub x: Vec<f64>,
    node_count: usize,
}

impl OperatingPoint {
    pub fn voltage(&self, node: NodeId) -> f64 {
        match node.unknown() {
            None => 0.0,
            Some(i) => self.x[i],
        }
    }

    pub fn branch_current(&self, branch: usize) -> f64 {
        self.x[self.node_count + branch]
    }
}

/// Builds the Jacobian and residual at `x`. Residual rows: KCL current sums
/// per node (currents leaving positive), then one constraint row per
/// voltage-source branch.
pub(crate) fn assemble(
    circuit: &Circuit,
    x: &[f64],
    ctx: &AssembleCtx,
    jac: &mut [Vec<f64>],
    res: &mut [f64],
) {
    let nn = circuit.node_count();
    for row in jac.iter_mut() {
        row.iter_mut().for_each(|v| *v = 0.0);
    }
    res.iter_mut().for_each(|v| *v = 0.0);

    let v_of = |node: NodeId| -> f64 {
        match node.unknown() {
            None => 0.0,
            Some(i) => x[i],
        }
    };

    // helper closures for stamping with ground elision
    macro_rules! add_j {
        ($r:expr, $c:expr, $val:expr) => {
            if let (Some(r), Some(c)) = ($r.unknown(), $c.unknown()) {
                jac[r][c] += $val;
            }
        };
    }
    macro_rules! add_f {
        ($r:expr, $val:expr) => {
            if let Some(r) = $r.unknown() {
                res[r] += $val;
            }
        };
    }

    let mut cap_idx = 0usize;
    for (_, el) in &circuit.elements {
        match el {
            Element::Resistor { a, b, ohms } => {
                let g = 1.0 / ohms;
                let i = (v_of(*a) - v_of(*b)) * g;
                add_f!(a, i);
                add_f!(b, -i);
                add_j!(a, a, g);
                add_j!(b, b, g);
                add_j!(a, b, -g);
                add_j!(b, a, -g);
            }
            Element::Capacitor { a, b, farads } => {
                if let Some(t) = &ctx.tran {
                    let hist = t.cap_hist[cap_idx];
                    let geq = farads / (t.theta * t.h);
                    let v = v_of(*a) - v_of(*b);
                    let i = geq * (v - hist.v) - (1.0 - t.theta) / t.theta * hist.i;
                    add_f!(a, i);
                    add_f!(b, -i);
                    add_j!(a, a, geq);
                    add_j!(b, b, geq);
                    add_j!(a, b, -geq);
                    add_j!(b, a, -geq);
                }
                cap_idx += 1;
            }
            Element::VSource { plus, minus, wave, branch, enabled } => {
                let br = nn + *branch;
                let i_br = x[br];
                // branch current flows plus -> minus through the source
                add_f!(plus, i_br);
                add_f!(minus, -i_br);
                if let Some(r) = plus.unknown() {
                    jac[r][br] += 1.0;
                }
                if let Some(r) = minus.unknown() {
                    jac[r][br] -= 1.0;
                }
                if *enabled {
                    let target = wave.value_at(ctx.time) * ctx.source_scale;
                    res[br] = v_of(*plus) - v_of(*minus) - target;
                    if let Some(c) = plus.unknown() {
                        jac[br][c] += 1.0;
                    }
                    if let Some(c) = minus.unknown() {
                        jac[br][c] -= 1.0;
                    }
                } else {
                    // disconnected: force zero branch current
                    res[br] = i_br;
                    jac[br][br] = 1.0;
                }
            }
            Element::ISource { from, to, wave, enabled } => {
                if *enabled {
                    let i = wave.value_at(ctx.time) * ctx.source_scale;
                    add_f!(from, i);
                    add_f!(to, -i);
                }
            }
            Element::Mosfet { g, d, s, params } => {
                let e = mosfet_eval(params, v_of(*g), v_of(*d), v_of(*s));
                stamp_transistor(jac, res, *g, *d, *s, &e);
            }
            Element::Fefet { g, d, s, params, state } => {
                let m = crate::device::effective_mosfet(state, params);
                let e = mosfet_eval(&m, v_of(*g), v_of(*d), v_of(*s));
                stamp_transistor(jac, res, *g, *d, *s, &e);
            }
        }
    }

    // gmin from every node to ground
    for n in 0..nn {
        jac[n][n] += ctx.gmin;
        res[n] += ctx.gmin * x[n];
    }

    // initial-condition clamps
    if let Some(clamps) = ctx.ic_clamps {
        for (node, target) in clamps {
            if let Some(n) = node.unknown() {
                jac[n][n] += IC_CLAMP_SIEMENS;
                res[n] += IC_CLAMP_SIEMENS * (x[n] - target);
            }
        }
    }
}

fn stamp_transistor(
    jac: &mut [Vec<f64>],
    res: &mut [f64],
    g: NodeId,
    d: NodeId,
    s: NodeId,
    e: &crate::device::MosfetEval,
) {
    // ids flows drain -> source through the channel
    if let Some(r) = d.unknown() {
        res[r] += e.ids;
        if let Some(c) = g.unknown() {
            jac[r][c] += e.g_g;
        }
        if let Some(c) = d.unknown() {
            jac[r][c] += e.g_d;
        }
        if let Some(c) = s.unknown() {
            jac[r][c] += e.g_s;
        }
    }
    if let Some(r) = s.unknown() {
        res[r] -= e.ids;
        if let Some(c) = g.unknown() {
            jac[r][c] -= e.g_g;
        }
        if let Some(c) = d.unknown() {
            jac[r][c] -= e.g_d;
        }
        if let Some(c) = s.unknown() {
            jac[r][c] -= e.g_s;
        }
    }
}

/// Largest KCL residual magnitude over the node rows [A].
pub(crate) fn kcl_residual(circuit: &Circuit, x: &[f64], ctx: &AssembleCtx) -> f64 {
    let n = circuit.unknown_count();
    let mut jac = vec![vec![0.0; n]; n];
    let mut res = vec![0.0; n];
    assemble(circuit, x, ctx, &mut jac, &mut res);
    res[..circuit.node_count()].iter().fold(0.0, |m, r| m.max(r.abs()))
}

/// Plain Newton iteration from `x0`. Converges when every node update is
/// below `vntol + reltol*|v|` and the KCL residual is below `abstol`; the
/// residual bound is part of convergence, so accepted solutions satisfy it
/// by construction.
pub(crate) fn newton(
    circuit: &Circuit,
    x0: &[f64],
    ctx: &AssembleCtx,
    cfg: &SolverConfig,
) -> Result<Vec<f64>, SolverError> {
    let n = circuit.unknown_count();
    let nn = circuit.node_count();
    let mut x = x0.to_vec();
    let mut jac = vec![vec![0.0; n]; n];
    let mut res = vec![0.0; n];
    for _iter in 0..cfg.max_newton_iters {
        assemble(circuit, &x, ctx, &mut jac, &mut res);
        let mut delta: Vec<f64> = res.iter().map(|r| -r).collect();
        if !solve_in_place(&mut jac, &mut delta) {
            return Err(SolverError::Singular(String::new()));
        }
        let mut v_converged = true;
        for i in 0..n {
            let step = if i < nn {
                delta[i].clamp(-cfg.vstep_limit, cfg.vstep_limit)
            } else {
                delta[i]
            };
            x[i] += step;
            if i < nn && step.abs() > cfg.vntol + cfg.reltol * x[i].abs() {
                v_converged = false;
            }
        }
        if v_converged {
            let resid = kcl_residual(circuit, &x, ctx);
            if resid < cfg.abstol {
                debug_assert!(resid < cfg.abstol);
                return Ok(x);
            }
        }
    }
    Err(SolverError::NonConvergence(String::new()))
}

/// Recomputes the largest node-current residual of a DC solution [A],
/// for external verification of accepted operating points.
pub fn verify_kcl_residual(circuit: &Circuit, op: &OperatingPoint, cfg: &SolverConfig) -> f64 {
    kcl_residual(circuit, &op.x, &dc_ctx(cfg.gmin, 1.0))
}

fn dc_ctx(gmin: f64, scale: f64) -> AssembleCtx<'static> {
    AssembleCtx { time: 0.0, gmin, source_scale: scale, tran: None, ic_clamps: None }
}

/// DC operating point with homotopy fallbacks: plain Newton, then gmin
/// stepping (gmin ramped up a million-fold and back down in decades), then
/// source stepping (all sources scaled 0 to 1 in ten steps).
pub fn dc_operating_point(
    circuit: &Circuit,
    cfg: &SolverConfig,
    initial_guess: Option<&[f64]>,
) -> Result<OperatingPoint, SolverError> {
    let n = circuit.unknown_count();
    let zero = vec![0.0; n];
    let x0: Vec<f64> = match initial_guess {
        Some(g) => g.to_vec(),
        None => zero.clone(),
    };

    match newton(circuit, &x0, &dc_ctx(cfg.gmin, 1.0), cfg) {
        Ok(x) => return Ok(OperatingPoint { x, node_count: circuit.node_count() }),
        Err(SolverError::Singular(_)) if cfg.gmin == 0.0 => {
            return Err(SolverError::Singular(String::new()))
        }
        Err(_) => {}
    }

    // gmin stepping
    let mut warm = x0.clone();
    let mut ok = true;
    let mut g = cfg.gmin.max(1e-15) * 1e6;
    while g >= cfg.gmin.max(1e-15) * 0.99 {
        match newton(circuit, &warm, &dc_ctx(g, 1.0), cfg) {
            Ok(x) => warm = x,
            Err(_) => {
                ok = false;
                break;
            }
        }
        g /= 10.0;
    }
    if ok {
        if let Ok(x) = newton(circuit, &warm, &dc_ctx(cfg.gmin, 1.0), cfg) {
            return Ok(OperatingPoint { x, node_count: circuit.node_count() });
        }
    }

    // source stepping
    let mut warm = zero;
    for k in 1..=10 {
        let scale = k as f64 / 10.0;
        warm = newton(circuit, &warm, &dc_ctx(cfg.gmin, scale), cfg)
            .map_err(|e| annotate(e, &format!(" (source stepping at {scale:.1})")))?;
    }
    Ok(OperatingPoint { x: warm, node_count: circuit.node_count() })
}

fn annotate(e: SolverError, note: &str) -> SolverError {
    match e {
        SolverError::Singular(s) => SolverError::Singular(format!("{s}{note}")),
        SolverError::NonConvergence(s) => SolverError::NonConvergence(format!("{s}{note}")),
        other => other,
    }
}

/// Sequence of operating points while one source steps from `start` to
/// `stop`; each point warm-starts from the previous (continuation). The
/// named source is left at `stop` afterwards.
pub fn dc_sweep(
    circuit: &mut Circuit,
    source_name: &str,
    start: f64,
    stop: f64,
    step: f64,
    cfg: &SolverConfig,
) -> Result<Vec<(f64, OperatingPoint)>, SolverError> {
    if step == 0.0 {
        return Err(SolverError::InvalidSweep("step must be nonzero".into()));
    }
    if (stop - start) * step < 0.0 {
        return Err(SolverError::InvalidSweep("step sign inconsistent with range".into()));
    }
    if circuit.element(source_name).is_none() {
        return Err(SolverError::UnknownSource(source_name.to_string()));
    }
    let count = ((stop - start) / step).round() as usize;
    let mut out = Vec::with_capacity(count + 1);
    let mut warm: Option<Vec<f64>> = None;
    for i in 0..=count {
        let value = start + step * i as f64;
        circuit.set_source_wave(source_name, SourceWave::Dc(value));
        let op = dc_operating_point(circuit, cfg, warm.as_deref())
            .map_err(|e| annotate(e, &format!(" (sweep value {value:.6})")))?;
        warm = Some(op.x.clone());
        out.push((value, op));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::{MosfetParams, Polarity};
    use crate::engine::SourceWave;

    #[test]
    fn voltage_divider_exact() {
        let mut c = Circuit::new();
        let vin = c.node("in");
        let mid = c.node("mid");
        c.add_vsource("v1", vin, NodeId::GROUND, SourceWave::Dc(1.0));
        c.add_resistor("r1", vin, mid, 1e3);
        c.add_resistor("r2", mid, NodeId::GROUND, 1e3);
        let cfg = SolverConfig::default();
        let op = dc_operating_point(&c, &cfg, None).unwrap();
        assert!((op.voltage(mid) - 0.5).abs() < cfg.vntol);
    }

    #[test]
    fn floating_node_resolved_by_gmin_and_singular_without() {
        let mut c = Circuit::new();
        let a = c.node("a");
        let b = c.node("b");
        c.add_vsource("v1", a, NodeId::GROUND, SourceWave::Dc(1.0));
        // node b connected only through a capacitor: open in DC
        c.add_capacitor("c1", a, b, 1e-12);
        let cfg = SolverConfig::default();
        let op = dc_operating_point(&c, &cfg, None).unwrap();
        assert!(op.voltage(b).abs() < 1e-9);

        let mut no_gmin = cfg;
        no_gmin.gmin = 0.0;
        assert!(matches!(
            dc_operating_point(&c, &no_gmin, None),
            Err(SolverError::Singular(_))
        ));
    }

    #[test]
    fn divider_sweep_is_linear() {
        let mut c = Circuit::new();
        let vin = c.node("in");
        let mid = c.node("mid");
        c.add_vsource("vs", vin, NodeId::GROUND, SourceWave::Dc(0.0));
        c.add_resistor("r1", vin, mid, 2e3);
        c.add_resistor("r2", mid, NodeId::GROUND, 2e3);
        let cfg = SolverConfig::default();
        let pts = dc_sweep(&mut c, "vs", 0.0, 1.0, 0.1, &cfg).unwrap();
        assert_eq!(pts.len(), 11);
        for (v, op) in &pts {
            assert!((op.voltage(mid) - 0.5 * v).abs() < 1e-5);
        }
        assert!(dc_sweep(&mut c, "vs", 0.0, 1.0, 0.0, &cfg).is_err());
        assert!(dc_sweep(&mut c, "nope", 0.0, 1.0, 0.1, &cfg).is_err());
    }

    #[test]
    fn nmos_inverter_vtc_monotone() {
        let mut c = Circuit::new();
        let vdd = c.node("vdd");
        let vin = c.node("in");
        let out = c.node("out");
        c.add_vsource("vdd", vdd, NodeId::GROUND, SourceWave::Dc(1.0));
        c.add_vsource("vin", vin, NodeId::GROUND, SourceWave::Dc(0.0));
        c.add_resistor("rl", vdd, out, 50e3);
        c.add_mosfet("m1", vin, out, NodeId::GROUND, MosfetParams::new(Polarity::N, 0.4, 1.8e-4, 1.5, 0.1));
        let cfg = SolverConfig::default();
        let pts = dc_sweep(&mut c, "vin", 0.0, 1.0, 0.02, &cfg).unwrap();
        let out_v: Vec<f64> = pts.iter().map(|(_, op)| op.voltage(out)).collect();
        for w in out_v.windows(2) {
            assert!(w[1] <= w[0] + 1e-7, "VTC not monotone");
        }
        // forward/backward agreement (no hysteresis in pure MOSFET circuits)
        let back = dc_sweep(&mut c, "vin", 1.0, 0.0, -0.02, &cfg).unwrap();
        for ((_, f), (_, b)) in pts.iter().zip(back.iter().rev()) {
            assert!((f.voltage(out) - b.voltage(out)).abs() < 2.0 * cfg.vntol);
        }
    }
}
