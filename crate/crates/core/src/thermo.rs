//! A single particle in a one-dimensional box whose right wall moves.
//!
//! The particle's position uncertainty is the box length, `delta_q = L`, so
//! `f = p L` is no longer pinned to a constant and entropy `S = k ln(f/f_ref)`
//! can change. Collisions are resolved exactly (closed-form meeting time with
//! a uniformly moving wall), so the only error in the adiabatic-invariant
//! measurements comes from the physics, not from time stepping.
//!
//! The particle starts at the moving wall heading inward, i.e. just after a
//! reflection, so that every recorded sample sits at the same phase of the
//! bounce cycle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::Constants;

#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PistonMode {
    #[default]
    ConstantSpeed,
    /// The wall jumps from `l0` to `l_end` before the particle can reach it.
    SuddenJump,
}

/// Fraction of the first crossing time `l0/v0` taken by a sudden jump.
const JUMP_DURATION_FRACTION: f64 = 1e-9;
const MAX_EVENTS: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PistonConfig {
    pub l0: f64,
    /// Signed wall speed; positive expands the box.
    pub wall_speed: f64,
    pub v0: f64,
    pub mass: f64,
    pub l_end: Option<f64>,
    pub t_end: Option<f64>,
    pub mode: PistonMode,
    /// Number of sub-intervals used to resolve a sudden jump.
    pub jump_substeps: usize,
}

impl PistonConfig {
    pub fn expansion(l0: f64, l_end: f64, ratio: f64, v0: f64, mass: f64) -> Self {
        Self {
            l0,
            wall_speed: ratio * v0,
            v0,
            mass,
            l_end: Some(l_end),
            t_end: None,
            mode: PistonMode::ConstantSpeed,
            jump_substeps: 64,
        }
    }

    pub fn sudden_jump(l0: f64, l_end: f64, v0: f64, mass: f64) -> Self {
        Self {
            mode: PistonMode::SuddenJump,
            wall_speed: 0.0,
            ..Self::expansion(l0, l_end, 0.0, v0, mass)
        }
    }

    pub fn static_box(l0: f64, v0: f64, mass: f64, t_end: f64) -> Self {
        Self {
            l_end: None,
            t_end: Some(t_end),
            ..Self::expansion(l0, l0, 0.0, v0, mass)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, reason: String| Err(Error::InvalidParameter { name, reason });
        if !(self.l0.is_finite() && self.l0 > 0.0) {
            return bad("l0", format!("must be > 0, got {}", self.l0));
        }
        if !(self.v0.is_finite() && self.v0 > 0.0) {
            return bad("v0", format!("must be > 0, got {}", self.v0));
        }
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return bad("mass", format!("must be > 0, got {}", self.mass));
        }
        if let Some(l_end) = self.l_end {
            if !(l_end.is_finite() && l_end > 0.0) {
                return bad("l_end", format!("must be > 0, got {l_end}"));
            }
        }
        if let Some(t_end) = self.t_end {
            if !(t_end.is_finite() && t_end > 0.0) {
                return bad("t_end", format!("must be > 0, got {t_end}"));
            }
        }
        match self.mode {
            PistonMode::SuddenJump => {
                if self.l_end.is_none() {
                    return bad("l_end", "sudden_jump needs a target length".into());
                }
                if self.jump_substeps == 0 {
                    return bad("jump_substeps", "must be >= 1".into());
                }
            }
            PistonMode::ConstantSpeed => {
                let u = self.wall_speed;
                if !(u.is_finite() && u.abs() < self.v0) {
                    return bad(
                        "wall_speed",
                        format!("|u| = {} must be below v0 = {}", u.abs(), self.v0),
                    );
                }
                match (self.l_end, self.t_end) {
                    (None, None) => return bad("l_end", "need l_end or t_end".into()),
                    (Some(l_end), None) => {
                        let reachable = (u > 0.0 && l_end > self.l0) || (u < 0.0 && l_end < self.l0);
                        if !reachable {
                            return bad(
                                "l_end",
                                format!("{l_end} is not reachable from l0 = {} at u = {u}", self.l0),
                            );
                        }
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Start,
    MovingWall,
    JumpStep,
}

/// State right after an event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PistonEvent {
    pub t: f64,
    pub l: f64,
    pub speed: f64,
    pub kind: EventKind,
}

/// Event history of a piston run with the identified thermodynamic
/// quantities at each event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PistonRecord {
    pub config: PistonConfig,
    pub events: Vec<PistonEvent>,
    /// `f = p L`.
    pub f: Vec<f64>,
    /// `S = k ln(f / f_ref)`.
    pub entropy: Vec<f64>,
    /// `theta = p qdot / k`.
    pub theta: Vec<f64>,
    /// `P = p qdot / L`.
    pub pressure: Vec<f64>,
}

impl PistonRecord {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn momentum(&self, i: usize) -> f64 {
        self.config.mass * self.events[i].speed
    }

    pub fn energy(&self, i: usize) -> f64 {
        0.5 * self.config.mass * self.events[i].speed.powi(2)
    }

    /// Entropy change between the first and last events, in units of `k`.
    pub fn delta_s_over_k(&self, consts: &Constants) -> f64 {
        (self.entropy[self.len() - 1] - self.entropy[0]) / consts.k_boltz
    }

    /// Change of `ln(p L)` from the start to the moment the wall reaches
    /// `l_target`, interpolated linearly in `ln L` between the bracketing
    /// samples. Falls back to the last sample when `l_target` is never
    /// reached.
    pub fn invariant_change_at(&self, l_target: f64) -> f64 {
        let x: Vec<f64> = self.events.iter().map(|e| e.l.ln()).collect();
        let g: Vec<f64> = self.f.iter().map(|f| f.ln() - self.f[0].ln()).collect();
        let xt = l_target.ln();
        let expanding = x[x.len() - 1] >= x[0];
        let passed = |xi: f64| if expanding { xi >= xt } else { xi <= xt };
        match x.iter().position(|&xi| passed(xi)) {
            Some(0) => 0.0,
            Some(j) => {
                let (x0, x1) = (x[j - 1], x[j]);
                if x1 == x0 {
                    g[j]
                } else {
                    g[j - 1] + (g[j] - g[j - 1]) * (xt - x0) / (x1 - x0)
                }
            }
            None => g[g.len() - 1],
        }
    }
}

/// Runs the piston to its stop condition.
pub fn piston_simulate(cfg: &PistonConfig, consts: &Constants) -> Result<PistonRecord> {
    cfg.validate()?;
    consts.validate()?;
    let events = match cfg.mode {
        PistonMode::SuddenJump => sudden_jump_events(cfg),
        PistonMode::ConstantSpeed => moving_wall_events(cfg)?,
    };
    let m = cfg.mass;
    let k = consts.k_boltz;
    let f: Vec<f64> = events.iter().map(|e| m * e.speed * e.l).collect();
    Ok(PistonRecord {
        config: *cfg,
        entropy: f.iter().map(|&fv| consts.entropy_of(fv)).collect(),
        theta: events.iter().map(|e| m * e.speed * e.speed / k).collect(),
        pressure: events.iter().map(|e| m * e.speed * e.speed / e.l).collect(),
        f,
        events,
    })
}

fn sudden_jump_events(cfg: &PistonConfig) -> Vec<PistonEvent> {
    let l_end = cfg.l_end.unwrap_or(cfg.l0);
    let steps = cfg.jump_substeps;
    let duration = JUMP_DURATION_FRACTION * cfg.l0 / cfg.v0;
    let mut events = vec![PistonEvent {
        t: 0.0,
        l: cfg.l0,
        speed: cfg.v0,
        kind: EventKind::Start,
    }];
    for k in 1..=steps {
        let s = k as f64 / steps as f64;
        events.push(PistonEvent {
            t: duration * s,
            l: cfg.l0 + (l_end - cfg.l0) * s,
            speed: cfg.v0,
            kind: EventKind::JumpStep,
        });
    }
    events
}

fn moving_wall_events(cfg: &PistonConfig) -> Result<Vec<PistonEvent>> {
    let u = cfg.wall_speed;
    let wall = |t: f64| cfg.l0 + u * t;
    let mut events = vec![PistonEvent {
        t: 0.0,
        l: cfg.l0,
        speed: cfg.v0,
        kind: EventKind::Start,
    }];
    // particle position and signed velocity just after the last event
    let (mut t, mut x, mut v) = (0.0f64, cfg.l0, -cfg.v0);
    loop {
        if v < 0.0 {
            // fly to the fixed wall and bounce
            t += x / -v;
            x = 0.0;
            v = -v;
        }
        if v <= u {
            return Err(Error::ModelViolation {
                t,
                speed: v,
                wall_speed: u,
            });
        }
        let dt = (wall(t) - x) / (v - u);
        let t_hit = t + dt;
        if cfg.t_end.is_some_and(|te| t_hit > te) {
            break;
        }
        let l_hit = wall(t_hit);
        if l_hit <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "t_end",
                reason: format!("wall reaches zero length at t = {t_hit}"),
            });
        }
        t = t_hit;
        x = l_hit;
        v = 2.0 * u - v;
        events.push(PistonEvent {
            t,
            l: l_hit,
            speed: v.abs(),
            kind: EventKind::MovingWall,
        });
        if let Some(l_end) = cfg.l_end {
            let done = if u > 0.0 { l_hit >= l_end } else { l_hit <= l_end };
            if done && cfg.t_end.is_none() {
                break;
            }
        }
        if events.len() >= MAX_EVENTS {
            return Err(Error::InvalidParameter {
                name: "wall_speed",
                reason: format!("more than {MAX_EVENTS} collisions before the stop condition"),
            });
        }
        if v > 0.0 && v <= u {
            // outrun by the wall: legal only if nothing more is needed
            let stop_reached = cfg.t_end.is_some_and(|te| te <= t);
            if !stop_reached {
                if cfg.t_end.is_some() {
                    break;
                }
                return Err(Error::ModelViolation {
                    t,
                    speed: v,
                    wall_speed: u,
                });
            }
        }
    }
    Ok(events)
}

/// Per-interval residuals of the heat theorem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatTheoremResidual {
    /// `dE - theta dS + P dVol` with midpoint `theta` and `P`.
    pub residual: Vec<f64>,
    /// `d ln f - d ln p - d ln delta_q`.
    pub log_residual: Vec<f64>,
    pub d_e: Vec<f64>,
}

pub fn heat_theorem_residual(rec: &PistonRecord, consts: &Constants) -> Result<HeatTheoremResidual> {
    if rec.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "record",
            reason: format!("need at least 2 events, got {}", rec.len()),
        });
    }
    let _ = consts;
    let n = rec.len() - 1;
    let mut out = HeatTheoremResidual {
        residual: Vec::with_capacity(n),
        log_residual: Vec::with_capacity(n),
        d_e: Vec::with_capacity(n),
    };
    for j in 0..n {
        let d_e = rec.energy(j + 1) - rec.energy(j);
        let theta = 0.5 * (rec.theta[j] + rec.theta[j + 1]);
        let pressure = 0.5 * (rec.pressure[j] + rec.pressure[j + 1]);
        let d_s = rec.entropy[j + 1] - rec.entropy[j];
        let d_vol = rec.events[j + 1].l - rec.events[j].l;
        out.residual.push(d_e - theta * d_s + pressure * d_vol);
        let dln_f = rec.f[j + 1].ln() - rec.f[j].ln();
        let dln_p = rec.momentum(j + 1).ln() - rec.momentum(j).ln();
        let dln_l = rec.events[j + 1].l.ln() - rec.events[j].l.ln();
        out.log_residual.push(dln_f - dln_p - dln_l);
        out.d_e.push(d_e);
    }
    Ok(out)
}

/// Per-interval thermodynamic and extended-mechanics quantities.
///
/// Rates use interval averages: `pdot = dp/dt`, `delta_qdot = dL/dt`, and
/// midpoint `p`, `L`, `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermoSeries {
    pub dt: Vec<f64>,
    pub d_e: Vec<f64>,
    pub d_s: Vec<f64>,
    pub d_vol: Vec<f64>,
    pub theta: Vec<f64>,
    pub pressure: Vec<f64>,
    /// `pdot delta_q + p delta_qdot`.
    pub dl_ext: Vec<f64>,
    /// Extended Hamiltonian change per unit time, assembled from the
    /// along-the-motion increments `qdot dbar_p + (p qdot / delta_q) dbar_delta_q`.
    pub dh_ext: Vec<f64>,
    /// `df/dt`.
    pub f_dot: Vec<f64>,
    /// `(f/k) dS/dt`.
    pub f_s_dot: Vec<f64>,
    /// Largest per-interval `|dl_ext - f_s_dot|` relative to the larger magnitude.
    pub max_rel_dl_vs_entropy: f64,
    /// Largest per-interval `|dl_ext - f_dot|` relative to the larger magnitude.
    pub max_rel_dl_vs_fdot: f64,
    /// `sum dl_ext dt / f`, the extended action in units of `f`.
    pub cumulative_action_over_f: f64,
    /// `Delta S / k` over the same span.
    pub delta_s_over_k: f64,
}

impl ThermoSeries {
    /// Relative mismatch of the action-entropy relation over the whole run.
    pub fn action_entropy_mismatch(&self) -> f64 {
        rel_diff(self.cumulative_action_over_f, self.delta_s_over_k)
    }
}

fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

pub fn extended_quantities(rec: &PistonRecord, consts: &Constants) -> Result<ThermoSeries> {
    if rec.len() < 3 {
        return Err(Error::InvalidParameter {
            name: "record",
            reason: format!("need at least 3 events, got {}", rec.len()),
        });
    }
    let k = consts.k_boltz;
    let m = rec.config.mass;
    let n = rec.len() - 1;
    let mut s = ThermoSeries {
        dt: Vec::with_capacity(n),
        d_e: Vec::with_capacity(n),
        d_s: Vec::with_capacity(n),
        d_vol: Vec::with_capacity(n),
        theta: Vec::with_capacity(n),
        pressure: Vec::with_capacity(n),
        dl_ext: Vec::with_capacity(n),
        dh_ext: Vec::with_capacity(n),
        f_dot: Vec::with_capacity(n),
        f_s_dot: Vec::with_capacity(n),
        max_rel_dl_vs_entropy: 0.0,
        max_rel_dl_vs_fdot: 0.0,
        cumulative_action_over_f: 0.0,
        delta_s_over_k: rec.delta_s_over_k(consts),
    };
    for j in 0..n {
        let (a, b) = (&rec.events[j], &rec.events[j + 1]);
        let dt = b.t - a.t;
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter {
                name: "record",
                reason: format!("non-increasing event times at interval {j}"),
            });
        }
        let (p0, p1) = (rec.momentum(j), rec.momentum(j + 1));
        let p_mid = 0.5 * (p0 + p1);
        let l_mid = 0.5 * (a.l + b.l);
        let f_mid = 0.5 * (rec.f[j] + rec.f[j + 1]);
        let p_dot = (p1 - p0) / dt;
        let dq_dot = (b.l - a.l) / dt;
        let dl_ext = p_dot * l_mid + p_mid * dq_dot;

        // along-the-motion route: dbar y = ydot * delta_q / qdot
        let qdot = p_mid / m;
        let dbar_p = p_dot * l_mid / qdot;
        let dbar_dq = dq_dot * l_mid / qdot;
        let dh_ext = qdot * dbar_p + p_mid * qdot / l_mid * dbar_dq;

        let d_s = rec.entropy[j + 1] - rec.entropy[j];
        let f_dot = (rec.f[j + 1] - rec.f[j]) / dt;
        let f_s_dot = f_mid / k * d_s / dt;

        s.max_rel_dl_vs_entropy = s.max_rel_dl_vs_entropy.max(rel_diff(dl_ext, f_s_dot));
        s.max_rel_dl_vs_fdot = s.max_rel_dl_vs_fdot.max(rel_diff(dl_ext, f_dot));
        s.cumulative_action_over_f += dl_ext * dt / f_mid;

        s.dt.push(dt);
        s.d_e.push(rec.energy(j + 1) - rec.energy(j));
        s.d_s.push(d_s);
        s.d_vol.push(b.l - a.l);
        s.theta.push(0.5 * (rec.theta[j] + rec.theta[j + 1]));
        s.pressure.push(0.5 * (rec.pressure[j] + rec.pressure[j + 1]));
        s.dl_ext.push(dl_ext);
        s.dh_ext.push(dh_ext);
        s.f_dot.push(f_dot);
        s.f_s_dot.push(f_s_dot);
    }
    Ok(s)
}

/// One row of an adiabaticity scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub ratio: f64,
    /// Change of the adiabatic invariant `ln(p L)` when the wall reaches
    /// the target length.
    pub delta_ln_pl: f64,
    /// Entropy change in units of `k` up to the last recorded collision.
    pub delta_s_over_k: f64,
}

impl ScanRow {
    pub fn violation(&self) -> f64 {
        self.delta_ln_pl.abs()
    }
}

/// Runs one expansion per wall-to-particle speed ratio, each from `l0` to
/// the template's `l_end` (default `2 l0`).
pub fn adiabatic_scan(ratios: &[f64], template: &PistonConfig, consts: &Constants) -> Result<Vec<ScanRow>> {
    let l_end = template.l_end.unwrap_or(2.0 * template.l0);
    ratios
        .iter()
        .map(|&ratio| {
            if !(ratio > 0.0 && ratio < 1.0) {
                return Err(Error::InvalidParameter {
                    name: "ratio",
                    reason: format!("must lie in (0, 1), got {ratio}"),
                });
            }
            let cfg = PistonConfig::expansion(template.l0, l_end, ratio, template.v0, template.mass);
            let rec = piston_simulate(&cfg, consts)?;
            Ok(ScanRow {
                ratio,
                delta_ln_pl: rec.invariant_change_at(l_end),
                delta_s_over_k: rec.delta_s_over_k(consts),
            })
        })
        .collect()
}

/// Largest scanned ratio whose invariant violation stays below `threshold`.
pub fn largest_adiabatic_ratio(rows: &[ScanRow], threshold: f64) -> Option<f64> {
    rows.iter()
        .filter(|r| r.violation() < threshold)
        .map(|r| r.ratio)
        .fold(None, |acc, r| Some(acc.map_or(r, |a: f64| a.max(r))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    fn nat() -> Constants {
        Constants::natural()
    }

    #[test]
    fn sudden_doubling() {
        let rec = piston_simulate(&PistonConfig::sudden_jump(1.0, 2.0, 1.0, 1.0), &nat()).unwrap();
        let last = rec.len() - 1;
        assert_eq!(rec.momentum(last), rec.momentum(0));
        assert_relative_eq!(rec.f[last], 2.0 * rec.f[0], max_relative = 1e-15);
        assert!((rec.delta_s_over_k(&nat()) - LN_2).abs() <= 1e-12);
        assert_relative_eq!(rec.invariant_change_at(2.0), LN_2, max_relative = 1e-12);
    }

    #[test]
    fn free_expansion_entropy_is_log_ratio() {
        for (l1, l2) in [(1.0, 3.0), (0.5, 0.6), (2.0, 1.0)] {
            let rec = piston_simulate(&PistonConfig::sudden_jump(l1, l2, 0.7, 1.3), &nat()).unwrap();
            assert!((rec.delta_s_over_k(&nat()) - (l2 / l1).ln()).abs() <= 1e-12);
        }
    }

    #[test]
    fn slow_expansion_keeps_invariant() {
        let rec = piston_simulate(&PistonConfig::expansion(1.0, 2.0, 1e-3, 1.0, 1.0), &nat()).unwrap();
        let change = rec.invariant_change_at(2.0);
        assert!(change.abs() <= 5e-3, "{change}");
        // L(t) = L0 + u t at every collision
        for e in &rec.events {
            assert_relative_eq!(e.l, 1.0 + 1e-3 * e.t, max_relative = 1e-12);
        }
    }

    #[test]
    fn bounce_map_speed_update() {
        // v' = v - 2u for every moving-wall collision of an outgoing particle
        let u = 0.05;
        let rec = piston_simulate(&PistonConfig::expansion(1.0, 3.0, u, 1.0, 1.0), &nat()).unwrap();
        for w in rec.events.windows(2) {
            assert_relative_eq!(w[1].speed, w[0].speed - 2.0 * u, epsilon = 1e-14);
        }
    }

    #[test]
    fn static_box_is_exact() {
        let rec = piston_simulate(&PistonConfig::static_box(1.0, 1.0, 1.0, 50.0), &nat()).unwrap();
        assert!(rec.len() > 10);
        assert!(rec.f.iter().all(|f| *f == rec.f[0]));
        assert_eq!(rec.delta_s_over_k(&nat()), 0.0);
        let heat = heat_theorem_residual(&rec, &nat()).unwrap();
        assert!(heat.residual.iter().chain(&heat.log_residual).all(|r| *r == 0.0));
        let ext = extended_quantities(&rec, &nat()).unwrap();
        assert!(ext.dl_ext.iter().chain(&ext.d_s).all(|v| *v == 0.0));
    }

    #[test]
    fn heat_theorem_on_slow_piston() {
        let rec = piston_simulate(&PistonConfig::expansion(1.0, 2.0, 1e-3, 1.0, 1.0), &nat()).unwrap();
        let heat = heat_theorem_residual(&rec, &nat()).unwrap();
        for (r, de) in heat.residual.iter().zip(&heat.d_e) {
            assert!(r.abs() <= 1e-3 * de.abs());
        }
        assert!(heat.log_residual.iter().all(|r| r.abs() <= 1e-12));
    }

    #[test]
    fn work_matches_pressure_volume() {
        let ratio = 1e-2;
        let rec = piston_simulate(&PistonConfig::expansion(1.0, 2.0, ratio, 1.0, 1.0), &nat()).unwrap();
        for j in 0..rec.len() - 1 {
            let de = rec.energy(j + 1) - rec.energy(j);
            let p_dvol = 0.5 * (rec.pressure[j] + rec.pressure[j + 1]) * (rec.events[j + 1].l - rec.events[j].l);
            assert!((de + p_dvol).abs() <= 2.0 * ratio * de.abs());
        }
    }

    #[test]
    fn extended_quantities_slow_expansion() {
        let rec = piston_simulate(&PistonConfig::expansion(1.0, 2.0, 1e-3, 1.0, 1.0), &nat()).unwrap();
        let ext = extended_quantities(&rec, &nat()).unwrap();
        assert!(ext.max_rel_dl_vs_entropy <= 1e-2);
        assert!(ext.max_rel_dl_vs_fdot <= 1e-2);
        assert!(ext.action_entropy_mismatch() <= 1e-2);
        for (h, l) in ext.dh_ext.iter().zip(&ext.dl_ext) {
            assert_relative_eq!(*h, *l, max_relative = 1e-9, epsilon = 1e-300);
        }
    }

    #[test]
    fn extended_quantities_sudden_jump() {
        let rec = piston_simulate(&PistonConfig::sudden_jump(1.0, 2.0, 1.0, 1.0), &nat()).unwrap();
        let ext = extended_quantities(&rec, &nat()).unwrap();
        assert!(ext.max_rel_dl_vs_entropy <= 1e-2, "{}", ext.max_rel_dl_vs_entropy);
        assert!(ext.max_rel_dl_vs_fdot <= 1e-2);
        assert!(ext.action_entropy_mismatch() <= 1e-2);
        assert_relative_eq!(ext.delta_s_over_k, LN_2, max_relative = 1e-12);
    }

    #[test]
    fn scan_examples() {
        let template = PistonConfig::expansion(1.0, 2.0, 0.0, 1.0, 1.0);
        let rows = adiabatic_scan(&[1e-4, 0.3], &template, &nat()).unwrap();
        assert!(rows[0].violation() <= 1e-3, "{:?}", rows[0]);
        assert!(rows[1].violation() >= 0.05, "{:?}", rows[1]);
    }

    #[test]
    fn scan_is_monotone() {
        let template = PistonConfig::expansion(1.0, 2.0, 0.0, 1.0, 1.0);
        // below the resonance window around 0.25, plus 0.3 beyond it
        let ratios = [
            1e-4, 2e-4, 5e-4, 1e-3, 1.3e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 0.1, 0.15, 0.18, 0.3,
        ];
        let rows = adiabatic_scan(&ratios, &template, &nat()).unwrap();
        for w in rows.windows(2) {
            assert!(
                w[1].violation() + 1e-12 >= w[0].violation(),
                "{:?} then {:?}",
                w[0],
                w[1]
            );
        }
        let best = largest_adiabatic_ratio(&rows, 1e-2).unwrap();
        assert!((1e-3..0.3).contains(&best));
    }

    #[test]
    fn adiabatic_limit_order_one() {
        // violation / ratio stays bounded as ratio -> 0
        let template = PistonConfig::expansion(1.0, 2.0, 0.0, 1.0, 1.0);
        let rows = adiabatic_scan(&[1e-2, 1e-3, 1e-4], &template, &nat()).unwrap();
        let slopes: Vec<f64> = rows.iter().map(|r| r.violation() / r.ratio).collect();
        assert!(slopes.iter().all(|s| *s > 0.1 && *s < 3.0), "{slopes:?}");
    }

    #[test]
    fn particle_brought_to_rest() {
        // u = v0/4: the second moving-wall collision leaves the particle at rest
        let rec = piston_simulate(&PistonConfig::expansion(1.0, 2.0, 0.25, 1.0, 1.0), &nat()).unwrap();
        assert_eq!(rec.events.last().unwrap().speed, 0.0);
        assert!(rec.invariant_change_at(2.0).is_infinite());
    }

    #[test]
    fn config_validation() {
        let mut cfg = PistonConfig::expansion(1.0, 2.0, 1.2, 1.0, 1.0);
        assert!(matches!(
            piston_simulate(&cfg, &nat()),
            Err(Error::InvalidParameter { name: "wall_speed", .. })
        ));
        cfg.wall_speed = -0.1;
        assert!(
            piston_simulate(&cfg, &nat()).is_err(),
            "l_end unreachable when compressing"
        );
        cfg.l_end = Some(0.5);
        assert!(piston_simulate(&cfg, &nat()).is_ok());
        assert!(adiabatic_scan(&[1.0], &cfg, &nat()).is_err());
        let mut jump = PistonConfig::sudden_jump(1.0, 2.0, 1.0, 1.0);
        jump.l_end = None;
        assert!(piston_simulate(&jump, &nat()).is_err());
    }

    #[test]
    fn compression_heats() {
        let rec = piston_simulate(&PistonConfig::expansion(1.0, 0.5, -1e-3, 1.0, 1.0), &nat()).unwrap();
        let last = rec.len() - 1;
        assert!(rec.energy(last) > rec.energy(0));
        // adiabatic: E L^2 invariant, so E roughly quadruples
        assert_relative_eq!(
            rec.energy(last) * rec.events[last].l.powi(2),
            rec.energy(0),
            max_relative = 1e-2
        );
    }

    #[test]
    fn outrun_particle_is_a_model_violation() {
        // ratio 0.45: after one bounce the particle moves at 0.1 < u, before
        // the wall reaches the target
        let cfg = PistonConfig::expansion(1.0, 10.0, 0.45, 1.0, 1.0);
        assert!(matches!(
            piston_simulate(&cfg, &nat()),
            Err(Error::ModelViolation { .. })
        ));
    }
}
