//! Leapfrog integration of Hamilton's equations and the uncertainty-band
//! diagnostics attached to the resulting trajectories.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, MaskedSeries};
use crate::potential::Potential;
use crate::state::DofState;
use crate::units::Constants;
use crate::variational::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Kick-drift-kick velocity Verlet.
    #[default]
    Leapfrog,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub n_steps: usize,
    #[serde(default)]
    pub scheme: Scheme,
}

impl IntegratorConfig {
    pub fn new(dt: f64, n_steps: usize) -> Self {
        Self {
            dt,
            n_steps,
            scheme: Scheme::Leapfrog,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("must be > 0, got {}", self.dt),
            });
        }
        if self.n_steps < 4 {
            return Err(Error::InvalidParameter {
                name: "n_steps",
                reason: format!("must be >= 4, got {}", self.n_steps),
            });
        }
        Ok(())
    }
}

/// An integrated trajectory with its energies and uncertainty series.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub traj: Trajectory,
    pub energy_t: Vec<f64>,
    pub energy_v: Vec<f64>,
    pub energy_e: Vec<f64>,
    /// `f/|p|`; zero where `gap_mask` is set.
    pub delta_q: Vec<f64>,
    /// `|p| delta_q`; zero where `gap_mask` is set.
    pub f_series: Vec<f64>,
    pub gap_mask: Vec<bool>,
}

impl TrajectoryRecord {
    /// Assembles a record from an existing trajectory.
    pub fn from_trajectory(traj: Trajectory) -> Result<Self> {
        let consts = *traj.constants();
        let pot = *traj.potential();
        let n = traj.len();
        let mut rec = Self {
            energy_t: Vec::with_capacity(n),
            energy_v: Vec::with_capacity(n),
            energy_e: Vec::with_capacity(n),
            delta_q: Vec::with_capacity(n),
            f_series: Vec::with_capacity(n),
            gap_mask: Vec::with_capacity(n),
            traj,
        };
        for s in rec.traj.samples() {
            let t = s.p * s.p / (2.0 * consts.mass);
            let v = pot.v(s.q)?;
            rec.energy_t.push(t);
            rec.energy_v.push(v);
            rec.energy_e.push(t + v);
            match s.delta_q {
                Some(dq) => {
                    rec.delta_q.push(dq);
                    rec.f_series.push(s.p.abs() * dq);
                    rec.gap_mask.push(false);
                }
                None => {
                    rec.delta_q.push(0.0);
                    rec.f_series.push(0.0);
                    rec.gap_mask.push(true);
                }
            }
        }
        Ok(rec)
    }

    pub fn len(&self) -> usize {
        self.traj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traj.is_empty()
    }
}

/// Integrates `qdot = dH/dp`, `pdot = -dH/dq` with the leapfrog scheme.
///
/// In the infinite well the drift is split at the exact wall-collision time
/// and the momentum reversed, so energy is preserved at the walls.
pub fn integrate_hamilton(
    pot: &Potential,
    q0: f64,
    p0: f64,
    cfg: &IntegratorConfig,
    consts: &Constants,
) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    pot.validate()?;
    consts.validate()?;
    if !pot.contains(q0) || !p0.is_finite() {
        let (lo, hi) = pot.domain();
        return Err(Error::Domain {
            potential: pot.name(),
            q: q0,
            lo,
            hi,
        });
    }
    let dt = cfg.dt;
    let m = consts.mass;
    let mut samples = Vec::with_capacity(cfg.n_steps + 1);
    samples.push(DofState::new(0.0, q0, p0, consts));
    let (mut q, mut p) = (q0, p0);
    let mut force = -pot.dv(q)?;
    for step in 1..=cfg.n_steps {
        let mut p_half = p + 0.5 * dt * force;
        match *pot {
            Potential::InfiniteWell { l } => {
                let (qn, pn) = drift_in_box(q, p_half, m, dt, l);
                q = qn;
                p_half = pn;
            }
            _ => q += p_half / m * dt,
        }
        force = match pot.dv(q) {
            Ok(dv) if q.is_finite() => -dv,
            _ => {
                return Err(Error::LeftDomain {
                    last_valid: step - 1,
                    reason: format!("q = {q} after step {step}"),
                })
            }
        };
        p = p_half + 0.5 * dt * force;
        if !p.is_finite() {
            return Err(Error::LeftDomain {
                last_valid: step - 1,
                reason: format!("p = {p} after step {step}"),
            });
        }
        samples.push(DofState::new(step as f64 * dt, q, p, consts));
    }
    let traj = Trajectory::new(samples, dt, *pot, *consts)?;
    TrajectoryRecord::from_trajectory(traj)
}

fn drift_in_box(mut q: f64, mut p: f64, m: f64, dt: f64, l: f64) -> (f64, f64) {
    let mut remaining = dt;
    let v = p / m;
    if v == 0.0 {
        return (q, p);
    }
    let mut v = v;
    loop {
        let target = q + v * remaining;
        if target > l {
            remaining -= (l - q) / v;
            q = l;
        } else if target < 0.0 {
            remaining -= (0.0 - q) / v;
            q = 0.0;
        } else {
            return (target, p);
        }
        v = -v;
        p = -p;
    }
}

/// Relative drift of `|p| delta_q` from `f` over unmasked samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CpdqDiagnostics {
    pub max_rel_drift: f64,
    pub f_series: Vec<f64>,
    pub masked: usize,
}

pub fn cpdq_diagnostics(rec: &TrajectoryRecord, consts: &Constants) -> Result<CpdqDiagnostics> {
    let mut max_rel_drift: Option<f64> = None;
    for (fv, &masked) in rec.f_series.iter().zip(&rec.gap_mask) {
        if !masked {
            let d = (fv - consts.f).abs() / consts.f;
            max_rel_drift = Some(max_rel_drift.map_or(d, |m| m.max(d)));
        }
    }
    let max_rel_drift = max_rel_drift.ok_or(Error::FullyMasked)?;
    Ok(CpdqDiagnostics {
        max_rel_drift,
        f_series: rec.f_series.clone(),
        masked: rec.gap_mask.iter().filter(|&&m| m).count(),
    })
}

/// Residual of Newton's law in uncertainty form: the force read off the
/// uncertainty series, `-p qdot d(ln delta_q)/dq`, minus the potential force
/// `-V'(q)`.
///
/// `d ln delta_q / dq` comes from divided differences of the sampled
/// `delta_q` series against the sampled positions, independently of `V`.
/// On actual trajectories the residual vanishes up to discretization; on
/// other paths it tracks the Lagrange residual `pdot + V'`.
pub fn newton_uncertainty_residual(rec: &TrajectoryRecord) -> Result<MaskedSeries> {
    const MIN_SPAN: usize = 5;
    match numerics::longest_unmasked_span(&rec.gap_mask) {
        Some((a, b)) if b - a >= MIN_SPAN => {}
        _ => return Err(Error::SpanTooShort { needed: MIN_SPAN }),
    }
    let n = rec.len();
    let m = rec.traj.constants().mass;
    let q = rec.traj.positions();
    let p = rec.traj.momenta();
    let pot = rec.traj.potential();
    let mut values = vec![0.0; n];
    let mut mask = vec![true; n];
    for i in 1..n - 1 {
        if rec.gap_mask[i - 1] || rec.gap_mask[i] || rec.gap_mask[i + 1] {
            continue;
        }
        let dq = q[i + 1] - q[i - 1];
        let dln = rec.delta_q[i + 1].ln() - rec.delta_q[i - 1].ln();
        let grad = if dq == 0.0 { 0.0 } else { dln / dq };
        let uncertainty_force = -p[i] * (p[i] / m) * grad;
        values[i] = uncertainty_force + pot.dv(q[i])?;
        mask[i] = false;
    }
    Ok(MaskedSeries { values, mask })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyBudget {
    /// `dT + dV` for each step; entry 0 is 0.
    pub work_energy_residual: Vec<f64>,
    /// `max |E(t) - E(0)| / |E(0)|`, or the absolute drift when `E(0) = 0`.
    pub max_e_drift: f64,
}

pub fn energy_budget(rec: &TrajectoryRecord) -> EnergyBudget {
    let n = rec.len();
    let mut work_energy_residual = vec![0.0; n];
    for i in 1..n {
        let dt_kin = rec.energy_t[i] - rec.energy_t[i - 1];
        let dv = rec.energy_v[i] - rec.energy_v[i - 1];
        work_energy_residual[i] = dt_kin + dv;
    }
    let e0 = rec.energy_e[0];
    let scale = if e0 == 0.0 { 1.0 } else { e0.abs() };
    let max_e_drift = rec.energy_e.iter().map(|e| (e - e0).abs() / scale).fold(0.0, f64::max);
    EnergyBudget {
        work_energy_residual,
        max_e_drift,
    }
}
