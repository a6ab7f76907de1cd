//! The special variation `delta_q = eps/p`, the first-order change of the
//! Lagrangian it produces, the Lagrange residual, and the decomposition of
//! the action variation into boundary and bulk terms.
//!
//! The Lagrangian is fixed to `L = m qdot^2 / 2 - V(q)`, so `dL/dqdot = p`.
//! Sampled time derivatives use [`numerics::derivative`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, MaskedSeries};
use crate::potential::Potential;
use crate::state::DofState;
use crate::units::Constants;

/// A uniformly sampled trajectory of one degree of freedom.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<DofState>,
    dt: f64,
    pot: Potential,
    consts: Constants,
}

pub const MIN_SAMPLES: usize = 5;

impl Trajectory {
    pub fn new(samples: Vec<DofState>, dt: f64, pot: Potential, consts: Constants) -> Result<Self> {
        if samples.len() < MIN_SAMPLES {
            return Err(Error::InvalidParameter {
                name: "samples",
                reason: format!("need at least {MIN_SAMPLES}, got {}", samples.len()),
            });
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("must be > 0, got {dt}"),
            });
        }
        let t0 = samples[0].t;
        for (i, s) in samples.iter().enumerate() {
            let expected = t0 + i as f64 * dt;
            if (s.t - expected).abs() > 1e-12 * expected.abs().max(dt) {
                return Err(Error::InvalidParameter {
                    name: "samples",
                    reason: format!("time {} at index {i} is not on the uniform grid", s.t),
                });
            }
            if !pot.contains(s.q) || !s.p.is_finite() {
                return Err(Error::Domain {
                    potential: pot.name(),
                    q: s.q,
                    lo: pot.domain().0,
                    hi: pot.domain().1,
                });
            }
        }
        Ok(Self {
            samples,
            dt,
            pot,
            consts,
        })
    }

    /// Builds a trajectory from phase-space samples starting at `t0`.
    pub fn from_phase_space(t0: f64, dt: f64, q: &[f64], p: &[f64], pot: Potential, consts: Constants) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::LengthMismatch {
                expected: q.len(),
                found: p.len(),
            });
        }
        let samples = q
            .iter()
            .zip(p)
            .enumerate()
            .map(|(i, (&q, &p))| DofState::new(t0 + i as f64 * dt, q, p, &consts))
            .collect();
        Self::new(samples, dt, pot, consts)
    }

    /// Samples a closed-form `t -> (q, p)` on `n` uniform instants.
    pub fn from_fn(
        t0: f64,
        dt: f64,
        n: usize,
        pot: Potential,
        consts: Constants,
        phase: impl Fn(f64) -> (f64, f64),
    ) -> Result<Self> {
        let samples = (0..n)
            .map(|i| {
                let t = t0 + i as f64 * dt;
                let (q, p) = phase(t);
                DofState::new(t, q, p, &consts)
            })
            .collect();
        Self::new(samples, dt, pot, consts)
    }

    pub fn samples(&self) -> &[DofState] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn potential(&self) -> &Potential {
        &self.pot
    }

    pub fn constants(&self) -> &Constants {
        &self.consts
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn positions(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.q).collect()
    }

    pub fn momenta(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.p).collect()
    }

    pub fn velocities(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.p / self.consts.mass).collect()
    }

    /// Samples at or below the momentum floor.
    pub fn gap_mask(&self) -> Vec<bool> {
        self.samples.iter().map(DofState::is_flagged).collect()
    }

    /// Samples whose momentum is below `margin * max|p|`.
    pub fn turning_point_mask(&self, margin: f64) -> Vec<bool> {
        numerics::turning_point_mask(&self.momenta(), self.consts.p_floor, margin)
    }
}

/// `L = m qdot^2/2 - V(q)` and `p = m qdot`.
pub fn lagrangian_eval(q: f64, qdot: f64, pot: &Potential, consts: &Constants) -> Result<(f64, f64)> {
    let v = pot.v(q)?;
    let m = consts.mass;
    Ok((0.5 * m * qdot * qdot - v, m * qdot))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariationSource {
    Special,
    Custom,
}

/// A variation `delta_q(t)` of a trajectory and its time derivative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationSeries {
    pub epsilon: f64,
    pub delta_q: Vec<f64>,
    pub delta_qdot: Vec<f64>,
    pub source: VariationSource,
    /// True exactly where the variation is undefined (`|p| <= p_floor` for
    /// the special variation). `delta_q` holds 0 there.
    pub gap: Vec<bool>,
    /// `gap` widened by the derivative stencil: `delta_qdot` is unreliable
    /// wherever this is set.
    pub stencil_mask: Vec<bool>,
}

impl VariationSeries {
    pub fn len(&self) -> usize {
        self.delta_q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delta_q.is_empty()
    }
}

/// The special variation `delta_q = eps / p`.
pub fn special_variation(traj: &Trajectory, epsilon: f64) -> VariationSeries {
    let gap = traj.gap_mask();
    let delta_q: Vec<f64> = traj
        .samples()
        .iter()
        .zip(&gap)
        .map(|(s, &g)| if g { 0.0 } else { epsilon / s.p })
        .collect();
    let delta_qdot = numerics::derivative(&delta_q, traj.dt());
    let stencil_mask = stencil_mask(&gap);
    VariationSeries {
        epsilon,
        delta_q,
        delta_qdot,
        source: VariationSource::Special,
        gap,
        stencil_mask,
    }
}

/// An arbitrary variation `delta_q(t) = epsilon * shape(t)`.
pub fn custom_variation(traj: &Trajectory, epsilon: f64, shape: impl Fn(f64) -> f64) -> VariationSeries {
    let delta_q: Vec<f64> = traj.samples().iter().map(|s| epsilon * shape(s.t)).collect();
    let delta_qdot = numerics::derivative(&delta_q, traj.dt());
    let n = delta_q.len();
    VariationSeries {
        epsilon,
        delta_q,
        delta_qdot,
        source: VariationSource::Custom,
        gap: vec![false; n],
        stencil_mask: vec![false; n],
    }
}

// The end samples use one-sided stencils reaching two neighbours.
fn stencil_mask(gap: &[bool]) -> Vec<bool> {
    let n = gap.len();
    let mut out = numerics::widen_mask(gap);
    if n >= 3 {
        out[0] |= gap[2];
        out[n - 1] |= gap[n - 3];
    }
    out
}

fn check_aligned(traj: &Trajectory, var: &VariationSeries) -> Result<()> {
    if var.len() != traj.len() || var.delta_qdot.len() != traj.len() {
        return Err(Error::LengthMismatch {
            expected: traj.len(),
            found: var.len(),
        });
    }
    Ok(())
}

/// First-order change of the Lagrangian,
/// `dL = (dL/dq) delta_q + (dL/dqdot) delta_qdot = -V'(q) delta_q + p delta_qdot`.
pub fn first_order_dl(traj: &Trajectory, var: &VariationSeries) -> Result<MaskedSeries> {
    check_aligned(traj, var)?;
    let mut values = Vec::with_capacity(traj.len());
    for (i, s) in traj.samples().iter().enumerate() {
        let dv = traj.potential().dv(s.q)?;
        values.push(-dv * var.delta_q[i] + s.p * var.delta_qdot[i]);
    }
    Ok(MaskedSeries {
        values,
        mask: var.stencil_mask.clone(),
    })
}

/// `d/dt (dL/dqdot) - dL/dq = pdot + V'(q)` at each sample.
pub fn lagrange_residual(traj: &Trajectory) -> Result<Vec<f64>> {
    let pdot = numerics::derivative(&traj.momenta(), traj.dt());
    traj.samples()
        .iter()
        .zip(pdot)
        .map(|(s, pd)| Ok(pd + traj.potential().dv(s.q)?))
        .collect()
}

/// Action over `[t_i1, t_i2]` and three routes to its first-order variation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionVariation {
    /// `A = int L dt`.
    pub action: f64,
    /// `p delta_q |_{t1}^{t2}`.
    pub boundary: f64,
    /// `int (dL/dq - d/dt dL/dqdot) delta_q dt`.
    pub bulk: f64,
    /// `(A[q + delta_q] - A[q - delta_q]) / 2`, evaluated by brute force.
    pub direct: f64,
}

impl ActionVariation {
    /// `|direct - (boundary + bulk)|`.
    pub fn decomposition_gap(&self) -> f64 {
        (self.direct - (self.boundary + self.bulk)).abs()
    }
}

pub fn action_and_variation(traj: &Trajectory, var: &VariationSeries, i1: usize, i2: usize) -> Result<ActionVariation> {
    check_aligned(traj, var)?;
    if i1 >= i2 || i2 >= traj.len() || var.stencil_mask[i1..=i2].iter().any(|&m| m) {
        return Err(Error::BadInterval { i1, i2 });
    }
    let dt = traj.dt();
    let pot = traj.potential();
    let consts = traj.constants();
    let m = consts.mass;
    let samples = traj.samples();
    let pdot = numerics::derivative(&traj.momenta(), dt);

    let mut lag = Vec::with_capacity(i2 - i1 + 1);
    let mut lag_plus = Vec::with_capacity(i2 - i1 + 1);
    let mut lag_minus = Vec::with_capacity(i2 - i1 + 1);
    let mut bulk_integrand = Vec::with_capacity(i2 - i1 + 1);
    for i in i1..=i2 {
        let s = &samples[i];
        let qdot = s.p / m;
        let (dq, dqdot) = (var.delta_q[i], var.delta_qdot[i]);
        lag.push(lagrangian_eval(s.q, qdot, pot, consts)?.0);
        lag_plus.push(lagrangian_eval(s.q + dq, qdot + dqdot, pot, consts)?.0);
        lag_minus.push(lagrangian_eval(s.q - dq, qdot - dqdot, pot, consts)?.0);
        bulk_integrand.push((-pot.dv(s.q)? - pdot[i]) * dq);
    }
    let last = i2 - i1;
    let action = numerics::trapezoid_range(&lag, dt, 0, last);
    let a_plus = numerics::trapezoid_range(&lag_plus, dt, 0, last);
    let a_minus = numerics::trapezoid_range(&lag_minus, dt, 0, last);
    let boundary = samples[i2].p * var.delta_q[i2] - samples[i1].p * var.delta_q[i1];
    Ok(ActionVariation {
        action,
        boundary,
        bulk: numerics::trapezoid_range(&bulk_integrand, dt, 0, last),
        direct: 0.5 * (a_plus - a_minus),
    })
}
