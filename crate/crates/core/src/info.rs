//! Information bookkeeping.
//!
//! Entropy and information trade one for one, `dI = -dS/k`. With
//! `k theta = p qdot` the per-step increments are
//! `dI_q = dW / (k theta)` (work done by the force) and
//! `dI_p = -dT / (k theta)`. Everything here is reported in bits.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::dynamics::TrajectoryRecord;
use crate::error::{Error, Result};
use crate::numerics::turning_point_mask;
use crate::potential::Potential;
use crate::quantum::WkbProfile;
use crate::thermo::PistonRecord;
use crate::units::Constants;

/// Fraction of `max|p|` below which trajectory steps are left out of the
/// ledger (the `k theta` denominator vanishes at turning points).
pub const DEFAULT_TURNING_MARGIN: f64 = 0.5;

/// Fraction of the local kinetic-energy range admitted by
/// [`wkb_regime_metrics`].
pub const DEFAULT_WKB_ADMIT: f64 = 0.25;

/// Per-step information increments in bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoLedger {
    pub d_i_q: Vec<f64>,
    pub d_i_p: Vec<f64>,
    /// Prefix sums of `d_i_q + d_i_p`.
    pub i_cumulative: Vec<f64>,
    /// Steps excluded from the ledger; their increments are zero.
    pub mask: Vec<bool>,
}

impl InfoLedger {
    fn from_steps(steps: Vec<Option<(f64, f64)>>) -> Result<Self> {
        if steps.iter().all(Option::is_none) {
            return Err(Error::FullyMasked);
        }
        let n = steps.len();
        let mut ledger = Self {
            d_i_q: Vec::with_capacity(n),
            d_i_p: Vec::with_capacity(n),
            i_cumulative: Vec::with_capacity(n),
            mask: Vec::with_capacity(n),
        };
        let mut total = 0.0;
        for s in steps {
            let (q, p) = s.unwrap_or((0.0, 0.0));
            total += q + p;
            ledger.d_i_q.push(q);
            ledger.d_i_p.push(p);
            ledger.i_cumulative.push(total);
            ledger.mask.push(s.is_none());
        }
        Ok(ledger)
    }

    pub fn total(&self) -> f64 {
        self.i_cumulative.last().copied().unwrap_or(0.0)
    }

    /// Regime metrics: the magnitude of the net information change over the
    /// run and the largest single-step `|dI_q|`, `|dI_p|`.
    pub fn regime_metrics(&self) -> RegimeMetrics {
        let mut max_q = 0.0f64;
        let mut max_p = 0.0f64;
        for j in (0..self.mask.len()).filter(|&j| !self.mask[j]) {
            max_q = max_q.max(self.d_i_q[j].abs());
            max_p = max_p.max(self.d_i_p[j].abs());
        }
        RegimeMetrics {
            mean_abs_d_i: self.total().abs(),
            max_step_d_i_q: max_q,
            max_step_d_i_p: max_p,
        }
    }
}

/// Anything that can be booked into an [`InfoLedger`].
pub trait LedgerSource {
    /// Per-step `(dI_q, dI_p)` in nats, `None` for excluded steps.
    fn steps(&self, consts: &Constants, margin: f64) -> Result<Vec<Option<(f64, f64)>>>;
}

impl LedgerSource for TrajectoryRecord {
    fn steps(&self, _consts: &Constants, margin: f64) -> Result<Vec<Option<(f64, f64)>>> {
        let p = self.traj.momenta();
        let m = self.traj.constants().mass;
        let mask = turning_point_mask(&p, self.traj.constants().p_floor, margin);
        Ok((0..p.len().saturating_sub(1))
            .map(|j| {
                if mask[j] || mask[j + 1] {
                    return None;
                }
                let k_theta = 0.5 * (p[j] * p[j] + p[j + 1] * p[j + 1]) / m;
                let d_w = -(self.energy_v[j + 1] - self.energy_v[j]);
                let d_t = self.energy_t[j + 1] - self.energy_t[j];
                Some((d_w / k_theta, -d_t / k_theta))
            })
            .collect())
    }
}

impl LedgerSource for PistonRecord {
    fn steps(&self, consts: &Constants, _margin: f64) -> Result<Vec<Option<(f64, f64)>>> {
        Ok((0..self.len().saturating_sub(1))
            .map(|j| {
                let k_theta = 0.5 * consts.k_boltz * (self.theta[j] + self.theta[j + 1]);
                if !(k_theta > 0.0) {
                    return None;
                }
                let pressure = 0.5 * (self.pressure[j] + self.pressure[j + 1]);
                let d_vol = self.events[j + 1].l - self.events[j].l;
                let d_e = self.energy(j + 1) - self.energy(j);
                Some((-pressure * d_vol / k_theta, -d_e / k_theta))
            })
            .collect())
    }
}

/// Ledger with the default turning-point margin.
pub fn info_ledger<R: LedgerSource + ?Sized>(rec: &R, consts: &Constants) -> Result<InfoLedger> {
    info_ledger_with_margin(rec, consts, DEFAULT_TURNING_MARGIN)
}

pub fn info_ledger_with_margin<R: LedgerSource + ?Sized>(
    rec: &R,
    consts: &Constants,
    margin: f64,
) -> Result<InfoLedger> {
    let steps = rec
        .steps(consts, margin)?
        .into_iter()
        .map(|s| s.map(|(q, p)| (q / LN_2, p / LN_2)))
        .collect();
    InfoLedger::from_steps(steps)
}

#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    ClassicalMechanicsOrAdiabaticEq,
    QuantumMechanics,
    NonadiabaticEquilibriumTd,
    NonadiabaticNonequilibrium,
}

#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeMetrics {
    pub mean_abs_d_i: f64,
    pub max_step_d_i_q: f64,
    pub max_step_d_i_p: f64,
}

#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeThresholds {
    pub tol_zero: f64,
    pub tol_small: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self {
            tol_zero: 1e-6,
            tol_small: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub metrics: RegimeMetrics,
    pub thresholds: RegimeThresholds,
    pub label: Regime,
}

pub fn regime_classify(metrics: RegimeMetrics, thresholds: RegimeThresholds) -> Result<RegimeReport> {
    let RegimeMetrics {
        mean_abs_d_i,
        max_step_d_i_q,
        max_step_d_i_p,
    } = metrics;
    for (name, v) in [
        ("mean_abs_d_i", mean_abs_d_i),
        ("max_step_d_i_q", max_step_d_i_q),
        ("max_step_d_i_p", max_step_d_i_p),
        ("tol_zero", thresholds.tol_zero),
        ("tol_small", thresholds.tol_small),
    ] {
        if !(v >= 0.0) {
            return Err(Error::InvalidParameter {
                name,
                reason: format!("must be >= 0, got {v}"),
            });
        }
    }
    let exchange_free = mean_abs_d_i <= thresholds.tol_zero;
    let small_steps = max_step_d_i_q <= thresholds.tol_small && max_step_d_i_p <= thresholds.tol_small;
    let label = match (exchange_free, small_steps) {
        (true, true) => Regime::ClassicalMechanicsOrAdiabaticEq,
        (true, false) => Regime::QuantumMechanics,
        (false, true) => Regime::NonadiabaticEquilibriumTd,
        (false, false) => Regime::NonadiabaticNonequilibrium,
    };
    Ok(RegimeReport {
        metrics,
        thresholds,
        label,
    })
}

/// Regime metrics of a stationary state from its local WKB profile.
///
/// A stationary state exchanges nothing on average, so the mean is zero.
/// The step metrics are the largest validity value over points with
/// `E - V >= admit * (E - min V)`; in a stationary state `dT = -dV`, so the
/// position and momentum steps coincide.
pub fn wkb_regime_metrics(prof: &WkbProfile, pot: &Potential, energy: f64, admit: f64) -> Result<RegimeMetrics> {
    let v: Vec<f64> = prof.x.iter().map(|&x| pot.v(x)).collect::<Result<_>>()?;
    let v_min = v.iter().fold(f64::INFINITY, |a, b| a.min(*b));
    let cut = admit * (energy - v_min);
    let max = prof
        .validity_metric
        .iter()
        .zip(&v)
        .filter_map(|(m, vi)| m.filter(|_| energy - vi >= cut))
        .fold(None, |acc: Option<f64>, m| Some(acc.map_or(m, |a| a.max(m))))
        .ok_or(Error::EmptyRegion("no admitted point in the WKB profile"))?;
    Ok(RegimeMetrics {
        mean_abs_d_i: 0.0,
        max_step_d_i_q: max,
        max_step_d_i_p: max,
    })
}

/// Information-rate bounds and literature comparators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBounds {
    pub energy: f64,
    pub theta: f64,
    /// `E / (f ln 2)`, bits/s.
    pub bound_f: f64,
    /// `4 pi E / (h ln 2)`, bits/s.
    pub bound_h: f64,
    /// `E / (hbar ln 2)`, bits/s.
    pub bound_hbar: f64,
    /// `ln(1 + 4 pi) E / h`, bits/s.
    pub bremermann: f64,
    /// `2 pi^2 E / (h ln 2)`, bits/s.
    pub bekenstein: f64,
    /// `(k theta)^2 / (2 f)`, W.
    pub energy_rate_cap: f64,
    /// `1 / (2 ln 2)` bits.
    pub per_interval_cap: f64,
    /// `(1/ln 2) sqrt(cap / (2 f))`, bits/s.
    pub continuous_bound: f64,
    /// `(1/ln 2) sqrt(pi cap / (3 hbar))`, bits/s.
    pub pendry: f64,
    /// `continuous_bound / pendry`.
    pub continuous_over_pendry: f64,
}

pub fn rate_bounds(energy: f64, theta: f64, consts: &Constants) -> Result<RateBounds> {
    consts.validate()?;
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "energy",
            reason: format!("must be > 0, got {energy}"),
        });
    }
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "theta",
            reason: format!("must be > 0, got {theta}"),
        });
    }
    let f = consts.f;
    let h = consts.h();
    let k_theta = consts.k_boltz * theta;
    let cap = k_theta * k_theta / (2.0 * f);
    let continuous_bound = (cap / (2.0 * f)).sqrt() / LN_2;
    let pendry = (PI * cap / (3.0 * consts.hbar)).sqrt() / LN_2;
    Ok(RateBounds {
        energy,
        theta,
        bound_f: energy / (f * LN_2),
        bound_h: 4.0 * PI * energy / (h * LN_2),
        bound_hbar: energy / (consts.hbar * LN_2),
        bremermann: (1.0 + 4.0 * PI).ln() * energy / h,
        bekenstein: 2.0 * PI * PI * energy / (h * LN_2),
        energy_rate_cap: cap,
        per_interval_cap: 1.0 / (2.0 * LN_2),
        continuous_bound,
        pendry,
        continuous_over_pendry: continuous_bound / pendry,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate_hamilton, IntegratorConfig};
    use crate::quantum::{local_wkb_profile, solve_tise, Grid1D};
    use crate::thermo::{piston_simulate, PistonConfig};
    use approx::assert_relative_eq;

    fn nat() -> Constants {
        Constants::natural()
    }

    fn harmonic_rec(periods: f64, dt: f64) -> TrajectoryRecord {
        let pot = Potential::Harmonic { m: 1.0, omega: 1.0 };
        let n = (periods * 2.0 * PI / dt).round() as usize;
        integrate_hamilton(&pot, 1.0, 0.0, &IntegratorConfig::new(dt, n), &nat()).unwrap()
    }

    #[test]
    fn pzie_harmonic() {
        let ledger = info_ledger(&harmonic_rec(10.0, 1e-3), &nat()).unwrap();
        assert!(ledger.total().abs() <= 1e-6, "{}", ledger.total());
        // position and momentum parts cancel step by step
        for j in 0..ledger.mask.len() {
            assert!((ledger.d_i_q[j] + ledger.d_i_p[j]).abs() <= 1e-8);
        }
        assert!(ledger.mask.iter().any(|m| *m));
    }

    #[test]
    fn cumulative_is_prefix_sum() {
        let ledger = info_ledger(&harmonic_rec(1.0, 1e-2), &nat()).unwrap();
        let mut acc = 0.0;
        for j in 0..ledger.mask.len() {
            acc += ledger.d_i_q[j] + ledger.d_i_p[j];
            assert_eq!(ledger.i_cumulative[j], acc);
        }
    }

    #[test]
    fn free_particle_exchanges_nothing() {
        let rec = integrate_hamilton(&Potential::Free, 0.0, 1.0, &IntegratorConfig::new(0.01, 100), &nat()).unwrap();
        let ledger = info_ledger(&rec, &nat()).unwrap();
        assert!(ledger.d_i_q.iter().chain(&ledger.d_i_p).all(|v| *v == 0.0));
    }

    #[test]
    fn fully_masked_is_an_error() {
        let rec = integrate_hamilton(&Potential::Free, 0.0, 0.0, &IntegratorConfig::new(0.01, 10), &nat()).unwrap();
        assert_eq!(info_ledger(&rec, &nat()), Err(Error::FullyMasked));
    }

    #[test]
    fn sudden_expansion_costs_one_bit() {
        let rec = piston_simulate(&PistonConfig::sudden_jump(1.0, 2.0, 1.0, 1.0), &nat()).unwrap();
        let ledger = info_ledger(&rec, &nat()).unwrap();
        assert!((ledger.total() + 1.0).abs() <= 1e-3, "{}", ledger.total());
    }

    #[test]
    fn piston_ledger_tracks_entropy() {
        for cfg in [
            PistonConfig::expansion(1.0, 2.0, 1e-3, 1.0, 1.0),
            PistonConfig::expansion(1.0, 2.0, 1e-2, 1.0, 1.0),
            PistonConfig::expansion(1.0, 0.5, -1e-2, 1.0, 1.0),
            PistonConfig::sudden_jump(1.0, 3.0, 2.0, 1.0),
        ] {
            let rec = piston_simulate(&cfg, &nat()).unwrap();
            let ledger = info_ledger(&rec, &nat()).unwrap();
            let expected = -rec.delta_s_over_k(&nat()) / LN_2;
            assert!((ledger.total() - expected).abs() <= 1e-3, "{cfg:?}");
        }
    }

    #[test]
    fn table_cells() {
        let t = RegimeThresholds::default();
        let m = |a, b, c| RegimeMetrics {
            mean_abs_d_i: a,
            max_step_d_i_q: b,
            max_step_d_i_p: c,
        };
        let label = |a, b, c| regime_classify(m(a, b, c), t).unwrap().label;
        assert_eq!(label(1e-9, 0.01, 0.01), Regime::ClassicalMechanicsOrAdiabaticEq);
        assert_eq!(label(1e-9, 0.5, 0.01), Regime::QuantumMechanics);
        assert_eq!(label(0.3, 0.01, 0.01), Regime::NonadiabaticEquilibriumTd);
        assert_eq!(label(0.3, 0.01, 0.5), Regime::NonadiabaticNonequilibrium);
        assert!(regime_classify(m(-1.0, 0.0, 0.0), t).is_err());
    }

    #[test]
    fn classifier_is_deterministic_over_grid() {
        let t = RegimeThresholds::default();
        let values = [0.0, 1e-9, 1e-6, 2e-6, 0.05, 0.1, 0.2, 3.0];
        for &a in &values {
            for &b in &values {
                for &c in &values {
                    let m = RegimeMetrics {
                        mean_abs_d_i: a,
                        max_step_d_i_q: b,
                        max_step_d_i_p: c,
                    };
                    let first = regime_classify(m, t).unwrap().label;
                    assert_eq!(regime_classify(m, t).unwrap().label, first);
                    let expect_top = a <= 1e-6;
                    let expect_left = b <= 0.1 && c <= 0.1;
                    let top = matches!(
                        first,
                        Regime::ClassicalMechanicsOrAdiabaticEq | Regime::QuantumMechanics
                    );
                    let left = matches!(
                        first,
                        Regime::ClassicalMechanicsOrAdiabaticEq | Regime::NonadiabaticEquilibriumTd
                    );
                    assert_eq!((top, left), (expect_top, expect_left));
                }
            }
        }
    }

    #[test]
    fn fixtures_land_in_their_cells() {
        let t = RegimeThresholds::default();
        let harmonic = info_ledger(&harmonic_rec(10.0, 1e-3), &nat()).unwrap();
        assert_eq!(
            regime_classify(harmonic.regime_metrics(), t).unwrap().label,
            Regime::ClassicalMechanicsOrAdiabaticEq
        );

        let slow = piston_simulate(&PistonConfig::expansion(1.0, 2.0, 1e-3, 1.0, 1.0), &nat()).unwrap();
        let slow = info_ledger(&slow, &nat()).unwrap();
        assert_eq!(
            regime_classify(slow.regime_metrics(), t).unwrap().label,
            Regime::NonadiabaticEquilibriumTd
        );

        let jump = piston_simulate(&PistonConfig::sudden_jump(1.0, 2.0, 1.0, 1.0), &nat()).unwrap();
        let jump = info_ledger(&jump, &nat()).unwrap();
        assert_eq!(
            regime_classify(jump.regime_metrics(), t).unwrap().label,
            Regime::NonadiabaticEquilibriumTd
        );

        let fast = piston_simulate(&PistonConfig::expansion(1.0, 2.0, 0.3, 1.0, 1.0), &nat()).unwrap();
        let fast = info_ledger(&fast, &nat()).unwrap();
        assert_eq!(
            regime_classify(fast.regime_metrics(), t).unwrap().label,
            Regime::NonadiabaticNonequilibrium
        );

        let well = Potential::SoftWell { v0: 10.0, a: 0.5 };
        let grid = Grid1D::new(-8.0, 8.0, 2001).unwrap();
        let e0 = solve_tise(&well, &grid, 1, &nat()).unwrap().energies[0];
        let prof = local_wkb_profile(&well, e0, &grid, &nat()).unwrap();
        let m = wkb_regime_metrics(&prof, &well, e0, DEFAULT_WKB_ADMIT).unwrap();
        assert!(m.max_step_d_i_q > 1.0);
        assert_eq!(regime_classify(m, t).unwrap().label, Regime::QuantumMechanics);

        let osc = Potential::Harmonic { m: 1.0, omega: 1.0 };
        let e = 50.0;
        let prof = local_wkb_profile(&osc, e, &Grid1D::new(-12.0, 12.0, 2001).unwrap(), &nat()).unwrap();
        let m = wkb_regime_metrics(&prof, &osc, e, DEFAULT_WKB_ADMIT).unwrap();
        assert_eq!(
            regime_classify(m, t).unwrap().label,
            Regime::ClassicalMechanicsOrAdiabaticEq
        );
    }

    #[test]
    fn si_rate_bounds() {
        let b = rate_bounds(1.0, 300.0, &Constants::si()).unwrap();
        assert_relative_eq!(b.bound_h, 2.736e34, max_relative = 1e-3);
        assert_relative_eq!(b.bound_f, b.bound_h, max_relative = 1e-12);
        assert_relative_eq!(b.per_interval_cap, 0.7213, max_relative = 1e-4);
        assert!(b.bremermann < b.bound_h && b.bound_h < b.bekenstein);
    }

    #[test]
    fn rate_bound_scaling() {
        let base = rate_bounds(2.0, 1.0, &nat()).unwrap();
        let doubled = rate_bounds(2.0, 1.0, &nat().with_f(1.0)).unwrap();
        assert_relative_eq!(doubled.bound_f, base.bound_f / 2.0, max_relative = 1e-15);
        assert_eq!(doubled.bound_h, base.bound_h);
        assert_eq!(doubled.per_interval_cap, 1.0 / (2.0 * LN_2));
        for e in [1e-30, 1.0, 1e30] {
            let b = rate_bounds(e, 1.0, &nat()).unwrap();
            assert!(b.bremermann < b.bound_h && b.bound_h < b.bekenstein);
        }
        // at f = hbar/2 the two continuous forms differ by sqrt(3/pi)
        assert_relative_eq!(base.continuous_over_pendry, (3.0 / PI).sqrt(), max_relative = 1e-14);
        assert!(rate_bounds(0.0, 1.0, &nat()).is_err());
    }
}
