//! Uncertainty-based mechanics laboratory.
//!
//! Every module builds on one relation between a particle's momentum and the
//! uncertainty of its trajectory, `|p| * delta_q = f`:
//!
//! * [`variational`]: the special variation `delta_q = eps/p`, first-order
//!   `dL`, Lagrange residual and the action-variation decomposition.
//! * [`dynamics`]: leapfrog integration of Hamilton's equations with
//!   uncertainty diagnostics.
//! * [`thermo`]: particle in a box with a moving wall; heat theorem,
//!   extended Lagrangian and the adiabatic invariant.
//! * [`quantum`]: Fisher information, the finite-difference Schrodinger
//!   eigensolver, the variational ground state, WKB validity and plane-wave
//!   dispersion.
//! * [`info`]: information ledgers, regime classification and rate bounds.

// NaN must fail parameter checks, so `!(x > 0.0)` is deliberate
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod dynamics;
pub mod error;
pub mod info;
pub mod numerics;
pub mod potential;
pub mod quantum;
pub mod state;
pub mod thermo;
pub mod tridiag;
pub mod units;
pub mod variational;

pub use dynamics::{
    cpdq_diagnostics, energy_budget, integrate_hamilton, newton_uncertainty_residual, CpdqDiagnostics, EnergyBudget,
    IntegratorConfig, Scheme, TrajectoryRecord,
};
pub use error::{Error, Result};
pub use info::{
    info_ledger, info_ledger_with_margin, rate_bounds, regime_classify, wkb_regime_metrics, InfoLedger, LedgerSource,
    RateBounds, Regime, RegimeMetrics, RegimeReport, RegimeThresholds,
};
pub use num_complex;
pub use numerics::MaskedSeries;
pub use potential::{eval_potential, Potential, PotentialEval};
pub use quantum::{
    appendix_a_consistency, bohm_adiabaticity, cr_bound_check, dispersion_checks, fisher_metrics, local_fisher_length,
    local_wkb_profile, solve_tise, variational_ground_state, variational_ground_state_from, DispersionParams,
    DispersionReport, EigenSolution, FisherMetrics, Grid1D, VariationalResult, WaveFunction, WkbProfile,
};
pub use state::DofState;
pub use thermo::{
    adiabatic_scan, extended_quantities, heat_theorem_residual, largest_adiabatic_ratio, piston_simulate, EventKind,
    HeatTheoremResidual, PistonConfig, PistonEvent, PistonMode, PistonRecord, ScanRow, ThermoSeries,
};
pub use units::{compton_floor, Constants, UnitSystem};
pub use variational::{
    action_and_variation, custom_variation, first_order_dl, lagrange_residual, lagrangian_eval, special_variation,
    ActionVariation, Trajectory, VariationSeries, VariationSource,
};
