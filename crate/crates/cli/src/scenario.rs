//! One pipeline per config kind.

use std::f64::consts::{LN_2, PI};
use std::path::Path;
use std::time::Instant;

use cpdq_core::numerics::longest_unmasked_span;
use cpdq_core::{
    action_and_variation, adiabatic_scan, appendix_a_consistency, cpdq_diagnostics, dispersion_checks, energy_budget,
    extended_quantities, first_order_dl, heat_theorem_residual, info_ledger, info_ledger_with_margin,
    integrate_hamilton, local_wkb_profile, piston_simulate, rate_bounds, regime_classify, solve_tise,
    special_variation, variational_ground_state, wkb_regime_metrics, Constants, DispersionParams, Error,
    IntegratorConfig, PistonConfig, PistonMode, PistonRecord, Potential, RegimeThresholds, ScanRow, Trajectory,
    TrajectoryRecord, WaveFunction,
};
use serde_json::{json, Value};

use crate::config::{
    BoundsParams, DispersionParamsSpec, GridSpec, LoadedConfig, PistonParams, RegimeParams, Scenario, SuiteParams,
    TiseParams, TrajectoryParams, VariationalParams, WkbParams,
};
use crate::error::{CliError, CliResult};
use crate::format::Table;
use crate::report::{Check, RunReport};
use crate::suite;

/// Relative tolerance of the eigenvalue oracles.
const ORACLE_REL_TOL: f64 = 1e-3;
const ORACLE_MAX_STATE: usize = 5;
const ORTHONORMAL_TOL: f64 = 1e-8;
const PZIE_TOL_BITS: f64 = 1e-6;
const LEDGER_TOL_BITS: f64 = 1e-3;
const CPDQ_DRIFT_TOL: f64 = 1e-12;
/// Slowest runs that the thermodynamic identities are checked on.
const EQUILIBRIUM_RATIO: f64 = 1e-2;
const ADIABATIC_RATIO: f64 = 1e-3;

/// Runs a parsed config, writing artifacts into `out`.
pub fn run(cfg: &LoadedConfig, out: &Path) -> CliResult<RunReport> {
    let start = Instant::now();
    let mut rep = RunReport::new(cfg.raw.kind.as_str(), echo(cfg), cfg.constants);
    let c = &cfg.constants;
    match &cfg.scenario {
        Scenario::Trajectory(p) => run_trajectory(p, c, out, &mut rep)?,
        Scenario::Piston(p) => run_piston(p, c, out, &mut rep)?,
        Scenario::Tise(p) => run_tise(p, c, out, &mut rep)?,
        Scenario::Variational(p) => run_variational(p, c, out, &mut rep)?,
        Scenario::Wkb(p) => run_wkb(p, c, out, &mut rep)?,
        Scenario::Dispersion(p) => run_dispersion(p, c, &mut rep)?,
        Scenario::Bounds(p) => run_bounds(p, c, &mut rep)?,
        Scenario::Regime(p) => run_regime(p, &mut rep)?,
        Scenario::Suite(p) => run_suite(p, out, &mut rep)?,
    }
    rep.finish();
    rep.elapsed = start.elapsed();
    rep.write(out)?;
    Ok(rep)
}

fn echo(cfg: &LoadedConfig) -> Value {
    let params = match &cfg.scenario {
        Scenario::Trajectory(p) => serde_json::to_value(p),
        Scenario::Piston(p) => serde_json::to_value(p),
        Scenario::Tise(p) => serde_json::to_value(p),
        Scenario::Variational(p) => serde_json::to_value(p),
        Scenario::Wkb(p) => serde_json::to_value(p),
        Scenario::Dispersion(p) => serde_json::to_value(p),
        Scenario::Bounds(p) => serde_json::to_value(p),
        Scenario::Regime(p) => serde_json::to_value(p),
        Scenario::Suite(p) => serde_json::to_value(p),
    }
    .expect("params serialize");
    json!({
        "kind": cfg.raw.kind,
        "units": cfg.raw.units,
        "constants": cfg.raw.constants,
        "params": params,
    })
}

fn artifact(rep: &mut RunReport, out: &Path, name: &str, table: &Table) -> CliResult<()> {
    table.write(&out.join(name))?;
    rep.artifacts.push(name.to_string());
    Ok(())
}

fn max_or_zero(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter()
        .fold(0.0, |a, v| if v.abs() > a || v.is_nan() { v.abs() } else { a })
}

/// Stationarity and action-decomposition measurements on one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathMeasures {
    pub energy: f64,
    pub epsilon: f64,
    pub max_dl: f64,
    /// `1e-4 eps |E|`.
    pub dl_bound: f64,
    pub gap: f64,
    pub gap_scale: f64,
    pub boundary: f64,
    pub bulk: f64,
    pub span: (f64, f64),
}

/// Applies the special variation of amplitude `epsilon` and measures `dL`
/// away from turning points and the action decomposition over the longest
/// clean span.
pub fn measure_path(traj: &Trajectory, energy: f64, epsilon: f64, margin: f64) -> cpdq_core::Result<PathMeasures> {
    let var = special_variation(traj, epsilon);
    let dl = first_order_dl(traj, &var)?;
    let away = traj.turning_point_mask(margin);
    let max_dl = dl.max_abs_where(&away).ok_or(Error::FullyMasked)?;
    let blocked: Vec<bool> = var.stencil_mask.iter().zip(&away).map(|(a, b)| *a || *b).collect();
    let (i1, end) = longest_unmasked_span(&blocked).ok_or(Error::FullyMasked)?;
    let i2 = end - 1;
    if i2 <= i1 {
        return Err(Error::SpanTooShort { needed: 2 });
    }
    let av = action_and_variation(traj, &var, i1, i2)?;
    let t = traj.times();
    Ok(PathMeasures {
        energy,
        epsilon,
        max_dl,
        dl_bound: 1e-4 * epsilon * energy.abs(),
        gap: av.decomposition_gap(),
        gap_scale: av.action.abs() + epsilon,
        boundary: av.boundary,
        bulk: av.bulk,
        span: (t[i1], t[i2]),
    })
}

/// Adds `a sin(w t)` to a recorded path, with the matching momentum.
pub fn perturb(rec: &TrajectoryRecord, amplitude: f64, omega: f64) -> cpdq_core::Result<Trajectory> {
    let traj = &rec.traj;
    let m = traj.constants().mass;
    let t = traj.times();
    let q: Vec<f64> = traj
        .positions()
        .iter()
        .zip(&t)
        .map(|(q, t)| q + amplitude * (omega * t).sin())
        .collect();
    let p: Vec<f64> = traj
        .momenta()
        .iter()
        .zip(&t)
        .map(|(p, t)| p + m * amplitude * omega * (omega * t).cos())
        .collect();
    Trajectory::from_phase_space(t[0], traj.dt(), &q, &p, *traj.potential(), *traj.constants())
}

fn run_trajectory(p: &TrajectoryParams, c: &Constants, out: &Path, rep: &mut RunReport) -> CliResult<()> {
    let rec = integrate_hamilton(&p.potential, p.q0, p.p0, &IntegratorConfig::new(p.dt, p.n_steps), c)?;
    let energy = rec.energy_e[0];
    let eps = p.epsilon_over_f * c.f;

    let diag = cpdq_diagnostics(&rec, c)?;
    rep.check(Check::le("cpdq_max_rel_drift", diag.max_rel_drift, CPDQ_DRIFT_TOL));
    rep.check(Check::le(
        "energy_max_rel_drift",
        energy_budget(&rec).max_e_drift,
        p.energy_drift_tol,
    ));

    let (path, perturbed) = match p.perturbation {
        Some(pert) => (perturb(&rec, pert.amplitude, pert.omega)?, true),
        None => (rec.traj.clone(), false),
    };
    let m = measure_path(&path, energy, eps, p.margin)?;
    if perturbed {
        rep.check(Check::ge("max_dl_unmasked", m.max_dl, 100.0 * m.dl_bound));
    } else {
        rep.check(Check::le("max_dl_unmasked", m.max_dl, m.dl_bound));
        rep.check(Check::le("action_boundary", m.boundary.abs(), 1e-12 * eps));
        rep.check(Check::le(
            "action_bulk",
            m.bulk.abs(),
            m.dl_bound * (m.span.1 - m.span.0),
        ));
    }
    rep.check(Check::le("action_decomposition_gap", m.gap, 1e-8 * m.gap_scale));
    rep.result("energy", energy);
    rep.result("epsilon", eps);
    rep.result("action_span", [m.span.0, m.span.1]);
    rep.result("cpdq_masked_samples", diag.masked);

    let var = special_variation(&path, eps);
    let dl = first_order_dl(&path, &var)?;
    let away = path.turning_point_mask(p.margin);
    let dl_col: Vec<Option<f64>> = dl
        .values
        .iter()
        .zip(dl.mask.iter().zip(&away))
        .map(|(v, (a, b))| (!a && !b).then_some(*v))
        .collect();
    let s = path.samples();
    let table = Table::new()
        .column("t", s.iter().map(|s| s.t))
        .column("q", s.iter().map(|s| s.q))
        .column("p", s.iter().map(|s| s.p))
        .column("E", rec.energy_e.iter().copied())
        .column("delta_q", s.iter().map(|s| s.delta_q))
        .column("f", rec.f_series.iter().map(|f| f.is_finite().then_some(*f)))
        .column("dL", dl_col);
    artifact(rep, out, "trajectory.csv", &table)?;

    if !perturbed {
        let ledger = info_ledger_with_margin(&rec, c, p.margin)?;
        rep.check(Check::le("pzie_abs_bits", ledger.total().abs(), PZIE_TOL_BITS));
        let metrics = ledger.regime_metrics();
        rep.result("regime", regime_classify(metrics, RegimeThresholds::default())?);
        let cell =
            |v: &[f64]| -> Vec<Option<f64>> { v.iter().zip(&ledger.mask).map(|(v, m)| (!m).then_some(*v)).collect() };
        let table = Table::new()
            .column("t", s[..s.len() - 1].iter().map(|s| s.t))
            .column("dI_q", cell(&ledger.d_i_q))
            .column("dI_p", cell(&ledger.d_i_p))
            .column("I", ledger.i_cumulative.iter().copied());
        artifact(rep, out, "ledger.csv", &table)?;
    }
    Ok(())
}

fn piston_config(p: &PistonParams, c: &Constants) -> PistonConfig {
    PistonConfig {
        l0: p.l0,
        wall_speed: p.ratio * p.v0,
        v0: p.v0,
        mass: p.mass.unwrap_or(c.mass),
        l_end: p.l_end,
        t_end: p.t_end,
        mode: p.mode,
        jump_substeps: p.jump_substeps,
    }
}

/// Largest drop between consecutive scan rows, 0 for a monotone scan.
pub fn scan_monotonicity(rows: &[ScanRow]) -> f64 {
    rows.windows(2)
        .map(|w| {
            let (a, b) = (w[0].violation(), w[1].violation());
            if b >= a {
                0.0
            } else {
                a - b
            }
        })
        .fold(0.0, f64::max)
}

pub fn max_log_residual(rec: &PistonRecord, c: &Constants) -> cpdq_core::Result<f64> {
    Ok(max_or_zero(heat_theorem_residual(rec, c)?.log_residual))
}

fn run_piston(p: &PistonParams, c: &Constants, out: &Path, rep: &mut RunReport) -> CliResult<()> {
    let cfg = piston_config(p, c);
    let rec = piston_simulate(&cfg, c)?;
    let ds = rec.delta_s_over_k(c);
    rep.result("events", rec.len());
    rep.result("delta_s_over_k", ds);
    rep.check(Check::le(
        "heat_theorem_log_residual",
        max_log_residual(&rec, c)?,
        1e-12,
    ));

    let sudden = cfg.mode == PistonMode::SuddenJump;
    if sudden {
        let l_end = cfg.l_end.expect("validated");
        rep.check(Check::le(
            "sudden_entropy_vs_log_ratio",
            (ds - (l_end / cfg.l0).ln()).abs(),
            1e-9,
        ));
    }
    if let (PistonMode::ConstantSpeed, Some(l_end)) = (cfg.mode, cfg.l_end) {
        let change = rec.invariant_change_at(l_end);
        rep.result("delta_ln_pl", change);
        if p.ratio.abs() <= ADIABATIC_RATIO {
            rep.check(Check::le("adiabatic_invariant_change", change.abs(), 5e-3));
        }
    }
    let equilibrium = sudden || p.ratio.abs() <= EQUILIBRIUM_RATIO;
    if equilibrium && rec.len() >= 3 {
        let ext = extended_quantities(&rec, c)?;
        rep.check(Check::le("dl_ext_vs_entropy_rate", ext.max_rel_dl_vs_entropy, 1e-2));
        rep.check(Check::le("dl_ext_vs_f_rate", ext.max_rel_dl_vs_fdot, 1e-2));
        rep.check(Check::le(
            "action_entropy_mismatch",
            ext.action_entropy_mismatch(),
            1e-2,
        ));
    }
    if rec.len() >= 2 {
        match info_ledger(&rec, c) {
            Ok(ledger) => {
                let expected = -ds / LN_2;
                if equilibrium {
                    rep.check(Check::le(
                        "ledger_vs_entropy_bits",
                        (ledger.total() - expected).abs(),
                        LEDGER_TOL_BITS,
                    ));
                }
                rep.result("ledger_bits", ledger.total());
                rep.result(
                    "regime",
                    regime_classify(ledger.regime_metrics(), RegimeThresholds::default())?,
                );
            }
            Err(Error::FullyMasked) => rep.warnings.push("no ledger steps: particle at rest".into()),
            Err(e) => return Err(e.into()),
        }
    }

    let e = &rec.events;
    let table = Table::new()
        .column("t", e.iter().map(|e| e.t))
        .column("L", e.iter().map(|e| e.l))
        .column("speed", e.iter().map(|e| e.speed))
        .column("f", rec.f.iter().copied())
        .column("S", rec.entropy.iter().copied())
        .column("theta", rec.theta.iter().copied())
        .column("P", rec.pressure.iter().copied());
    artifact(rep, out, "piston.csv", &table)?;

    if let Some(ratios) = &p.scan {
        if sudden || cfg.l_end.is_none() {
            return Err(CliError::Schema(
                "params (piston): scan needs mode constant_speed and l_end".into(),
            ));
        }
        let rows = adiabatic_scan(ratios, &cfg, c)?;
        rep.check(Check::le("scan_monotone", scan_monotonicity(&rows), 1e-12));
        let table = Table::new()
            .column("ratio", rows.iter().map(|r| r.ratio))
            .column("delta_ln_pL", rows.iter().map(|r| r.delta_ln_pl))
            .column("delta_S_over_k", rows.iter().map(|r| r.delta_s_over_k));
        artifact(rep, out, "scan.csv", &table)?;
    }
    Ok(())
}

/// Closed-form levels where the potential has them on this grid.
pub fn oracle_energy(pot: &Potential, grid: &GridSpec, n: usize, c: &Constants) -> Option<f64> {
    let level = n as f64;
    match *pot {
        Potential::Harmonic { m, omega } => Some((level + 0.5) * 2.0 * c.f * omega * (m / c.mass).sqrt()),
        Potential::InfiniteWell { l } if grid.x_min == 0.0 && grid.x_max == l => {
            Some(2.0 * c.f * c.f * PI * PI * (level + 1.0).powi(2) / (c.mass * l * l))
        }
        _ => None,
    }
}

fn state_table(psi: &WaveFunction, pot: &Potential, energy: f64, c: &Constants) -> CliResult<Table> {
    let prof = local_wkb_profile(pot, energy, &psi.grid, c)?;
    let v = &psi.values;
    Ok(Table::new()
        .column("x", prof.x.iter().copied())
        .column("re_psi", v.iter().map(|z| z.re))
        .column("im_psi", v.iter().map(|z| z.im))
        .column("P", v.iter().map(|z| z.norm_sqr()))
        .column("k", prof.k_of_x.iter().copied())
        .column("delta_x", prof.delta_x_of_x.iter().copied())
        .column("validity", prof.validity_metric.iter().copied()))
}

fn run_tise(p: &TiseParams, c: &Constants, out: &Path, rep: &mut RunReport) -> CliResult<()> {
    let grid = p.grid.build()?;
    let sol = solve_tise(&p.potential, &grid, p.n_states, c)?;
    let mut worst = 0.0f64;
    for (i, a) in sol.states.iter().enumerate() {
        worst = worst.max((a.norm_sqr() - 1.0).abs());
        for b in &sol.states[..i] {
            worst = worst.max(a.inner(b).norm());
        }
    }
    rep.check(Check::le("orthonormality", worst, ORTHONORMAL_TOL));
    for (n, e) in sol.energies.iter().enumerate().take(ORACLE_MAX_STATE + 1) {
        if let Some(exact) = oracle_energy(&p.potential, &p.grid, n, c) {
            rep.check(Check::le(
                format!("energy_{n}_rel_err"),
                ((e - exact) / exact).abs(),
                ORACLE_REL_TOL,
            ));
        }
    }
    let fisher: Vec<_> = sol
        .states
        .iter()
        .map(cpdq_core::fisher_metrics)
        .collect::<cpdq_core::Result<_>>()?;
    rep.result("energies", &sol.energies);
    rep.result(
        "fisher_lengths",
        fisher.iter().map(|m| m.fisher_length).collect::<Vec<_>>(),
    );
    rep.warnings.extend(sol.warnings.iter().cloned());
    artifact(
        rep,
        out,
        "energies.csv",
        &Table::new()
            .column("n", (0..sol.energies.len()).map(|n| n as f64))
            .column("E", sol.energies.iter().copied())
            .column("fisher_length", fisher.iter().map(|m| m.fisher_length)),
    )?;
    for (n, (psi, e)) in sol.states.iter().zip(&sol.energies).enumerate() {
        artifact(
            rep,
            out,
            &format!("state_{n}.csv"),
            &state_table(psi, &p.potential, *e, c)?,
        )?;
    }
    Ok(())
}

fn run_variational(p: &VariationalParams, c: &Constants, out: &Path, rep: &mut RunReport) -> CliResult<()> {
    let grid = p.grid.build()?;
    let exact = solve_tise(&p.potential, &grid, 1, c)?.energies[0];
    rep.result("eigensolver_energy", exact);
    match variational_ground_state(&p.potential, &grid, c, p.max_iters, p.tol) {
        Ok(v) => {
            rep.check(Check::le("energy_rel_err", ((v.energy - exact) / exact).abs(), 1e-4));
            rep.check(Check::le("iterations", v.iterations as f64, p.max_iters as f64));
            rep.result("energy", v.energy);
            artifact(
                rep,
                out,
                "state_0.csv",
                &state_table(&v.psi, &p.potential, v.energy, c)?,
            )?;
        }
        Err(Error::NotConverged {
            iterations,
            energy,
            change,
            ..
        }) => {
            rep.check(Check::le("energy_rel_err", ((energy - exact) / exact).abs(), 1e-4));
            rep.check(Check::le("final_change", change, p.tol));
            rep.warnings
                .push(format!("not converged after {iterations} iterations"));
            rep.result("energy", energy);
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn run_wkb(p: &WkbParams, c: &Constants, out: &Path, rep: &mut RunReport) -> CliResult<()> {
    let grid = p.grid.build()?;
    let prof = local_wkb_profile(&p.potential, p.energy, &grid, c)?;
    rep.check(Check::le(
        "appendix_a_residual",
        appendix_a_consistency(&p.potential, p.energy, &grid, c)?,
        1e-3,
    ));
    let metrics = wkb_regime_metrics(&prof, &p.potential, p.energy, cpdq_core::info::DEFAULT_WKB_ADMIT)?;
    rep.result("regime", regime_classify(metrics, RegimeThresholds::default())?);
    let table = Table::new()
        .column("x", prof.x.iter().copied())
        .column("k", prof.k_of_x.iter().copied())
        .column("delta_x", prof.delta_x_of_x.iter().copied())
        .column("validity", prof.validity_metric.iter().copied());
    artifact(rep, out, "profile.csv", &table)
}

fn run_dispersion(p: &DispersionParamsSpec, c: &Constants, rep: &mut RunReport) -> CliResult<()> {
    let params = DispersionParams {
        k: p.k,
        m0: p.m0,
        c: p.c.unwrap_or(c.c),
        f: p.f.unwrap_or(c.f),
    };
    let r = dispersion_checks(&params)?;
    rep.check(Check::le("kg_residual", r.kg_residual, 1e-12));
    if let Some(nr) = r.nr_residual {
        rep.check(Check::le("nr_residual", nr, 1e-12));
    }
    let rest = dispersion_checks(&DispersionParams { k: 0.0, ..params })?.omega_kg;
    let rest_exact = params.m0 * params.c * params.c / (2.0 * params.f);
    if params.m0 > 0.0 {
        rep.check(Check::le(
            "rest_frequency_rel_err",
            ((rest - rest_exact) / rest_exact).abs(),
            1e-12,
        ));
    } else if params.k != 0.0 {
        let light = params.c * params.k.abs();
        rep.check(Check::le(
            "massless_rel_err",
            ((r.omega_kg - light) / light).abs(),
            1e-12,
        ));
    }
    rep.result("dispersion", r);
    Ok(())
}

fn run_bounds(p: &BoundsParams, c: &Constants, rep: &mut RunReport) -> CliResult<()> {
    let b = rate_bounds(p.energy, p.theta, c)?;
    rep.check(Check::le(
        "per_interval_cap_exact",
        (b.per_interval_cap - 1.0 / (2.0 * LN_2)).abs(),
        0.0,
    ));
    rep.check(Check::flag(
        "bremermann_lt_h_lt_bekenstein",
        b.bremermann < b.bound_h && b.bound_h < b.bekenstein,
    ));
    if c.f == 0.5 * c.hbar {
        rep.check(Check::le(
            "bound_f_vs_bound_h",
            ((b.bound_f - b.bound_h) / b.bound_h).abs(),
            1e-12,
        ));
    }
    rep.result("bounds", b);
    Ok(())
}

fn run_regime(p: &RegimeParams, rep: &mut RunReport) -> CliResult<()> {
    let r = regime_classify(p.metrics, p.thresholds.unwrap_or_default())?;
    if let Some(expect) = p.expect {
        rep.check(Check::flag("label_matches", r.label == expect));
    }
    rep.result("regime", r);
    Ok(())
}

fn run_suite(p: &SuiteParams, out: &Path, rep: &mut RunReport) -> CliResult<()> {
    let summary = suite::run_suite(p.filter.as_deref(), p.tighten.as_deref(), Some(out))?;
    for row in &summary.rows {
        for ch in &row.checks {
            let mut ch = ch.clone();
            ch.name = format!("{}/{}", row.id, ch.name);
            rep.check(ch);
        }
    }
    rep.artifacts.push("suite.json".into());
    Ok(())
}
