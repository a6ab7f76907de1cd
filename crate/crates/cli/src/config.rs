//! Scenario configuration files.
//!
//! A config is a JSON object `{kind, units, constants, params, output}`.
//! Parsing runs in two stages: the envelope first, then `params` against
//! the block for the named kind. Every object rejects unknown keys.

use std::path::Path;

use cpdq_core::{Constants, Grid1D, PistonMode, Potential, RegimeMetrics, RegimeThresholds, UnitSystem};
use schemars::JsonSchema;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Trajectory,
    Piston,
    Tise,
    Variational,
    Wkb,
    Dispersion,
    Bounds,
    Regime,
    Suite,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Trajectory => "trajectory",
            Kind::Piston => "piston",
            Kind::Tise => "tise",
            Kind::Variational => "variational",
            Kind::Wkb => "wkb",
            Kind::Dispersion => "dispersion",
            Kind::Bounds => "bounds",
            Kind::Regime => "regime",
            Kind::Suite => "suite",
        }
    }
}

/// Per-field overrides applied on top of the unit system's constants.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ConstantOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hbar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_boltz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_ref: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_floor: Option<f64>,
}

impl ConstantOverrides {
    pub fn apply(&self, units: UnitSystem) -> Constants {
        let mut c = Constants::for_units(units);
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut c.f, self.f);
        set(&mut c.hbar, self.hbar);
        set(&mut c.k_boltz, self.k_boltz);
        set(&mut c.mass, self.mass);
        set(&mut c.c, self.c);
        set(&mut c.f_ref, self.f_ref);
        set(&mut c.p_floor, self.p_floor);
        c
    }
}

/// The config envelope as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: Kind,
    #[serde(default)]
    pub units: UnitSystem,
    #[serde(default)]
    pub constants: ConstantOverrides,
    #[serde(default = "empty_object")]
    #[schemars(with = "AnyParams")]
    pub params: Value,
    /// Output directory; the command line `--out` takes precedence.
    #[serde(default)]
    pub output: Option<String>,
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn build(&self) -> cpdq_core::Result<Grid1D> {
        Grid1D::new(self.x_min, self.x_max, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    pub amplitude: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryParams {
    pub potential: Potential,
    pub q0: f64,
    pub p0: f64,
    pub dt: f64,
    pub n_steps: usize,
    /// Special-variation amplitude in units of `f`.
    #[serde(default = "default_eps_over_f")]
    pub epsilon_over_f: f64,
    /// Turning-point mask margin as a fraction of `max|p|`.
    #[serde(default = "default_margin")]
    pub margin: f64,
    /// Adds `a sin(w t)` to the integrated path (a non-solution).
    #[serde(default)]
    pub perturbation: Option<Perturbation>,
    #[serde(default = "default_energy_tol")]
    pub energy_drift_tol: f64,
}

fn default_eps_over_f() -> f64 {
    1e-6
}

fn default_margin() -> f64 {
    0.5
}

fn default_energy_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct PistonParams {
    #[serde(default)]
    pub mode: PistonMode,
    pub l0: f64,
    /// Wall speed as a fraction of `v0` (signed).
    #[serde(default)]
    pub ratio: f64,
    pub v0: f64,
    #[serde(default)]
    pub mass: Option<f64>,
    #[serde(default)]
    pub l_end: Option<f64>,
    #[serde(default)]
    pub t_end: Option<f64>,
    #[serde(default = "default_substeps")]
    pub jump_substeps: usize,
    /// Ratios for an adiabaticity scan from `l0` to `l_end`.
    #[serde(default)]
    pub scan: Option<Vec<f64>>,
}

fn default_substeps() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct TiseParams {
    pub potential: Potential,
    pub grid: GridSpec,
    pub n_states: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct VariationalParams {
    pub potential: Potential,
    pub grid: GridSpec,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_max_iters() -> usize {
    5000
}

fn default_tol() -> f64 {
    1e-12
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct WkbParams {
    pub potential: Potential,
    pub energy: f64,
    pub grid: GridSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct DispersionParamsSpec {
    pub k: f64,
    pub m0: f64,
    /// Defaults to the unit system's `c`.
    #[serde(default)]
    pub c: Option<f64>,
    /// Defaults to the unit system's `f`.
    #[serde(default)]
    pub f: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct BoundsParams {
    pub energy: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RegimeParams {
    pub metrics: RegimeMetrics,
    #[serde(default)]
    pub thresholds: Option<RegimeThresholds>,
    /// When set, the run checks that the label matches.
    #[serde(default)]
    pub expect: Option<cpdq_core::Regime>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SuiteParams {
    #[serde(default)]
    pub filter: Option<String>,
    #[serde(default)]
    pub tighten: Option<String>,
}

/// Union of all parameter blocks, used only for the printed schema.
#[derive(JsonSchema)]
#[serde(untagged)]
#[allow(dead_code)]
enum AnyParams {
    Trajectory(TrajectoryParams),
    Piston(PistonParams),
    Tise(TiseParams),
    Variational(VariationalParams),
    Wkb(WkbParams),
    Dispersion(DispersionParamsSpec),
    Bounds(BoundsParams),
    Regime(RegimeParams),
    Suite(SuiteParams),
}

/// A parsed config with its parameter block resolved.
#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    Trajectory(TrajectoryParams),
    Piston(PistonParams),
    Tise(TiseParams),
    Variational(VariationalParams),
    Wkb(WkbParams),
    Dispersion(DispersionParamsSpec),
    Bounds(BoundsParams),
    Regime(RegimeParams),
    Suite(SuiteParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub raw: ScenarioConfig,
    pub scenario: Scenario,
    pub constants: Constants,
}

fn schema_err(context: &str, e: serde_json::Error) -> CliError {
    CliError::Schema(format!("{context}: {e}"))
}

fn params<T: DeserializeOwned>(kind: Kind, v: &Value) -> CliResult<T> {
    serde_json::from_value(v.clone()).map_err(|e| schema_err(&format!("params ({})", kind.as_str()), e))
}

pub fn parse_config(text: &str) -> CliResult<LoadedConfig> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    let raw: ScenarioConfig = serde_json::from_value(value).map_err(|e| schema_err("config", e))?;
    let p = &raw.params;
    let scenario = match raw.kind {
        Kind::Trajectory => Scenario::Trajectory(params(raw.kind, p)?),
        Kind::Piston => Scenario::Piston(params(raw.kind, p)?),
        Kind::Tise => Scenario::Tise(params(raw.kind, p)?),
        Kind::Variational => Scenario::Variational(params(raw.kind, p)?),
        Kind::Wkb => Scenario::Wkb(params(raw.kind, p)?),
        Kind::Dispersion => Scenario::Dispersion(params(raw.kind, p)?),
        Kind::Bounds => Scenario::Bounds(params(raw.kind, p)?),
        Kind::Regime => Scenario::Regime(params(raw.kind, p)?),
        Kind::Suite => Scenario::Suite(params(raw.kind, p)?),
    };
    let constants = raw.constants.apply(raw.units);
    constants
        .validate()
        .map_err(|e| CliError::Schema(format!("constants: {e}")))?;
    Ok(LoadedConfig {
        raw,
        scenario,
        constants,
    })
}

pub fn load_config(path: &Path) -> CliResult<LoadedConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

/// JSON schema of the config envelope, pretty-printed.
pub fn schema_json() -> String {
    let schema = schemars::schema_for!(ScenarioConfig);
    serde_json::to_string_pretty(&schema).expect("schema serializes")
}
