//! Physical constants and the unit system.
//!
//! Natural units set hbar = m = k_B = c = 1, which puts the action constant
//! at `f = 1/2`. SI mode uses CODATA values with the electron mass as the
//! default particle mass.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, J s (CODATA 2018, exact by definition of the SI).
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Planck constant, J s.
pub const H_SI: f64 = 6.626_070_15e-34;
/// Boltzmann constant, J/K.
pub const K_BOLTZ_SI: f64 = 1.380_649e-23;
/// Speed of light, m/s.
pub const C_SI: f64 = 299_792_458.0;
/// Electron mass, kg.
pub const ELECTRON_MASS_SI: f64 = 9.109_383_701_5e-31;

/// Which unit system the constants were built from.
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum UnitSystem {
    #[default]
    Natural,
    Si,
}

/// The constants every module reads.
///
/// `f` is the action carried by the product `|p| * delta_q`. For directly
/// observed motion it is `hbar / 2`; `f_ref` fixes the entropy zero so that
/// `S = k ln(f / f_ref)` vanishes in that case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub units: UnitSystem,
    pub f: f64,
    pub hbar: f64,
    pub k_boltz: f64,
    pub mass: f64,
    pub c: f64,
    pub f_ref: f64,
    /// Momentum magnitude at or below which `delta_q = f/|p|` is flagged.
    pub p_floor: f64,
}

impl Constants {
    pub fn natural() -> Self {
        Self {
            units: UnitSystem::Natural,
            f: 0.5,
            hbar: 1.0,
            k_boltz: 1.0,
            mass: 1.0,
            c: 1.0,
            f_ref: 0.5,
            p_floor: 1e-9,
        }
    }

    pub fn si() -> Self {
        Self {
            units: UnitSystem::Si,
            f: HBAR_SI / 2.0,
            hbar: HBAR_SI,
            k_boltz: K_BOLTZ_SI,
            mass: ELECTRON_MASS_SI,
            c: C_SI,
            f_ref: HBAR_SI / 2.0,
            // 1e-9 in natural units of an electron (m_e c).
            p_floor: 1e-9 * ELECTRON_MASS_SI * C_SI,
        }
    }

    pub fn for_units(units: UnitSystem) -> Self {
        match units {
            UnitSystem::Natural => Self::natural(),
            UnitSystem::Si => Self::si(),
        }
    }

    /// Planck's constant `h = 2 pi hbar`.
    pub fn h(&self) -> f64 {
        2.0 * PI * self.hbar
    }

    pub fn with_f(mut self, f: f64) -> Self {
        self.f = f;
        self
    }

    pub fn with_mass(mut self, mass: f64) -> Self {
        self.mass = mass;
        self
    }

    /// Checks positivity of every constant.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("f", self.f),
            ("hbar", self.hbar),
            ("k_boltz", self.k_boltz),
            ("mass", self.mass),
            ("c", self.c),
            ("f_ref", self.f_ref),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and > 0, got {value}"),
                });
            }
        }
        if !(self.p_floor.is_finite() && self.p_floor >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "p_floor",
                reason: format!("must be finite and >= 0, got {}", self.p_floor),
            });
        }
        Ok(())
    }

    /// Entropy `S = k ln(f / f_ref)` associated with an action value.
    pub fn entropy_of(&self, f: f64) -> f64 {
        self.k_boltz * (f / self.f_ref).ln()
    }
}

impl Default for Constants {
    fn default() -> Self {
        Self::natural()
    }
}

/// Smallest meaningful position uncertainty, a quarter-pi fraction of the
/// Compton wavelength: `h / (4 pi m c)`.
pub fn compton_floor(mass: f64, consts: &Constants) -> Result<f64> {
    if !(mass > 0.0) {
        return Err(Error::InvalidParameter {
            name: "mass",
            reason: format!("must be > 0, got {mass}"),
        });
    }
    let compton = consts.h() / (mass * consts.c);
    Ok(compton / (4.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_f_is_half_hbar() {
        let n = Constants::natural();
        assert_eq!(n.f, n.hbar / 2.0);
        assert_eq!(n.f_ref, n.hbar / 2.0);
        let s = Constants::si();
        assert_eq!(s.f, s.hbar / 2.0);
        assert_eq!(s.entropy_of(s.f), 0.0);
        assert!(n.validate().is_ok() && s.validate().is_ok());
    }

    #[test]
    fn h_matches_codata() {
        assert_relative_eq!(Constants::si().h(), H_SI, max_relative = 1e-9);
    }

    #[test]
    fn compton_floor_electron() {
        // lambda_c = h / (m c) = 2.426e-12 m, then / 4 pi.
        let si = Constants::si();
        let lambda_c = H_SI / (ELECTRON_MASS_SI * C_SI);
        assert_relative_eq!(lambda_c, 2.426e-12, max_relative = 1e-3);
        let floor = compton_floor(ELECTRON_MASS_SI, &si).unwrap();
        assert_relative_eq!(floor, 1.931e-13, max_relative = 1e-3);
    }

    #[test]
    fn compton_floor_natural_is_half() {
        let floor = compton_floor(1.0, &Constants::natural()).unwrap();
        assert_relative_eq!(floor, 0.5, max_relative = 1e-15);
    }

    #[test]
    fn compton_floor_decreases_with_mass() {
        let n = Constants::natural();
        let mut last = f64::INFINITY;
        for m in [1e-3, 1.0, 1e3, 1e9, 1e30] {
            let v = compton_floor(m, &n).unwrap();
            assert!(v < last);
            last = v;
        }
        assert!(last < 1e-30);
        assert!(compton_floor(0.0, &n).is_err());
    }

    #[test]
    fn validate_rejects_nonpositive() {
        let mut c = Constants::natural();
        c.c = 0.0;
        assert!(c.validate().is_err());
    }
}
