//! Built-in one-dimensional potentials.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A static one-dimensional potential.
///
/// The infinite well is a domain restriction `[0, L]` with reflecting walls;
/// inside it the potential is zero.
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Potential {
    Free,
    /// `V = -F0 q`, i.e. a constant force `+F0`.
    Linear {
        f0: f64,
    },
    /// `V = m w^2 q^2 / 2`.
    Harmonic {
        m: f64,
        omega: f64,
    },
    InfiniteWell {
        l: f64,
    },
    /// Poschl-Teller well `V = -V0 sech^2(q / a)`.
    SoftWell {
        v0: f64,
        a: f64,
    },
}

/// Value, first and second derivative of a potential at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialEval {
    pub v: f64,
    pub dv: f64,
    pub d2v: f64,
}

impl Potential {
    pub fn name(&self) -> &'static str {
        match self {
            Potential::Free => "free",
            Potential::Linear { .. } => "linear",
            Potential::Harmonic { .. } => "harmonic",
            Potential::InfiniteWell { .. } => "infinite_well",
            Potential::SoftWell { .. } => "soft_well",
        }
    }

    /// Closed domain of validity. Unbounded potentials return infinities.
    pub fn domain(&self) -> (f64, f64) {
        match *self {
            Potential::InfiniteWell { l } => (0.0, l),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn contains(&self, q: f64) -> bool {
        let (lo, hi) = self.domain();
        q.is_finite() && q >= lo && q <= hi
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &'static str, v: f64, positive: bool| -> Result<()> {
            let ok = v.is_finite() && (!positive || v > 0.0);
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: format!("got {v}"),
                })
            }
        };
        match *self {
            Potential::Free => Ok(()),
            Potential::Linear { f0 } => check("f0", f0, false),
            Potential::Harmonic { m, omega } => {
                check("m", m, true)?;
                check("omega", omega, true)
            }
            Potential::InfiniteWell { l } => check("l", l, true),
            Potential::SoftWell { v0, a } => {
                check("v0", v0, false)?;
                check("a", a, true)
            }
        }
    }

    /// Evaluates `(V, V', V'')` at `q`.
    pub fn eval(&self, q: f64) -> Result<PotentialEval> {
        if !self.contains(q) {
            let (lo, hi) = self.domain();
            return Err(Error::Domain {
                potential: self.name(),
                q,
                lo,
                hi,
            });
        }
        Ok(match *self {
            Potential::Free | Potential::InfiniteWell { .. } => PotentialEval {
                v: 0.0,
                dv: 0.0,
                d2v: 0.0,
            },
            Potential::Linear { f0 } => PotentialEval {
                v: -f0 * q,
                dv: -f0,
                d2v: 0.0,
            },
            Potential::Harmonic { m, omega } => {
                let k = m * omega * omega;
                PotentialEval {
                    v: 0.5 * k * q * q,
                    dv: k * q,
                    d2v: k,
                }
            }
            Potential::SoftWell { v0, a } => {
                let u = q / a;
                let t = u.tanh();
                let s = 1.0 / u.cosh().powi(2);
                PotentialEval {
                    v: -v0 * s,
                    dv: 2.0 * v0 * s * t / a,
                    d2v: 2.0 * v0 * s * (1.0 - 3.0 * t * t) / (a * a),
                }
            }
        })
    }

    pub fn v(&self, q: f64) -> Result<f64> {
        self.eval(q).map(|e| e.v)
    }

    pub fn dv(&self, q: f64) -> Result<f64> {
        self.eval(q).map(|e| e.dv)
    }
}

/// Free-function form of [`Potential::eval`].
pub fn eval_potential(pot: &Potential, q: f64) -> Result<(f64, f64, f64)> {
    pot.eval(q).map(|e| (e.v, e.dv, e.d2v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn harmonic_minimum() {
        let pot = Potential::Harmonic { m: 1.0, omega: 1.0 };
        assert_eq!(eval_potential(&pot, 0.0).unwrap(), (0.0, 0.0, 1.0));
    }

    #[test]
    fn linear_sign_convention() {
        let pot = Potential::Linear { f0: 2.0 };
        assert_eq!(eval_potential(&pot, 3.0).unwrap(), (-6.0, -2.0, 0.0));
    }

    #[test]
    fn harmonic_closed_form() {
        // 1/2 m w^2 q^2 with m = 1, w = 2, q = 1.
        let pot = Potential::Harmonic { m: 1.0, omega: 2.0 };
        assert_eq!(eval_potential(&pot, 1.0).unwrap(), (2.0, 4.0, 4.0));
    }

    #[test]
    fn infinite_well_domain() {
        let pot = Potential::InfiniteWell { l: 1.0 };
        assert!(pot.eval(0.0).is_ok());
        assert!(pot.eval(1.0).is_ok());
        assert!(matches!(pot.eval(1.5), Err(Error::Domain { .. })));
        assert!(matches!(pot.eval(-1e-9), Err(Error::Domain { .. })));
        assert!(pot.eval(f64::NAN).is_err());
    }

    #[test]
    fn validation() {
        assert!(Potential::Harmonic { m: 0.0, omega: 1.0 }.validate().is_err());
        assert!(Potential::SoftWell { v0: 1.0, a: -1.0 }.validate().is_err());
        assert!(Potential::Linear { f0: -3.0 }.validate().is_ok());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn derivative_consistency(q in -3.0f64..3.0, which in 0usize..4) {
            let pot = [
                Potential::Linear { f0: 1.7 },
                Potential::Harmonic { m: 1.3, omega: 0.8 },
                Potential::SoftWell { v0: 4.0, a: 0.7 },
                Potential::Free,
            ][which];
            let h = 1e-4;
            let e = pot.eval(q).unwrap();
            let dv_fd = (pot.v(q + h).unwrap() - pot.v(q - h).unwrap()) / (2.0 * h);
            // O(h^2) truncation with a generous constant, plus round-off.
            prop_assert!((e.dv - dv_fd).abs() <= 50.0 * h * h + 1e-9);
            let dp = pot.dv(q + h).unwrap();
            let dm = pot.dv(q - h).unwrap();
            prop_assert!((e.d2v - (dp - dm) / (2.0 * h)).abs() <= 200.0 * h * h + 1e-9);
        }
    }
}
