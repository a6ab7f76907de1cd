use serde::{Deserialize, Serialize};

use crate::units::Constants;

/// One degree of freedom at one instant, with its position uncertainty.
///
/// `delta_q = f/|p|` is `None` when `|p|` is at or below the momentum floor;
/// the uncertainty diverges at turning points and is flagged, not
/// extrapolated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DofState {
    pub t: f64,
    pub q: f64,
    pub p: f64,
    pub delta_q: Option<f64>,
}

impl DofState {
    pub fn new(t: f64, q: f64, p: f64, consts: &Constants) -> Self {
        let delta_q = (p.abs() > consts.p_floor).then(|| consts.f / p.abs());
        Self { t, q, p, delta_q }
    }

    pub fn is_flagged(&self) -> bool {
        self.delta_q.is_none()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn flagged_at_floor() {
        let c = Constants::natural();
        assert!(DofState::new(0.0, 0.0, 0.0, &c).is_flagged());
        assert!(DofState::new(0.0, 0.0, 1e-9, &c).is_flagged());
        assert!(!DofState::new(0.0, 0.0, 2e-9, &c).is_flagged());
    }

    proptest! {
        #[test]
        fn product_equals_f(p in prop_oneof![-1e6f64..-1e-8, 1e-8f64..1e6], f in 1e-3f64..10.0) {
            let c = Constants::natural().with_f(f);
            let s = DofState::new(0.0, 0.0, p, &c);
            let dq = s.delta_q.unwrap();
            prop_assert!((p.abs() * dq - f).abs() <= 1e-12 * f);
        }
    }
}
