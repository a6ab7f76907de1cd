//! Finite differences, quadrature and masking shared by the modules.

use serde::{Deserialize, Serialize};

/// A sampled series with a per-sample validity mask (`true` = excluded).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskedSeries {
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
}

impl MaskedSeries {
    pub fn unmasked(values: Vec<f64>) -> Self {
        let mask = vec![false; values.len()];
        Self { values, mask }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest `|value|` over unmasked samples, `None` if all are masked.
    pub fn max_abs(&self) -> Option<f64> {
        max_abs_unmasked(&self.values, &self.mask)
    }

    /// Largest `|value|` over samples unmasked here and in `extra`.
    pub fn max_abs_where(&self, extra: &[bool]) -> Option<f64> {
        let combined: Vec<bool> = self.mask.iter().zip(extra).map(|(a, b)| *a || *b).collect();
        max_abs_unmasked(&self.values, &combined)
    }
}

/// Second-order time derivative of a uniformly sampled series: central
/// differences inside, second-order one-sided stencils at both ends.
///
/// Needs at least three samples; shorter input yields zeros.
pub fn derivative(y: &[f64], dt: f64) -> Vec<f64> {
    let n = y.len();
    if n < 3 {
        return vec![0.0; n];
    }
    let mut d = vec![0.0; n];
    let two_h = 2.0 * dt;
    d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / two_h;
    for i in 1..n - 1 {
        d[i] = (y[i + 1] - y[i - 1]) / two_h;
    }
    d[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / two_h;
    d
}

/// Fourth-order first derivative on a uniform grid (five-point central
/// stencil, fourth-order one-sided stencils on the two outermost points at
/// each end). Generic over the sample type so it serves real and complex
/// amplitudes alike.
pub fn derivative4<T>(y: &[T], h: f64) -> Vec<T>
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let n = y.len();
    let mut d = vec![T::default(); n];
    if n < 5 {
        return d;
    }
    let s = 1.0 / (12.0 * h);
    let fwd = |i: usize| (y[i] * -25.0 + y[i + 1] * 48.0 - y[i + 2] * 36.0 + y[i + 3] * 16.0 - y[i + 4] * 3.0) * s;
    let fwd1 = |i: usize| {
        // first derivative at i using y[i-1..=i+3]
        (y[i - 1] * -3.0 - y[i] * 10.0 + y[i + 1] * 18.0 - y[i + 2] * 6.0 + y[i + 3]) * s
    };
    let bwd = |i: usize| (y[i] * 25.0 - y[i - 1] * 48.0 + y[i - 2] * 36.0 - y[i - 3] * 16.0 + y[i - 4] * 3.0) * s;
    let bwd1 = |i: usize| (y[i + 1] * 3.0 + y[i] * 10.0 - y[i - 1] * 18.0 + y[i - 2] * 6.0 - y[i - 3]) * s;
    d[0] = fwd(0);
    d[1] = fwd1(1);
    for i in 2..n - 2 {
        d[i] = (y[i - 2] - y[i - 1] * 8.0 + y[i + 1] * 8.0 - y[i + 2]) * s;
    }
    d[n - 2] = bwd1(n - 2);
    d[n - 1] = bwd(n - 1);
    d
}

/// Trapezoidal integral of a uniformly sampled series over samples `i1..=i2`.
pub fn trapezoid_range(y: &[f64], dt: f64, i1: usize, i2: usize) -> f64 {
    if i2 <= i1 {
        return 0.0;
    }
    let inner: f64 = y[i1 + 1..i2].iter().sum();
    dt * (inner + 0.5 * (y[i1] + y[i2]))
}

pub fn trapezoid(y: &[f64], dt: f64) -> f64 {
    if y.is_empty() {
        return 0.0;
    }
    trapezoid_range(y, dt, 0, y.len() - 1)
}

/// Flags samples whose momentum magnitude is at or below `p_floor`.
pub fn gap_mask(p: &[f64], p_floor: f64) -> Vec<bool> {
    p.iter().map(|v| v.abs() <= p_floor).collect()
}

/// Flags samples near turning points: `|p|` at or below the absolute floor
/// or below `margin * max|p|`.
pub fn turning_point_mask(p: &[f64], p_floor: f64, margin: f64) -> Vec<bool> {
    let pmax = p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cut = (margin * pmax).max(p_floor);
    p.iter().map(|v| v.abs() <= p_floor || v.abs() < cut).collect()
}

/// Widens a mask so that every sample whose three-point stencil touches a
/// masked neighbour is masked as well.
pub fn widen_mask(mask: &[bool]) -> Vec<bool> {
    let n = mask.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(1);
            let hi = (i + 1).min(n.saturating_sub(1));
            mask[lo..=hi].iter().any(|&m| m)
        })
        .collect()
}

/// Longest run of `false` entries, as a half-open index range.
pub fn longest_unmasked_span(mask: &[bool]) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    let mut start = None;
    for (i, &m) in mask.iter().chain(std::iter::once(&true)).enumerate() {
        match (m, start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                if best.is_none_or(|(a, b)| i - s > b - a) {
                    best = Some((s, i));
                }
                start = None;
            }
            _ => {}
        }
    }
    best
}

/// Largest absolute value over unmasked entries.
pub fn max_abs_unmasked(values: &[f64], mask: &[bool]) -> Option<f64> {
    values
        .iter()
        .zip(mask)
        .filter(|(_, &m)| !m)
        .map(|(v, _)| v.abs())
        .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn derivative_exact_on_quadratics() {
        let dt = 0.1;
        let y: Vec<f64> = (0..20).map(|i| (i as f64 * dt).powi(2) + 3.0).collect();
        let d = derivative(&y, dt);
        for (i, v) in d.iter().enumerate() {
            assert_relative_eq!(*v, 2.0 * i as f64 * dt, epsilon = 1e-12);
        }
    }

    #[test]
    fn derivative4_exact_on_quartics() {
        let h = 0.05;
        let y: Vec<f64> = (0..40).map(|i| (i as f64 * h).powi(4) - (i as f64 * h)).collect();
        let d = derivative4(&y, h);
        for (i, v) in d.iter().enumerate() {
            let x = i as f64 * h;
            assert_relative_eq!(*v, 4.0 * x.powi(3) - 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn trapezoid_linear_exact() {
        let y: Vec<f64> = (0..11).map(|i| i as f64).collect();
        assert_relative_eq!(trapezoid(&y, 1.0), 50.0);
        assert_relative_eq!(trapezoid_range(&y, 1.0, 2, 4), 6.0);
        assert_eq!(trapezoid_range(&y, 1.0, 4, 4), 0.0);
    }

    #[test]
    fn masks() {
        let p = [0.0, 0.2, 1.0, -0.6, -1e-12];
        assert_eq!(gap_mask(&p, 1e-9), vec![true, false, false, false, true]);
        assert_eq!(turning_point_mask(&p, 1e-9, 0.5), vec![true, true, false, false, true]);
        assert_eq!(
            widen_mask(&[false, false, true, false, false, false]),
            vec![false, true, true, true, false, false]
        );
        assert_eq!(
            longest_unmasked_span(&[true, false, false, true, false, false, false]),
            Some((4, 7))
        );
        assert_eq!(longest_unmasked_span(&[true, true]), None);
        assert_eq!(max_abs_unmasked(&[1.0, -5.0, 2.0], &[false, true, false]), Some(2.0));
    }
}
