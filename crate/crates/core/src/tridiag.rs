//! Symmetric tridiagonal eigenproblems: Sturm-sequence bisection for the
//! eigenvalues and inverse iteration for the vectors.

/// Number of eigenvalues strictly below `x`.
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut q = diag[0] - x;
    for i in 0..diag.len() {
        if i > 0 {
            q = diag[i] - x - off[i - 1] * off[i - 1] / q;
        }
        if q == 0.0 {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin interval containing the whole spectrum.
pub fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (lo, hi)
}

/// The `k`-th smallest eigenvalue (0-based) by bisection.
pub fn kth_eigenvalue(diag: &[f64], off: &[f64], k: usize) -> f64 {
    let (mut lo, mut hi) = gershgorin(diag, off);
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    for _ in 0..256 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * scale {
            break;
        }
        if sturm_count(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves `(T - shift) x = b` with partial pivoting; `b` is overwritten.
fn shifted_solve(diag: &[f64], off: &[f64], shift: f64, b: &mut [f64]) {
    let n = diag.len();
    // rows of U hold up to two super-diagonals after pivoting
    let mut d: Vec<f64> = diag.iter().map(|v| v - shift).collect();
    let mut du: Vec<f64> = off.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut dl: Vec<f64> = off.to_vec();
    let guard = f64::EPSILON * diag.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = guard;
            }
            let l = dl[i] / d[i];
            dl[i] = l;
            d[i + 1] -= l * du[i];
            b[i + 1] -= l * b[i];
        } else {
            // swap rows i and i+1
            let l = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = l;
            let tmp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = tmp - l * d[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -l;
            }
            b.swap(i, i + 1);
            b[i + 1] -= l * b[i];
        }
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = guard;
    }
    b[n - 1] /= d[n - 1];
    if n > 1 {
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
}

/// Eigenvector for `lambda` by inverse iteration, orthogonalized against
/// `previous` (needed only for near-degenerate pairs).
pub fn eigenvector(diag: &[f64], off: &[f64], lambda: f64, previous: &[Vec<f64>]) -> Vec<f64> {
    let n = diag.len();
    let scale = lambda.abs().max(1.0);
    let shift = lambda + 64.0 * f64::EPSILON * scale;
    // deterministic, generic start vector
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i as f64) * 0.7548776662).sin()).collect();
    normalize(&mut v);
    for _ in 0..4 {
        shifted_solve(diag, off, shift, &mut v);
        for u in previous {
            let dot: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u).for_each(|(x, a)| *x -= dot * a);
        }
        normalize(&mut v);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn discrete_laplacian_spectrum() {
        // tridiag(-1, 2, -1) has eigenvalues 2 - 2 cos(k pi / (n + 1))
        let n = 50;
        let diag = vec![2.0; n];
        let off = vec![-1.0; n - 1];
        for k in 0..n {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * PI / (n + 1) as f64).cos();
            assert!((kth_eigenvalue(&diag, &off, k) - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn eigenvector_residual() {
        let n = 200;
        let diag: Vec<f64> = (0..n).map(|i| 2.0 + (i as f64 / 10.0).powi(2)).collect();
        let off = vec![-1.0; n - 1];
        let mut prev = Vec::new();
        for k in 0..4 {
            let lam = kth_eigenvalue(&diag, &off, k);
            let v = eigenvector(&diag, &off, lam, &prev);
            let mut res = 0.0f64;
            for i in 0..n {
                let mut tv = diag[i] * v[i];
                if i > 0 {
                    tv += off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    tv += off[i] * v[i + 1];
                }
                res = res.max((tv - lam * v[i]).abs());
            }
            assert!(res < 1e-10, "k = {k}: {res}");
            prev.push(v);
        }
    }

    #[test]
    fn pivoting_solve() {
        // zero leading diagonal forces a row swap
        let diag = [0.0, 1.0, 3.0];
        let off = [2.0, 1.0];
        let mut b = [2.0, 4.0, 4.0];
        shifted_solve(&diag, &off, 0.0, &mut b);
        // exact solution of [[0,2,0],[2,1,1],[0,1,3]] x = [2,4,4]
        let x = [1.0, 1.0, 1.0];
        for (a, e) in b.iter().zip(x) {
            assert!((a - e).abs() < 1e-14);
        }
    }
}
