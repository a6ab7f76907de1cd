//! Wave mechanics built from the action constant `f`.
//!
//! With `p delta_x = f` the kinetic operator is `-(2 f^2 / m) d^2/dx^2`,
//! which is the usual `-(hbar^2 / 2m) d^2/dx^2` at `f = hbar/2`. The
//! modules here cover Fisher information and the Cramer-Rao bound, a
//! finite-difference eigensolver, a descent route to the ground state,
//! local WKB quantities and plane-wave dispersion checks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{derivative, derivative4, trapezoid};
use crate::potential::Potential;
use crate::tridiag;
use crate::units::Constants;

pub const MIN_GRID_POINTS: usize = 64;
/// Relative probability floor below which the classical Fisher integrand
/// switches to its node limit.
pub const P_FLOOR_REL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        let g = Self { x_min, x_max, n };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < MIN_GRID_POINTS {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: format!("need at least {MIN_GRID_POINTS} points, got {}", self.n),
            });
        }
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_max > self.x_min) {
            return Err(Error::InvalidParameter {
                name: "x_max",
                reason: format!("need finite x_min < x_max, got [{}, {}]", self.x_min, self.x_max),
            });
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.x_max
        } else {
            self.x_min + i as f64 * self.h()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveFunction {
    pub grid: Grid1D,
    pub values: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.n {
            return Err(Error::LengthMismatch {
                expected: grid.n,
                found: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    /// Samples `psi(x)` on the grid and normalizes.
    pub fn from_fn(grid: Grid1D, psi: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.points().into_iter().map(psi).collect();
        Self::new(grid, values)?.normalized()
    }

    pub fn from_real(grid: Grid1D, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        trapezoid(&self.density(), self.grid.h())
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if !(n2 > 0.0 && n2.is_finite()) {
            return Err(Error::EmptyRegion("wave function has zero norm"));
        }
        let s = n2.sqrt();
        self.values.iter_mut().for_each(|z| *z /= s);
        Ok(self)
    }

    /// `<self|other>` by the trapezoid rule.
    pub fn inner(&self, other: &WaveFunction) -> Complex64 {
        let h = self.grid.h();
        let n = self.values.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, (a, b)) in self.values.iter().zip(&other.values).enumerate() {
            let w = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
            acc += a.conj() * b * w;
        }
        acc * h
    }

    pub fn mean_x(&self) -> f64 {
        let x = self.grid.points();
        let w: Vec<f64> = self.density().iter().zip(&x).map(|(p, x)| p * x).collect();
        trapezoid(&w, self.grid.h()) / self.norm_sqr()
    }

    /// Standard deviation of `P = |psi|^2`.
    pub fn std_dev(&self) -> f64 {
        let mu = self.mean_x();
        let x = self.grid.points();
        let w: Vec<f64> = self
            .density()
            .iter()
            .zip(&x)
            .map(|(p, x)| p * (x - mu).powi(2))
            .collect();
        (trapezoid(&w, self.grid.h()) / self.norm_sqr()).sqrt()
    }

    /// Number of sign changes of the real part, ignoring samples below
    /// `1e-6 max|psi|`.
    pub fn node_count(&self) -> usize {
        let max = self.values.iter().fold(0.0f64, |a, z| a.max(z.re.abs()));
        let mut last = 0.0f64;
        let mut nodes = 0;
        for z in &self.values {
            if z.re.abs() <= 1e-6 * max {
                continue;
            }
            if last != 0.0 && z.re.signum() != last {
                nodes += 1;
            }
            last = z.re.signum();
        }
        nodes
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSolution {
    pub energies: Vec<f64>,
    pub states: Vec<WaveFunction>,
    /// Non-fatal findings, e.g. states not bound on the grid.
    pub warnings: Vec<String>,
}

fn potential_on_grid(pot: &Potential, grid: &Grid1D) -> Result<Vec<f64>> {
    pot.validate()?;
    grid.points().into_iter().map(|x| pot.v(x)).collect()
}

/// Interior diagonal and off-diagonal of the Dirichlet 3-point Hamiltonian.
fn hamiltonian(v: &[f64], coef: f64, h: f64) -> (Vec<f64>, Vec<f64>) {
    let n = v.len();
    let diag = v[1..n - 1].iter().map(|vi| 2.0 * coef / (h * h) + vi).collect();
    let off = vec![-coef / (h * h); n - 3];
    (diag, off)
}

fn kinetic_coef(consts: &Constants) -> f64 {
    2.0 * consts.f * consts.f / consts.mass
}

/// Lowest `n_states` eigenpairs of `-(2 f^2/m) psi'' + V psi = E psi` with
/// `psi = 0` at both grid ends.
pub fn solve_tise(pot: &Potential, grid: &Grid1D, n_states: usize, consts: &Constants) -> Result<EigenSolution> {
    grid.validate()?;
    consts.validate()?;
    let interior = grid.n - 2;
    if n_states == 0 || n_states > interior {
        return Err(Error::TooManyStates {
            requested: n_states,
            available: interior,
        });
    }
    let v = potential_on_grid(pot, grid)?;
    let h = grid.h();
    let (diag, off) = hamiltonian(&v, kinetic_coef(consts), h);

    let mut energies: Vec<f64> = Vec::with_capacity(n_states);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(n_states);
    for k in 0..n_states {
        let lam = tridiag::kth_eigenvalue(&diag, &off, k);
        // only nearly degenerate neighbours need explicit orthogonalization
        let close: Vec<Vec<f64>> = energies
            .iter()
            .zip(&vectors)
            .filter(|(e, _)| (lam - **e).abs() <= 1e-8 * lam.abs().max(1.0))
            .map(|(_, u)| u.clone())
            .collect();
        let u = tridiag::eigenvector(&diag, &off, lam, &close);
        energies.push(lam);
        vectors.push(u);
    }

    let walls = matches!(pot, Potential::InfiniteWell { l } if grid.x_min >= 0.0 && grid.x_max <= *l);
    let mut warnings = Vec::new();
    let mut states = Vec::with_capacity(n_states);
    for (k, u) in vectors.into_iter().enumerate() {
        let mut full = Vec::with_capacity(grid.n);
        full.push(0.0);
        full.extend(u);
        full.push(0.0);
        // first significant lobe positive
        let max = full.iter().fold(0.0f64, |a, x: &f64| a.max(x.abs()));
        if full
            .iter()
            .find(|x: &&f64| x.abs() > 1e-3 * max)
            .is_some_and(|x| *x < 0.0)
        {
            full.iter_mut().for_each(|x| *x = -*x);
        }
        let psi = WaveFunction::from_real(*grid, &full)?.normalized()?;
        if !walls {
            let e = energies[k];
            if v[0] <= e || v[grid.n - 1] <= e {
                warnings.push(format!(
                    "state {k} (E = {e}) is not bound on the grid: V at the edges is not above E"
                ));
            }
            let m = psi.values.iter().fold(0.0f64, |a, z| a.max(z.norm()));
            if psi.values[1].norm() > 1e-8 * m || psi.values[grid.n - 2].norm() > 1e-8 * m {
                warnings.push(format!(
                    "state {k} has not decayed to 1e-8 of its peak at the grid edges"
                ));
            }
        }
        let nodes = psi.node_count();
        if nodes != k {
            warnings.push(format!("state {k} has {nodes} nodes"));
        }
        states.push(psi);
    }
    Ok(EigenSolution {
        energies,
        states,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherMetrics {
    /// `int P'^2 / P`.
    pub fi_classical: f64,
    /// `int 4 |psi'|^2`.
    pub fi_generalized: f64,
    /// `fi_generalized^(-1/2)`.
    pub fisher_length: f64,
    /// `-4 int P (Im psi'/psi)^2`.
    pub correction: f64,
    /// `|fi_classical - fi_generalized - correction|`.
    pub decomposition_residual: f64,
}

/// Classical and generalized Fisher information of a normalized state.
///
/// Below `P_FLOOR_REL * max P` the classical integrand takes its node limit
/// `4 |psi'|^2` and the phase correction is dropped.
pub fn fisher_metrics(psi: &WaveFunction) -> Result<FisherMetrics> {
    let h = psi.grid.h();
    let p = psi.density();
    let p_max = p.iter().fold(0.0f64, |a, v| a.max(*v));
    if !(p_max > 0.0) {
        return Err(Error::EmptyRegion("wave function has zero-measure support"));
    }
    let floor = P_FLOOR_REL * p_max;
    let dpsi = derivative4(&psi.values, h);
    let n = p.len();
    let mut classical = vec![0.0; n];
    let mut generalized = vec![0.0; n];
    let mut correction = vec![0.0; n];
    for i in 0..n {
        let g = 4.0 * dpsi[i].norm_sqr();
        generalized[i] = g;
        if p[i] > floor {
            let dp = 2.0 * (psi.values[i].conj() * dpsi[i]).re;
            classical[i] = dp * dp / p[i];
            let im = (dpsi[i] / psi.values[i]).im;
            correction[i] = -4.0 * p[i] * im * im;
        } else {
            classical[i] = g;
        }
    }
    let fi_classical = trapezoid(&classical, h);
    let fi_generalized = trapezoid(&generalized, h);
    let corr = trapezoid(&correction, h);
    Ok(FisherMetrics {
        fi_classical,
        fi_generalized,
        fisher_length: fi_generalized.powf(-0.5),
        correction: corr,
        decomposition_residual: (fi_classical - fi_generalized - corr).abs(),
    })
}

/// `delta_x^2 * fi_generalized - 1`; non-negative when the Cramer-Rao bound holds.
pub fn cr_bound_check(psi: &WaveFunction, delta_x: f64) -> Result<f64> {
    Ok(delta_x * delta_x * fisher_metrics(psi)?.fi_generalized - 1.0)
}

/// Fisher length of the part of `psi` inside `[x - half_width, x + half_width]`.
pub fn local_fisher_length(psi: &WaveFunction, x: f64, half_width: f64) -> Result<f64> {
    let h = psi.grid.h();
    let dpsi = derivative4(&psi.values, h);
    let (mut num, mut den) = (0.0, 0.0);
    for (i, xi) in psi.grid.points().into_iter().enumerate() {
        if (xi - x).abs() <= half_width {
            num += 4.0 * dpsi[i].norm_sqr();
            den += psi.values[i].norm_sqr();
        }
    }
    if !(num > 0.0 && den > 0.0) {
        return Err(Error::EmptyRegion("window holds no probability"));
    }
    Ok((den / num).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalResult {
    pub psi: WaveFunction,
    pub energy: f64,
    pub iterations: usize,
}

/// Ground state by minimizing the discrete energy functional.
///
/// The functional is the Rayleigh quotient of the same 3-point Hamiltonian
/// used by [`solve_tise`]. Descent is nonlinear conjugate gradient
/// in its locally optimal form: each step minimizes the quotient exactly
/// over the span of the current state, its gradient and the previous step,
/// then renormalizes.
pub fn variational_ground_state(
    pot: &Potential,
    grid: &Grid1D,
    consts: &Constants,
    max_iters: usize,
    tol: f64,
) -> Result<VariationalResult> {
    let n = grid.n;
    let start: Vec<f64> = (0..n)
        .map(|i| (std::f64::consts::PI * i as f64 / (n - 1) as f64).sin())
        .collect();
    variational_ground_state_from(pot, grid, consts, &start, max_iters, tol)
}

/// As [`variational_ground_state`], starting from `initial` (full grid,
/// edge values ignored).
pub fn variational_ground_state_from(
    pot: &Potential,
    grid: &Grid1D,
    consts: &Constants,
    initial: &[f64],
    max_iters: usize,
    tol: f64,
) -> Result<VariationalResult> {
    grid.validate()?;
    consts.validate()?;
    if initial.len() != grid.n {
        return Err(Error::LengthMismatch {
            expected: grid.n,
            found: initial.len(),
        });
    }
    if !(tol > 0.0) || max_iters == 0 {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: format!("need tol > 0 and max_iters > 0, got {tol}, {max_iters}"),
        });
    }
    let v = potential_on_grid(pot, grid)?;
    let (diag, off) = hamiltonian(&v, kinetic_coef(consts), grid.h());
    let apply = |x: &[f64]| -> Vec<f64> {
        let m = x.len();
        (0..m)
            .map(|i| {
                let mut y = diag[i] * x[i];
                if i > 0 {
                    y += off[i - 1] * x[i - 1];
                }
                if i + 1 < m {
                    y += off[i] * x[i + 1];
                }
                y
            })
            .collect()
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let unit = |a: &mut Vec<f64>| {
        let s = dot(a, a).sqrt();
        a.iter_mut().for_each(|x| *x /= s);
    };

    let mut x: Vec<f64> = initial[1..grid.n - 1].to_vec();
    if !(dot(&x, &x) > 0.0) {
        return Err(Error::InvalidParameter {
            name: "initial",
            reason: "zero vector".into(),
        });
    }
    unit(&mut x);
    let mut energy = dot(&x, &apply(&x));
    let mut prev: Option<Vec<f64>> = None;
    let mut change = f64::INFINITY;

    for it in 1..=max_iters {
        let hx = apply(&x);
        let grad: Vec<f64> = hx.iter().zip(&x).map(|(a, b)| a - energy * b).collect();
        // orthonormal basis of span{x, grad, prev}
        let mut basis = vec![x.clone()];
        for cand in std::iter::once(grad).chain(prev.take()) {
            let mut v = cand;
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(&v, b);
                    v.iter_mut().zip(b).for_each(|(vi, bi)| *vi -= c * bi);
                }
                let nv = dot(&v, &v).sqrt();
                if !(nv > 0.0 && nv.is_finite()) {
                    v.clear();
                    break;
                }
                v.iter_mut().for_each(|vi| *vi /= nv);
            }
            if !v.is_empty() {
                basis.push(v);
            }
        }
        if basis.len() == 1 {
            return finish(grid, &x, energy, it);
        }
        let hb: Vec<Vec<f64>> = basis.iter().map(|b| apply(b)).collect();
        let k = basis.len();
        let mut small = [[0.0; 3]; 3];
        for i in 0..k {
            for j in 0..k {
                small[i][j] = 0.5 * (dot(&basis[i], &hb[j]) + dot(&basis[j], &hb[i]));
            }
        }
        let y = lowest_eigvec(&small, k);
        let mut x_new = vec![0.0; x.len()];
        let mut step = vec![0.0; x.len()];
        for (i, b) in basis.iter().enumerate() {
            x_new.iter_mut().zip(b).for_each(|(xn, bi)| *xn += y[i] * bi);
            if i > 0 {
                step.iter_mut().zip(b).for_each(|(s, bi)| *s += y[i] * bi);
            }
        }
        unit(&mut x_new);
        let e_new = dot(&x_new, &apply(&x_new));
        change = ((e_new - energy) / e_new.abs().max(f64::MIN_POSITIVE)).abs();
        x = x_new;
        energy = e_new;
        prev = Some(step);
        if change < tol {
            return finish(grid, &x, energy, it);
        }
    }
    let mut last = vec![0.0];
    last.extend(&x);
    last.push(0.0);
    Err(Error::NotConverged {
        iterations: max_iters,
        energy,
        change,
        last_iterate: last,
    })
}

/// Eigenvector of the lowest eigenvalue of the leading `k x k` block, by
/// cyclic Jacobi rotations.
fn lowest_eigvec(a: &[[f64; 3]; 3], k: usize) -> [f64; 3] {
    let mut m = *a;
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for _ in 0..64 {
        let off: f64 = (0..k)
            .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        if off <= f64::EPSILON * f64::EPSILON * (0..k).map(|i| m[i][i] * m[i][i]).sum::<f64>() {
            break;
        }
        for p in 0..k {
            for q in p + 1..k {
                if m[p][q] == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..k {
                    let (mrp, mrq) = (m[r][p], m[r][q]);
                    m[r][p] = c * mrp - s * mrq;
                    m[r][q] = s * mrp + c * mrq;
                }
                for r in 0..k {
                    let (mpr, mqr) = (m[p][r], m[q][r]);
                    m[p][r] = c * mpr - s * mqr;
                    m[q][r] = s * mpr + c * mqr;
                }
                for row in v.iter_mut().take(k) {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let best = (0..k).min_by(|&i, &j| m[i][i].total_cmp(&m[j][j])).unwrap_or(0);
    [v[0][best], v[1][best], v[2][best]]
}

fn finish(grid: &Grid1D, x: &[f64], energy: f64, iterations: usize) -> Result<VariationalResult> {
    let mut full = vec![0.0];
    full.extend(x);
    full.push(0.0);
    let s: f64 = full.iter().sum();
    if s < 0.0 {
        full.iter_mut().for_each(|v| *v = -*v);
    }
    Ok(VariationalResult {
        psi: WaveFunction::from_real(*grid, &full)?.normalized()?,
        energy,
        iterations,
    })
}

/// Local plane-wave quantities at energy `E`; `None` in forbidden regions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WkbProfile {
    pub x: Vec<f64>,
    /// `k = sqrt((E - V) / (2 f^2 / m))`.
    pub k_of_x: Vec<Option<f64>>,
    /// `delta_x = 1 / (2k)`.
    pub delta_x_of_x: Vec<Option<f64>>,
    /// `|V'| delta_x / (2 (E - V))`.
    pub validity_metric: Vec<Option<f64>>,
}

pub fn local_wkb_profile(pot: &Potential, energy: f64, grid: &Grid1D, consts: &Constants) -> Result<WkbProfile> {
    grid.validate()?;
    consts.validate()?;
    pot.validate()?;
    let coef = kinetic_coef(consts);
    let x = grid.points();
    let mut prof = WkbProfile {
        x: x.clone(),
        k_of_x: Vec::with_capacity(grid.n),
        delta_x_of_x: Vec::with_capacity(grid.n),
        validity_metric: Vec::with_capacity(grid.n),
    };
    for &xi in &x {
        let e = pot.eval(xi)?;
        let ke = energy - e.v;
        if ke > 0.0 {
            let k = (ke / coef).sqrt();
            let dx = 0.5 / k;
            prof.k_of_x.push(Some(k));
            prof.delta_x_of_x.push(Some(dx));
            prof.validity_metric.push(Some(e.dv.abs() * dx / (2.0 * ke)));
        } else {
            prof.k_of_x.push(None);
            prof.delta_x_of_x.push(None);
            prof.validity_metric.push(None);
        }
    }
    if prof.k_of_x.iter().all(Option::is_none) {
        return Err(Error::EmptyRegion("no classically allowed point on the grid"));
    }
    Ok(prof)
}

/// Recovers Newton's law from the local uncertainty `delta_x(x)`.
///
/// With `p = f / delta_x` and `qdot = p/m`, the uncertainty form of the
/// equation of motion gives `pdot = -(p^2/m) delta_x'/delta_x`. The
/// derivative of `delta_x` is a central divided difference. Returns the
/// largest `|pdot + V'|` over points with `E - V >= 0.1 E`, divided by the
/// largest `|V'|` there (or undivided when `V' = 0` everywhere).
pub fn appendix_a_consistency(pot: &Potential, energy: f64, grid: &Grid1D, consts: &Constants) -> Result<f64> {
    let prof = local_wkb_profile(pot, energy, grid, consts)?;
    let h = grid.h();
    let m = consts.mass;
    let n = grid.n;
    let mut max_res = 0.0f64;
    let mut max_dv = 0.0f64;
    let mut admitted = 0usize;
    for i in 1..n - 1 {
        let (Some(a), Some(b), Some(c)) = (prof.delta_x_of_x[i - 1], prof.delta_x_of_x[i], prof.delta_x_of_x[i + 1])
        else {
            continue;
        };
        let e = pot.eval(prof.x[i])?;
        if energy - e.v < 0.1 * energy {
            continue;
        }
        admitted += 1;
        let ddx = derivative(&[a, b, c], h)[1];
        let p = consts.f / b;
        let p_dot = -(p * p / m) * ddx / b;
        max_res = max_res.max((p_dot + e.dv).abs());
        max_dv = max_dv.max(e.dv.abs());
    }
    if admitted == 0 {
        return Err(Error::EmptyRegion("no point with E - V >= 0.1 E"));
    }
    Ok(if max_dv > 0.0 { max_res / max_dv } else { max_res })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionParams {
    pub k: f64,
    pub m0: f64,
    pub c: f64,
    pub f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionReport {
    pub omega_kg: f64,
    pub kg_residual: f64,
    /// `f k^2 / m0`; absent for massless particles.
    pub omega_nr: Option<f64>,
    pub nr_residual: Option<f64>,
}

/// Plane-wave substitution into the Klein-Gordon and free Schrodinger forms.
///
/// Derivatives of `exp(i(kx - wt))` are taken as complex multipliers and each
/// residual is divided by its largest term.
pub fn dispersion_checks(params: &DispersionParams) -> Result<DispersionReport> {
    let DispersionParams { k, m0, c, f } = *params;
    if !k.is_finite() {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: format!("must be finite, got {k}"),
        });
    }
    if !(m0 >= 0.0 && m0.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "m0",
            reason: format!("must be >= 0, got {m0}"),
        });
    }
    if !(c > 0.0 && f > 0.0) {
        return Err(Error::InvalidParameter {
            name: "c",
            reason: format!("c and f must be > 0, got {c}, {f}"),
        });
    }
    let i = Complex64::i();
    let mu2 = (m0 * c / (2.0 * f)).powi(2);
    let omega_kg = c * (k * k + mu2).sqrt();
    // (1/c^2) d_t^2 psi - d_x^2 psi + mu^2 psi, per unit psi
    let dt = -i * omega_kg;
    let dx = i * k;
    let terms = [dt * dt / (c * c), -(dx * dx), Complex64::new(mu2, 0.0)];
    let kg_residual = residual(&terms);

    let (omega_nr, nr_residual) = if m0 > 0.0 {
        let w = f * k * k / m0;
        // i 2f d_t psi + (2 f^2 / m) d_x^2 psi
        let dt = -i * w;
        let terms = [i * 2.0 * f * dt, 2.0 * f * f / m0 * dx * dx];
        (Some(w), Some(residual(&terms)))
    } else {
        (None, None)
    };
    Ok(DispersionReport {
        omega_kg,
        kg_residual,
        omega_nr,
        nr_residual,
    })
}

fn residual(terms: &[Complex64]) -> f64 {
    let scale = terms.iter().fold(0.0f64, |a, t| a.max(t.norm()));
    let sum: Complex64 = terms.iter().sum();
    if scale == 0.0 {
        0.0
    } else {
        sum.norm() / scale
    }
}

/// Bohm-style adiabaticity number `h |dV/dt| / (E_1 - E_0)^2` using the
/// two lowest levels of `eig`. Reported only.
pub fn bohm_adiabaticity(eig: &EigenSolution, dv_dt: f64, consts: &Constants) -> Result<f64> {
    if eig.energies.len() < 2 {
        return Err(Error::TooManyStates {
            requested: 2,
            available: eig.energies.len(),
        });
    }
    let gap = eig.energies[1] - eig.energies[0];
    Ok(consts.h() * dv_dt.abs() / (gap * gap))
}
