//! Independent checks: a finite-volume spectrum of the radial operator,
//! the two limiting-case energy ladders, and pointwise ODE residuals.

use crate::error::{domain, Error, Result};
use crate::wavefun::RadialSeries;

pub const DEFAULT_L: f64 = 16.0;
pub const DEFAULT_N_GRID: usize = 4000;
pub const RESIDUAL_PASS: f64 = 1e-8;
pub const FD_MATCH_TOL: f64 = 1e-4;

/// Symmetric tridiagonal discretization of
/// `-(x R')'/x + (m + m^2/x^2 + x^2/4 - a/x) R = E R` on `[0, L]`, `R(L) = 0`.
///
/// Cell-centred fluxes in the measure `x dx`; the node at the origin is kept
/// only for `m = 0`. The matrix is `W^{-1/2} A W^{-1/2}` with `W` the cell
/// volumes, so its eigenvalues are those of the weighted problem.
#[derive(Debug, Clone, PartialEq)]
pub struct FdProblem {
    pub a: f64,
    pub m: i32,
    pub l: f64,
    /// Number of intervals of width `h = L / n_grid`.
    pub n_grid: usize,
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl FdProblem {
    pub fn new(a: f64, m: i32, l: f64, n_grid: usize) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return domain(format!("L must be positive, got {l}"));
        }
        if n_grid < 200 {
            return domain(format!("n_grid must be at least 200, got {n_grid}"));
        }
        if !a.is_finite() {
            return domain("a must be finite");
        }
        let h = l / n_grid as f64;
        let mf = f64::from(m);
        let first = if m == 0 { 0 } else { 1 };
        let nodes: Vec<usize> = (first..n_grid).collect();
        let mut vol = Vec::with_capacity(nodes.len());
        let mut a_diag = Vec::with_capacity(nodes.len());
        let mut a_off = Vec::with_capacity(nodes.len());
        for &i in &nodes {
            if i == 0 {
                // cell [0, h/2]
                vol.push(h * h / 8.0);
                a_diag.push(0.5 + (-a * h / 2.0 + h.powi(4) / 256.0));
            } else {
                let x = i as f64 * h;
                let w = x * h;
                let v = mf + mf * mf / (x * x) + x * x / 4.0 - a / x;
                let left = (x - h / 2.0) / h;
                let right = (x + h / 2.0) / h;
                vol.push(w);
                a_diag.push(left + right + w * v);
            }
            a_off.push(-(i as f64 + 0.5));
        }
        let n = nodes.len();
        let diag: Vec<f64> = (0..n).map(|j| a_diag[j] / vol[j]).collect();
        let off: Vec<f64> = (0..n - 1).map(|j| a_off[j] / (vol[j] * vol[j + 1]).sqrt()).collect();
        Ok(FdProblem { a, m, l, n_grid, diag, off })
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `lambda` (Sturm sequence).
    pub fn count_below(&self, lambda: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - lambda;
        if q < 0.0 {
            count += 1;
        }
        for j in 1..self.diag.len() {
            let prev = if q == 0.0 { f64::EPSILON * (1.0 + lambda.abs()) } else { q };
            q = self.diag[j] - lambda - self.off[j - 1] * self.off[j - 1] / prev;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.size();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for j in 0..n {
            let r = if j > 0 { self.off[j - 1].abs() } else { 0.0 } + if j + 1 < n { self.off[j].abs() } else { 0.0 };
            lo = lo.min(self.diag[j] - r);
            hi = hi.max(self.diag[j] + r);
        }
        (lo, hi)
    }

    /// The `idx`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, idx: usize) -> Result<f64> {
        if idx >= self.size() {
            return domain(format!("index {idx} beyond matrix size {}", self.size()));
        }
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return Ok(mid);
            }
            if self.count_below(mid) > idx {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * (1.0 + mid.abs()) {
                return Ok(0.5 * (lo + hi));
            }
        }
        Err(Error::Numeric(format!("bisection for eigenvalue {idx} did not converge")))
    }

    /// The lowest `n` eigenvalues, ascending.
    pub fn lowest(&self, n: usize) -> Result<Vec<f64>> {
        (0..n).map(|i| self.eigenvalue(i)).collect()
    }
}

/// Lowest `n_eigs` energies, extrapolated from grids `h` and `h/2`.
pub fn fd_spectrum(a: f64, m: i32, l: f64, n_grid: usize, n_eigs: usize) -> Result<Vec<f64>> {
    let coarse = FdProblem::new(a, m, l, n_grid)?.lowest(n_eigs)?;
    let fine = FdProblem::new(a, m, l, 2 * n_grid)?.lowest(n_eigs)?;
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect())
}

/// Like [`fd_spectrum`], returning every level below `emax` on the coarse grid.
pub fn fd_spectrum_below(a: f64, m: i32, l: f64, n_grid: usize, emax: f64) -> Result<Vec<f64>> {
    let n = FdProblem::new(a, m, l, n_grid)?.count_below(emax);
    fd_spectrum(a, m, l, n_grid, n)
}

/// `2 n_r + 2|m| + 1`.
pub fn principal_number(n_r: u32, m: i32) -> u32 {
    2 * n_r + 2 * m.unsigned_abs() + 1
}

/// Pure Coulomb binding energy `-alpha^2 / N^2`.
pub fn coulomb_reference(alpha: f64, n_r: u32, m: i32) -> f64 {
    let n = f64::from(principal_number(n_r, m));
    -alpha * alpha / (n * n)
}

/// Pure Landau energy `beta N`; only `m >= 0` is accepted.
pub fn landau_reference(beta: f64, n_r: u32, m: i32) -> Result<f64> {
    if m < 0 {
        return domain(format!("Landau reference defined for m >= 0, got {m}"));
    }
    Ok(beta * f64::from(principal_number(n_r, m)))
}

/// Dimensionless Landau ladder for either sign of `m`: `2 n_r + |m| + m + 1`.
pub fn landau_curly_e(n_r: u32, m: i32) -> f64 {
    f64::from(2 * n_r + m.unsigned_abs()) + f64::from(m) + 1.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub max_rel: f64,
    pub rms_rel: f64,
    /// Where `max_rel` occurs.
    pub worst_x: f64,
    pub points: usize,
    pub pass: bool,
}

/// `n` evenly spaced points on `[0.1, 0.9 xmax]`, or `[0.1 xmax, 0.9 xmax]` on
/// windows shorter than 1.
pub fn residual_grid(r: &RadialSeries, n: usize) -> Vec<f64> {
    let (lo, hi) = (0.1 * r.xmax.min(1.0), 0.9 * r.xmax);
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n.max(2) - 1) as f64).collect()
}

/// Residual of the radial equation at energy `curly_e`, relative to the
/// magnitude of its individual terms.
pub fn residual_report(curly_e: f64, r: &RadialSeries, grid: &[f64]) -> Result<ResidualReport> {
    let mf = f64::from(r.m);
    let mut max_rel: f64 = 0.0;
    let mut worst_x = f64::NAN;
    let mut sq = 0.0;
    let mut points = 0;
    for &x in grid {
        let (f, df, ddf) = r.derivatives(x)?;
        let v = curly_e - mf - mf * mf / (x * x) - x * x / 4.0 + r.a / x;
        let res = ddf + df / x + v * f;
        let scale = ddf.abs() + (df / x).abs() + (v * f).abs();
        let rel = if scale == 0.0 { 0.0 } else { res.abs() / scale };
        if rel > max_rel || worst_x.is_nan() {
            max_rel = max_rel.max(rel);
            worst_x = x;
        }
        sq += rel * rel;
        points += 1;
    }
    if points == 0 {
        return domain("empty residual grid");
    }
    let rms_rel = (sq / points as f64).sqrt();
    Ok(ResidualReport {
        max_rel,
        rms_rel,
        worst_x,
        points,
        pass: max_rel < RESIDUAL_PASS,
    })
}

/// Closest entry of `spectrum` to `curly_e`, with its distance.
pub fn fd_match(curly_e: f64, spectrum: &[f64]) -> Option<(f64, f64)> {
    spectrum
        .iter()
        .map(|&s| (s, (s - curly_e).abs()))
        .min_by(|p, q| p.1.total_cmp(&q.1))
}
