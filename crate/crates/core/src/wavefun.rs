//! Radial wavefunctions assembled from the series solutions.
//!
//! `R(x) = x^|m| exp(-x^2/4) [exp(-gamma x)] sum a_n x^n`, the bracketed factor
//! present only for negative shifted energy (cases 1 and 4).

use crate::eigensolve::{energy_from_gamma, Eigenstate};
use crate::error::{domain, Error, Result};
use crate::quadrature;
use crate::scaling::{centrifugal_index, energy_shift, CaseId, ShiftSign};
use crate::series::{self, CoeffSeq, SeriesFamily, N_CAP};

pub const TOL_TRUNC: f64 = 1e-12;
/// Relative agreement demanded of successive quadrature refinements.
pub const QUAD_TOL: f64 = 1e-11;
/// Largest admissible ratio of the tail beyond `xmax` to the integral inside.
pub const TAIL_TOL: f64 = 1e-6;
const GRID_POINTS: usize = 64;
const SETTLE_RUN: usize = 8;

/// What to assemble: an eigenstate of a level solve, or the fixed-energy
/// zero-shift state of azimuthal number `m`.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Eigen(Eigenstate),
    Boundary { m: i32 },
}

impl StateSpec {
    pub fn m(&self) -> i32 {
        match self {
            StateSpec::Eigen(s) => s.m,
            StateSpec::Boundary { m } => *m,
        }
    }

    pub fn case(&self) -> CaseId {
        match self {
            StateSpec::Eigen(s) => s.case,
            StateSpec::Boundary { m } => CaseId::for_m(*m, ShiftSign::Zero),
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match self {
            StateSpec::Eigen(s) => Some(s.gamma),
            StateSpec::Boundary { .. } => None,
        }
    }

    pub fn curly_e(&self) -> f64 {
        match self {
            StateSpec::Eigen(s) => s.curly_e,
            StateSpec::Boundary { m } => energy_shift(*m),
        }
    }
}

/// Evaluation window that comfortably contains the classically allowed region.
///
/// With an `exp(-decay x)` factor the window is also capped where that factor
/// has fallen below `exp(-60)` past the `x^|m|` peak; for strong Coulomb
/// coupling this is far inside the Landau estimate.
pub fn default_xmax(curly_e: f64, m: i32, decay: f64) -> f64 {
    let am = f64::from(m.abs());
    let landau = 2.0 * ((2.0 * curly_e.abs()).sqrt() + am + 4.0);
    if decay > 0.0 {
        landau.min((60.0 + 2.0 * am) / decay)
    } else {
        landau
    }
}

/// A truncated, evaluable radial function.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSeries {
    pub m: i32,
    pub case: CaseId,
    pub a: f64,
    pub gamma: Option<f64>,
    pub curly_e: f64,
    /// Series with `scale = xmax`.
    pub series: CoeffSeq,
    pub xmax: f64,
    /// Estimated truncation error of `R` on `[0, xmax]`.
    pub tail_bound: f64,
    /// Overall multiplier; 1 in the `a_0 = 1` gauge.
    pub gauge: f64,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Build the truncated series for `spec`.
///
/// Terms are added until, for [`SETTLE_RUN`] consecutive indices, the largest
/// contribution on a 64-point grid is below `tol_trunc` times the largest
/// partial sum, and the look-ahead tail estimate agrees.
pub fn assemble(spec: &StateSpec, a: f64, xmax: Option<f64>, tol_trunc: f64) -> Result<RadialSeries> {
    let m = spec.m();
    let case = spec.case();
    if !case.admits(m) {
        return domain(format!("{case} does not admit m = {m}"));
    }
    let curly_e = spec.curly_e();
    let decay = match (case.sign, spec.gamma()) {
        (ShiftSign::Negative, Some(g)) => g,
        _ => 0.0,
    };
    let xmax = xmax.unwrap_or_else(|| default_xmax(curly_e, m, decay));
    if !(xmax.is_finite() && xmax > 0.0) {
        return domain(format!("xmax must be positive, got {xmax}"));
    }
    if !(tol_trunc > 0.0 && tol_trunc < 1.0) {
        return domain(format!("tol_trunc must lie in (0, 1), got {tol_trunc}"));
    }
    let family = SeriesFamily::of_case(case);
    let gamma = spec.gamma();
    let mut seq = series::coeffs_scaled(family, a, centrifugal_index(m), gamma, 0, xmax)?;

    let mut out = RadialSeries {
        m,
        case,
        a,
        gamma,
        curly_e,
        series: seq.clone(),
        xmax,
        tail_bound: 0.0,
        gauge: 1.0,
    };
    let grid = linspace(0.0, xmax, GRID_POINTS);
    let pref: Vec<f64> = grid.iter().map(|&x| out.prefactor(x)).collect();
    let t: Vec<f64> = grid.iter().map(|&x| x / xmax).collect();
    let mut t_pow = vec![1.0; GRID_POINTS];
    let mut partial: Vec<f64> = vec![1.0; GRID_POINTS];
    let mut run = 0;
    let mut last_ratio = f64::NAN;
    let mut n = 0;
    loop {
        n += 1;
        if n > N_CAP {
            return Err(Error::Truncation {
                cap: N_CAP,
                xmax,
                last_ratio,
            });
        }
        seq.extend_to(n)?;
        let b = seq.coeffs[n];
        let mut term_max: f64 = 0.0;
        let mut sum_max: f64 = 0.0;
        for i in 0..GRID_POINTS {
            t_pow[i] *= t[i];
            let term = b * t_pow[i];
            partial[i] += term;
            term_max = term_max.max(term.abs() * pref[i]);
            sum_max = sum_max.max(partial[i].abs() * pref[i]);
        }
        last_ratio = term_max / sum_max;
        if term_max <= tol_trunc * sum_max {
            run += 1;
        } else {
            run = 0;
        }
        if run < SETTLE_RUN {
            continue;
        }
        let tail = grid
            .iter()
            .zip(&pref)
            .map(|(&x, p)| seq.tail_estimate(x) * p)
            .fold(0.0, f64::max);
        if tail < tol_trunc * sum_max {
            out.tail_bound = tail;
            break;
        }
        run = 0;
    }
    // Trailing exact zeros carry nothing (terminating series).
    while seq.coeffs.len() > 1 && seq.coeffs.last() == Some(&0.0) {
        seq.coeffs.pop();
    }
    out.series = seq;
    Ok(out)
}

impl RadialSeries {
    /// Truncation index: highest retained power.
    pub fn truncation_n(&self) -> usize {
        self.series.n_max()
    }

    fn decay_rate(&self) -> f64 {
        match (self.case.sign, self.gamma) {
            (ShiftSign::Negative, Some(g)) => g,
            _ => 0.0,
        }
    }

    /// `x^|m| exp(-x^2/4 - gamma x)` with `gamma = 0` outside cases 1/4.
    fn prefactor(&self, x: f64) -> f64 {
        x.powi(self.m.abs()) * (-x * x / 4.0 - self.decay_rate() * x).exp()
    }

    /// Copy with every coefficient multiplied by `c`.
    pub fn scaled(&self, c: f64) -> RadialSeries {
        RadialSeries {
            gauge: self.gauge * c,
            ..self.clone()
        }
    }

    /// Copy carrying `n` series terms (longer or shorter than assembled).
    pub fn with_terms(&self, n: usize) -> Result<RadialSeries> {
        let mut s = self.clone();
        if n > s.series.n_max() {
            s.series.extend_to(n)?;
        } else {
            s.series.coeffs.truncate(n + 1);
        }
        Ok(s)
    }

    fn check_x(&self, x: f64) -> Result<()> {
        if !(x >= 0.0 && x <= self.xmax) {
            return domain(format!("x = {x} outside [0, {}]", self.xmax));
        }
        Ok(())
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        self.check_x(x)?;
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: f64) -> f64 {
        let (s, _, _) = self.series.eval_derivs(x);
        self.gauge * self.prefactor(x) * s
    }

    /// `(R, R', R'')` by term-wise differentiation of the product.
    pub fn derivatives(&self, x: f64) -> Result<(f64, f64, f64)> {
        self.check_x(x)?;
        if x == 0.0 {
            return domain("derivatives are evaluated on x > 0");
        }
        let (s, ds, dds) = self.series.eval_derivs(x);
        let am = f64::from(self.m.abs());
        // P'/P = q, P''/P = q^2 + q'
        let q = am / x - x / 2.0 - self.decay_rate();
        let dq = -am / (x * x) - 0.5;
        let p = self.gauge * self.prefactor(x);
        Ok((
            p * s,
            p * (q * s + ds),
            p * ((q * q + dq) * s + 2.0 * q * ds + dds),
        ))
    }

    /// Upper estimate of `int_X^inf f` for `f = R^2 x`, assuming `ln f` is
    /// concave beyond `X`: `f(X) / (-(ln f)'(X))`.
    fn norm_tail(&self, big_x: f64) -> Result<f64> {
        let (r, dr, _) = self.derivatives(big_x)?;
        let f = r * r * big_x;
        if f == 0.0 {
            return Ok(0.0);
        }
        let decay = -(2.0 * dr / r + 1.0 / big_x);
        if !(decay > 0.0) {
            return Err(Error::Integrability {
                tail: f64::INFINITY,
                partial: f64::NAN,
                reason: format!("R^2 x is not decaying at x = {big_x} (log-slope {:.3e})", -decay),
            });
        }
        Ok(f / decay)
    }

    /// `int_0^inf R^2 x dx`.
    ///
    /// Adaptive Gauss-Legendre on `[0, xmax]`; beyond `xmax` the integrand must
    /// decay and its tail must be below [`TAIL_TOL`] of the partial integral,
    /// otherwise integrability is reported as inconclusive.
    pub fn norm2(&self) -> Result<f64> {
        let q = quadrature::integrate(
            |x| {
                let r = self.eval_unchecked(x);
                r * r * x
            },
            0.0,
            self.xmax,
            QUAD_TOL,
        );
        let tail = self.norm_tail(self.xmax).map_err(|e| with_partial(e, q.value))?;
        if tail > TAIL_TOL * q.value {
            return Err(Error::Integrability {
                tail,
                partial: q.value,
                reason: "tail beyond xmax not negligible".into(),
            });
        }
        Ok(q.value + tail)
    }

    /// `int_0^inf R1 R2 x dx` over the common window, the remainder bounded by
    /// Cauchy-Schwarz on the two tails.
    pub fn inner_product(&self, other: &RadialSeries) -> Result<f64> {
        if self.m != other.m {
            return domain(format!("inner product of m = {} and m = {}", self.m, other.m));
        }
        if (self.a - other.a).abs() > 1e-14 * self.a.abs().max(other.a.abs()) {
            return domain(format!("inner product across a = {} and a = {}", self.a, other.a));
        }
        let hi = self.xmax.min(other.xmax);
        let q = quadrature::integrate(
            |x| self.eval_unchecked(x) * other.eval_unchecked(x) * x,
            0.0,
            hi,
            QUAD_TOL,
        );
        let t1 = self.norm_tail(hi).map_err(|e| with_partial(e, q.value))?;
        let t2 = other.norm_tail(hi).map_err(|e| with_partial(e, q.value))?;
        let tail = (t1 * t2).sqrt();
        let scale = (self.norm2()? * other.norm2()?).sqrt();
        if tail > TAIL_TOL * scale {
            return Err(Error::Integrability {
                tail,
                partial: q.value,
                reason: "common-window tail not negligible".into(),
            });
        }
        Ok(q.value)
    }

    /// `<R1, R2> / sqrt(<R1, R1> <R2, R2>)`.
    pub fn overlap(&self, other: &RadialSeries) -> Result<f64> {
        let ip = self.inner_product(other)?;
        Ok(ip / (self.norm2()? * other.norm2()?).sqrt())
    }

    /// Energy recomputed from the stored case and gamma.
    pub fn energy(&self) -> f64 {
        energy_from_gamma(self.case, self.m, self.gamma)
    }
}

fn with_partial(e: Error, partial: f64) -> Error {
    match e {
        Error::Integrability { tail, reason, .. } => Error::Integrability { tail, partial, reason },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolve::solve_level;

    fn terminating() -> RadialSeries {
        let s = solve_level(SeriesFamily::Case36, 1.0, 0, 2).unwrap().remove(0);
        assemble(&StateSpec::Eigen(s), 1.0, None, TOL_TRUNC).unwrap()
    }

    #[test]
    fn terminating_state_is_linear() {
        let r = terminating();
        assert_eq!(r.truncation_n(), 1);
        assert_eq!(r.series.coeff(1), -1.0);
        assert_eq!(r.tail_bound, 0.0);
        assert_eq!(r.evaluate(0.0).unwrap(), 1.0);
        assert!(r.evaluate(1.0).unwrap().abs() < 1e-15);
        let x = 2.5;
        let want = (1.0 - x) * (-x * x / 4.0f64).exp();
        assert!((r.evaluate(x).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn window_follows_coulomb_decay() {
        assert_eq!(default_xmax(2.0, 0, 0.0), 12.0);
        assert_eq!(default_xmax(2.0, 0, 0.1), 12.0);
        assert!((default_xmax(-1e6, 0, 1000.0) - 0.06).abs() < 1e-15);
        let s = solve_level(SeriesFamily::Case14, 969.6, 0, 1).unwrap().remove(0);
        let r = assemble(&StateSpec::Eigen(s), 969.6, None, TOL_TRUNC).unwrap();
        assert!(r.xmax < 0.07);
        assert!(r.evaluate(r.xmax).unwrap().is_finite());
    }

    #[test]
    fn evaluate_domain() {
        let r = terminating();
        assert!(r.evaluate(r.xmax + 1e-9).is_err());
        assert!(r.evaluate(-0.1).is_err());
        assert!(r.evaluate(r.xmax).is_ok());
    }

    #[test]
    fn landau_ground_profile() {
        let r = assemble(&StateSpec::Boundary { m: 2 }, 0.0, None, TOL_TRUNC).unwrap();
        assert_eq!(r.truncation_n(), 0);
        assert_eq!(r.evaluate(0.0).unwrap(), 0.0);
        let x = 1.7f64;
        assert!((r.evaluate(x).unwrap() - x * x * (-x * x / 4.0).exp()).abs() < 1e-15);
        let r0 = assemble(&StateSpec::Boundary { m: 0 }, 0.0, None, TOL_TRUNC).unwrap();
        assert!((r0.norm2().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn first_level_has_flat_start() {
        let s = solve_level(SeriesFamily::Case14, 0.6, 1, 1).unwrap().remove(0);
        let r = assemble(&StateSpec::Eigen(s), 0.6, None, TOL_TRUNC).unwrap();
        assert!(r.series.coeff(1).abs() < 1e-15);
        assert!(r.series.coeff(2).abs() < 1e-15);
        assert_eq!(r.series.coeffs[0], 1.0);
        assert_eq!(r.evaluate(0.0).unwrap(), 0.0);
    }

    #[test]
    fn terminating_norm_matches_gaussian_moments() {
        // int (1-x)^2 e^{-x^2/2} x dx = 1 - 2 sqrt(pi/2) + 2
        let want = 3.0 - 2.0 * (std::f64::consts::PI / 2.0).sqrt();
        let r = terminating();
        assert!((r.norm2().unwrap() - want).abs() < 1e-10 * want);
        assert!((r.scaled(3.0).norm2().unwrap() - 9.0 * want).abs() < 1e-9 * want);
        assert!((r.inner_product(&r).unwrap() - r.norm2().unwrap()).abs() < 1e-14);
    }

    #[test]
    fn mismatched_inner_product() {
        let r = terminating();
        let other = assemble(&StateSpec::Boundary { m: 1 }, 1.0, None, TOL_TRUNC).unwrap();
        assert!(r.inner_product(&other).is_err());
        let other = assemble(&StateSpec::Boundary { m: 0 }, 0.5, None, TOL_TRUNC).unwrap();
        assert!(r.inner_product(&other).is_err());
    }

    #[test]
    fn wrong_family_rejected() {
        let s = solve_level(SeriesFamily::Case36, 1.0, 0, 2).unwrap().remove(0);
        let mut bad = s.clone();
        bad.m = -1;
        assert!(assemble(&StateSpec::Eigen(bad), 1.0, None, TOL_TRUNC).is_err());
        assert!(assemble(&StateSpec::Eigen(s.clone()), 1.0, Some(-1.0), TOL_TRUNC).is_err());
        assert!(assemble(&StateSpec::Eigen(s), 1.0, None, 0.0).is_err());
    }
}
