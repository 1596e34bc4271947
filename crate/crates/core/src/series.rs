//! Power-series coefficients of the reduced radial function.
//!
//! After the centrifugal factor `x^|m|`, the Gaussian `exp(-x^2/4)` and (for
//! negative shifted energy) `exp(-gamma x)` are split off, the remaining factor
//! is `sum a_n x^n` with `a_0 = 1`. Each sign of the shifted energy gives its own
//! recursion:
//!
//! * [`SeriesFamily::Case14`] (negative shift, `gamma^2 = -shift`):
//!   `n (n-1+M) a_n = -[a_{n-1} (a - gamma (M + 2(n-1))) - (n-2) a_{n-2} + gamma a_{n-3}]`
//! * [`SeriesFamily::Case25`] (zero shift):
//!   `n (n-1+M) a_n = -[a a_{n-1} - (n-2) a_{n-2}]`
//! * [`SeriesFamily::Case36`] (positive shift, `gamma = shift`):
//!   `n (n-1+M) a_n = -[a a_{n-1} + (gamma - n + 2) a_{n-2}]`
//!
//! with `M = 2|m| + 1` and coefficients of negative index taken as zero.

use crate::error::{domain, Result};
use crate::poly::{compensated_sum, Poly};
use crate::scaling::{CaseId, Family, ShiftSign};

/// Hard limit on series length.
pub const N_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SeriesFamily {
    Case14,
    Case25,
    Case36,
}

impl SeriesFamily {
    pub fn of_case(case: CaseId) -> Self {
        match case.sign {
            ShiftSign::Negative => SeriesFamily::Case14,
            ShiftSign::Zero => SeriesFamily::Case25,
            ShiftSign::Positive => SeriesFamily::Case36,
        }
    }

    pub fn sign(self) -> ShiftSign {
        match self {
            SeriesFamily::Case14 => ShiftSign::Negative,
            SeriesFamily::Case25 => ShiftSign::Zero,
            SeriesFamily::Case36 => ShiftSign::Positive,
        }
    }

    /// Case number for a state of this family with azimuthal number `m`.
    pub fn case_for(self, m: i32) -> CaseId {
        CaseId::new(Family::of(m), self.sign())
    }

    /// Smallest coefficient index that may be set to zero.
    pub fn min_level(self) -> usize {
        match self {
            SeriesFamily::Case14 => 1,
            SeriesFamily::Case25 => usize::MAX,
            SeriesFamily::Case36 => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SeriesFamily::Case14 => "case14",
            SeriesFamily::Case25 => "case25",
            SeriesFamily::Case36 => "case36",
        }
    }
}

fn check_inputs(family: SeriesFamily, a: f64, big_m: u32, gamma: Option<f64>, n: usize) -> Result<()> {
    if !(a.is_finite() && a >= 0.0) {
        return domain(format!("Coulomb parameter a must be finite and non-negative, got {a}"));
    }
    if big_m % 2 == 0 {
        return domain(format!("M = 2|m|+1 must be odd, got {big_m}"));
    }
    if n > N_CAP {
        return domain(format!("series length {n} exceeds the cap of {N_CAP}"));
    }
    match (family, gamma) {
        (SeriesFamily::Case25, None) => Ok(()),
        (SeriesFamily::Case25, Some(_)) => domain("case 2/5 series takes no gamma"),
        (_, Some(g)) if g.is_finite() && g > 0.0 => Ok(()),
        (_, g) => domain(format!("{} series needs gamma > 0, got {g:?}", family.label())),
    }
}

/// The four terms of `n (n-1+M) b_n = -(sum of terms)` for the series in
/// `t = x / scale`, where `b_n = a_n scale^n`.
fn recursion_terms(family: SeriesFamily, a: f64, big_m: f64, gamma: f64, scale: f64, c: &[f64], n: usize) -> [f64; 4] {
    let lag = |j: usize| if j > n { 0.0 } else { c[n - j] * scale.powi(j as i32) };
    let nf = n as f64;
    match family {
        SeriesFamily::Case14 => [
            lag(1) * a,
            -lag(1) * gamma * (big_m + 2.0 * (nf - 1.0)),
            -lag(2) * (nf - 2.0),
            gamma * lag(3),
        ],
        SeriesFamily::Case25 => [a * lag(1), -(nf - 2.0) * lag(2), 0.0, 0.0],
        SeriesFamily::Case36 => [a * lag(1), (gamma - nf + 2.0) * lag(2), 0.0, 0.0],
    }
}

fn denominator(big_m: f64, n: usize) -> f64 {
    let nf = n as f64;
    nf * (nf - 1.0 + big_m)
}

/// Coefficients `a_0 ..= a_N` of one of the three series.
///
/// With `scale = s != 1` the stored values are `b_n = a_n s^n`, the coefficients
/// of the same series in `t = x / s`. Choosing `s` near the largest `x` of
/// interest keeps `b_n` representable long after `a_n` has underflowed.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSeq {
    pub family: SeriesFamily,
    pub a: f64,
    pub big_m: u32,
    pub gamma: Option<f64>,
    pub scale: f64,
    pub coeffs: Vec<f64>,
}

impl CoeffSeq {
    fn start(family: SeriesFamily, a: f64, big_m: u32, gamma: Option<f64>, n: usize, scale: f64) -> Result<Self> {
        check_inputs(family, a, big_m, gamma, n)?;
        if !(scale.is_finite() && scale > 0.0) {
            return domain(format!("series scale must be positive, got {scale}"));
        }
        let mut seq = Self {
            family,
            a,
            big_m,
            gamma,
            scale,
            coeffs: Vec::with_capacity(n + 1),
        };
        seq.coeffs.push(1.0);
        seq.extend_to(n)?;
        Ok(seq)
    }

    /// Highest stored index.
    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Generate further coefficients until `a_n` is stored.
    pub fn extend_to(&mut self, n: usize) -> Result<()> {
        if n > N_CAP {
            return domain(format!("series length {n} exceeds the cap of {N_CAP}"));
        }
        let big_m = f64::from(self.big_m);
        let gamma = self.gamma.unwrap_or(0.0);
        for k in self.coeffs.len()..=n {
            let t = recursion_terms(self.family, self.a, big_m, gamma, self.scale, &self.coeffs, k);
            let next = -(t[0] + t[1] + t[2] + t[3]) / denominator(big_m, k);
            self.coeffs.push(next);
        }
        Ok(())
    }

    /// Relative mismatch of the recursion at index `n`, checked in undivided form.
    pub fn recursion_defect(&self, n: usize) -> f64 {
        assert!(n >= 1 && n <= self.n_max());
        let big_m = f64::from(self.big_m);
        let t = recursion_terms(self.family, self.a, big_m, self.gamma.unwrap_or(0.0), self.scale, &self.coeffs, n);
        let lhs = denominator(big_m, n) * self.coeffs[n];
        let defect = (lhs + t[0] + t[1] + t[2] + t[3]).abs();
        let scale = lhs.abs() + t.iter().map(|v| v.abs()).sum::<f64>();
        if scale == 0.0 {
            0.0
        } else {
            defect / scale
        }
    }

    /// Unscaled coefficient `a_n`.
    pub fn coeff(&self, n: usize) -> f64 {
        self.coeffs[n] / self.scale.powi(n as i32)
    }

    /// Value, first and second derivative of `sum a_n x^n`.
    pub fn eval_derivs(&self, x: f64) -> (f64, f64, f64) {
        let t = x / self.scale;
        let mut s = 0.0;
        let mut ds = 0.0;
        let mut dds = 0.0;
        for &c in self.coeffs.iter().rev() {
            dds = dds * t + 2.0 * ds;
            ds = ds * t + s;
            s = s * t + c;
        }
        (s, ds / self.scale, dds / (self.scale * self.scale))
    }

    /// Estimate of `sum_{n > N} |a_n| x^n` for the current length `N`.
    ///
    /// The next 64 terms are generated and summed exactly; the remainder is
    /// bounded geometrically from the ratio of the last two term pairs (the
    /// recursions couple `a_n` to `a_{n-2}` at large `n`). Returns infinity when
    /// that ratio is not below one.
    pub fn tail_estimate(&self, x: f64) -> f64 {
        const LOOKAHEAD: usize = 64;
        let n0 = self.n_max();
        let mut ext = self.clone();
        if ext.extend_to((n0 + LOOKAHEAD).min(N_CAP)).is_err() || ext.n_max() < n0 + 4 {
            return f64::INFINITY;
        }
        let t = x.abs() / self.scale;
        let terms: Vec<f64> = (n0 + 1..=ext.n_max())
            .map(|n| ext.coeffs[n].abs() * t.powi(n as i32))
            .collect();
        let explicit: f64 = terms.iter().sum();
        let k = terms.len();
        let last_pair = terms[k - 1] + terms[k - 2];
        let prev_pair = terms[k - 3] + terms[k - 4];
        if last_pair == 0.0 {
            return explicit;
        }
        let ratio = last_pair / prev_pair;
        if !(ratio < 1.0) {
            return f64::INFINITY;
        }
        explicit + last_pair * ratio / (1.0 - ratio)
    }
}

/// Case 1/4 coefficients for a given decay rate `gamma`.
pub fn coeffs_case14(a: f64, big_m: u32, gamma: f64, n: usize) -> Result<CoeffSeq> {
    CoeffSeq::start(SeriesFamily::Case14, a, big_m, Some(gamma), n, 1.0)
}

/// Case 2/5 coefficients; the energy is fixed so there is no free parameter.
pub fn coeffs_case25(a: f64, big_m: u32, n: usize) -> Result<CoeffSeq> {
    CoeffSeq::start(SeriesFamily::Case25, a, big_m, None, n, 1.0)
}

/// Case 3/6 coefficients for shifted energy `gamma`.
pub fn coeffs_case36(a: f64, big_m: u32, gamma: f64, n: usize) -> Result<CoeffSeq> {
    CoeffSeq::start(SeriesFamily::Case36, a, big_m, Some(gamma), n, 1.0)
}

pub fn coeffs(family: SeriesFamily, a: f64, big_m: u32, gamma: Option<f64>, n: usize) -> Result<CoeffSeq> {
    CoeffSeq::start(family, a, big_m, gamma, n, 1.0)
}

/// Like [`coeffs`], storing `a_n scale^n`.
pub fn coeffs_scaled(
    family: SeriesFamily,
    a: f64,
    big_m: u32,
    gamma: Option<f64>,
    n: usize,
    scale: f64,
) -> Result<CoeffSeq> {
    CoeffSeq::start(family, a, big_m, gamma, n, scale)
}

/// The coefficient `a_k` as an explicit polynomial in `gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaPoly {
    pub family: SeriesFamily,
    pub a: f64,
    pub big_m: u32,
    pub k: usize,
    pub poly: Poly,
}

impl GammaPoly {
    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn eval(&self, gamma: f64) -> f64 {
        self.poly.eval(gamma)
    }
}

/// Polynomials `a_0(gamma) ..= a_k(gamma)`.
///
/// Each coefficient of each polynomial is accumulated with compensated
/// summation so that the only rounding is in the products with `a`.
pub fn gamma_polynomials(family: SeriesFamily, a: f64, big_m: u32, k: usize) -> Result<Vec<Poly>> {
    if family == SeriesFamily::Case25 {
        return domain("the case 2/5 series has no eigenparameter");
    }
    check_inputs(family, a, big_m, Some(1.0), k)?;
    let m = f64::from(big_m);
    let mut polys: Vec<Vec<f64>> = vec![vec![1.0]];
    let get = |p: &[Vec<f64>], idx: isize, j: isize| -> f64 {
        if idx < 0 || j < 0 {
            return 0.0;
        }
        p[idx as usize].get(j as usize).copied().unwrap_or(0.0)
    };
    for n in 1..=k {
        let ni = n as isize;
        let nf = n as f64;
        let d = denominator(m, n);
        let deg = match family {
            SeriesFamily::Case14 => n,
            _ => n / 2,
        };
        let mut c = Vec::with_capacity(deg + 1);
        for j in 0..=(deg as isize) {
            let terms = match family {
                SeriesFamily::Case14 => {
                    let cn = m + 2.0 * (nf - 1.0);
                    [
                        a * get(&polys, ni - 1, j),
                        -cn * get(&polys, ni - 1, j - 1),
                        -(nf - 2.0) * get(&polys, ni - 2, j),
                        get(&polys, ni - 3, j - 1),
                    ]
                }
                _ => [
                    a * get(&polys, ni - 1, j),
                    get(&polys, ni - 2, j - 1),
                    -(nf - 2.0) * get(&polys, ni - 2, j),
                    0.0,
                ],
            };
            c.push(-compensated_sum(terms) / d);
        }
        polys.push(c);
    }
    Ok(polys.into_iter().map(Poly::new).collect())
}

/// `a_k(gamma)` for the case 1/4 or case 3/6 recursion.
pub fn gamma_polynomial(family: SeriesFamily, a: f64, big_m: u32, k: usize) -> Result<GammaPoly> {
    if k < family.min_level() {
        return domain(format!(
            "level k={k} is below the first settable coefficient ({}) for {}",
            family.min_level(),
            family.label()
        ));
    }
    let poly = gamma_polynomials(family, a, big_m, k)?.pop().unwrap();
    Ok(GammaPoly {
        family,
        a,
        big_m,
        k,
        poly,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn case14_at_first_level_root() {
        // gamma = a/M kills a_1 and hence a_2, but not a_3.
        let (a, m) = (1.7, 3u32);
        let g = a / f64::from(m);
        let s = coeffs_case14(a, m, g, 6).unwrap();
        assert!(s.coeffs[1].abs() < 1e-16);
        assert!(s.coeffs[2].abs() < 1e-16);
        assert_relative_eq!(s.coeffs[3], -g / (3.0 * (2.0 + 3.0)), max_relative = 1e-14);
        let a4 = (a - g * (3.0 + 6.0)) * g / (4.0 * 6.0 * 3.0 * 5.0);
        assert_relative_eq!(s.coeffs[4], a4, max_relative = 1e-13);
    }

    #[test]
    fn case14_at_second_level_root() {
        let (a, m) = (0.8, 1u32);
        let g = a / 3.0;
        let s = coeffs_case14(a, m, g, 5).unwrap();
        assert!(s.coeffs[2].abs() < 1e-16);
        assert_relative_eq!(s.coeffs[1], -(a - g) / 1.0, max_relative = 1e-15);
        assert_relative_eq!(s.coeffs[3], -a / (3.0 * 3.0 * 1.0), max_relative = 1e-14);
    }

    #[test]
    fn case14_unit_values() {
        // a = M = gamma = 1: a_1 = a_2 = 0, a_3 = -1/9, a_4 = -a_3 (1 - 7)/(4*4) = -1/24.
        let s = coeffs_case14(1.0, 1, 1.0, 4).unwrap();
        assert_eq!(s.coeffs[1], 0.0);
        assert_eq!(s.coeffs[2], 0.0);
        assert_relative_eq!(s.coeffs[3], -1.0 / 9.0, max_relative = 1e-15);
        assert_relative_eq!(s.coeffs[4], -1.0 / 24.0, max_relative = 1e-15);
    }

    #[test]
    fn case25_unit_values() {
        let s = coeffs_case25(1.0, 1, 3).unwrap();
        assert_eq!(s.coeffs[1], -1.0);
        assert_eq!(s.coeffs[2], 0.25);
        assert_relative_eq!(s.coeffs[3], -5.0 / 36.0, max_relative = 1e-15);
    }

    #[test]
    fn case25_zero_coulomb_is_landau_ground() {
        let s = coeffs_case25(0.0, 5, 20).unwrap();
        assert_eq!(s.coeffs[0], 1.0);
        assert!(s.coeffs[1..].iter().all(|&c| c == 0.0));
    }

    #[test]
    fn case36_terminating_series() {
        let s = coeffs_case36(1.0, 1, 1.0, 40).unwrap();
        assert_eq!(s.coeffs[0], 1.0);
        assert_eq!(s.coeffs[1], -1.0);
        assert!(s.coeffs[2..].iter().all(|&c| c == 0.0));
    }

    #[test]
    fn case36_level_roots_zero_their_coefficient() {
        let (a, m) = (1.3, 3u32);
        let mf = 3.0;
        let g2 = a * a / mf;
        assert!(coeffs_case36(a, m, g2, 2).unwrap().coeffs[2].abs() < 1e-15);
        let g3 = (2.0 * (mf + 1.0) + a * a) / (3.0 * mf + 2.0);
        assert!(coeffs_case36(a, m, g3, 3).unwrap().coeffs[3].abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(coeffs_case14(1.0, 2, 1.0, 5).is_err());
        assert!(coeffs_case14(1.0, 1, 0.0, 5).is_err());
        assert!(coeffs_case36(-1.0, 1, 1.0, 5).is_err());
        assert!(coeffs_case25(1.0, 1, N_CAP + 1).is_err());
        assert!(coeffs(SeriesFamily::Case25, 1.0, 1, Some(1.0), 3).is_err());
        assert!(gamma_polynomial(SeriesFamily::Case25, 1.0, 1, 3).is_err());
        assert!(gamma_polynomial(SeriesFamily::Case36, 1.0, 1, 1).is_err());
        assert!(gamma_polynomial(SeriesFamily::Case14, 1.0, 1, 0).is_err());
    }

    #[test]
    fn cubic_for_unit_parameters() {
        // (1-5g)(1-3g)(1-g) + 4 = -(15g^3 - 23g^2 + 9g - 5), over 36.
        let p = gamma_polynomial(SeriesFamily::Case14, 1.0, 1, 3).unwrap();
        let want = [-5.0, 9.0, -23.0, 15.0];
        for (c, w) in p.poly.coeffs().iter().zip(want) {
            assert_relative_eq!(*c, w / 36.0, max_relative = 1e-15);
        }
    }

    #[test]
    fn case36_linear_level() {
        let (a, m) = (0.7, 5u32);
        let p = gamma_polynomial(SeriesFamily::Case36, a, m, 2).unwrap();
        assert_eq!(p.degree(), 1);
        // a_2 = (a^2 - M gamma) / (2 M (M+1))
        assert_relative_eq!(p.poly.coeff(0), a * a / 60.0, max_relative = 1e-15);
        assert_relative_eq!(p.poly.coeff(1), -5.0 / 60.0, max_relative = 1e-15);
    }

    #[test]
    fn recursion_defect_is_rounding_level() {
        for fam in [SeriesFamily::Case14, SeriesFamily::Case25, SeriesFamily::Case36] {
            let g = (fam != SeriesFamily::Case25).then_some(0.9);
            let s = coeffs(fam, 1.4, 3, g, 80).unwrap();
            for n in 1..=80 {
                assert!(s.recursion_defect(n) < 1e-13, "{fam:?} n={n}");
            }
        }
    }

    #[test]
    fn scaled_series_agrees_with_unscaled() {
        let raw = coeffs_case14(0.9, 3, 0.4, 60).unwrap();
        let scaled = coeffs_scaled(SeriesFamily::Case14, 0.9, 3, Some(0.4), 60, 7.5).unwrap();
        for n in [1, 5, 30, 60] {
            assert_relative_eq!(scaled.coeff(n), raw.coeffs[n], max_relative = 1e-12);
            assert!(scaled.recursion_defect(n) < 1e-13);
        }
        let (v, d, dd) = raw.eval_derivs(2.3);
        let (vs, ds, dds) = scaled.eval_derivs(2.3);
        assert_relative_eq!(v, vs, max_relative = 1e-13);
        assert_relative_eq!(d, ds, max_relative = 1e-13);
        assert_relative_eq!(dd, dds, max_relative = 1e-13);
    }

    #[test]
    fn tail_estimate_terminating_is_zero() {
        let s = coeffs_case36(1.0, 1, 1.0, 3).unwrap();
        assert_eq!(s.tail_estimate(5.0), 0.0);
    }

    #[test]
    fn derivatives_of_series() {
        let s = coeffs_case36(1.0, 1, 1.0, 5).unwrap();
        assert_eq!(s.eval_derivs(2.0), (-1.0, -1.0, 0.0));
        let s = coeffs_case25(1.0, 1, 3).unwrap();
        let (v, d, dd) = s.eval_derivs(1.0);
        assert_relative_eq!(v, 1.0 - 1.0 + 0.25 - 5.0 / 36.0, max_relative = 1e-15);
        assert_relative_eq!(d, -1.0 + 0.5 - 15.0 / 36.0, max_relative = 1e-15);
        assert_relative_eq!(dd, 0.5 - 30.0 / 36.0, max_relative = 1e-15);
    }
}
