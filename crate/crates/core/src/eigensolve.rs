//! Eigenvalue candidates from `a_k(gamma) = 0`.
//!
//! For a chosen level `k` the coefficient `a_k` of the case 1/4 or case 3/6
//! series is a polynomial in `gamma`. Its real positive roots, minus those that
//! also annihilate an earlier coefficient, are returned as [`Eigenstate`]s.
//! Closed forms for the low levels live in [`closed_form_gamma`] and serve as
//! test oracles only.

use crate::error::{domain, Error, Result};
use crate::roots;
use crate::scaling::{centrifugal_index, energy_shift, CaseId, ShiftSign};
use crate::series::{self, SeriesFamily};

/// Relative size below which an earlier coefficient counts as zero.
pub const TOL_REJECT: f64 = 1e-8;
/// Roots below this are treated as landing on the zero-shift boundary.
pub const BOUNDARY_GAMMA: f64 = 1e-10;
/// Relative gap under which two roots are merged.
pub const DISTINCT_GAP: f64 = 1e-9;
/// Bound on `|a_k(gamma)| / max |poly coeff|` after polishing.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// One admissible root of `a_k(gamma) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenstate {
    pub case: CaseId,
    pub m: i32,
    /// Index of the coefficient forced to zero.
    pub k: usize,
    /// Position among the admissible roots of this level, ascending in gamma.
    pub branch: usize,
    pub gamma: f64,
    pub curly_e: f64,
    /// `|a_k(gamma)| / max |poly coeff|`.
    pub residual: f64,
    /// Degree of the polynomial the root came from.
    pub degree: usize,
}

impl Eigenstate {
    pub fn family(&self) -> SeriesFamily {
        SeriesFamily::of_case(self.case)
    }

    /// Degree five and above has no general solution in radicals.
    pub fn numeric_only(&self) -> bool {
        self.degree >= 5
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rejection {
    NonPositive,
    /// `|gamma|` below [`BOUNDARY_GAMMA`]: the zero-shift (case 2/5) boundary.
    BoundaryHit,
    /// Coefficient `a_j`, `j < k`, also vanishes at this root.
    Annihilates(usize),
    Duplicate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RejectedRoot {
    pub gamma: f64,
    pub reason: Rejection,
}

/// Full outcome of one level solve.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSolution {
    pub family: SeriesFamily,
    pub m: i32,
    pub k: usize,
    pub degree: usize,
    pub states: Vec<Eigenstate>,
    pub rejected: Vec<RejectedRoot>,
    /// Number of non-real roots discarded.
    pub complex_roots: usize,
}

/// Shifted-energy-to-energy map for each case.
pub fn energy_from_gamma(case: CaseId, m: i32, gamma: Option<f64>) -> f64 {
    let shift = energy_shift(m);
    match (case.sign, gamma) {
        (ShiftSign::Negative, Some(g)) => shift - g * g,
        (ShiftSign::Positive, Some(g)) => shift + g,
        _ => shift,
    }
}

fn reject_scale(a: f64, big_m: u32, j: usize) -> f64 {
    TOL_REJECT * (1.0 + a / f64::from(big_m)).powi(j as i32)
}

pub fn solve_level_detailed(family: SeriesFamily, a: f64, m: i32, k: usize) -> Result<LevelSolution> {
    if family == SeriesFamily::Case25 {
        return domain("the case 2/5 energy is fixed; there is no level to solve");
    }
    if !(a.is_finite() && a > 0.0) {
        return domain(format!("level solves need a > 0, got {a}"));
    }
    let big_m = centrifugal_index(m);
    let gp = series::gamma_polynomial(family, a, big_m, k)?;
    let poly = &gp.poly;
    let degree = poly.degree();
    let all = roots::all_roots(poly)?;
    let real = roots::real_roots(poly)?;
    let complex_roots = all.len() - real.len();
    let scale = poly.max_abs_coeff();
    let case = family.case_for(m);

    let mut rejected = Vec::new();
    let mut kept: Vec<(f64, f64)> = Vec::new();
    for g in real {
        if g.abs() < BOUNDARY_GAMMA {
            rejected.push(RejectedRoot { gamma: g, reason: Rejection::BoundaryHit });
            continue;
        }
        if g < 0.0 {
            rejected.push(RejectedRoot { gamma: g, reason: Rejection::NonPositive });
            continue;
        }
        if let Some(&(prev, _)) = kept.last() {
            if (g - prev).abs() <= DISTINCT_GAP * g.abs().max(prev.abs()) {
                rejected.push(RejectedRoot { gamma: g, reason: Rejection::Duplicate });
                continue;
            }
        }
        let seq = series::coeffs(family, a, big_m, Some(g), k)?;
        if let Some(j) = (1..k).find(|&j| seq.coeffs[j].abs() < reject_scale(a, big_m, j)) {
            rejected.push(RejectedRoot { gamma: g, reason: Rejection::Annihilates(j) });
            continue;
        }
        let residual = poly.eval(g).abs() / scale;
        if residual >= RESIDUAL_TOL {
            return Err(Error::Numeric(format!(
                "root gamma={g:e} of a_{k} ({}, M={big_m}) polished only to residual {residual:.3e}",
                family.label()
            )));
        }
        kept.push((g, residual));
    }

    let states = kept
        .into_iter()
        .enumerate()
        .map(|(branch, (gamma, residual))| Eigenstate {
            case,
            m,
            k,
            branch,
            gamma,
            curly_e: energy_from_gamma(case, m, Some(gamma)),
            residual,
            degree,
        })
        .collect();
    Ok(LevelSolution {
        family,
        m,
        k,
        degree,
        states,
        rejected,
        complex_roots,
    })
}

/// Admissible eigenstates of level `k`, ascending in gamma. May be empty.
pub fn solve_level(family: SeriesFamily, a: f64, m: i32, k: usize) -> Result<Vec<Eigenstate>> {
    Ok(solve_level_detailed(family, a, m, k)?.states)
}

/// Real roots of `c3 x^3 + c2 x^2 + c1 x + c0`, ascending.
fn cubic_real_roots(c3: f64, c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    let (b, c, d) = (c2 / c3, c1 / c3, c0 / c3);
    // x = t - b/3: t^3 + p t + q = 0
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let shift = -b / 3.0;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let mut out = if disc > 0.0 {
        let s = disc.sqrt();
        vec![(-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt() + shift]
    } else if p == 0.0 {
        vec![shift]
    } else {
        let r = (-p / 3.0).sqrt();
        let phi = (-q / (2.0 * r * r * r)).clamp(-1.0, 1.0).acos();
        (0..3)
            .map(|j| 2.0 * r * ((phi - 2.0 * std::f64::consts::PI * j as f64) / 3.0).cos() + shift)
            .collect()
    };
    out.sort_by(f64::total_cmp);
    out
}

/// Real roots of a quartic `c[0] + c[1] x + ... + c[4] x^4` by Ferrari's method.
fn quartic_real_roots(c: [f64; 5]) -> Vec<f64> {
    let (b, cc, d, e) = (c[3] / c[4], c[2] / c[4], c[1] / c[4], c[0] / c[4]);
    // x = y - b/4: y^4 + p y^2 + q y + r = 0
    let p = cc - 3.0 * b * b / 8.0;
    let q = b * b * b / 8.0 - b * cc / 2.0 + d;
    let r = -3.0 * b.powi(4) / 256.0 + b * b * cc / 16.0 - b * d / 4.0 + e;
    let shift = -b / 4.0;
    let quad = |qa: f64, qb: f64, qc: f64, out: &mut Vec<f64>| {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let s = disc.sqrt();
            out.push((-qb + s) / (2.0 * qa) + shift);
            out.push((-qb - s) / (2.0 * qa) + shift);
        }
    };
    let mut out = Vec::new();
    if q.abs() < 1e-14 * (p.abs() + r.abs() + 1.0) {
        let disc = p * p - 4.0 * r;
        if disc >= 0.0 {
            for y2 in [(-p + disc.sqrt()) / 2.0, (-p - disc.sqrt()) / 2.0] {
                if y2 >= 0.0 {
                    out.push(y2.sqrt() + shift);
                    out.push(-y2.sqrt() + shift);
                }
            }
        }
    } else {
        // Resolvent: 8 z^3 - 4 p z^2 - 8 r z + 4 p r - q^2 = 0, need 2z - p > 0.
        let z = cubic_real_roots(8.0, -4.0 * p, -8.0 * r, 4.0 * p * r - q * q)
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        let s = (2.0 * z - p).sqrt();
        quad(1.0, -s, z + q / (2.0 * s), &mut out);
        quad(1.0, s, z - q / (2.0 * s), &mut out);
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Radical-form `gamma` for the low levels, as an independent oracle.
///
/// * case 1/4: `k = 1, 2` are rational; `k = 3` is the real root of the cubic
///   `(a - g(M+4))(a - g(M+2))(a - g M) + 2(M+1) a` (the largest if there are
///   three); `k = 4` solves the quartic numerator of `a_4` by Ferrari's method
///   and returns its largest admissible real root.
/// * case 3/6: `k = 2, 3` are rational; `k = 4` is the larger root of the
///   quadratic `a_4(gamma)`.
pub fn closed_form_gamma(family: SeriesFamily, a: f64, big_m: u32, k: usize) -> Option<f64> {
    let m = f64::from(big_m);
    match (family, k) {
        (SeriesFamily::Case14, 1) => Some(a / m),
        (SeriesFamily::Case14, 2) => Some(a / (m + 2.0)),
        (SeriesFamily::Case14, 3) => {
            let (p, q, r) = (m, m + 2.0, m + 4.0);
            let roots = cubic_real_roots(
                -p * q * r,
                a * (p * q + q * r + p * r),
                -a * a * (p + q + r),
                a * a * a + 2.0 * (m + 1.0) * a,
            );
            roots.last().copied()
        }
        (SeriesFamily::Case14, 4) => {
            let c = case14_level4_numerator(a, m);
            quartic_real_roots(c)
                .into_iter()
                .filter(|&g| g > 0.0)
                .filter(|&g| {
                    let a1 = -(a - m * g) / m;
                    let a2 = (a - (m + 2.0) * g) * (a - m * g) / (2.0 * (m + 1.0) * m);
                    let a3 = -((a - (m + 4.0) * g) * (a - (m + 2.0) * g) * (a - m * g) + 2.0 * (m + 1.0) * a)
                        / (6.0 * (m + 2.0) * (m + 1.0) * m);
                    [a1, a2, a3]
                        .iter()
                        .enumerate()
                        .all(|(i, v)| v.abs() >= reject_scale(a, big_m, i + 1))
                })
                .fold(None, |acc: Option<f64>, g| Some(acc.map_or(g, |x| x.max(g))))
        }
        (SeriesFamily::Case36, 2) => Some(a * a / m),
        (SeriesFamily::Case36, 3) => Some((2.0 * (m + 1.0) + a * a) / (3.0 * m + 2.0)),
        (SeriesFamily::Case36, 4) => {
            let a2 = a * a;
            let rad = 2.0 * a2 * a2 * (3.0 * m * m + 9.0 * m + 8.0) - 6.0 * a2 * m * (m + 2.0) * (m + 3.0)
                + 9.0 * m * m * (m + 2.0) * (m + 2.0);
            let den = 3.0 * m * (m + 2.0);
            Some(a2 * (3.0 * m + 4.0) / den + 1.0 + rad.sqrt() / den)
        }
        _ => None,
    }
}

/// Monomial coefficients of `24 (M+3)(M+2)(M+1) M a_4(gamma)` for case 1/4,
/// expanded from the products of linear factors in `a_1 .. a_3`.
fn case14_level4_numerator(a: f64, m: f64) -> [f64; 5] {
    // Linear factor (a - c g) as [a, -c].
    let lin = |c: f64| [a, -c];
    let mul = |x: &[f64], y: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; x.len() + y.len() - 1];
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                out[i + j] += xi * yj;
            }
        }
        out
    };
    let p1 = lin(m);
    let p2 = mul(&lin(m + 2.0), &p1);
    let p3 = mul(&lin(m + 4.0), &p2);
    // a_1 = -p1/M, a_2 = p2/(2(M+1)M), a_3 = -(p3 + 2(M+1)a)/(6(M+2)(M+1)M)
    // a_4 = -(a_3 (a - g(M+6)) - 2 a_2 + g a_1) / (4(M+3)); scale by d = 6(M+2)(M+1)M.
    let mut num3 = p3.clone();
    num3[0] += 2.0 * (m + 1.0) * a;
    // -a_3 (a - g(M+6)) * d = num3 * (a - g(M+6))
    let t3 = mul(&num3, &lin(m + 6.0));
    let mut c = [0.0; 5];
    for (j, v) in t3.iter().enumerate() {
        c[j] += v;
    }
    // + 2 a_2 d = 2 d p2 / (2(M+1)M) = 6 (M+2) p2
    for (j, v) in p2.iter().enumerate() {
        c[j] += 6.0 * (m + 2.0) * v;
    }
    // - g a_1 d = g p1 d / M = 6 (M+2)(M+1) g p1
    for (j, v) in p1.iter().enumerate() {
        c[j + 1] += 6.0 * (m + 2.0) * (m + 1.0) * v;
    }
    c
}
