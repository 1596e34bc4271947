//! All-roots solver for real polynomials (Aberth-Ehrlich simultaneous iteration)
//! and Newton polishing of the real roots.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::Poly;

const MAX_ITER: usize = 600;

fn horner_complex(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn horner_abs(coeffs: &[f64], r: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * r + c.abs())
}

/// Every complex root of `poly`, with multiplicity.
pub fn all_roots(poly: &Poly) -> Result<Vec<Complex64>> {
    let c = poly.coeffs();
    let n = poly.degree();
    if poly.is_zero() {
        return Err(Error::Domain("roots of the zero polynomial are undefined".into()));
    }
    // Factor out roots at the origin.
    let lead_zero = c.iter().take_while(|&&v| v == 0.0).count();
    if lead_zero > 0 {
        let mut roots = vec![Complex64::new(0.0, 0.0); lead_zero];
        roots.extend(all_roots(&Poly::new(c[lead_zero..].to_vec()))?);
        return Ok(roots);
    }
    match n {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![Complex64::new(-c[0] / c[1], 0.0)]),
        _ => {}
    }

    let lead = c[n];
    // Fujiwara bound on the root moduli.
    let bound = (1..=n)
        .map(|j| {
            let r = (c[n - j] / lead).abs();
            let r = if j == n { r / 2.0 } else { r };
            r.powf(1.0 / j as f64)
        })
        .fold(0.0, f64::max)
        * 2.0;
    let center = -c[n - 1] / (n as f64 * lead);
    let radius = (bound * 0.5).max(f64::MIN_POSITIVE.sqrt());
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::new(center, 0.0) + Complex64::from_polar(radius, theta)
        })
        .collect();
    let mut done = vec![false; n];

    for _ in 0..MAX_ITER {
        let mut all_done = true;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (p, dp) = horner_complex(c, z[k]);
            let scale = horner_abs(c, z[k].norm());
            if p.norm() <= 8.0 * f64::EPSILON * scale {
                done[k] = true;
                continue;
            }
            all_done = false;
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                // dp vanished; nudge off the critical point.
                let nudge = 1e-8 * (1.0 + z[k].norm());
                z[k] += Complex64::new(nudge, 1e-8);
                continue;
            }
            z[k] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * (1.0 + z[k].norm()) {
                done[k] = true;
            }
        }
        if all_done {
            return Ok(z);
        }
    }
    let unconverged = done.iter().filter(|d| !**d).count();
    Err(Error::Numeric(format!(
        "Aberth iteration left {unconverged} of {n} roots unconverged after {MAX_ITER} sweeps (degree {n})"
    )))
}

/// Newton iteration on a real polynomial starting from `x0`.
///
/// Returns the polished root and its relative residual `|p(x)| / sum |c_j| |x|^j`.
pub fn newton_polish(poly: &Poly, x0: f64) -> (f64, f64) {
    let mut x = x0;
    let mut best = (x0, rel_residual(poly, x0));
    for _ in 0..60 {
        let (p, dp) = poly.eval_with_derivative(x);
        if dp == 0.0 || p == 0.0 {
            break;
        }
        let step = p / dp;
        x -= step;
        let r = rel_residual(poly, x);
        if r < best.1 {
            best = (x, r);
        }
        if step.abs() <= 2.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    best
}

pub fn rel_residual(poly: &Poly, x: f64) -> f64 {
    let scale = poly.eval_abs(x);
    if scale == 0.0 {
        0.0
    } else {
        poly.eval(x).abs() / scale
    }
}

/// Real roots in ascending order, each polished by Newton on `poly`.
///
/// Complex-conjugate pairs are dropped. A root with a small imaginary part is
/// kept only if Newton on the real axis drives the residual down to rounding
/// level.
pub fn real_roots(poly: &Poly) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for z in all_roots(poly)? {
        if z.im.abs() > 1e-6 * (1.0 + z.re.abs()) {
            continue;
        }
        let (x, r) = newton_polish(poly, z.re);
        if r <= 1e3 * f64::EPSILON || z.im == 0.0 {
            out.push(x);
        }
    }
    out.sort_by(|p, q| p.total_cmp(q));
    Ok(out)
}
