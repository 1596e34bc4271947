//! Adaptive Gauss-Legendre quadrature on a finite interval.

use std::sync::OnceLock;

const ORDER: usize = 15;
const MAX_DEPTH: usize = 40;
const INITIAL_PANELS: usize = 32;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        // Tricomi's initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pn1 = if n == 0 { 0.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(ORDER))
}

fn panel<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let (x, w) = rule();
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let mut s = 0.0;
    let mut s_abs = 0.0;
    for (xi, wi) in x.iter().zip(w) {
        let v = f(mid + half * xi);
        s += wi * v;
        s_abs += wi * v.abs();
    }
    (s * half, s_abs * half)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Sum of the panel-refinement differences.
    pub error_estimate: f64,
    pub panels: usize,
}

/// Integrate `f` over `[lo, hi]` until every panel agrees with its two halves to
/// `rel_tol` times the integral of `|f|`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64) -> QuadResult {
    if hi <= lo {
        return QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            panels: 0,
        };
    }
    let width = (hi - lo) / INITIAL_PANELS as f64;
    let mut stack: Vec<(f64, f64, f64, usize)> = Vec::with_capacity(INITIAL_PANELS);
    let mut scale = 0.0;
    for i in 0..INITIAL_PANELS {
        let a = lo + i as f64 * width;
        let b = if i + 1 == INITIAL_PANELS { hi } else { a + width };
        let (v, va) = panel(&f, a, b);
        scale += va;
        stack.push((a, b, v, 0));
    }
    let budget = rel_tol * scale.max(f64::MIN_POSITIVE);
    let total = hi - lo;
    let mut value = 0.0;
    let mut err = 0.0;
    let mut panels = 0;
    while let Some((a, b, whole, depth)) = stack.pop() {
        let mid = 0.5 * (a + b);
        let (left, _) = panel(&f, a, mid);
        let (right, _) = panel(&f, mid, b);
        let diff = (left + right - whole).abs();
        if diff <= budget * (b - a) / total || depth >= MAX_DEPTH {
            value += left + right;
            err += diff;
            panels += 2;
        } else {
            stack.push((a, mid, left, depth + 1));
            stack.push((mid, b, right, depth + 1));
        }
    }
    QuadResult {
        value,
        error_estimate: err,
        panels,
    }
}
