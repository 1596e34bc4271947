use hydromag::eigensolve::{energy_from_gamma, solve_level, solve_level_detailed};
use hydromag::scaling::{classify, nondimensionalize, PhysicalConstants};
use hydromag::series::{coeffs, gamma_polynomial, SeriesFamily};
use hydromag::wavefun::{assemble, StateSpec, TOL_TRUNC};
use proptest::prelude::*;

fn odd_m() -> impl Strategy<Value = u32> {
    (0u32..6).prop_map(|j| 2 * j + 1)
}

fn family() -> impl Strategy<Value = SeriesFamily> {
    prop_oneof![Just(SeriesFamily::Case14), Just(SeriesFamily::Case36)]
}

proptest! {
    #[test]
    fn degree_law(a in 0.05f64..4.0, big_m in odd_m(), k in 2usize..=12) {
        let p14 = gamma_polynomial(SeriesFamily::Case14, a, big_m, k).unwrap();
        prop_assert_eq!(p14.degree(), k);
        let p36 = gamma_polynomial(SeriesFamily::Case36, a, big_m, k).unwrap();
        prop_assert_eq!(p36.degree(), k / 2);
    }

    #[test]
    fn polynomial_matches_recursion(
        f in family(), a in 0.1f64..3.0, big_m in odd_m(), k in 2usize..=10, gamma in 0.01f64..3.0,
    ) {
        let p = gamma_polynomial(f, a, big_m, k).unwrap();
        let direct = coeffs(f, a, big_m, Some(gamma), k).unwrap().coeff(k);
        let scale = p.poly.eval_abs(gamma);
        prop_assert!((p.eval(gamma) - direct).abs() <= 1e-12 * scale, "{} vs {}", p.eval(gamma), direct);
    }

    #[test]
    fn case25_never_vanishes(a in 0.01f64..5.0, big_m in odd_m()) {
        let s = coeffs(SeriesFamily::Case25, a, big_m, None, 30).unwrap();
        for n in 0..=30 {
            prop_assert!(s.coeff(n) != 0.0, "a_{} vanished", n);
        }
    }

    #[test]
    fn energies_classify_back(f in family(), m in -3i32..=3, gamma in 1e-6f64..5.0) {
        let case = f.case_for(m);
        prop_assert_eq!(classify(m, energy_from_gamma(case, m, Some(gamma))), case);
    }

    #[test]
    fn solved_roots_are_admissible(f in family(), a in 0.2f64..2.5, m in -2i32..=2, k in 2usize..=7) {
        let big_m = 2 * m.unsigned_abs() + 1;
        let sol = solve_level_detailed(f, a, m, k).unwrap();
        for s in &sol.states {
            prop_assert!(s.gamma > 0.0);
            let seq = coeffs(f, a, big_m, Some(s.gamma), k).unwrap();
            let p = gamma_polynomial(f, a, big_m, k).unwrap();
            prop_assert!(p.eval(s.gamma).abs() <= 1e-10 * p.poly.max_abs_coeff());
            for j in f.min_level()..k {
                prop_assert!(seq.coeff(j) != 0.0);
            }
        }
    }

    #[test]
    fn gauge_scaling(c in -5.0f64..5.0, x in 0.0f64..8.0) {
        let s = solve_level(SeriesFamily::Case14, 1.3, 1, 3).unwrap().remove(0);
        let r = assemble(&StateSpec::Eigen(s), 1.3, None, TOL_TRUNC).unwrap();
        let v = r.evaluate(x).unwrap();
        let w = r.scaled(c).evaluate(x).unwrap();
        prop_assert!((w - c * v).abs() <= 1e-15 * (c * v).abs().max(1e-300));
    }
}

#[test]
fn doubling_terms_is_invisible() {
    for (f, a, m, k) in [
        (SeriesFamily::Case14, 0.5, 0, 2),
        (SeriesFamily::Case14, 2.0, 2, 3),
        (SeriesFamily::Case36, 1.5, -1, 4),
        (SeriesFamily::Case36, 0.7, 1, 6),
    ] {
        let s = solve_level(f, a, m, k).unwrap().remove(0);
        let r = assemble(&StateSpec::Eigen(s), a, None, TOL_TRUNC).unwrap();
        let long = r.with_terms(2 * r.truncation_n()).unwrap();
        let grid: Vec<f64> = (0..64).map(|i| r.xmax * i as f64 / 63.0).collect();
        let peak = grid.iter().map(|&x| r.evaluate(x).unwrap().abs()).fold(0.0, f64::max);
        for &x in &grid {
            let d = (r.evaluate(x).unwrap() - long.evaluate(x).unwrap()).abs();
            assert!(d < TOL_TRUNC * peak, "x={x} d={d} peak={peak}");
        }
        assert!(r.tail_bound < TOL_TRUNC * peak);
    }
}

#[test]
fn case25_assembly_and_landau_limit() {
    let r = assemble(&StateSpec::Boundary { m: -1 }, 1.0, None, TOL_TRUNC).unwrap();
    assert_eq!(r.evaluate(0.0).unwrap(), 0.0);
    assert!(r.truncation_n() > 10);
    let r = assemble(&StateSpec::Boundary { m: 0 }, 1e-9, None, TOL_TRUNC).unwrap();
    for x in [0.5, 1.0, 3.0] {
        let want = (-x * x / 4.0f64).exp();
        assert!((r.evaluate(x).unwrap() - want).abs() < 1e-7);
    }
}

#[test]
fn landau_length_against_bohr_radius() {
    // Independent route: a = 2 l_B / a_0, l_B = sqrt((hbar/e) / B).
    let hbar_over_e = 6.582_119_569e-16;
    let bohr = 5.291_772_109_03e-11;
    let c = PhysicalConstants::default();
    for b in [0.1, 1.0, 30.0] {
        let p = nondimensionalize(1, b, c.electron_mass, 0, &c).unwrap();
        let want = 2.0 * (hbar_over_e / b).sqrt() / bohr;
        assert!((p.a - want).abs() < 1e-8 * want, "B={b}: {} vs {want}", p.a);
    }
    let p = nondimensionalize(1, 1.0, c.electron_mass, 0, &c).unwrap();
    assert!((p.a - 969.6).abs() < 0.5, "{}", p.a);
    let p2 = nondimensionalize(2, 1.0, c.electron_mass, 0, &c).unwrap();
    assert!((p2.a / p.a - 2.0).abs() < 1e-14);
}
