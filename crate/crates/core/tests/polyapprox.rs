use proptest::prelude::*;

use sosx::polyapprox::*;

#[test]
fn bernstein_of_a_square() {
    // B_m(x^2) = x^2 + x (1 - x) / m
    for m in [1usize, 2, 5, 40, 400] {
        let b = UniPoly::bernstein((0..=m).map(|k| (k as f64 / m as f64).powi(2)).collect(), (0.0, 1.0));
        for i in 0..=50 {
            let x = i as f64 / 50.0;
            assert!((b.eval(x) - (x * x + x * (1.0 - x) / m as f64)).abs() < 1e-13, "m = {m}, x = {x}");
        }
    }
}

#[test]
fn chebyshev_and_monomial_forms_agree() {
    let t3 = UniPoly::chebyshev(vec![0.0, 0.0, 0.0, 1.0], (-1.0, 1.0));
    let m3 = UniPoly::monomial(vec![0.0, -3.0, 0.0, 4.0]);
    for i in 0..=40 {
        let x = -1.0 + i as f64 / 20.0;
        assert!((t3.eval(x) - m3.eval(x)).abs() < 1e-14);
    }
    assert_eq!(m3.derivative().coeffs, vec![-3.0, 0.0, 12.0]);
}

#[test]
fn binomials() {
    assert_eq!(choose(10, 3), 120.0);
    assert_eq!(choose(8, 4), 70.0);
    assert_eq!(choose(5, 7), 0.0);
}

#[test]
fn proxy_properties_hold_at_small_sizes() {
    for n in [1, 3, 5] {
        let b = sqrt_proxy(n, 64 * n).unwrap();
        assert!(verify_proxy_properties(&b, n).unwrap().all_hold(), "n = {n}");
    }
    let wrong = UniPoly::monomial(vec![0.0, 1.0]);
    assert!(verify_proxy_properties(&wrong, 2).is_err());
}

#[test]
fn step_shape() {
    let (delta, nu) = (0.1, 0.02);
    let q = step_poly(delta, nu).unwrap();
    assert!(verify_step(&q, delta, nu).ok);
    for i in 0..=800 {
        let x = (delta - nu) * i as f64 / 800.0;
        let v = q.eval(x);
        assert!((-1e-12..=nu + 1e-12).contains(&v), "x = {x}: {v}");
    }
    for i in 0..=900 {
        let x = delta + (1.0 - delta) * i as f64 / 900.0;
        let v = q.eval(x);
        assert!((1.0 - 1e-12..=1.0 + nu + 1e-12).contains(&v), "x = {x}: {v}");
    }
    assert!(step_poly(0.5, 0.6).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn proxy_sits_below_the_square_root(n in 1usize..8, t in 0.0f64..=1.0) {
        let b = sqrt_proxy(n, 64 * n).unwrap();
        let x = t * n as f64;
        prop_assert!(b.eval(x) <= x.sqrt() + 1e-12);
        prop_assert!(b.eval(x) >= b.eval(x * 0.9) - 1e-12);
    }

    #[test]
    fn bernstein_interpolates_endpoints(coeffs in prop::collection::vec(-5.0f64..5.0, 1..30)) {
        let b = UniPoly::bernstein(coeffs.clone(), (0.0, 2.0));
        prop_assert!((b.eval(0.0) - coeffs[0]).abs() < 1e-12);
        prop_assert!((b.eval(2.0) - coeffs[coeffs.len() - 1]).abs() < 1e-12);
    }
}
