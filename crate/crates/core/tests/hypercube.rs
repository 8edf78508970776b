use proptest::prelude::*;
use sosx::exec::Exec;
use sosx::hypercube::*;

// Exhaustive minima recomputed by a direct Python enumeration of every
// subset of {0,1}^n and frozen here.
const VERTEX_BOUNDARY_MIN: [f64; 4] = [2.0, 1.885618083164127, 1.979486637221574, 32.0 / 15.0];

#[test]
fn exhaustive_constants_are_frozen() {
    for n in 1..=4 {
        let s = min_talagrand_constant(n, ScanMode::Exhaustive, Exec::Auto).unwrap();
        assert_eq!(s.functions, (1usize << (1 << n)) - 2);
        assert!((s.min_talagrand - 4.0).abs() < 1e-12, "n = {n}");
        assert!((s.min_vertex_boundary - VERTEX_BOUNDARY_MIN[n - 1]).abs() < 1e-12, "n = {n}");
        assert!(s.min_chain_slack >= 0.0);
    }
    let c = pinned_boundary_constant(Exec::Sequential).unwrap();
    assert!((c - 4.0 * 2f64.sqrt() / 3.0).abs() < 1e-12);
}

#[test]
fn exhaustive_scan_rejects_large_n() {
    assert!(min_talagrand_constant(5, ScanMode::Exhaustive, Exec::Auto).is_err());
    let s = min_talagrand_constant(5, ScanMode::Sampled { samples: 2000, seed: 3 }, Exec::Auto).unwrap();
    assert!(s.min_talagrand >= 4.0 - 1e-12);
}

#[test]
fn scan_modes_agree() {
    let a = min_talagrand_constant(3, ScanMode::Exhaustive, Exec::Sequential).unwrap();
    let b = min_talagrand_constant(3, ScanMode::Exhaustive, Exec::Parallel).unwrap();
    assert_eq!(a, b);
}

#[test]
fn boundary_identity_and_constraints_exhaustive() {
    for n in 1..=4usize {
        for bits in 0..1u64 << (1 << n) {
            let f = BooleanFunction::from_bits(n, bits).unwrap();
            assert!(boundary_identity_holds(&f));
            let g = f.outer_boundary();
            for x in 0..1usize << n {
                assert!(!g.at(x) || !f.at(x));
                for i in 0..n {
                    assert!(g.at(x) as i8 >= f.at(x ^ (1 << i)) as i8 - f.at(x) as i8);
                }
            }
        }
    }
}

#[test]
fn outer_boundary_examples() {
    let point = BooleanFunction::from_fn(5, |x| x == 0).unwrap();
    assert_eq!(point.outer_boundary().table().iter().filter(|&&b| b).count(), 5);
    let all = BooleanFunction::from_fn(5, |_| true).unwrap();
    assert!(all.outer_boundary().table().iter().all(|&b| !b));
}

#[test]
fn sensitivity_examples() {
    let f = BooleanFunction::dictator(4, 1).unwrap();
    assert!(f.partial_derivative(1).unwrap().iter().all(|&d| d == -1));
    assert!((0..16).all(|x| f.sensitivity(x) == 1));
    let p = BooleanFunction::parity(5).unwrap();
    assert!((0..32).all(|x| p.sensitivity(x) == 5));
    let c = BooleanFunction::from_fn(3, |_| true).unwrap();
    assert!((0..8).all(|x| c.sensitivity(x) == 0));
}

#[test]
fn restrictions() {
    let f = BooleanFunction::parity(4).unwrap();
    assert_eq!(f.restrict(0b1111, 0), f);
    let r = f.restrict(0, 0b0111);
    assert_eq!(r.n(), 0);
    assert_eq!(r.table(), &[true]);
    let rep = restriction_w1_check(&f, 4, 4000, 9).unwrap();
    assert!((rep.band_weight - 0.25).abs() < 1e-12);
    assert!(rep.mean_restricted_w1 > 0.0);
    assert!(restriction_w1_check(&f, 1, 10, 0).is_err());
}

#[test]
fn certificate_for_acceptance_dimensions() {
    let c = pinned_boundary_constant(Exec::Auto).unwrap();
    for n in [64, 256, 1024, 4096] {
        let r = noisy_hypercube_certificate(n, c).unwrap();
        assert!(r.holds, "n = {n}: {r:?}");
        assert!(r.min_ratio >= 3.0 && r.max_ratio <= 4.0 && r.max_intermediate <= 0.125);
        let cert = r.certificate.unwrap();
        let back = CertifiedSsve::from_json(&cert.to_json().unwrap()).unwrap();
        assert_eq!(back, cert);
        assert_eq!(cert.p.eval(0.0), 0.0);
    }
    // the n = 3 constant also certifies n = 256
    assert!(noisy_hypercube_certificate(256, 1.979486637221574).unwrap().holds);
}

#[test]
fn certificate_reports_upper_chain_failure() {
    // the rounding of ell pushes (1 + c/8)^ell above 4 here
    let r = noisy_hypercube_certificate(64, 32.0 / 15.0).unwrap();
    assert!(!r.holds);
    assert!(r.certificate.is_none());
    assert!(r.first_failure.is_some());
}

#[test]
fn tampered_certificate_rejected() {
    let c = pinned_boundary_constant(Exec::Auto).unwrap();
    let cert = noisy_hypercube_certificate(256, c).unwrap().certificate.unwrap();
    let mut bad = cert.clone();
    if let CertPoly::IterationPlan { ell, .. } = &mut bad.p {
        *ell = 2;
    }
    assert!(CertifiedSsve::from_json(&bad.to_json().unwrap()).is_err());
    let extra = cert.to_json().unwrap().replacen('{', "{\"extra\": 1,", 1);
    assert!(CertifiedSsve::from_json(&extra).is_err());
}

#[test]
fn profile_is_monotone() {
    let p = expansion_profile(16, 1.5);
    let mut prev = p.eval(0.0);
    for k in 1..=1000 {
        let v = p.eval(k as f64 / 1000.0);
        assert!(v >= prev);
        prev = v;
    }
    let e = iterate_profile_expanded(16, 1.5, 3).unwrap();
    let it = iterate_profile(16, 1.5, 3);
    for k in 0..=50 {
        let x = k as f64 / 50.0;
        assert!((e.eval(x) - it.eval(x)).abs() < 1e-13);
    }
    assert!(iterate_profile_expanded(16, 1.5, 9).is_err());
}

fn table(n: usize) -> impl Strategy<Value = BooleanFunction> {
    proptest::collection::vec(any::<bool>(), 1 << n).prop_map(move |t| BooleanFunction::new(n, t).unwrap())
}

proptest! {
    #[test]
    fn parseval_and_fourier_identities(f in (1usize..=10).prop_flat_map(table)) {
        let w = f.fourier_weights();
        prop_assert!((w.iter().sum::<f64>() - f.mean()).abs() < 1e-10);
        let (a, b) = fourier_identity_residuals(&f);
        prop_assert!(a.abs() < 1e-10 && b.abs() < 1e-10);
    }

    #[test]
    fn gradient_chain(f in (1usize..=8).prop_flat_map(table)) {
        let w1 = f.fourier_weights()[1];
        let g = f.mean_gradient_norm();
        prop_assert!(g + 1e-12 >= 2.0 * w1.sqrt());
        prop_assert!(g + 1e-12 >= 2.0 * w1);
    }

    #[test]
    fn weak_isoperimetry(f in (1usize..=4).prop_flat_map(table)) {
        let m = f.mean();
        let g = f.outer_boundary().mean();
        let c = 4.0 * 2f64.sqrt() / 3.0;
        prop_assert!(g + 1e-12 >= c / (f.n() as f64).sqrt() * m * (1.0 - m));
    }
}
