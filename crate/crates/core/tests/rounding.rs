use proptest::prelude::*;

use sosx::graphs::exact_max_independent_set;
use sosx::hypercube::noisy_hypercube_certificate;
use sosx::patterns::Alphabet;
use sosx::pseudodist::PseudoDistribution;
use sosx::rng::rng;
use sosx::rounding::*;
use sosx::Graph;

fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut r = rng(seed);
    let edges: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|_| r.random_bool(p)).collect::<Vec<_>>();
    Graph::new(n, edges).unwrap()
}

fn certificate() -> sosx::hypercube::CertifiedSsve {
    noisy_hypercube_certificate(64, 4.0 * 2f64.sqrt() / 3.0).unwrap().certificate.unwrap()
}

#[test]
fn expander_rounding_on_the_four_cycle() {
    let rep = round_expander_is(&Graph::cycle(4), 0.0, &ExpanderIsParams::default()).unwrap();
    assert_eq!(rep.repaired_size, 2);
    assert!(Graph::cycle(4).is_independent(&rep.repaired_set));
    assert_eq!(rep.algorithm, "expander_is");
}

#[test]
fn kms_on_a_complete_bipartite_graph() {
    let g = Graph::complete_multipartite(&[5, 5]);
    let rep = kms_round(&g, 0.0, 1, &KmsParams::default()).unwrap();
    assert!(g.is_independent(&rep.repaired_set));
    assert!(rep.repaired_size >= 1);
    assert!(rep.repaired_size <= 5);
}

#[test]
fn coloring_rounding_finds_a_large_class() {
    let g = Graph::complete_multipartite(&[4, 4, 4]);
    let rep = round_3colorable(&g, 0.0, &ColoringParams::default()).unwrap();
    assert!(g.is_independent(&rep.repaired_set));
    assert!(rep.repaired_size >= 1);
}

#[test]
fn ssve_easy_case_keeps_the_heavy_side() {
    // the leaves of a star carry the whole mass
    let g = Graph::new(8, (1..8).map(|v| (0, v))).unwrap();
    let x: Vec<u8> = (0..8).map(|u| (u > 0) as u8).collect();
    let pd = PseudoDistribution::from_support(8, Alphabet::Boolean, vec![x], vec![1.0]).unwrap();
    let cert = certificate();
    let rep = round_ssve_from(&g, &pd, 1.0 / 32.0, Some(&cert), &SsveParams::default()).unwrap();
    assert_eq!(rep.repaired_set, (1..8).collect::<Vec<_>>());
    assert!(rep.transcript.notes.iter().any(|s| s.starts_with("easy case")));
}

#[test]
fn ssve_hard_case_on_the_eight_cycle() {
    let g = Graph::cycle(8);
    let a: Vec<u8> = (0..8).map(|u| (u % 2) as u8).collect();
    let b: Vec<u8> = a.iter().map(|x| 1 - x).collect();
    let pd = PseudoDistribution::from_support(8, Alphabet::Boolean, vec![a, b], vec![0.5, 0.5]).unwrap();
    let cert = certificate();
    let rep = round_ssve_from(&g, &pd, 1.0 / 32.0, Some(&cert), &SsveParams::default()).unwrap();
    assert!(rep.transcript.notes.iter().any(|s| s.starts_with("hard case")));
    assert_eq!(rep.repaired_size, 4);
    assert!(g.is_independent(&rep.repaired_set));
    assert_eq!(rep.potentials["wt_t"], 0.5);
}

#[test]
fn ssve_requires_a_covering_certificate() {
    let cert = certificate();
    assert!(ssve_precondition(None, 1.0 / 32.0).is_err());
    assert!(ssve_precondition(Some(&cert), 1.0 / 32.0).is_ok());
    assert!(ssve_precondition(Some(&cert), 0.5).is_err());
    assert!(ssve_precondition(Some(&cert), 0.0).is_err());
}

#[test]
fn matching_set_meets_its_bound() {
    for seed in 0..100 {
        let g = random_graph(12, 0.2, seed);
        let s = two_approx_vc_is(&g);
        let alpha = exact_max_independent_set(&g).unwrap().size;
        assert!(g.is_independent(&s));
        assert!(s.len() as i64 >= 2 * alpha as i64 - g.n() as i64, "seed {seed}");
    }
}

#[test]
fn ssve_constants_follow_delta() {
    let k = ssve_constants(1.0 / 32.0, &SsveParams::default());
    assert_eq!(k.t_full, 7);
    assert_eq!(k.t, 4);
    assert!((k.beta - 1.0 / 280.0).abs() < 1e-15);
    assert_eq!(k.nu, 0.02);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn repair_keeps_an_independent_subset(
        n in 1usize..20, p in 0.0f64..0.7, seed in any::<u64>(), keep in prop::collection::vec(any::<bool>(), 20),
    ) {
        let g = random_graph(n, p, seed);
        let s: Vec<usize> = (0..n).filter(|&u| keep[u]).collect();
        let r = repair_independent(&g, &s);
        prop_assert!(g.is_independent(&r));
        prop_assert!(r.iter().all(|u| s.contains(u)));
        prop_assert!(r.windows(2).all(|w| w[0] < w[1]));
        // an independent input is returned unchanged
        prop_assert_eq!(repair_independent(&g, &r), r);
    }

    #[test]
    fn threshold_sets_shrink(values in prop::collection::vec(-1.0f64..2.0, 0..30), a in -1.0f64..2.0, b in -1.0f64..2.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let small = threshold_set(&values, hi);
        let large = threshold_set(&values, lo);
        prop_assert!(small.iter().all(|u| large.contains(u)));
        prop_assert!(small.iter().all(|&u| values[u] > hi));
    }
}
