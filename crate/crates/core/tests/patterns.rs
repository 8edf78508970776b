use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng as _;

use sosx::graphs::{gen_planted_is_expander_with, gen_random_regular, spectral_stats, PlantedParams};
use sosx::patterns::*;
use sosx::polyapprox::UniPoly;
use sosx::pseudodist::PseudoDistribution;
use sosx::rng::{rng, Rng};
use sosx::Graph;

fn random_graph(n: usize, p: f64, r: &mut Rng) -> Graph {
    let edges: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|_| r.random_bool(p)).collect::<Vec<_>>();
    Graph::new(n, edges).unwrap()
}

fn maximal_is(g: &Graph, r: &mut Rng) -> Vec<u8> {
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.shuffle(r);
    let mut x = vec![0u8; g.n()];
    for u in order {
        if g.neighbors(u).iter().all(|&v| x[v as usize] == 0) {
            x[u] = 1;
        }
    }
    x
}

/// Proper 3-coloring with symbols 1..=3, by backtracking; `None` if there
/// is none.
fn three_coloring(g: &Graph) -> Option<Vec<u8>> {
    fn go(g: &Graph, u: usize, c: &mut Vec<u8>) -> bool {
        if u == g.n() {
            return true;
        }
        for s in 1..=3 {
            if g.neighbors(u).iter().all(|&v| c[v as usize] != s) {
                c[u] = s;
                if go(g, u + 1, c) {
                    return true;
                }
            }
        }
        c[u] = 0;
        false
    }
    let mut c = vec![0; g.n()];
    go(g, 0, &mut c).then_some(c)
}

fn permuted(x: &[u8], p: usize) -> Vec<u8> {
    x.iter().map(|&s| PERMUTATIONS[p][s as usize]).collect()
}

#[test]
fn single_copy_weights() {
    let g = Graph::cycle(6);
    let x = [1u8, 0, 1, 0, 0, 0];
    let pw = pattern_weights_from_assignments(&g, &[&x], Alphabet::Boolean).unwrap();
    assert_eq!(pw.wt, vec![4.0 / 6.0, 2.0 / 6.0]);
    // four of the six edges touch the set, counted from both ends
    assert!((pw.e(0, 1) - 4.0 / 12.0).abs() < 1e-15);
    assert_eq!(pw.e(1, 1), 0.0);
    assert_eq!(pw.identity_residuals(), (0.0, 0.0, 0.0));

    let ones = vec![1u8; 5];
    let pw = pattern_weights_from_assignments(&Graph::empty(5), &[&ones], Alphabet::Boolean).unwrap();
    assert_eq!(pw.wt, vec![0.0, 1.0]);
}

#[test]
fn four_cycle_two_copies() {
    let g = Graph::cycle(4);
    let x = [1u8, 0, 1, 0];
    let pw = pattern_weights_from_assignments(&g, &[&x, &x], Alphabet::Boolean).unwrap();
    assert_eq!(pw.wt_query("11").unwrap(), 0.5);
    assert_eq!(pw.wt_query("00").unwrap(), 0.5);
    assert_eq!(pw.wt_query("1*").unwrap(), 0.5);
    assert_eq!(pw.e(3, 0), 0.5);
    assert_eq!(pw.e_sets(&[0, 3], &[0, 3]), 1.0);
    assert_eq!(pw.overlapping_edge_mass(), 0.0);
    assert_eq!(spectral_gap_slack(&pw, 0.0).unwrap(), 0.0);
    assert!(pw.wt_query("1").is_err());
}

#[test]
fn mean_gap_identity_is_exact() {
    let mut r = rng(11);
    for _ in 0..1000 {
        let n = r.random_range(1..60);
        let x: Vec<u8> = (0..n).map(|_| r.random_range(0..2)).collect();
        let y: Vec<u8> = (0..n).map(|_| r.random_range(0..2)).collect();
        let eps = r.random_range(0.0..0.5);
        assert!(mean_gap_identity_residual(&x, &y, eps).unwrap().abs() <= 1e-12);
    }
    assert!(mean_gap_identity_residual(&[1], &[1, 0], 0.1).is_err());
}

#[test]
fn product_weights_match_assignments_on_point_masses() {
    let mut r = rng(5);
    for _ in 0..20 {
        let g = random_graph(12, 0.3, &mut r);
        let xs: Vec<Vec<u8>> = (0..3).map(|_| maximal_is(&g, &mut r)).collect();
        let refs: Vec<&[u8]> = xs.iter().map(Vec::as_slice).collect();
        let a = pattern_weights_from_assignments(&g, &refs, Alphabet::Boolean).unwrap();
        let ints: Vec<Integral> = xs.iter().map(|x| Integral { x, alphabet: Alphabet::Boolean }).collect();
        let copies: Vec<&dyn LocalMoments> = ints.iter().map(|i| i as &dyn LocalMoments).collect();
        let b = pattern_weights_from_product(&g, &copies).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.overlapping_edge_mass(), 0.0, "independent sets share no edge");
    }
}

#[test]
fn product_weight_of_ones_is_mean_square() {
    let g = Graph::cycle(5);
    let m = [0.1, 0.4, 0.5, 0.9, 0.0];
    let marg: Vec<Vec<f64>> = m.iter().map(|&p| vec![1.0 - p, p]).collect();
    let pd = PseudoDistribution::product_of_marginals(&marg, Alphabet::Boolean, 2).unwrap();
    let pw = pattern_weights_from_product(&g, &[&pd, &pd]).unwrap();
    let expect = m.iter().map(|p| p * p).sum::<f64>() / 5.0;
    assert!((pw.wt[3] - expect).abs() < 1e-12);
    let (simplex, edges, rows) = pw.identity_residuals();
    assert!(simplex < 1e-12 && edges < 1e-12 && rows < 1e-12);
}

#[test]
fn gadget_all_ones_touches_only_zero() {
    for t in 1..=6 {
        let h = GadgetGraph::new(t).unwrap();
        let ones = (1u32 << t) - 1;
        let nbrs: Vec<u32> = (0..1u32 << t).filter(|&b| h.has_edge(ones, b)).collect();
        assert_eq!(nbrs, vec![0]);
        // 3^t ordered disjoint pairs, the loop at 0 counted once
        assert_eq!(h.edges.len(), 3usize.pow(t as u32).div_ceil(2));
    }
}

#[test]
fn derived_family_counts() {
    for t in 2..=6 {
        let fam = derived_is_families(t).unwrap();
        // t subcubes plus one set per (U, i in U) with |U| >= 2
        let derived: usize = (2..=t).map(|k| k * binom(t, k)).sum();
        assert_eq!(fam.len(), t + derived);
    }
    assert!(derived_is_families(1).is_err());
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn agreement_examples() {
    let x = [1u8, 2, 3, 1];
    let y = [2u8, 3, 1, 0];
    assert_eq!(agreement(&x, &y, 1).unwrap(), 0.75);
    assert_eq!(agreement(&x, &y, 0).unwrap(), 0.0);
    assert_eq!(agreement_max(&x, &y).unwrap(), 0.75);
    assert_eq!(agreement(&x, &x, 0).unwrap(), 1.0);
    let z = [0u8, 1, 2, 3];
    assert_eq!(agreement(&z, &z, 0).unwrap(), 0.75);
    assert!(agreement(&x, &y, 6).is_err());
    // identity, plus the transposition fixing each vertex's color
    assert_eq!(agreement_ell(&x, &x, 2).unwrap(), 1.0 + 0.25 + 0.0625 + 0.0625);
}

#[test]
fn collision_probability_extremes() {
    let x = [1u8, 2, 3, 1];
    let c = collision_probability(&Integral { x: &x, alphabet: Alphabet::Coloring }).unwrap();
    assert_eq!(c, 1.0);
    let bot = [0u8; 4];
    assert_eq!(collision_probability(&Integral { x: &bot, alphabet: Alphabet::Coloring }).unwrap(), 0.0);
    let uniform =
        PseudoDistribution::from_support(4, Alphabet::Coloring, vec![vec![1; 4], vec![2; 4], vec![3; 4]], vec![1.0; 3])
            .unwrap();
    assert!((collision_probability(&uniform).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    assert!(collision_probability(&Integral { x: &x, alphabet: Alphabet::Boolean }).is_err());
    assert_eq!(clamp_simplex(&[-0.5, 1.0, 1.0]), vec![0.0, 0.5, 0.5]);
}

#[test]
fn coloring_partitions_on_three_colorable_graphs() {
    let mut r = rng(8);
    let mut checked = 0;
    while checked < 30 {
        let g = random_graph(12, 0.25, &mut r);
        let Some(c) = three_coloring(&g) else { continue };
        let other = permuted(&c, r.random_range(0..6));
        let pw = pattern_weights_from_assignments(&g, &[&c, &other], Alphabet::Coloring).unwrap();
        let (even, odd, excess) = permutation_partition_residuals(&pw).unwrap();
        assert!(even.abs() < 1e-9 && odd.abs() < 1e-9);
        if g.m() > 0 {
            assert!(excess <= 1e-9, "{excess}");
        }
        let (simplex, edges, _) = pw.identity_residuals();
        assert!(simplex < 1e-9 && edges < 1e-9);
        checked += 1;
    }
}

#[test]
fn spectral_slack_on_regular_graphs() {
    let mut r = rng(21);
    for seed in 0..10 {
        let g = gen_random_regular(16, 3 + seed as usize % 4, seed).unwrap();
        let lambda2 = spectral_stats(&g).unwrap().lambda2;
        for _ in 0..100 {
            let (x, y) = (maximal_is(&g, &mut r), maximal_is(&g, &mut r));
            let pw = pattern_weights_from_assignments(&g, &[&x, &y], Alphabet::Boolean).unwrap();
            assert!(spectral_gap_slack(&pw, lambda2).unwrap() >= -1e-9);
            assert!(pw.identity_residuals().2 < 1e-12);
        }
    }
}

#[test]
fn clustering_examples() {
    let rep = verify_clustering_is(&Graph::cycle(8), 0.0, 40.0).unwrap();
    assert_eq!(rep.worst_intersection, Some(0.5));
    assert_eq!(rep.sets, 2);
    assert!(!rep.counterexample());

    let mut params = PlantedParams::new(20, 0.05, 4, 3);
    params.lambda2_bound = None;
    let p = gen_planted_is_expander_with(&params).unwrap();
    let rep = verify_clustering_is(&p.graph().unwrap(), 0.05, 40.0).unwrap();
    assert!(rep.sets >= 1);
    assert!(!rep.counterexample());

    let rep = verify_clustering_coloring(&Graph::complete(3), 0.0).unwrap();
    assert_eq!(rep.colorings, 1);
    assert_eq!(rep.worst_agreement, Some(1.0));
    assert!(!rep.counterexample());

    let prism = Graph::cartesian(&Graph::complete(3), &Graph::complete(2));
    let rep = verify_clustering_coloring(&prism, 0.1).unwrap();
    assert!(rep.colorings >= 1);
    assert!(!rep.counterexample());
}

#[test]
fn packing_on_a_copied_independent_set() {
    let g = Graph::cycle(8);
    let x: Vec<u8> = (0..8).map(|u| (u % 2 == 0) as u8).collect();
    let pd = PseudoDistribution::from_support(8, Alphabet::Boolean, vec![x], vec![1.0]).unwrap();
    let p = UniPoly::monomial(vec![0.0, 0.0, 1.0]);
    for t in 1..=3 {
        let rep = packing_certificate_value(&pd, &g, &p, t, 0.0, 0.0, 4).unwrap();
        // every copy agrees, so wt(1⃗) is the set density 1/2
        assert!((rep.case2_value - (0.25 - 1.5)).abs() < 1e-12);
        assert!(rep.rhs <= -0.25);
        assert_eq!(rep.w0_violations, 0);
        assert!(rep.w0_checks > 0);
        assert!(rep.dichotomy_holds(0.0));
    }
    assert!(packing_certificate_value(&pd, &g, &p, 4, 0.0, 0.0, 4).is_err());
}

#[test]
fn packing_table_matches_support() {
    // uniform bits, as a moment table and as an explicit support
    let n = 4;
    let g = Graph::cycle(n);
    let table = PseudoDistribution::product_of_marginals(&vec![vec![0.5, 0.5]; n], Alphabet::Boolean, 2).unwrap();
    let all: Vec<Vec<u8>> = (0..1u32 << n).map(|b| (0..n).map(|u| (b >> u & 1) as u8).collect()).collect();
    let support = PseudoDistribution::from_support(n, Alphabet::Boolean, all, vec![1.0; 1 << n]).unwrap();
    let p = UniPoly::monomial(vec![0.0, 1.0, 1.0]);
    for t in 1..=2 {
        let a = packing_certificate_value(&table, &g, &p, t, 0.0, 0.0, 1).unwrap();
        let b = packing_certificate_value(&support, &g, &p, t, 0.0, 0.0, 1).unwrap();
        assert!((a.case2_value - b.case2_value).abs() < 1e-12, "t = {t}");
        assert!((a.case1_value - b.case1_value).abs() < 1e-12);
    }
    // t = 1: E[wt] = 1/2 and E[wt²] = 1/4 + 1/(4n), so q has mean 1/4 + 1/16 - 1
    let a = packing_certificate_value(&table, &g, &p, 1, 0.0, 0.0, 1).unwrap();
    assert!((a.case2_value - (0.25 + 1.0 / 16.0 - 1.0)).abs() < 1e-12);
    let cubic = UniPoly::monomial(vec![0.0, 0.0, 0.0, 1.0]);
    assert!(packing_certificate_value(&table, &g, &cubic, 1, 0.0, 0.0, 1).is_err());
}

#[test]
fn linear_packing_bound_on_integral_tuples() {
    let mut r = rng(2);
    for _ in 0..50 {
        let g = random_graph(14, 0.3, &mut r);
        let t = r.random_range(2..=4);
        let xs: Vec<Vec<u8>> = (0..t).map(|_| maximal_is(&g, &mut r)).collect();
        let refs: Vec<&[u8]> = xs.iter().map(Vec::as_slice).collect();
        let pw = pattern_weights_from_assignments(&g, &refs, Alphabet::Boolean).unwrap();
        let (eps, eta) = hypothesis_parameters(&pw).unwrap();
        let rep = check_w0_leq_w1(&pw, eps, eta).unwrap();
        assert!(rep.hypotheses_hold);
        assert!(rep.slack >= -1e-12, "{rep:?}");
    }
}

fn graph_and_sets(t: usize) -> impl Strategy<Value = (Graph, Vec<Vec<u8>>)> {
    (4usize..16, 0.1f64..0.6, any::<u64>()).prop_map(move |(n, p, seed)| {
        let mut r = rng(seed);
        let g = random_graph(n, p, &mut r);
        let xs = (0..t).map(|_| maximal_is(&g, &mut r)).collect();
        (g, xs)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derived_sets_lift_to_independent_sets((g, xs) in graph_and_sets(3)) {
        let refs: Vec<&[u8]> = xs.iter().map(Vec::as_slice).collect();
        for fam in derived_is_families(3).unwrap() {
            prop_assert!(g.is_independent(&lift(&refs, &fam.members)));
        }
    }

    #[test]
    fn weights_form_distributions((g, xs) in graph_and_sets(2)) {
        let refs: Vec<&[u8]> = xs.iter().map(Vec::as_slice).collect();
        let pw = pattern_weights_from_assignments(&g, &refs, Alphabet::Boolean).unwrap();
        let (simplex, edges, _) = pw.identity_residuals();
        prop_assert!(simplex < 1e-12 && edges < 1e-12);
        prop_assert!(pw.wt.iter().chain(&pw.e).all(|&v| v >= 0.0));
        prop_assert_eq!(pw.overlapping_edge_mass(), 0.0);
    }

    #[test]
    fn agreement_sums_are_bounded(
        pair in (1usize..40).prop_flat_map(|n| (prop::collection::vec(0u8..4, n), prop::collection::vec(0u8..4, n))),
        ell in 1u32..6,
    ) {
        let (x, y) = pair;
        // each vertex with two colors agrees under exactly two permutations
        let s = agreement_ell(&x, &y, ell).unwrap();
        prop_assert!(s <= 2.0 + 1e-12);
        let s1 = agreement_ell(&x, &y, 1).unwrap();
        let colored = x.iter().zip(&y).filter(|(&a, &b)| a != 0 && b != 0).count() as f64 / x.len() as f64;
        prop_assert!((s1 - 2.0 * colored).abs() < 1e-12);
    }
}
