//! Acceptance suite: one pass/fail line per criterion at pinned tolerances.
//!
//! Runs without the libtest harness so the summary lines always print.
//! Exits non-zero when any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng as _;

use sosx::exec::Exec;
use sosx::experiment::{run_sweep, write_csv, ExperimentConfig};
use sosx::graphs::{
    exact_max_independent_set, gen_almost_3colorable_expander, gen_planted_is_expander, gen_planted_is_expander_with,
    gen_random_regular, spectral_stats, PlantedParams,
};
use sosx::hypercube::{
    boundary_identity_holds, fourier_identity_residuals, min_talagrand_constant, noisy_hypercube_certificate,
    BooleanFunction, CertifiedSsve, ScanMode,
};
use sosx::patterns::*;
use sosx::polyapprox::{check_condition_on_q, sqrt_proxy, step_poly, verify_step};
use sosx::pseudodist::{build_is_relaxation, pairwise_mutual_information, solve, PseudoDistribution, SolveParams};
use sosx::rng::{rng, Rng};
use sosx::rounding::{
    kms_round, round_expander_is, ssve_precondition, threshold_set, wt11_squared, ExpanderIsParams, KmsParams,
};
use sosx::Graph;

/// Smallest `E||grad f|| / (E f (1 - E f))` over non-constant functions on
/// four bits, from an independent enumeration.
const TALAGRAND_MIN_N4: f64 = 4.0;
/// Smallest vertex-boundary ratio on four bits, from the same enumeration.
const VERTEX_BOUNDARY_MIN_N4: f64 = 32.0 / 15.0;
/// Pinned boundary constant used for the noisy-hypercube certificates.
fn pinned_c() -> f64 {
    4.0 * 2f64.sqrt() / 3.0
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

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

fn within(elapsed: Duration, budget_s: u64) -> bool {
    elapsed <= Duration::from_secs(budget_s)
}

fn relaxation_soundness() -> Outcome {
    let start = Instant::now();
    let mut worst = f64::INFINITY;
    let mut r = rng(101);
    for i in 0..200u64 {
        let n = 4 + (i % 13) as usize;
        let g = random_graph(n, r.random_range(0.1..0.6), &mut r);
        let alpha = exact_max_independent_set(&g).unwrap().size as f64 / n as f64;
        let pd = solve(&build_is_relaxation(&g, 0.0, 2).unwrap(), &SolveParams::default()).unwrap();
        worst = worst.min(pd.residuals.objective.unwrap() - alpha);
    }
    let t = start.elapsed();
    outcome(worst >= -1e-5 && within(t, 120), format!("min(value - alpha) = {worst:.3e} over 200 graphs in {t:.1?}"))
}

fn planted_expander_regime() -> Outcome {
    let start = Instant::now();
    let (n, eps) = (200, 0.001);
    let mut sizes = Vec::new();
    let mut ok = true;
    for seed in 0..20 {
        let inst = gen_planted_is_expander(n, eps, 16, seed).unwrap();
        let g = inst.graph().unwrap();
        ok &= inst.lambda2 <= 0.96;
        let rep = round_expander_is(&g, eps, &ExpanderIsParams { seed, ..Default::default() }).unwrap();
        ok &= g.is_independent(&rep.repaired_set) && rep.repaired_size as f64 >= n as f64 / 1000.0;
        sizes.push(rep.repaired_size);
    }
    let t = start.elapsed();
    let min = sizes.iter().min().unwrap();
    let mean = sizes.iter().sum::<usize>() as f64 / sizes.len() as f64;
    outcome(
        ok && within(t, 600),
        format!("repaired size min {min} mean {mean:.1} (n/1000 = 0.2, 0.3n = 60) in {t:.1?}"),
    )
}

fn threshold_mechanism() -> Outcome {
    let eta: f64 = 0.05;
    let n = 200;
    let mut r = rng(3);
    let m: Vec<f64> = (0..n).map(|_| r.random_range(0.3..0.9)).collect();
    let marg: Vec<Vec<f64>> = m.iter().map(|&p| vec![1.0 - p, p]).collect();
    let pd = PseudoDistribution::product_of_marginals(&marg, Alphabet::Boolean, 2).unwrap();
    let w = wt11_squared(&pd).unwrap();
    let mi = pairwise_mutual_information(&pd, Exec::Auto).unwrap().avg_mi;
    let set = threshold_set(&pd.means(), 0.5);
    let pass = w >= 1.0 / 16.0 + eta && mi <= eta * eta / 18.0 && set.len() as f64 >= eta * n as f64 / 4.0;
    outcome(pass, format!("pE[wt(11)^2] = {w:.4}, avg_mi = {mi:.2e}, |threshold set| = {} of {n}", set.len()))
}

fn clustering() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let (mut triples, mut violations, mut in_regime) = (0u64, 0u64, 0usize);
    // planted sets on denser graphs sit inside the regime; sparse random
    // graphs carry many qualifying sets and exercise the triple scan
    let mut graphs = Vec::new();
    for seed in 0..10 {
        for d in [8, 10] {
            let mut p = PlantedParams::new(20, 0.05, d, seed);
            p.lambda2_bound = None;
            graphs.push((gen_planted_is_expander_with(&p).unwrap().graph().unwrap(), 0.05));
        }
        graphs.push((gen_random_regular(20, 3, seed).unwrap(), 0.1));
    }
    for (g, eps) in &graphs {
        let rep = verify_clustering_is(g, *eps, 40.0).unwrap();
        ok &= !rep.counterexample();
        triples += rep.triples;
        violations += rep.violations * rep.in_regime as u64;
        in_regime += rep.in_regime as usize;
    }
    let (mut ctriples, mut colorings) = (0u64, 0usize);
    for seed in 0..10 {
        let c = gen_almost_3colorable_expander(12, 0.0, 3 + seed as usize % 2, seed).unwrap();
        let rep = verify_clustering_coloring(&c.graph, 0.0).unwrap();
        ok &= !rep.counterexample();
        ctriples += rep.triples;
        colorings += rep.colorings;
    }
    let t = start.elapsed();
    outcome(
        ok && within(t, 900),
        format!(
            "IS: {triples} triples on 30 graphs ({in_regime} in regime), {violations} violations; \
             coloring: {colorings} colorings, {ctriples} triples on 10 graphs; {t:.1?}"
        ),
    )
}

fn small_lemmas() -> Outcome {
    let start = Instant::now();
    let six = sample_six_variable(1_000_000, 5, Exec::Auto);
    let triple = sample_triple_coloring(1_000_000, 6, Exec::Auto);
    let t = start.elapsed();
    outcome(
        six.feasible == 1_000_000
            && triple.feasible == 1_000_000
            && six.counterexamples == 0
            && triple.counterexamples == 0
            && within(t, 60),
        format!(
            "six-variable {} counterexamples (margin {:.2e}), triple {} (margin {:.2e}) in {t:.1?}",
            six.counterexamples, six.min_margin, triple.counterexamples, triple.min_margin
        ),
    )
}

fn pattern_identities() -> Outcome {
    let mut r = rng(9);
    let mut mean_gap: f64 = 0.0;
    for _ in 0..1000 {
        let n = r.random_range(1..100);
        let x: Vec<u8> = (0..n).map(|_| r.random_range(0..2)).collect();
        let y: Vec<u8> = (0..n).map(|_| r.random_range(0..2)).collect();
        mean_gap = mean_gap.max(mean_gap_identity_residual(&x, &y, r.random_range(0.0..0.5)).unwrap().abs());
    }

    let mut fact: f64 = 0.0;
    let mut perm: f64 = 0.0;
    let mut cut: f64 = f64::NEG_INFINITY;
    let mut slack = f64::INFINITY;
    let mut pairs = 0;
    for i in 0..50u64 {
        let n = 12 + 2 * (i % 10) as usize;
        let g = gen_random_regular(n, 3 + (i % 4) as usize, i).unwrap();
        let lambda2 = spectral_stats(&g).unwrap().lambda2;
        for _ in 0..200 {
            let (x, y) = (maximal_is(&g, &mut r), maximal_is(&g, &mut r));
            let pw = pattern_weights_from_assignments(&g, &[&x, &y], Alphabet::Boolean).unwrap();
            let (a, b, c) = pw.identity_residuals();
            fact = fact.max(a).max(b).max(c);
            slack = slack.min(spectral_gap_slack(&pw, lambda2).unwrap());
            pairs += 1;
        }
        // fractional weights from independent copies with random marginals
        let marg = |r: &mut Rng| -> PseudoDistribution {
            let m: Vec<Vec<f64>> = (0..n).map(|_| r.random_range(0.0..1.0)).map(|p| vec![1.0 - p, p]).collect();
            PseudoDistribution::product_of_marginals(&m, Alphabet::Boolean, 2).unwrap()
        };
        let (a, b) = (marg(&mut r), marg(&mut r));
        let (s, e, rows) = pattern_weights_from_product(&g, &[&a, &b]).unwrap().identity_residuals();
        fact = fact.max(s).max(e).max(rows);
    }
    for i in 0..50u64 {
        let c = gen_almost_3colorable_expander(30, 0.0, 4, i).unwrap();
        let p = (i % 6) as usize;
        let y: Vec<u8> = c.coloring.iter().map(|&s| PERMUTATIONS[p][s as usize]).collect();
        let mut z = maximal_is(&c.graph, &mut r);
        z.iter_mut().zip(&c.coloring).for_each(|(v, &s)| *v = if *v == 1 { s } else { 0 });
        for other in [&y, &z] {
            let pw = pattern_weights_from_assignments(&c.graph, &[&c.coloring, other], Alphabet::Coloring).unwrap();
            let (even, odd, excess) = permutation_partition_residuals(&pw).unwrap();
            perm = perm.max(even.abs()).max(odd.abs());
            cut = cut.max(excess);
            let (s, e, rows) = pw.identity_residuals();
            fact = fact.max(s).max(e).max(rows);
        }
    }
    outcome(
        mean_gap <= 1e-12 && fact <= 1e-9 && perm <= 1e-9 && cut <= 1e-9 && slack >= 0.0 && pairs == 10_000,
        format!(
            "mean gap {mean_gap:.1e}, weight identities {fact:.1e}, partitions {perm:.1e} (cut excess {cut:.1e}), \
             min spectral slack {slack:.3e} over {pairs} pairs"
        ),
    )
}

fn bernstein_proxy() -> Outcome {
    let mut failed = Vec::new();
    let mut worst = f64::INFINITY;
    let mut checks = 0;
    for n in [1, 2, 4, 8] {
        let b = sqrt_proxy(n, 64 * n).unwrap();
        let rep = sosx::polyapprox::verify_proxy_properties(&b, n).unwrap();
        for p in rep.properties.iter().chain([&rep.envelope]) {
            checks += 1;
            worst = worst.min(p.margin);
            if !p.holds {
                failed.push(format!("n = {n}: {}", p.name));
            }
        }
    }
    outcome(failed.is_empty(), format!("{checks} checks, min margin {worst:.3e}, failures {failed:?}"))
}

fn step_polynomial() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, (delta, nu)) in [(0.1, 0.02), (0.05, 0.01), (1.0 / 32.0, 0.005)].into_iter().enumerate() {
        let q = step_poly(delta, nu).unwrap();
        let rep = verify_step(&q, delta, nu);
        let down = check_condition_on_q(&q, delta, nu, 100, i as u64);
        ok &= rep.ok && down.distributions == 100 && down.pointwise_margin >= 0.0 && down.min_slack >= 0.0;
        parts.push(format!("({delta}, {nu}): degree {} ok {} slack {:.2e}", rep.degree, rep.ok, down.min_slack));
    }
    outcome(ok, parts.join("; "))
}

fn hypercube() -> Outcome {
    let start = Instant::now();
    let mut r = rng(4);
    let mut parseval: f64 = 0.0;
    for _ in 0..200 {
        let n = r.random_range(1..=10);
        let table: Vec<bool> = (0..1usize << n).map(|_| r.random_bool(0.5)).collect();
        let (a, b) = fourier_identity_residuals(&BooleanFunction::new(n, table).unwrap());
        parseval = parseval.max(a.abs()).max(b.abs());
    }
    let mut identity = true;
    for n in 1..=4usize {
        for bits in 0..1u64 << (1 << n) {
            identity &= boundary_identity_holds(&BooleanFunction::from_bits(n, bits).unwrap());
        }
    }
    let scan = min_talagrand_constant(4, ScanMode::Exhaustive, Exec::Auto).unwrap();
    let frozen = (scan.min_talagrand - TALAGRAND_MIN_N4).abs() <= 1e-12
        && (scan.min_vertex_boundary - VERTEX_BOUNDARY_MIN_N4).abs() <= 1e-12
        && scan.functions == 65534;
    let t = start.elapsed();
    outcome(
        parseval <= 1e-10 && identity && frozen && within(t, 300),
        format!(
            "Parseval {parseval:.1e}, boundary identity {identity}, min ratio {} over {} functions in {t:.1?}",
            scan.min_talagrand, scan.functions
        ),
    )
}

fn noisy_hypercube() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [64, 256, 1024, 4096] {
        let rep = noisy_hypercube_certificate(n, pinned_c()).unwrap();
        ok &= rep.holds && rep.min_ratio >= 3.0 && rep.max_ratio <= 4.0;
        let trip = rep
            .certificate
            .as_ref()
            .and_then(|c| CertifiedSsve::from_json(&c.to_json().ok()?).ok())
            .is_some_and(|c| ssve_precondition(Some(&c), 1.0 / 32.0).is_ok());
        ok &= trip;
        parts.push(format!("n {n}: ell {} ratio [{:.4}, {:.4}] round trip {trip}", rep.ell, rep.min_ratio, rep.max_ratio));
    }
    let t = start.elapsed();
    outcome(ok && within(t, 60), format!("{} in {t:.1?}", parts.join("; ")))
}

fn kms_baseline() -> Outcome {
    let start = Instant::now();
    let (n, eps) = (400, 0.05);
    let mut ok = true;
    let mut sizes = Vec::new();
    for seed in 0..10 {
        let mut p = PlantedParams::new(n, eps, 4, seed);
        p.lambda2_bound = None;
        let g = gen_planted_is_expander_with(&p).unwrap().graph().unwrap();
        let rep = kms_round(&g, eps, seed, &KmsParams::default()).unwrap();
        let value = rep.sdp_objective.unwrap();
        ok &= value >= -2.0 * eps * n as f64 - 10.0 * rep.tau * n as f64;
        ok &= rep.potentials["s_prime"] >= eps * n as f64;
        ok &= g.is_independent(&rep.repaired_set) && rep.repaired_size >= 1;
        sizes.push(rep.repaired_size);
    }
    let t = start.elapsed();
    outcome(
        ok && within(t, 600),
        format!("|T| per seed {sizes:?} (eps n = {}) in {t:.1?}", eps * n as f64),
    )
}

const DETERMINISM_IS: &str = r#"{"algorithms": ["expander_is", "kms", "matching", "ssve"],
    "graph": {"planted": {"n": 60, "eps": 0.05, "d": 4, "lambda2_bound": null}}, "seeds": [0, 1, 2]}"#;
const DETERMINISM_COLOR: &str = r#"{"algorithms": ["three_colorable"],
    "graph": {"almost_3colorable": {"n": 60, "eps": 0.0, "d": 6}}, "seeds": [0, 1]}"#;

/// CSV of a sweep with the runtime column cleared.
fn sweep_csv(cfg: &ExperimentConfig, exec: Exec) -> String {
    let mut rows: Vec<_> = run_sweep(cfg, exec).into_iter().map(|(r, _)| r).collect();
    rows.iter_mut().for_each(|r| r.runtime_ms = 0.0);
    let mut out = Vec::new();
    write_csv(&rows, &mut out).unwrap();
    String::from_utf8(out).unwrap()
}

fn determinism() -> Outcome {
    let mut ok = true;
    let mut lines = 0;
    for text in [DETERMINISM_IS, DETERMINISM_COLOR] {
        let cfg = ExperimentConfig::from_json(text, None).unwrap();
        let a = sweep_csv(&cfg, Exec::Auto);
        let b = sweep_csv(&cfg, Exec::Auto);
        let c = sweep_csv(&cfg, Exec::Sequential);
        ok &= a == b && a == c && !a.contains(",error");
        lines += a.lines().count() - 1;
    }
    outcome(ok, format!("{lines} rows identical across reruns and execution modes"))
}

fn main() -> ExitCode {
    // accept and ignore libtest flags passed by `cargo test`
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("relaxation soundness", relaxation_soundness),
        ("planted expander rounding", planted_expander_regime),
        ("threshold mechanism", threshold_mechanism),
        ("clustering", clustering),
        ("six-variable and triple lemmas", small_lemmas),
        ("pattern identities", pattern_identities),
        ("square-root proxy", bernstein_proxy),
        ("step polynomial", step_polynomial),
        ("hypercube", hypercube),
        ("noisy hypercube certificate", noisy_hypercube),
        ("vector-program baseline", kms_baseline),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = format!("{}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| *f == id || name.contains(f.as_str())) {
            continue;
        }
        let o = run();
        failures += !o.pass as usize;
        println!("criterion {id:>2} [{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
