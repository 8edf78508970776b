//! Rounding: turning solved pseudo-distributions into independent sets.
//!
//! Every algorithm ends with [`repair_independent`], so the reported
//! `repaired_set` is independent whatever the solver accuracy was.

use std::collections::BTreeMap;

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::graphs::Graph;
use crate::hypercube::CertifiedSsve;
use crate::patterns::{collision_probability, derived_is_families, Alphabet, DerivedKind, PERMUTATIONS};
use crate::polyapprox::{choose, step_poly, UniPoly};
use crate::pseudodist::{
    build_coloring_relaxation, build_is_relaxation, condition_product_copies_with, pairwise_mutual_information,
    reduce_total_correlation, solve, Literal, Poly, ProductPseudoDistribution, PseudoDistribution, SolveMode,
    SolveParams, Support, TcMode,
};
use crate::pseudodist::{for_each_tuple, product_expect};
use crate::rng::{derive, sub_rng};
use crate::{exec::Exec, linalg, Error, Result};

/// Conditioning choices and other decisions taken during a run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    /// Literals conditioned on, in order.
    pub conditionings: Vec<(usize, u8)>,
    pub thresholds: Vec<f64>,
    pub seeds: Vec<u64>,
    pub avg_mi: Option<f64>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundingReport {
    pub algorithm: String,
    pub n: usize,
    pub raw_set: Vec<usize>,
    pub repaired_set: Vec<usize>,
    pub raw_size: usize,
    pub repaired_size: usize,
    pub violated_edges_before_repair: usize,
    pub transcript: Transcript,
    pub potentials: BTreeMap<String, f64>,
    /// Objective of the relaxation that was rounded, in its own units.
    pub sdp_objective: Option<f64>,
    /// Solver residual of the rounded pseudo-distribution.
    pub tau: f64,
    pub flags: Vec<String>,
}

impl RoundingReport {
    fn new(algorithm: &str, g: &Graph, raw: Vec<usize>) -> Self {
        let violated = violated_edges(g, &raw);
        let repaired = repair_independent(g, &raw);
        RoundingReport {
            algorithm: algorithm.to_string(),
            n: g.n(),
            raw_size: raw.len(),
            repaired_size: repaired.len(),
            raw_set: raw,
            repaired_set: repaired,
            violated_edges_before_repair: violated,
            transcript: Transcript::default(),
            potentials: BTreeMap::new(),
            sdp_objective: None,
            tau: 0.0,
            flags: Vec::new(),
        }
    }

    fn potential(&mut self, name: &str, v: f64) {
        self.potentials.insert(name.to_string(), v);
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn violated_edges(g: &Graph, set: &[usize]) -> usize {
    let mut inside = vec![false; g.n()];
    set.iter().for_each(|&u| inside[u] = true);
    g.edges().iter().filter(|&&(u, v)| inside[u as usize] && inside[v as usize]).count()
}

/// Removes vertices until `s` is independent: repeatedly drops the member
/// with the most neighbours inside the set, ties going to the higher index.
pub fn repair_independent(g: &Graph, s: &[usize]) -> Vec<usize> {
    let n = g.n();
    let mut inside = vec![false; n];
    s.iter().filter(|&&u| u < n).for_each(|&u| inside[u] = true);
    let mut deg = vec![0usize; n];
    for &(u, v) in g.edges() {
        let (u, v) = (u as usize, v as usize);
        if inside[u] && inside[v] {
            deg[u] += 1;
            deg[v] += 1;
        }
    }
    loop {
        let worst = (0..n).filter(|&u| inside[u] && deg[u] > 0).max_by_key(|&u| (deg[u], u));
        let Some(u) = worst else { break };
        inside[u] = false;
        deg[u] = 0;
        for &v in g.neighbors(u) {
            if inside[v as usize] {
                deg[v as usize] -= 1;
            }
        }
    }
    (0..n).filter(|&u| inside[u]).collect()
}

/// The vertices left uncovered by a greedy maximal matching (edges taken in
/// stored order). Always independent, and of size at least
/// `2 (α(G) - n/2)` for independence number `α(G)`.
pub fn two_approx_vc_is(g: &Graph) -> Vec<usize> {
    let mut covered = vec![false; g.n()];
    for &(u, v) in g.edges() {
        let (u, v) = (u as usize, v as usize);
        if !covered[u] && !covered[v] {
            covered[u] = true;
            covered[v] = true;
        }
    }
    (0..g.n()).filter(|&u| !covered[u]).collect()
}

/// `{u : values[u] > threshold}`.
pub fn threshold_set(values: &[f64], threshold: f64) -> Vec<usize> {
    (0..values.len()).filter(|&u| values[u] > threshold).collect()
}

/// `pE_{μ⊗2}[wt(11)^2] = E_{u,v} pE[x_u x_v]^2`, from the degree-2 moments.
pub fn wt11_squared(pd: &PseudoDistribution) -> Result<f64> {
    let n = pd.n();
    if pd.alphabet() != Alphabet::Boolean || n == 0 {
        return Err(Error::param("needs a non-empty Boolean pseudo-distribution"));
    }
    let mut total = 0.0;
    for u in 0..n {
        for v in 0..n {
            let m = if u == v { pd.moment(&[u])? } else { pd.moment(&[u, v])? };
            total += m * m;
        }
    }
    Ok(total / (n * n) as f64)
}

/// The same quantity evaluated as a polynomial over two independent copies.
pub fn wt11_squared_product(pd: &PseudoDistribution) -> Result<f64> {
    let n = pd.n();
    if n == 0 {
        return Err(Error::param("needs a non-empty pseudo-distribution"));
    }
    let c = 1.0 / (n * n) as f64;
    let mut poly = Poly::default();
    for u in 0..n {
        for v in 0..n {
            let mut lits = vec![Literal::in_copy(0, u, 1), Literal::in_copy(1, u, 1)];
            if u != v {
                lits.extend([Literal::in_copy(0, v, 1), Literal::in_copy(1, v, 1)]);
            }
            poly.add(c, lits);
        }
    }
    ProductPseudoDistribution::of(vec![pd.clone(), pd.clone()])?.pseudo_expect(&poly)
}

fn solver_flags(report: &mut RoundingReport, pd: &PseudoDistribution) {
    report.tau = pd.residuals.tau;
    report.flags.extend(pd.residuals.flags.iter().cloned());
    report.flags.dedup();
}

fn feasibility_solve() -> SolveParams {
    SolveParams { mode: SolveMode::Feasibility, ..SolveParams::default() }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExpanderIsParams {
    /// Degree of the relaxation (2 or 4).
    pub degree: usize,
    /// Most conditionings per reduction run.
    pub ell: usize,
    pub restarts: usize,
    pub seed: u64,
    pub solve: SolveParams,
}

impl Default for ExpanderIsParams {
    fn default() -> Self {
        ExpanderIsParams { degree: 2, ell: 8, restarts: 10, seed: 0, solve: feasibility_solve() }
    }
}

/// Solves the independent-set relaxation, conditions on random vertices
/// until the average mutual information is at most `η²/18` (with `η` the
/// current excess of `pE[wt(11)²]` over 1/16), then keeps the vertices with
/// `pE[x_u] > 1/2`.
pub fn round_expander_is(g: &Graph, eps: f64, params: &ExpanderIsParams) -> Result<RoundingReport> {
    let cs = build_is_relaxation(g, eps, params.degree)?;
    let pd = solve(&cs, &params.solve)?;
    round_expander_is_from(g, &pd, params)
}

/// [`round_expander_is`] from an already solved pseudo-distribution.
pub fn round_expander_is_from(g: &Graph, pd: &PseudoDistribution, params: &ExpanderIsParams) -> Result<RoundingReport> {
    if pd.n() != g.n() || pd.alphabet() != Alphabet::Boolean {
        return Err(Error::param("pseudo-distribution does not match the graph"));
    }
    let objective = pd.residuals.objective;
    let pot0 = wt11_squared(pd)?;
    let stat = |p: &PseudoDistribution| -> Result<(f64, f64)> {
        let eta = wt11_squared(p)? - 1.0 / 16.0;
        let mi = pairwise_mutual_information(p, Exec::Auto)?.avg_mi;
        Ok((mi, eta.max(0.0).powi(2) / 18.0))
    };
    let red = crate::pseudodist::reduce_with(pd, params.ell, params.restarts, params.seed, &params.solve, stat)?;
    let out = &red.pd;
    let raw = threshold_set(&out.means(), 0.5);
    let mut report = RoundingReport::new("expander_is", g, raw);
    report.sdp_objective = objective;
    solver_flags(&mut report, out);
    report.flags.extend(red.flags.iter().cloned());
    let pot = wt11_squared(out)?;
    let eta = pot - 1.0 / 16.0;
    report.transcript = Transcript {
        conditionings: red.transcript.clone(),
        thresholds: vec![0.5],
        seeds: vec![params.seed],
        avg_mi: Some(red.statistic),
        notes: vec![format!("restart {}", red.restarts)],
    };
    report.potential("wt11_sq_initial", pot0);
    report.potential("wt11_sq", pot);
    report.potential("wt11_sq_product", wt11_squared_product(out)?);
    report.potential("eta", eta);
    report.potential("mi_target", red.target);
    report.potential("avg_mi", red.statistic);
    report.potential("size_bound", if red.reached && eta > 0.0 { eta * g.n() as f64 / 4.0 } else { 0.0 });
    if report.raw_size == 0 {
        report.flags.push("threshold set is empty".into());
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ColoringParams {
    /// Color-class cap slack and the step-one acceptance size, both as
    /// fractions of `n`.
    pub gamma: f64,
    pub degree: usize,
    /// Most conditionings in the correlation reduction.
    pub ell: usize,
    /// Arity of the total correlation that is driven down.
    pub t: usize,
    pub tc: TcMode,
    /// Try the greedy-matching independent set first.
    pub matching_step: bool,
    pub seed: u64,
    pub solve: SolveParams,
}

impl Default for ColoringParams {
    fn default() -> Self {
        ColoringParams {
            gamma: 1e-3,
            degree: 2,
            ell: 8,
            t: 2,
            tc: TcMode::default(),
            matching_step: true,
            seed: 0,
            solve: feasibility_solve(),
        }
    }
}

/// `E_u sum_σ Pr[x_u = σ] Pr[x_u = π(σ)]` summed over permutations after
/// raising each to the power `ell`: the agreement potential of two
/// independent copies with per-vertex marginals. It lower-bounds the
/// degree-`ell` pseudo-expectation by Jensen when the latter exists.
pub fn agreement_potential(pd: &PseudoDistribution, ell: u32) -> Result<f64> {
    if pd.alphabet() != Alphabet::Coloring {
        return Err(Error::param("agreement needs the coloring alphabet"));
    }
    let n = pd.n();
    let marg: Vec<Vec<f64>> = (0..n).map(|u| crate::patterns::clamp_simplex(&pd.marginal_vector(u))).collect();
    let mut total = 0.0;
    for pi in PERMUTATIONS {
        let a: f64 = marg.iter().map(|m| (1..4).map(|s| m[s] * m[pi[s] as usize]).sum::<f64>()).sum::<f64>() / n as f64;
        total += a.powi(ell as i32);
    }
    Ok(total)
}

/// Returns the greedy-matching independent set when it already has `γn`
/// vertices; otherwise solves the capped coloring relaxation, reduces the
/// `t`-wise total correlation and keeps the largest class
/// `{u : pPr[x_u = σ] > 1/2}`.
pub fn round_3colorable(g: &Graph, eps: f64, params: &ColoringParams) -> Result<RoundingReport> {
    let n = g.n();
    let vc = two_approx_vc_is(g);
    if params.matching_step && vc.len() as f64 >= params.gamma * n as f64 && !vc.is_empty() {
        let mut report = RoundingReport::new("3colorable", g, vc);
        report.transcript.notes.push("matching step".into());
        return Ok(report);
    }
    let cs = build_coloring_relaxation(g, eps, params.gamma, params.degree)?;
    let pd = solve(&cs, &params.solve)?;
    let mut red = reduce_total_correlation(&pd, params.t, params.ell, params.tc, params.seed, &params.solve)?;
    let (mut best, mut best_sigma) = largest_class(&red.pd);
    // a colour-symmetric solution has no class above 1/2; spend the rest of
    // the conditioning budget breaking the symmetry
    let mut rng = sub_rng(params.seed, u64::MAX);
    let mut symmetry_breaks = 0;
    while best.is_empty() && red.transcript.len() < params.ell {
        let v = rng.random_range(0..n);
        if red.transcript.iter().any(|&(u, _)| u == v) {
            continue;
        }
        let value = red.pd.sample_value(v, &mut rng);
        match red.pd.condition_on_value(v, value, &params.solve) {
            Ok(next) => red.pd = next,
            Err(Error::NullEvent(_)) => continue,
            Err(e) => return Err(e),
        }
        red.transcript.push((v, value));
        symmetry_breaks += 1;
        (best, best_sigma) = largest_class(&red.pd);
    }
    let out = &red.pd;
    let mut report = RoundingReport::new("3colorable", g, best);
    report.sdp_objective = pd.residuals.objective;
    solver_flags(&mut report, out);
    report.flags.extend(red.flags.iter().cloned());
    report.flags.push("reduced-parameter regime".into());
    report.transcript = Transcript {
        conditionings: red.transcript.clone(),
        thresholds: vec![0.5],
        seeds: vec![params.seed],
        avg_mi: Some(red.statistic),
        notes: vec![
            format!("class {best_sigma}"),
            format!("total correlation target {:e}", red.target),
            format!("{symmetry_breaks} symmetry-breaking conditionings"),
        ],
    };
    report.potential("cp", collision_probability(out)?);
    report.potential("agree_ell", agreement_potential(out, params.ell as u32)?);
    report.potential("total_correlation", red.statistic);
    Ok(report)
}

/// Largest `{u : pPr[x_u = σ] > 1/2}` over the three colours.
fn largest_class(pd: &PseudoDistribution) -> (Vec<usize>, u8) {
    let mut best: (Vec<usize>, u8) = (Vec::new(), 1);
    for sigma in 1..=3u8 {
        let p: Vec<f64> = (0..pd.n()).map(|u| pd.prob(&[(u, sigma)]).unwrap_or(0.0)).collect();
        let set = threshold_set(&p, 0.5);
        if set.len() > best.0.len() {
            best = (set, sigma);
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SsveParams {
    /// Cap on the number of copies.
    pub max_copies: usize,
    /// Smallest step width `ν` used for the step polynomial.
    pub nu_floor: f64,
    /// Mutual-information target for the per-copy conditioning.
    pub tau: f64,
    /// Most product-support tuples enumerated exactly.
    pub max_tuples: usize,
    pub seed: u64,
    pub solve: SolveParams,
}

impl Default for SsveParams {
    fn default() -> Self {
        SsveParams { max_copies: 4, nu_floor: 0.02, tau: 0.05, max_tuples: 200_000, seed: 0, solve: feasibility_solve() }
    }
}

/// Checks that a certificate is present, verifies, and covers sets of
/// density `delta`.
pub fn ssve_precondition(cert: Option<&CertifiedSsve>, delta: f64) -> Result<()> {
    let cert = cert.ok_or_else(|| Error::param("certificate missing"))?;
    cert.verify()?;
    if !(delta > 0.0) || delta > cert.delta + 1e-12 {
        return Err(Error::param(format!("delta = {delta} is not covered by the certificate (delta {})", cert.delta)));
    }
    Ok(())
}

/// Copy counts and constants for the small-set-expansion rounding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SsveConstants {
    /// `ceil(log2(4 / delta))`, before capping.
    pub t_full: usize,
    pub t: usize,
    pub eta: f64,
    /// `1 / (4 binom(2t, t))`.
    pub beta: f64,
    /// `max(delta beta^2, nu_floor)`.
    pub nu: f64,
}

pub fn ssve_constants(delta: f64, params: &SsveParams) -> SsveConstants {
    let t_full = (4.0 / delta).log2().ceil().max(1.0) as usize;
    let t = t_full.min(params.max_copies.max(1));
    let beta = 1.0 / (4.0 * choose(2 * t, t));
    SsveConstants { t_full, t, eta: delta.powi(3) / 100.0, beta, nu: (delta * beta * beta).max(params.nu_floor) }
}

/// Solves the independent-set relaxation and rounds it with
/// [`round_ssve_from`].
pub fn round_ssve(
    g: &Graph,
    delta: f64,
    eps: f64,
    cert: Option<&CertifiedSsve>,
    params: &SsveParams,
) -> Result<RoundingReport> {
    ssve_precondition(cert, delta)?;
    let pd = solve(&build_is_relaxation(g, eps, 2)?, &params.solve)?;
    round_ssve_from(g, &pd, delta, cert, params)
}

/// Two-case rounding for graphs whose small sets expand.
///
/// The easy case looks for a derived pattern family `T` with
/// `pE[wt(T)] > 1/2 + η` over independent copies and thresholds the lifted
/// indicator. Otherwise the hard case needs an explicit distribution: the
/// copies are conditioned, reweighted by the step polynomial of the
/// all-ones pattern weight, and each copy's marginals are thresholded.
pub fn round_ssve_from(
    g: &Graph,
    pd: &PseudoDistribution,
    delta: f64,
    cert: Option<&CertifiedSsve>,
    params: &SsveParams,
) -> Result<RoundingReport> {
    ssve_precondition(cert, delta)?;
    let cert = cert.expect("checked above");
    if pd.n() != g.n() || pd.alphabet() != Alphabet::Boolean {
        return Err(Error::param("pseudo-distribution does not match the graph"));
    }
    let k = ssve_constants(delta, params);
    let n = g.n();
    let p = pd.means();

    // easy case over the derived families of H_k
    let copies = (2 * k.t).min(6);
    let mut best: Option<(f64, Vec<f64>, DerivedKind)> = None;
    for fam in derived_is_families(copies)? {
        let lifted: Vec<f64> = p
            .iter()
            .map(|&pu| {
                let pu = pu.clamp(0.0, 1.0);
                fam.members
                    .iter()
                    .map(|&a| (0..copies).map(|i| if a >> i & 1 == 1 { pu } else { 1.0 - pu }).product::<f64>())
                    .sum()
            })
            .collect();
        let w = lifted.iter().sum::<f64>() / n as f64;
        if best.as_ref().is_none_or(|b| w > b.0) {
            best = Some((w, lifted, fam.kind));
        }
    }
    let (wt_best, lifted, kind) = best.expect("families are non-empty");
    let mut notes = vec![format!("{} copies (full count {})", k.t, k.t_full)];
    if k.t < k.t_full {
        notes.push("reduced-parameter regime".into());
    }
    if wt_best > 0.5 + k.eta {
        let mut report = RoundingReport::new("ssve", g, threshold_set(&lifted, 0.5));
        solver_flags(&mut report, pd);
        report.transcript.notes = notes;
        report.transcript.notes.push(format!("easy case via {kind:?} over {copies} copies"));
        report.transcript.thresholds = vec![0.5];
        report.potential("wt_t", wt_best);
        report.potential("eta", k.eta);
        report.potential("easy_size_bound", k.eta * n as f64 / 2.0);
        return Ok(report);
    }

    let Some(support) = pd.support() else {
        let mut report = RoundingReport::new("ssve", g, Vec::new());
        solver_flags(&mut report, pd);
        report.transcript.notes = notes;
        report.potential("wt_t", wt_best);
        report.flags.push("inconclusive: hard case needs an explicit distribution".into());
        return Ok(report);
    };

    // hard case
    let q_of = |z: f64| cert.p.eval(z) - 3.0 * z;
    let case2 = product_expect(&vec![support; k.t], params.max_tuples, q_of)?;
    let step = step_poly(delta, k.nu)?;
    let eval_q = |prod: &ProductPseudoDistribution| -> Result<f64> {
        let sups: Vec<&Support> =
            prod.copies.iter().map(|c| c.support().ok_or_else(|| Error::param("copy lost its support"))).collect::<Result<_>>()?;
        product_expect(&sups, params.max_tuples, |z| step.eval(z))
    };
    let start = eval_q(&crate::pseudodist::product(pd, k.t)?)?;
    let mut report;
    if start < k.beta {
        report = RoundingReport::new("ssve", g, Vec::new());
        report.flags.push(format!("inconclusive: pE[Q] = {start:.3e} below beta = {:.3e}", k.beta));
    } else {
        let pc = condition_product_copies_with(pd, k.t, eval_q, k.beta, params.tau, params.seed, &params.solve)?;
        let sups: Vec<&Support> = pc.copies.iter().map(|c| c.support().expect("support is preserved")).collect();
        let rw = reweighted_marginals(&sups, n, params.max_tuples, &step)?;
        let mut best_i = 0;
        let mut best_set: Vec<usize> = Vec::new();
        let mut best_power = 0.0f64;
        for (i, m) in rw.marginals.iter().enumerate() {
            let set = threshold_set(m, 0.5);
            let power = m.iter().map(|v| v.powi(k.t as i32)).sum::<f64>() / n as f64;
            best_power = best_power.max(power);
            if set.len() > best_set.len() || (i == 0 && best_set.is_empty()) {
                best_i = i;
                best_set = set;
            }
        }
        report = RoundingReport::new("ssve", g, best_set);
        report.transcript.conditionings = pc.sets.iter().flatten().copied().collect();
        report.transcript.avg_mi = pc.avg_mi.iter().copied().reduce(f64::max);
        notes.push(format!("hard case, copy {best_i}, {} attempts", pc.attempts));
        if !pc.success {
            report.flags.push("product conditioning did not meet both targets".into());
        }
        report.potential("q_after_conditioning", pc.value);
        report.potential("z_after_reweight", rw.mean_z);
        report.potential("condition_on_q_bound", delta - k.nu / rw.mean_q.max(f64::MIN_POSITIVE));
        report.potential("max_copy_power_mean", best_power);
    }
    solver_flags(&mut report, pd);
    report.transcript.notes = notes;
    report.transcript.thresholds = vec![0.5];
    report.transcript.seeds = vec![params.seed];
    report.potential("wt_t", wt_best);
    report.potential("q_case2", case2);
    report.potential("beta", k.beta);
    report.potential("nu", k.nu);
    report.potential("q_start", start);
    report.potential("step_degree", step.degree() as f64);
    Ok(report)
}

struct Reweighted {
    marginals: Vec<Vec<f64>>,
    mean_q: f64,
    mean_z: f64,
}

/// Per-copy marginals of the product reweighted by `Q(wt(1...1))`.
fn reweighted_marginals(sups: &[&Support], n: usize, max_tuples: usize, q: &UniPoly) -> Result<Reweighted> {
    let t = sups.len();
    let mut marg = vec![vec![0.0; n]; t];
    let (mut mass, mut zq) = (0.0, 0.0);
    for_each_tuple(sups, max_tuples, |idx, w, z| {
        let wq = w * q.eval(z).max(0.0);
        if wq == 0.0 {
            return;
        }
        mass += wq;
        zq += wq * z;
        for (c, &i) in idx.iter().enumerate() {
            for (u, &x) in sups[c].assignments[i].iter().enumerate() {
                if x == 1 {
                    marg[c][u] += wq;
                }
            }
        }
    })?;
    if !(mass > 0.0) {
        return Err(Error::NullEvent(mass));
    }
    marg.iter_mut().flatten().for_each(|v| *v /= mass);
    Ok(Reweighted { marginals: marg, mean_q: mass, mean_z: zq / mass })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KmsParams {
    pub samples: usize,
    pub solve: SolveParams,
}

impl Default for KmsParams {
    fn default() -> Self {
        KmsParams { samples: 20, solve: feasibility_solve() }
    }
}

/// Gaussian threshold rounding of the `±1` vector program with
/// `(1 + x_i)(1 + x_j) = 0` on edges: keeps the vertices with
/// `pE[x_i] >= -4 eps`, takes those whose vector projects above
/// `4 sqrt(eps ln n')` on a Gaussian direction, and drops any with a
/// neighbour in that set. The largest of `samples` draws is returned.
pub fn kms_round(g: &Graph, eps: f64, seed: u64, params: &KmsParams) -> Result<RoundingReport> {
    let n = g.n();
    if n == 0 {
        return Err(Error::param("graph is empty"));
    }
    let cs = build_is_relaxation(g, eps, 2)?;
    let pd = solve(&cs, &params.solve)?;
    let z = pd.means();
    // Gram matrix of (1, x_1, ..., x_n) with x = 2z - 1
    let side = n + 1;
    let mut gram = vec![0.0; side * side];
    gram[0] = 1.0;
    for i in 0..n {
        let xi = 2.0 * z[i] - 1.0;
        gram[i + 1] = xi;
        gram[(i + 1) * side] = xi;
        gram[(i + 1) * side + i + 1] = 1.0;
        for j in i + 1..n {
            let zij = pd.moment(&[i, j])?;
            let v = 4.0 * zij - 2.0 * z[i] - 2.0 * z[j] + 1.0;
            gram[(i + 1) * side + j + 1] = v;
            gram[(j + 1) * side + i + 1] = v;
        }
    }
    let (vals, vecs) = linalg::eigh(side, &gram)?;
    // row i of V sqrt(max(Λ, 0))
    let vec_of = |i: usize| -> Vec<f64> {
        (0..side).map(|k| vecs[k * side + i] * vals[k].max(0.0).sqrt()).collect::<Vec<f64>>()
    };
    let vectors: Vec<Vec<f64>> = (0..side).map(vec_of).collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    let x_mean: Vec<f64> = z.iter().map(|v| 2.0 * v - 1.0).collect();
    let s_prime: Vec<usize> = (0..n).filter(|&i| x_mean[i] >= -4.0 * eps).collect();
    let n_prime = s_prime.len();
    let thr = if n_prime >= 2 { 4.0 * (eps * (n_prime as f64).ln()).sqrt() } else { 0.0 };
    let mut in_s_prime = vec![false; n];
    s_prime.iter().for_each(|&i| in_s_prime[i] = true);
    let max_edge_inner = g
        .edges()
        .iter()
        .filter(|&&(u, v)| in_s_prime[u as usize] && in_s_prime[v as usize])
        .map(|&(u, v)| dot(&vectors[u as usize + 1], &vectors[v as usize + 1]))
        .fold(f64::NEG_INFINITY, f64::max);

    let mut best: Vec<usize> = Vec::new();
    let mut best_s = 0usize;
    let mut seeds = Vec::with_capacity(params.samples);
    for k in 0..params.samples.max(1) {
        let s = derive(seed, k as u64);
        seeds.push(s);
        let mut rng = sub_rng(s, 0);
        let gauss: Vec<f64> = (0..side).map(|_| StandardNormal.sample(&mut rng)).collect();
        let chosen: Vec<usize> = s_prime.iter().copied().filter(|&i| dot(&gauss, &vectors[i + 1]) >= thr).collect();
        let mut in_s = vec![false; n];
        chosen.iter().for_each(|&i| in_s[i] = true);
        let t: Vec<usize> = chosen.iter().copied().filter(|&i| g.neighbors(i).iter().all(|&j| !in_s[j as usize])).collect();
        if t.len() > best.len() || k == 0 {
            best = t;
            best_s = chosen.len();
        }
    }
    let mut report = RoundingReport::new("kms", g, best);
    solver_flags(&mut report, &pd);
    let value: f64 = x_mean.iter().sum();
    report.sdp_objective = Some(value);
    report.transcript.thresholds = vec![-4.0 * eps, thr];
    report.transcript.seeds = seeds;
    report.potential("sdp_value", value);
    report.potential("value_bound", -2.0 * eps * n as f64);
    report.potential("s_prime", n_prime as f64);
    report.potential("s_size", best_s as f64);
    report.potential("max_edge_inner", if max_edge_inner.is_finite() { max_edge_inner } else { -1.0 });
    report.potential("edge_inner_bound", -1.0 + 8.0 * eps + 10.0 * report.tau);
    if max_edge_inner > -1.0 + 8.0 * eps + 10.0 * report.tau {
        report.flags.push("edge inner product above -1 + 8 eps".into());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repair_examples() {
        let k3 = Graph::complete(3);
        assert_eq!(repair_independent(&k3, &[0, 1, 2]).len(), 1);
        let c5 = Graph::cycle(5);
        assert_eq!(repair_independent(&c5, &[0, 2]), vec![0, 2]);
    }

    #[test]
    fn matching_examples() {
        let star = Graph::new(6, (1..6).map(|v| (0, v))).unwrap();
        assert_eq!(two_approx_vc_is(&star), vec![2, 3, 4, 5]);
        let pm = Graph::new(6, [(0, 1), (2, 3), (4, 5)]).unwrap();
        assert!(two_approx_vc_is(&pm).is_empty());
        let p3 = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(two_approx_vc_is(&p3), vec![2]);
    }

    #[test]
    fn potential_two_ways() {
        let marg: Vec<Vec<f64>> = (0..7).map(|u| vec![1.0 - 0.1 * u as f64, 0.1 * u as f64]).collect();
        let pd = PseudoDistribution::product_of_marginals(&marg, Alphabet::Boolean, 2).unwrap();
        let a = wt11_squared(&pd).unwrap();
        let b = wt11_squared_product(&pd).unwrap();
        assert!((a - b).abs() < 1e-12, "{a} {b}");
    }
}
