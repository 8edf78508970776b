//! Exhaustive checks that large independent sets and balanced 3-colorings
//! of spectral expanders cluster.

use serde::{Deserialize, Serialize};

use super::{agreement_square_slack, pattern_weights_from_assignments, Alphabet, PERMUTATIONS};
use crate::graphs::{enumerate_independent_sets_with_budget, spectral_stats, Graph};
use crate::{Error, Result};

const NODE_BUDGET: u64 = 10_000_000;
const MAX_FAMILY: usize = 4000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusteringIsReport {
    pub n: usize,
    pub eps: f64,
    pub lambda2: f64,
    pub regular: bool,
    /// `λ₂ <= 1 - C eps` for the supplied `C`.
    pub precondition: bool,
    /// `2 eps / (1 - λ₂)`.
    pub eta: f64,
    /// Smaller root of `h (1 - h) = eta`; infinite when `eta > 1/4`.
    pub h: f64,
    /// Regular graph with `h < 1/3`, where the argument applies.
    pub in_regime: bool,
    /// `1/2 - h/2 - eps`.
    pub threshold: f64,
    pub sets: usize,
    /// Distinct triples examined.
    pub triples: u64,
    /// Minimum over triples (repetition allowed) of the largest pairwise
    /// intersection, as a fraction of `n`; `None` without any set.
    pub worst_intersection: Option<f64>,
    pub worst_triple: Option<[Vec<usize>; 3]>,
    /// Triples with every pairwise intersection below `threshold`.
    pub violations: u64,
    /// The same count against `1/2 - eta/2 - eps`.
    pub eta_threshold_violations: u64,
}

impl ClusteringIsReport {
    /// A counterexample is a violation inside the regime.
    pub fn counterexample(&self) -> bool {
        self.in_regime && self.violations > 0
    }
}

fn bits_to_vertices(s: u64) -> Vec<usize> {
    (0..64).filter(|&i| s >> i & 1 == 1).collect()
}

/// Pairwise integer scores among `k` objects; returns the smallest `v` such
/// that some triple (repetition allowed) has all pairwise scores `<= v`,
/// with a witness, and the number of distinct triples whose scores are all
/// `< below` for each `below` in `cuts`.
fn triangle_scan(score: &[Vec<u32>], max_score: u32, cuts: &[u32]) -> (Option<(u32, [usize; 3])>, Vec<u64>) {
    let k = score.len();
    let words = k.div_ceil(64);
    let graph = |limit: u32, strict: bool| -> Vec<Vec<u64>> {
        (0..k)
            .map(|i| {
                let mut row = vec![0u64; words];
                for j in (0..k).filter(|&j| j != i) {
                    let s = score[i][j];
                    if (strict && s < limit) || (!strict && s <= limit) {
                        row[j / 64] |= 1 << (j % 64);
                    }
                }
                row
            })
            .collect()
    };
    let counts = cuts
        .iter()
        .map(|&c| {
            let g = graph(c, true);
            let mut total = 0u64;
            for i in 0..k {
                for j in (i + 1..k).filter(|&j| g[i][j / 64] >> (j % 64) & 1 == 1) {
                    for w in 0..words {
                        let mut m = g[i][w] & g[j][w];
                        // keep only indices > j
                        let lo = w * 64;
                        if lo + 64 <= j + 1 {
                            m = 0;
                        } else if lo <= j {
                            m &= !0u64 << (j + 1 - lo);
                        }
                        total += m.count_ones() as u64;
                    }
                }
            }
            total
        })
        .collect();

    let self_best = (0..k).min_by_key(|&i| score[i][i]);
    for v in 0..=max_score {
        if let Some(i) = self_best.filter(|&i| score[i][i] <= v) {
            return (Some((v, [i, i, i])), counts);
        }
        let g = graph(v, false);
        for i in 0..k {
            for j in (i + 1..k).filter(|&j| g[i][j / 64] >> (j % 64) & 1 == 1) {
                if let Some(w) = (0..words).find(|&w| g[i][w] & g[j][w] != 0) {
                    let l = w * 64 + (g[i][w] & g[j][w]).trailing_zeros() as usize;
                    return (Some((v, [i, j, l])), counts);
                }
            }
        }
    }
    (None, counts)
}

/// Checks every triple of independent sets of size at least `(1/2 - eps) n`
/// for a pair intersecting in at least `threshold * n` vertices.
pub fn verify_clustering_is(g: &Graph, eps: f64, c: f64) -> Result<ClusteringIsReport> {
    let n = g.n();
    if n == 0 || n > 24 {
        return Err(Error::param(format!("clustering verifier needs 1 <= n <= 24, got {n}")));
    }
    if !(0.0..0.5).contains(&eps) {
        return Err(Error::param("eps must lie in [0, 1/2)"));
    }
    let lambda2 = spectral_stats(g)?.lambda2;
    let eta = 2.0 * eps / (1.0 - lambda2).max(f64::MIN_POSITIVE);
    let h = if eta <= 0.25 { (1.0 - (1.0 - 4.0 * eta).sqrt()) / 2.0 } else { f64::INFINITY };
    let regular = g.regular_degree().is_some();
    let threshold = 0.5 - h / 2.0 - eps;
    let min_size = ((0.5 - eps) * n as f64 - 1e-9).ceil().max(0.0) as usize;
    let sets = enumerate_independent_sets_with_budget(g, min_size, NODE_BUDGET)?;
    if sets.len() > MAX_FAMILY {
        return Err(Error::Budget(format!("{} qualifying sets exceed the limit of {MAX_FAMILY}", sets.len())));
    }
    let score: Vec<Vec<u32>> = sets.iter().map(|a| sets.iter().map(|b| (a & b).count_ones()).collect()).collect();
    // an integer intersection k is below x * n iff k < ceil(x n)
    let cut = |x: f64| if x.is_finite() { (x * n as f64 - 1e-9).ceil().max(0.0) as u32 } else { 0 };
    let (worst, counts) = triangle_scan(&score, n as u32, &[cut(threshold), cut(0.5 - eta / 2.0 - eps)]);
    let k = sets.len() as u64;
    Ok(ClusteringIsReport {
        n,
        eps,
        lambda2,
        regular,
        precondition: lambda2 <= 1.0 - c * eps,
        eta,
        h,
        in_regime: regular && h < 1.0 / 3.0,
        threshold,
        sets: sets.len(),
        triples: k * k.saturating_sub(1) * k.saturating_sub(2) / 6,
        worst_intersection: worst.map(|(v, _)| v as f64 / n as f64),
        worst_triple: worst.map(|(_, t)| t.map(|i| bits_to_vertices(sets[i]))),
        violations: counts[0],
        eta_threshold_violations: counts[1],
    })
}

/// Proper 3-colorings using colors `1..=3` with every class of size at most
/// `max_class`, one per orbit of color permutations (first-use order).
pub fn enumerate_colorings(g: &Graph, max_class: usize, max_nodes: u64) -> Result<Vec<Vec<u8>>> {
    struct Dfs<'a> {
        g: &'a Graph,
        cap: usize,
        x: Vec<u8>,
        sizes: [usize; 4],
        out: Vec<Vec<u8>>,
        nodes: u64,
        max_nodes: u64,
    }
    impl Dfs<'_> {
        fn run(&mut self, v: usize, used: u8) -> bool {
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return false;
            }
            if v == self.x.len() {
                self.out.push(self.x.clone());
                return true;
            }
            for c in 1..=(used + 1).min(3) {
                if self.sizes[c as usize] >= self.cap {
                    continue;
                }
                if self.g.neighbors(v).iter().any(|&w| (w as usize) < v && self.x[w as usize] == c) {
                    continue;
                }
                self.x[v] = c;
                self.sizes[c as usize] += 1;
                let ok = self.run(v + 1, used.max(c));
                self.sizes[c as usize] -= 1;
                self.x[v] = 0;
                if !ok {
                    return false;
                }
            }
            true
        }
    }
    let mut d = Dfs { g, cap: max_class, x: vec![0; g.n()], sizes: [0; 4], out: Vec::new(), nodes: 0, max_nodes };
    if !d.run(0, 0) {
        return Err(Error::Budget(format!("coloring enumeration exceeded {max_nodes} nodes")));
    }
    Ok(d.out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusteringColoringReport {
    pub n: usize,
    pub eps: f64,
    pub lambda2: f64,
    pub regular: bool,
    /// `λ₂ <= eps / (1 + eps)`.
    pub precondition: bool,
    /// Regular, precondition met and `eps <= 0.01`.
    pub in_regime: bool,
    /// `1/2 + eps`.
    pub threshold: f64,
    /// Colorings up to color permutation.
    pub colorings: usize,
    pub triples: u64,
    /// Minimum over triples of the largest pairwise agreement.
    pub worst_agreement: Option<f64>,
    pub worst_triple: Option<[Vec<u8>; 3]>,
    pub violations: u64,
    /// Minimum over pairs of `sum_π wt(S_π)^2 - (2 - 1/(1 - λ₂))`.
    pub min_square_slack: f64,
}

impl ClusteringColoringReport {
    pub fn counterexample(&self) -> bool {
        (self.in_regime && self.violations > 0) || (self.regular && self.min_square_slack < -1e-9)
    }
}

/// Checks every triple of balanced 3-colorings for a pair with agreement at
/// least `1/2 + eps`, and the per-pair sum-of-squares bound.
pub fn verify_clustering_coloring(g: &Graph, eps: f64) -> Result<ClusteringColoringReport> {
    let n = g.n();
    if n == 0 || n > 15 {
        return Err(Error::param(format!("coloring clustering verifier needs 1 <= n <= 15, got {n}")));
    }
    if !(0.0..=0.5).contains(&eps) {
        return Err(Error::param("eps must lie in [0, 1/2]"));
    }
    let lambda2 = spectral_stats(g)?.lambda2;
    let regular = g.regular_degree().is_some();
    let cap = ((0.5 + eps) * n as f64 + 1e-9).floor() as usize;
    let cols = enumerate_colorings(g, cap, NODE_BUDGET)?;
    if cols.is_empty() {
        return Err(Error::Verification("graph has no balanced proper 3-coloring".into()));
    }
    if cols.len() > MAX_FAMILY {
        return Err(Error::Budget(format!("{} colorings exceed the limit of {MAX_FAMILY}", cols.len())));
    }
    let agree_count = |x: &[u8], y: &[u8]| -> u32 {
        PERMUTATIONS.iter().map(|pi| x.iter().zip(y).filter(|(&a, &b)| pi[a as usize] == b).count() as u32).max().unwrap_or(0)
    };
    let score: Vec<Vec<u32>> = cols.iter().map(|x| cols.iter().map(|y| agree_count(x, y)).collect()).collect();
    let threshold = 0.5 + eps;
    let cut = (threshold * n as f64 - 1e-9).ceil() as u32;
    let (worst, counts) = triangle_scan(&score, n as u32, &[cut]);

    let mut min_square_slack = f64::INFINITY;
    for i in 0..cols.len() {
        for j in i + 1..cols.len() {
            let pw = pattern_weights_from_assignments(g, &[&cols[i], &cols[j]], Alphabet::Coloring)?;
            min_square_slack = min_square_slack.min(agreement_square_slack(&pw, lambda2)?);
        }
    }
    let precondition = lambda2 <= eps / (1.0 + eps);
    let k = cols.len() as u64;
    Ok(ClusteringColoringReport {
        n,
        eps,
        lambda2,
        regular,
        precondition,
        in_regime: regular && precondition && eps <= 0.01,
        threshold,
        colorings: cols.len(),
        triples: k * k.saturating_sub(1) * k.saturating_sub(2) / 6,
        worst_agreement: worst.map(|(v, _)| v as f64 / n as f64),
        worst_triple: worst.map(|(_, t)| t.map(|i| cols[i].clone())),
        violations: counts[0],
        min_square_slack,
    })
}
