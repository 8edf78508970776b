//! Label patterns of assignment tuples.
//!
//! A tuple of `t` assignments labels each vertex with a pattern in
//! `alphabet^t`. Patterns are encoded in base `q` with the symbol of
//! assignment `i` (0-based) in digit `i`. Coloring symbols are `0 = ⊥` and
//! `1..=3` for colors.

mod clustering;
mod lemmas;
mod packing;

pub use clustering::{
    enumerate_colorings, verify_clustering_coloring, verify_clustering_is, ClusteringColoringReport,
    ClusteringIsReport,
};
pub use lemmas::{
    check_six_variable, check_triple_coloring, sample_six_variable, sample_triple_coloring, LemmaOutcome,
    SamplerReport, TRIPLE_PATTERNS,
};
pub use packing::{check_w0_leq_w1, hypothesis_parameters, packing_certificate_value, PackingReport, W0Report};

use serde::{Deserialize, Serialize};

use crate::graphs::Graph;
use crate::{Error, Result};

/// Symbol for "uncolored" in the coloring alphabet.
pub const BOT: u8 = 0;

const MAX_PATTERNS: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alphabet {
    /// `{0, 1}`.
    Boolean,
    /// `{⊥, 1, 2, 3}` stored as `0..=3`.
    Coloring,
}

impl Alphabet {
    pub fn size(self) -> usize {
        match self {
            Alphabet::Boolean => 2,
            Alphabet::Coloring => 4,
        }
    }

    fn glyph(self, s: u8) -> char {
        match (self, s) {
            (Alphabet::Coloring, BOT) => '⊥',
            (_, s) => char::from(b'0' + s),
        }
    }

    fn parse_glyph(self, c: char) -> Option<u8> {
        match (self, c) {
            (Alphabet::Boolean, '0') => Some(0),
            (Alphabet::Boolean, '1') => Some(1),
            (Alphabet::Coloring, '⊥' | 'b') => Some(BOT),
            (Alphabet::Coloring, '1'..='3') => Some(c as u8 - b'0'),
            _ => None,
        }
    }
}

pub fn pattern_code(symbols: &[u8], q: usize) -> usize {
    symbols.iter().rev().fold(0, |acc, &s| acc * q + s as usize)
}

pub fn pattern_symbols(code: usize, t: usize, q: usize) -> Vec<u8> {
    (0..t).scan(code, |c, _| {
        let s = (*c % q) as u8;
        *c /= q;
        Some(s)
    })
    .collect()
}

pub fn format_pattern(code: usize, t: usize, alphabet: Alphabet) -> String {
    pattern_symbols(code, t, alphabet.size()).into_iter().map(|s| alphabet.glyph(s)).collect()
}

/// Codes of every pattern matched by `query`, where `*` matches any symbol.
pub fn parse_pattern(query: &str, alphabet: Alphabet) -> Result<Vec<usize>> {
    let q = alphabet.size();
    let mut codes = vec![0usize];
    for (i, c) in query.chars().enumerate() {
        let place = q.pow(i as u32);
        let choices: Vec<u8> = if c == '*' {
            (0..q as u8).collect()
        } else {
            vec![alphabet.parse_glyph(c).ok_or_else(|| Error::param(format!("bad pattern symbol {c:?} in {query:?}")))?]
        };
        codes = codes.iter().flat_map(|&b| choices.iter().map(move |&s| b + s as usize * place)).collect();
    }
    codes.sort_unstable();
    Ok(codes)
}

/// Access to single-vertex and pairwise label probabilities.
pub trait LocalMoments: Sync {
    fn n(&self) -> usize;
    fn alphabet(&self) -> Alphabet;
    /// `Pr[x_u = s]`.
    fn marginal(&self, u: usize, s: u8) -> f64;
    /// `Pr[x_u = s, x_v = r]` for `u != v`.
    fn joint(&self, u: usize, v: usize, s: u8, r: u8) -> f64;
}

/// A single assignment viewed as a point mass.
#[derive(Clone, Copy, Debug)]
pub struct Integral<'a> {
    pub x: &'a [u8],
    pub alphabet: Alphabet,
}

impl LocalMoments for Integral<'_> {
    fn n(&self) -> usize {
        self.x.len()
    }
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }
    fn marginal(&self, u: usize, s: u8) -> f64 {
        (self.x[u] == s) as u8 as f64
    }
    fn joint(&self, u: usize, v: usize, s: u8, r: u8) -> f64 {
        (self.x[u] == s && self.x[v] == r) as u8 as f64
    }
}

/// `wt(α)` and the double-counted edge weights `e(α, β)` of a tuple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternWeights {
    pub t: usize,
    pub alphabet: Alphabet,
    pub wt: Vec<f64>,
    /// Row-major `q^t x q^t`, symmetric.
    pub e: Vec<f64>,
    pub regular: bool,
}

impl PatternWeights {
    pub fn patterns(&self) -> usize {
        self.wt.len()
    }

    pub fn e(&self, a: usize, b: usize) -> f64 {
        self.e[a * self.wt.len() + b]
    }

    pub fn wt_set(&self, set: &[usize]) -> f64 {
        set.iter().map(|&a| self.wt[a]).sum()
    }

    pub fn e_sets(&self, s: &[usize], r: &[usize]) -> f64 {
        s.iter().flat_map(|&a| r.iter().map(move |&b| (a, b))).map(|(a, b)| self.e(a, b)).sum()
    }

    /// `wt` of a query such as `"00*"`.
    pub fn wt_query(&self, query: &str) -> Result<f64> {
        let codes = parse_pattern(query, self.alphabet)?;
        if query.chars().count() != self.t {
            return Err(Error::param(format!("pattern {query:?} does not have arity {}", self.t)));
        }
        Ok(self.wt_set(&codes))
    }

    /// `|sum wt - 1|`, `|sum e - 1|` and, for regular graphs,
    /// `max_α |sum_β e(α, β) - wt(α)|` (zero otherwise).
    pub fn identity_residuals(&self) -> (f64, f64, f64) {
        let k = self.wt.len();
        let simplex = (self.wt.iter().sum::<f64>() - 1.0).abs();
        let edges = if self.e.iter().all(|&v| v == 0.0) { 0.0 } else { (self.e.iter().sum::<f64>() - 1.0).abs() };
        let rows = if self.regular {
            (0..k).map(|a| ((0..k).map(|b| self.e(a, b)).sum::<f64>() - self.wt[a]).abs()).fold(0.0, f64::max)
        } else {
            0.0
        };
        (simplex, edges, rows)
    }

    /// Largest `|e(α, β)|` over Boolean pattern pairs with intersecting support.
    pub fn overlapping_edge_mass(&self) -> f64 {
        assert_eq!(self.alphabet, Alphabet::Boolean, "support is defined for Boolean patterns");
        let k = self.wt.len();
        (0..k)
            .flat_map(|a| (0..k).map(move |b| (a, b)))
            .filter(|&(a, b)| a & b != 0)
            .map(|(a, b)| self.e(a, b).abs())
            .fold(0.0, f64::max)
    }
}

fn check_arity(t: usize, q: usize) -> Result<usize> {
    let k = q.checked_pow(t as u32).filter(|&k| k <= MAX_PATTERNS && t >= 1);
    k.ok_or_else(|| Error::param(format!("arity {t} over an alphabet of size {q} is out of range")))
}

pub fn pattern_weights_from_assignments(g: &Graph, xs: &[&[u8]], alphabet: Alphabet) -> Result<PatternWeights> {
    let (n, q) = (g.n(), alphabet.size());
    let k = check_arity(xs.len(), q)?;
    for x in xs {
        if x.len() != n {
            return Err(Error::param(format!("assignment of length {} for {n} vertices", x.len())));
        }
        if let Some(&s) = x.iter().find(|&&s| s as usize >= q) {
            return Err(Error::param(format!("symbol {s} outside the {alphabet:?} alphabet")));
        }
    }
    let code: Vec<usize> = (0..n).map(|u| xs.iter().rev().fold(0, |acc, x| acc * q + x[u] as usize)).collect();
    let mut wt = vec![0.0; k];
    let mut counts = vec![0usize; k];
    code.iter().for_each(|&c| counts[c] += 1);
    for (w, c) in wt.iter_mut().zip(&counts) {
        *w = *c as f64 / n.max(1) as f64;
    }
    let mut ecount = vec![0usize; k * k];
    for &(u, v) in g.edges() {
        let (a, b) = (code[u as usize], code[v as usize]);
        ecount[a * k + b] += 1;
        ecount[b * k + a] += 1;
    }
    let denom = (2 * g.m()).max(1) as f64;
    let e = ecount.iter().map(|&c| c as f64 / denom).collect();
    Ok(PatternWeights { t: xs.len(), alphabet, wt, e, regular: g.regular_degree().is_some() })
}

/// Pattern weights of `x^(i) ~ copies[i]` drawn independently, which is how
/// pseudo-expectations factor over product pseudo-distributions.
pub fn pattern_weights_from_product(g: &Graph, copies: &[&dyn LocalMoments]) -> Result<PatternWeights> {
    let first = copies.first().ok_or_else(|| Error::param("need at least one copy"))?;
    let (n, alphabet) = (first.n(), first.alphabet());
    if n != g.n() || copies.iter().any(|c| c.n() != n || c.alphabet() != alphabet) {
        return Err(Error::param("copies must share the vertex set and alphabet of the graph"));
    }
    let q = alphabet.size();
    let t = copies.len();
    let k = check_arity(t, q)?;
    let syms: Vec<Vec<u8>> = (0..k).map(|a| pattern_symbols(a, t, q)).collect();

    let mut wt = vec![0.0; k];
    for u in 0..n {
        let table: Vec<Vec<f64>> = copies.iter().map(|c| (0..q as u8).map(|s| c.marginal(u, s)).collect()).collect();
        for (a, s) in syms.iter().enumerate() {
            wt[a] += s.iter().enumerate().map(|(i, &si)| table[i][si as usize]).product::<f64>();
        }
    }
    wt.iter_mut().for_each(|w| *w /= n.max(1) as f64);

    let mut e = vec![0.0; k * k];
    for &(u, v) in g.edges() {
        let (u, v) = (u as usize, v as usize);
        let joint: Vec<Vec<f64>> = copies
            .iter()
            .map(|c| (0..q * q).map(|ab| c.joint(u, v, (ab / q) as u8, (ab % q) as u8)).collect())
            .collect();
        for (a, sa) in syms.iter().enumerate() {
            for (b, sb) in syms.iter().enumerate() {
                let p: f64 = (0..t).map(|i| joint[i][sa[i] as usize * q + sb[i] as usize]).product();
                e[a * k + b] += p;
                e[b * k + a] += p;
            }
        }
    }
    let denom = (2 * g.m()).max(1) as f64;
    e.iter_mut().for_each(|v| *v /= denom);
    Ok(PatternWeights { t, alphabet, wt, e, regular: g.regular_degree().is_some() })
}

/// `wt(00) - wt(11) - (2 eps - sum_i (E_u x^(i)_u - (1/2 - eps)))` for two
/// Boolean assignments; zero up to rounding for any pair.
pub fn mean_gap_identity_residual(x1: &[u8], x2: &[u8], eps: f64) -> Result<f64> {
    if x1.len() != x2.len() || x1.is_empty() {
        return Err(Error::param("assignments must be non-empty and of equal length"));
    }
    let n = x1.len() as f64;
    let count = |f: &dyn Fn(usize) -> bool| (0..x1.len()).filter(|&u| f(u)).count() as f64 / n;
    let w00 = count(&|u| x1[u] == 0 && x2[u] == 0);
    let w11 = count(&|u| x1[u] == 1 && x2[u] == 1);
    let m1 = count(&|u| x1[u] == 1);
    let m2 = count(&|u| x2[u] == 1);
    Ok((w00 - w11) - (2.0 * eps - ((m1 - (0.5 - eps)) + (m2 - (0.5 - eps)))))
}

/// `wt(00) - wt(11) - (1 - λ₂) w (1 - w)` with `w = wt({00, 11})`.
pub fn spectral_gap_slack(pw: &PatternWeights, lambda2: f64) -> Result<f64> {
    if pw.alphabet != Alphabet::Boolean || pw.t != 2 {
        return Err(Error::param("needs Boolean pattern weights of arity 2"));
    }
    let w = pw.wt[0] + pw.wt[3];
    Ok(pw.wt[0] - pw.wt[3] - (1.0 - lambda2) * w * (1.0 - w))
}

/// The six permutations of `[3]` as symbol maps fixing `⊥`, even ones first.
pub const PERMUTATIONS: [[u8; 4]; 6] =
    [[0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2], [0, 1, 3, 2], [0, 3, 2, 1], [0, 2, 1, 3]];

pub fn permutation_sign(p: usize) -> i8 {
    if p < 3 {
        1
    } else {
        -1
    }
}

/// Codes of `S_π = {(σ, π(σ))}` inside `Σ^2`.
pub fn s_pi(p: usize) -> [usize; 3] {
    let pi = PERMUTATIONS[p];
    [1u8, 2, 3].map(|s| s as usize + 4 * pi[s as usize] as usize)
}

/// Codes of patterns in `Σ^2` with some `⊥`.
pub fn s_bot() -> Vec<usize> {
    (0..16).filter(|&c| c % 4 == 0 || c / 4 == 0).collect()
}

/// Residuals of the two parity-class partitions, `sum_{π even} wt(S_π)` and
/// `sum_{π odd} wt(S_π)` against `1 - wt(S_⊥)`, and the excess
/// `sum_π e(S_π, complement) - 1` (non-positive when the bound holds).
pub fn permutation_partition_residuals(pw: &PatternWeights) -> Result<(f64, f64, f64)> {
    if pw.alphabet != Alphabet::Coloring || pw.t != 2 {
        return Err(Error::param("needs coloring pattern weights of arity 2"));
    }
    let target = 1.0 - pw.wt_set(&s_bot());
    let class = |lo: usize| (lo..lo + 3).map(|p| pw.wt_set(&s_pi(p))).sum::<f64>() - target;
    let cut: f64 = (0..6)
        .map(|p| {
            let inside = s_pi(p);
            let outside: Vec<usize> = (0..16).filter(|c| !inside.contains(c)).collect();
            pw.e_sets(&inside, &outside)
        })
        .sum();
    Ok((class(0), class(3), cut - 1.0))
}

/// `sum_π wt(S_π)^2 - (2 - 1 / (1 - λ₂) - 2 wt(S_⊥))`.
pub fn agreement_square_slack(pw: &PatternWeights, lambda2: f64) -> Result<f64> {
    if pw.alphabet != Alphabet::Coloring || pw.t != 2 {
        return Err(Error::param("needs coloring pattern weights of arity 2"));
    }
    let sq: f64 = (0..6).map(|p| pw.wt_set(&s_pi(p)).powi(2)).sum();
    Ok(sq - (2.0 - 1.0 / (1.0 - lambda2) - 2.0 * pw.wt_set(&s_bot())))
}

/// `agree_π(x, y)`: fraction of vertices with `y_u = π(x_u) ≠ ⊥`.
pub fn agreement(x: &[u8], y: &[u8], p: usize) -> Result<f64> {
    if x.len() != y.len() || x.is_empty() || p >= 6 {
        return Err(Error::param("agreement needs equal non-empty colorings and a permutation index below 6"));
    }
    let pi = PERMUTATIONS[p];
    let hits = x.iter().zip(y).filter(|(&a, &b)| a != BOT && (a as usize) < 4 && pi[a as usize] == b).count();
    Ok(hits as f64 / x.len() as f64)
}

pub fn agreement_max(x: &[u8], y: &[u8]) -> Result<f64> {
    (0..6).try_fold(0.0f64, |m, p| Ok(m.max(agreement(x, y, p)?)))
}

/// `sum_π agree_π(x, y)^ell`.
pub fn agreement_ell(x: &[u8], y: &[u8], ell: u32) -> Result<f64> {
    (0..6).try_fold(0.0, |s, p| Ok(s + agreement(x, y, p)?.powi(ell as i32)))
}

/// `E_u sum_{σ ∈ [3]} Pr[x_u = σ]^2` with each marginal vector clamped to
/// the simplex.
pub fn collision_probability(m: &dyn LocalMoments) -> Result<f64> {
    if m.alphabet() != Alphabet::Coloring {
        return Err(Error::param("collision probability needs the coloring alphabet"));
    }
    let n = m.n();
    let total: f64 = (0..n)
        .map(|u| {
            let p = clamp_simplex(&[0u8, 1, 2, 3].map(|s| m.marginal(u, s)));
            p[1..].iter().map(|v| v * v).sum::<f64>()
        })
        .sum();
    Ok(total / n.max(1) as f64)
}

/// Zeroes negative entries and renormalises; all-zero input stays zero.
pub fn clamp_simplex(p: &[f64]) -> Vec<f64> {
    let c: Vec<f64> = p.iter().map(|&v| v.max(0.0)).collect();
    let s: f64 = c.iter().sum();
    if s > 0.0 {
        c.iter().map(|v| v / s).collect()
    } else {
        c
    }
}

/// `H_t`: patterns in `{0,1}^t`, adjacent iff their supports are disjoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetGraph {
    pub t: usize,
    /// Pairs `a <= b`, including the loop at `0`.
    pub edges: Vec<(u32, u32)>,
}

impl GadgetGraph {
    pub fn new(t: usize) -> Result<Self> {
        if !(1..=6).contains(&t) {
            return Err(Error::param(format!("gadget arity {t} outside 1..=6")));
        }
        let k = 1u32 << t;
        let edges = (0..k).flat_map(|a| (a..k).map(move |b| (a, b))).filter(|&(a, b)| a & b == 0).collect();
        Ok(GadgetGraph { t, edges })
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        a & b == 0
    }

    pub fn is_independent(&self, set: &[u32]) -> bool {
        set.iter().enumerate().all(|(i, &a)| set[i..].iter().all(|&b| !self.has_edge(a, b)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivedKind {
    /// `S_i = {α : α_i = 1}`.
    Subcube { i: usize },
    /// `T_{U,i} = A_{U,i} ∪ B_{U,i}`; coordinates are 1-based.
    Derived { u: Vec<usize>, i: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedSet {
    pub kind: DerivedKind,
    pub members: Vec<u32>,
}

/// The subcubes `S_i` and the derived sets `T_{U,i}` for `|U| >= 2`, each
/// checked independent in `H_t`.
pub fn derived_is_families(t: usize) -> Result<Vec<DerivedSet>> {
    if !(2..=6).contains(&t) {
        return Err(Error::param(format!("derived families need 2 <= t <= 6, got {t}")));
    }
    let h = GadgetGraph::new(t)?;
    let k = 1u32 << t;
    let mut out: Vec<DerivedSet> = (0..t)
        .map(|i| DerivedSet { kind: DerivedKind::Subcube { i: i + 1 }, members: (0..k).filter(|a| a >> i & 1 == 1).collect() })
        .collect();
    for umask in 1u32..k {
        if umask.count_ones() < 2 {
            continue;
        }
        for i in (0..t).filter(|&i| umask >> i & 1 == 1) {
            let rest = umask & !(1 << i);
            let members = (0..k)
                .filter(|&a| {
                    let on = a >> i & 1 == 1;
                    (on && a & rest != 0) || (!on && a & rest == rest)
                })
                .collect();
            let u = (0..t).filter(|&j| umask >> j & 1 == 1).map(|j| j + 1).collect();
            out.push(DerivedSet { kind: DerivedKind::Derived { u, i: i + 1 }, members });
        }
    }
    if let Some(bad) = out.iter().find(|s| !h.is_independent(&s.members)) {
        return Err(Error::Verification(format!("{:?} is not independent in H_{t}", bad.kind)));
    }
    Ok(out)
}

/// Vertices whose pattern under the Boolean assignments `xs` lies in `set`.
pub fn lift(xs: &[&[u8]], set: &[u32]) -> Vec<usize> {
    let n = xs.first().map_or(0, |x| x.len());
    (0..n).filter(|&u| set.contains(&(pattern_code(&xs.iter().map(|x| x[u]).collect::<Vec<_>>(), 2) as u32))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_round_trip() {
        assert_eq!(pattern_code(&[1, 0, 1], 2), 0b101);
        assert_eq!(pattern_symbols(0b110, 3, 2), vec![0, 1, 1]);
        assert_eq!(format_pattern(0b110, 3, Alphabet::Boolean), "011");
        assert_eq!(parse_pattern("00*", Alphabet::Boolean).unwrap(), vec![0b000, 0b100]);
        assert_eq!(format_pattern(pattern_code(&[0, 2], 4), 2, Alphabet::Coloring), "⊥2");
    }

    #[test]
    fn gadget_small_cases() {
        let h = GadgetGraph::new(2).unwrap();
        // patterns written α1α2: 00-00, 00-10, 00-01, 00-11, 10-01
        assert_eq!(h.edges, vec![(0, 0), (0, 1), (0, 2), (0, 3), (1, 2)]);
        assert_eq!(GadgetGraph::new(1).unwrap().edges, vec![(0, 0), (0, 1)]);
        assert!(GadgetGraph::new(7).is_err());
    }

    #[test]
    fn derived_example() {
        let fam = derived_is_families(3).unwrap();
        let t = fam.iter().find(|s| s.kind == DerivedKind::Derived { u: vec![1, 2, 3], i: 1 }).unwrap();
        let mut names: Vec<String> = t.members.iter().map(|&a| format_pattern(a as usize, 3, Alphabet::Boolean)).collect();
        names.sort();
        assert_eq!(names, vec!["011", "101", "110", "111"]);
        assert_eq!(fam.iter().filter(|s| matches!(s.kind, DerivedKind::Subcube { .. })).count(), 3);
    }
}
