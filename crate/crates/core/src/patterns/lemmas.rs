//! Finite-dimensional lemmas behind the coloring analysis, with samplers
//! that stress them near their extremal configurations.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{BOT, PERMUTATIONS};
use crate::exec::{map_range, Exec};
use crate::rng::{sub_rng, Rng};

const TOL: f64 = 1e-12;

/// Number of patterns in `Σ^3`.
pub const TRIPLE_PATTERNS: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaOutcome {
    /// A hypothesis fails; the lemma says nothing.
    Vacuous(String),
    /// The conclusion holds; `witness` is lemma specific and `value` is the
    /// quantity compared against the bound.
    Holds { witness: Vec<usize>, value: f64 },
    Counterexample { detail: String },
}

impl LemmaOutcome {
    pub fn is_counterexample(&self) -> bool {
        matches!(self, LemmaOutcome::Counterexample { .. })
    }
    pub fn is_vacuous(&self) -> bool {
        matches!(self, LemmaOutcome::Vacuous(_))
    }
}

/// For `0 <= z_i <= 1/2 + γ`, `z1 + z2 + z3 = z4 + z5 + z6 <= 1` and
/// `|z|^2 >= 1 - γ` with `γ <= 0.01`, some `z_i (i <= 3)` and some
/// `z_j (j >= 4)` are at most `8γ`. The witness holds 1-based `[i, j]`.
pub fn check_six_variable(z: &[f64; 6], gamma: f64) -> LemmaOutcome {
    if !(0.0..=0.01).contains(&gamma) {
        return LemmaOutcome::Vacuous(format!("gamma = {gamma} outside [0, 0.01]"));
    }
    if let Some(i) = z.iter().position(|&v| !(-TOL..=0.5 + gamma + TOL).contains(&v)) {
        return LemmaOutcome::Vacuous(format!("z{} = {} outside [0, 1/2 + gamma]", i + 1, z[i]));
    }
    let (s1, s2) = (z[0] + z[1] + z[2], z[3] + z[4] + z[5]);
    if (s1 - s2).abs() > 1e-9 || s1 > 1.0 + 1e-9 {
        return LemmaOutcome::Vacuous(format!("triple sums {s1} and {s2} unequal or above 1"));
    }
    let norm: f64 = z.iter().map(|v| v * v).sum();
    if norm < 1.0 - gamma {
        return LemmaOutcome::Vacuous(format!("|z|^2 = {norm} < 1 - gamma"));
    }
    let argmin = |r: std::ops::Range<usize>| r.min_by(|&a, &b| z[a].total_cmp(&z[b])).expect("non-empty");
    let (i, j) = (argmin(0..3), argmin(3..6));
    let value = z[i].max(z[j]);
    if value <= 8.0 * gamma + TOL {
        LemmaOutcome::Holds { witness: vec![i + 1, j + 1], value }
    } else {
        LemmaOutcome::Counterexample { detail: format!("z = {z:?}, gamma = {gamma}") }
    }
}

fn digit(a: usize, i: usize) -> u8 {
    (a >> (2 * i) & 3) as u8
}

/// `w(S_π^{(ij)})`: mass of patterns with `α_i ∈ [3]` and `α_j = π(α_i)`.
pub fn triple_agreement(w: &[f64; TRIPLE_PATTERNS], p: usize, i: usize, j: usize) -> f64 {
    let pi = PERMUTATIONS[p];
    (0..TRIPLE_PATTERNS)
        .filter(|&a| digit(a, i) != BOT && pi[digit(a, i) as usize] == digit(a, j))
        .map(|a| w[a])
        .sum()
}

const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// For a distribution `w` on `Σ^3` (digit `i` of the index is coordinate
/// `i`) with color marginals at most `1/2 + γ`, `⊥` marginals at most
/// `eps` and `sum_π w(S_π^{(ij)})^2 >= 1 - γ` for every pair, some
/// `w(S_π^{(ij)}) >= 1/2 + γ`. The witness is `[π index, i, j]` with 1-based
/// coordinates.
pub fn check_triple_coloring(w: &[f64; TRIPLE_PATTERNS], eps: f64, gamma: f64) -> LemmaOutcome {
    if !(0.0..=0.001).contains(&eps) || !(0.0..=0.001).contains(&gamma) {
        return LemmaOutcome::Vacuous(format!("eps = {eps}, gamma = {gamma} outside [0, 0.001]"));
    }
    if w.iter().any(|&v| !(-TOL..=1.0 + TOL).contains(&v)) {
        return LemmaOutcome::Vacuous("entry outside [0, 1]".into());
    }
    let total: f64 = w.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return LemmaOutcome::Vacuous(format!("total mass {total}"));
    }
    for i in 0..3 {
        let mut m = [0.0; 4];
        (0..TRIPLE_PATTERNS).for_each(|a| m[digit(a, i) as usize] += w[a]);
        if m[1..].iter().any(|&v| v > 0.5 + gamma + TOL) {
            return LemmaOutcome::Vacuous(format!("a color class of coordinate {} exceeds 1/2 + gamma", i + 1));
        }
        if m[0] > eps + TOL {
            return LemmaOutcome::Vacuous(format!("⊥ mass {} of coordinate {} exceeds eps", m[0], i + 1));
        }
    }
    let mut best = (f64::NEG_INFINITY, 0, 0, 0);
    for &(i, j) in &PAIRS {
        let vals: Vec<f64> = (0..6).map(|p| triple_agreement(w, p, i, j)).collect();
        let sq: f64 = vals.iter().map(|v| v * v).sum();
        if sq < 1.0 - gamma {
            return LemmaOutcome::Vacuous(format!("pair ({}, {}) has sum of squares {sq} < 1 - gamma", i + 1, j + 1));
        }
        for (p, &v) in vals.iter().enumerate() {
            if v > best.0 {
                best = (v, p, i, j);
            }
        }
    }
    if best.0 >= 0.5 + gamma - TOL {
        LemmaOutcome::Holds { witness: vec![best.1, best.2 + 1, best.3 + 1], value: best.0 }
    } else {
        LemmaOutcome::Counterexample { detail: format!("w = {w:?}, eps = {eps}, gamma = {gamma}") }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerReport {
    pub feasible: u64,
    pub drawn: u64,
    pub counterexamples: u64,
    /// Smallest distance of the conclusion from failing over feasible points.
    pub min_margin: f64,
}

fn run_sampler<F>(feasible: u64, seed: u64, exec: Exec, draw: F) -> SamplerReport
where
    F: Fn(&mut Rng) -> Option<(bool, f64)> + Sync + Send,
{
    const CHUNK: u64 = 20_000;
    let chunks = feasible.div_ceil(CHUNK);
    let parts = map_range(exec, chunks as usize, |c| {
        let quota = CHUNK.min(feasible - c as u64 * CHUNK);
        let mut rng = sub_rng(seed, c as u64);
        let (mut got, mut drawn, mut bad, mut margin) = (0u64, 0u64, 0u64, f64::INFINITY);
        while got < quota {
            drawn += 1;
            if let Some((counter, m)) = draw(&mut rng) {
                got += 1;
                bad += counter as u64;
                margin = margin.min(m);
            }
        }
        (got, drawn, bad, margin)
    });
    parts.into_iter().fold(
        SamplerReport { feasible: 0, drawn: 0, counterexamples: 0, min_margin: f64::INFINITY },
        |mut r, (g, d, b, m)| {
            r.feasible += g;
            r.drawn += d;
            r.counterexamples += b;
            r.min_margin = r.min_margin.min(m);
            r
        },
    )
}

fn six_point(rng: &mut Rng) -> ([f64; 6], f64) {
    let gamma = if rng.random_bool(0.1) { 0.01 } else { rng.random_range(0.0..=0.01) };
    if rng.random_bool(0.05) {
        let mut z = [0.0; 6];
        z.iter_mut().for_each(|v| *v = rng.random_range(0.0..0.5 + gamma));
        let s: f64 = z[3] + z[4] + z[5];
        let f = (z[0] + z[1] + z[2]) / s.max(1e-300);
        z[3..].iter_mut().for_each(|v| *v *= f);
        return (z, gamma);
    }
    // per triple two entries just under the cap and a small remainder `u`;
    // the norm bound leaves a budget of about `γ` for the slack terms
    let hi = 0.5 + gamma;
    let r = rng.random_range(0.0..=gamma / 2.0);
    let triple = |rng: &mut Rng| {
        let u = rng.random_range(0.0..=1.2 * gamma);
        let d = 2.0 * gamma + r + u;
        let da = rng.random_range((d - hi).max(0.0)..=d.min(hi));
        [hi - da, hi - (d - da), u]
    };
    let mut first = triple(rng);
    let mut second = triple(rng);
    first.shuffle(rng);
    second.shuffle(rng);
    ([first[0], first[1], first[2], second[0], second[1], second[2]], gamma)
}

/// Draws until `feasible` points satisfy the six-variable hypotheses.
pub fn sample_six_variable(feasible: u64, seed: u64, exec: Exec) -> SamplerReport {
    run_sampler(feasible, seed, exec, |rng| {
        let (z, gamma) = six_point(rng);
        match check_six_variable(&z, gamma) {
            LemmaOutcome::Vacuous(_) => None,
            LemmaOutcome::Holds { value, .. } => Some((false, 8.0 * gamma - value)),
            LemmaOutcome::Counterexample { .. } => Some((true, f64::NEG_INFINITY)),
        }
    })
}

fn code(a: [u8; 3]) -> usize {
    a[0] as usize | (a[1] as usize) << 2 | (a[2] as usize) << 4
}

fn random_perm(rng: &mut Rng) -> [u8; 4] {
    PERMUTATIONS[rng.random_range(0..6)]
}

/// A point built from aligned colorings: each color class of coordinate 1
/// is mapped to coordinates 2 and 3 by fixed permutations, optionally mixed
/// with a second alignment, then perturbed.
fn triple_point(rng: &mut Rng) -> ([f64; TRIPLE_PATTERNS], f64, f64) {
    let eps = if rng.random_bool(0.2) { 0.001 } else { rng.random_range(0.0..=0.001) };
    let gamma = if rng.random_bool(0.2) { 0.001 } else { rng.random_range(0.0..=0.001) };
    let mut w = [0.0; TRIPLE_PATTERNS];
    let cap = 0.5 + gamma;
    let weights: [f64; 3] = match rng.random_range(0..3) {
        // two colors, close to half each
        0 => {
            let a = rng.random_range(0.5 - 3.0 * gamma..=cap);
            [a, 1.0 - a, 0.0]
        }
        // three classes
        1 => {
            let a = rng.random_range(0.0..=cap);
            let b = rng.random_range(0.0..=cap.min(1.0 - a));
            [a, b, 1.0 - a - b]
        }
        _ => {
            let a = rng.random_range(0.0..=cap);
            [a, (1.0 - a) / 2.0, (1.0 - a) / 2.0]
        }
    };
    let (p1, p2, p3) = (random_perm(rng), random_perm(rng), random_perm(rng));
    let (q2, q3) = (random_perm(rng), random_perm(rng));
    let mix = if rng.random_bool(0.3) { rng.random_range(0.0..=gamma) } else { 0.0 };
    for (k, &m) in weights.iter().enumerate() {
        let s = k as u8 + 1;
        let a = p1[s as usize];
        w[code([a, p2[a as usize], p3[a as usize]])] += m * (1.0 - mix);
        w[code([a, q2[a as usize], q3[a as usize]])] += m * mix;
    }
    // noise: a little mass anywhere, less on ⊥ patterns
    let noise = rng.random_range(0.0..=gamma / 4.0);
    let bot = rng.random_range(0.0..=eps / 2.0);
    let spots = rng.random_range(1..=6);
    let scale = 1.0 - noise - bot;
    w.iter_mut().for_each(|v| *v *= scale);
    for _ in 0..spots {
        let a = [rng.random_range(1..4), rng.random_range(1..4), rng.random_range(1..4)];
        w[code(a)] += noise / spots as f64;
        let mut b = [rng.random_range(1..4), rng.random_range(1..4), rng.random_range(1..4)];
        b[rng.random_range(0..3)] = BOT;
        w[code(b)] += bot / spots as f64;
    }
    (w, eps, gamma)
}

/// Draws until `feasible` points satisfy the triple-coloring hypotheses.
pub fn sample_triple_coloring(feasible: u64, seed: u64, exec: Exec) -> SamplerReport {
    run_sampler(feasible, seed, exec, |rng| {
        let (w, eps, gamma) = triple_point(rng);
        match check_triple_coloring(&w, eps, gamma) {
            LemmaOutcome::Vacuous(_) => None,
            LemmaOutcome::Holds { value, .. } => Some((false, value - (0.5 + gamma))),
            LemmaOutcome::Counterexample { .. } => Some((true, f64::NEG_INFINITY)),
        }
    })
}
