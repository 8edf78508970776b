//! Linear packing bound for Boolean pattern weights.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{derived_is_families, pattern_weights_from_assignments, Alphabet, DerivedKind, PatternWeights};
use crate::graphs::Graph;
use crate::polyapprox::{choose, Basis, UniPoly};
use crate::pseudodist::{product_expect, PseudoDistribution};
use crate::rng::rng;
use crate::{Error, Result};

/// Cap on `n^k` moment tuples when expanding `q(wt(1⃗))` on a moment table.
const MAX_MOMENT_TUPLES: usize = 10_000_000;
/// Cap on product-support tuples for support-backed inputs.
const MAX_SUPPORT_TUPLES: usize = 1_000_000;
/// Random integral tuples used to spot-check the linear packing bound.
const W0_SAMPLES: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct W0Report {
    pub t: usize,
    pub hypotheses_hold: bool,
    pub w0: f64,
    pub w1: f64,
    /// `wt(1⃗) + t (eps + eta) - wt(0⃗)`; non-negative when the bound holds.
    pub slack: f64,
}

/// The smallest `(eps, eta)` with `wt(S_i) >= 1/2 - eps` for every subcube
/// and `wt(T) <= 1/2 + eta` for every derived set.
pub fn hypothesis_parameters(pw: &PatternWeights) -> Result<(f64, f64)> {
    check(pw)?;
    let fam = derived_is_families(pw.t)?;
    let (mut eps, mut eta) = (0.0f64, 0.0f64);
    for s in &fam {
        let w: f64 = s.members.iter().map(|&a| pw.wt[a as usize]).sum();
        match s.kind {
            DerivedKind::Subcube { .. } => eps = eps.max(0.5 - w),
            DerivedKind::Derived { .. } => eta = eta.max(w - 0.5),
        }
    }
    Ok((eps, eta))
}

/// Checks `wt(0⃗) <= wt(1⃗) + t (eps + eta)` under the subcube lower bounds,
/// derived-set upper bounds and normalisation.
pub fn check_w0_leq_w1(pw: &PatternWeights, eps: f64, eta: f64) -> Result<W0Report> {
    let (need_eps, need_eta) = hypothesis_parameters(pw)?;
    let simplex = (pw.wt.iter().sum::<f64>() - 1.0).abs() <= 1e-9;
    let t = pw.t;
    let (w0, w1) = (pw.wt[0], pw.wt[(1 << t) - 1]);
    Ok(W0Report {
        t,
        hypotheses_hold: simplex && need_eps <= eps + 1e-12 && need_eta <= eta + 1e-12,
        w0,
        w1,
        slack: w1 + t as f64 * (eps + eta) - w0,
    })
}

/// Both branch statistics of the packing dichotomy for `t` copies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingReport {
    pub t: usize,
    /// Derived family of `H_{2t}` with the largest `pE[wt(T)]` over `2t`
    /// independent copies.
    pub case1_family: DerivedKind,
    pub case1_value: f64,
    /// `case1_value > 1/2 + eta`.
    pub case1_triggered: bool,
    /// `pE[q(wt(1⃗))]` over `t` independent copies, `q(z) = p(z) - 3z`.
    pub case2_value: f64,
    /// `-1 / (4 binom(2t, t))`.
    pub case2_bound: f64,
    /// `(3/2) binom(2t, t) t (eps + eta) - 1/2`.
    pub rhs: f64,
    /// Random integral tuples on which the linear packing bound was checked.
    pub w0_checks: usize,
    pub w0_violations: usize,
}

impl PackingReport {
    /// One of the two branches holds, case 2 up to `slack`.
    pub fn dichotomy_holds(&self, slack: f64) -> bool {
        self.case1_triggered || self.case2_value <= self.case2_bound + slack
    }
}

/// Evaluates the packing certificate on `pd`: the best derived family over
/// `2t` copies, `pE[q(wt(1⃗))]` over `t` copies and the certificate's
/// right-hand side. Also checks `wt(0⃗) <= wt(1⃗) + t (eps + eta)` on random
/// tuples of maximal independent sets of `g`, with the smallest
/// `(eps, eta)` each tuple satisfies.
///
/// Moment tables need degree at least `deg p`; support-backed inputs are
/// evaluated exactly.
pub fn packing_certificate_value(
    pd: &PseudoDistribution,
    g: &Graph,
    p: &UniPoly,
    t: usize,
    eps: f64,
    eta: f64,
    seed: u64,
) -> Result<PackingReport> {
    if !(1..=3).contains(&t) {
        return Err(Error::param(format!("packing certificate needs 1 <= t <= 3, got {t}")));
    }
    if pd.alphabet() != Alphabet::Boolean || pd.n() != g.n() {
        return Err(Error::param("pseudo-distribution does not match the graph"));
    }
    let n = g.n();
    let means: Vec<f64> = pd.means().into_iter().map(|m| m.clamp(0.0, 1.0)).collect();
    let copies = 2 * t;
    let mut best: Option<(f64, DerivedKind)> = None;
    for fam in derived_is_families(copies)? {
        let w = means
            .iter()
            .map(|&m| {
                fam.members
                    .iter()
                    .map(|&a| (0..copies).map(|i| if a >> i & 1 == 1 { m } else { 1.0 - m }).product::<f64>())
                    .sum::<f64>()
            })
            .sum::<f64>()
            / n as f64;
        if best.as_ref().is_none_or(|b| w > b.0) {
            best = Some((w, fam.kind));
        }
    }
    let (case1_value, case1_family) = best.expect("families are non-empty");

    let q = |z: f64| p.eval(z) - 3.0 * z;
    let case2_value = match pd.support() {
        Some(s) => product_expect(&vec![s; t], MAX_SUPPORT_TUPLES, q)?,
        None => table_case2(pd, p, t)?,
    };

    let b = choose(2 * t, t);
    let (w0_checks, w0_violations) = spot_check_w0(g, t.max(2), seed)?;
    Ok(PackingReport {
        t,
        case1_family,
        case1_value,
        case1_triggered: case1_value > 0.5 + eta,
        case2_value,
        case2_bound: -1.0 / (4.0 * b),
        rhs: 1.5 * b * t as f64 * (eps + eta) - 0.5,
        w0_checks,
        w0_violations,
    })
}

/// `pE[q(wt(1⃗))]` over `t` copies of a moment table: `wt(1⃗)^k` has
/// expectation `E_{u_1..u_k} pE[x_{u_1} ... x_{u_k}]^t`.
fn table_case2(pd: &PseudoDistribution, p: &UniPoly, t: usize) -> Result<f64> {
    if p.basis != Basis::Monomial {
        return Err(Error::param("moment tables need p in the monomial basis"));
    }
    let mut q = p.coeffs.clone();
    q.resize(q.len().max(2), 0.0);
    q[1] -= 3.0;
    let n = pd.n();
    let k_max = q.len() - 1;
    if k_max > pd.degree() {
        return Err(Error::DegreeOverflow { needed: k_max, available: pd.degree() });
    }
    if n.checked_pow(k_max as u32).is_none_or(|c| c > MAX_MOMENT_TUPLES) {
        return Err(Error::Budget(format!("{n}^{k_max} moment tuples")));
    }
    let mut total = 0.0;
    for (k, &c) in q.iter().enumerate().filter(|(_, &c)| c != 0.0) {
        let count = n.pow(k as u32);
        let mut idx = vec![0usize; k];
        let mut sum = 0.0;
        for _ in 0..count {
            let mut vs = idx.clone();
            vs.sort_unstable();
            vs.dedup();
            sum += pd.moment(&vs)?.powi(t as i32);
            for d in idx.iter_mut() {
                *d += 1;
                if *d < n {
                    break;
                }
                *d = 0;
            }
        }
        total += c * sum / count as f64;
    }
    Ok(total)
}

fn random_maximal_independent_set(g: &Graph, r: &mut crate::rng::Rng) -> Vec<u8> {
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

fn spot_check_w0(g: &Graph, t: usize, seed: u64) -> Result<(usize, usize)> {
    let mut r = rng(seed);
    let mut violations = 0;
    for _ in 0..W0_SAMPLES {
        let xs: Vec<Vec<u8>> = (0..t).map(|_| random_maximal_independent_set(g, &mut r)).collect();
        let refs: Vec<&[u8]> = xs.iter().map(Vec::as_slice).collect();
        let pw = pattern_weights_from_assignments(g, &refs, Alphabet::Boolean)?;
        let (e, h) = hypothesis_parameters(&pw)?;
        if check_w0_leq_w1(&pw, e, h)?.slack < -1e-9 {
            violations += 1;
        }
    }
    Ok((W0_SAMPLES, violations))
}

fn check(pw: &PatternWeights) -> Result<()> {
    if pw.alphabet != Alphabet::Boolean || !(2..=6).contains(&pw.t) {
        return Err(Error::param("needs Boolean pattern weights with 2 <= t <= 6"));
    }
    Ok(())
}
