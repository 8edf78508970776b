//! Point conditioning, polynomial reweighting and per-copy conditioning of
//! products.

use rand::Rng as _;

use super::admm::Problem;
use super::correlation::pairwise_mutual_information;
use super::system::Layout;
use super::{
    fix_literal, problem_for, Backing, Poly, ProductPseudoDistribution, PseudoDistribution, Residuals, SolveParams,
};
use crate::exec::Exec;
use crate::rng::sub_rng;
use crate::{Error, Result};
use std::sync::Arc;

/// Smallest event probability accepted by conditioning and reweighting.
pub const MIN_EVENT_PROB: f64 = 1e-8;

/// Iteration budget for the pinned completion before falling back.
const PINNED_ITERS: usize = 500;

impl PseudoDistribution {
    /// `μ | x_u = value`.
    ///
    /// Support-backed distributions are filtered exactly. For solved tables
    /// every moment that the reweighting formula `pE[x_K 1(x_u = value)] /
    /// pPr[x_u = value]` determines within the degree budget is pinned to
    /// that value, and only the top-degree moments are re-solved for a PSD
    /// completion. When no completion exists within tolerance the pins are
    /// dropped and the whole table is re-solved under the program's side
    /// constraints; the residual flags record which route was taken.
    pub fn condition_on_value(&self, u: usize, value: u8, params: &SolveParams) -> Result<PseudoDistribution> {
        let p = self.prob(&[(u, value)])?;
        if !(p >= MIN_EVENT_PROB) {
            return Err(Error::NullEvent(p));
        }
        match &self.backing {
            Backing::Support(s) => {
                let (a, w): (Vec<Vec<u8>>, Vec<f64>) = s
                    .assignments
                    .iter()
                    .zip(&s.weights)
                    .filter(|(a, _)| a[u] == value)
                    .map(|(a, &w)| (a.clone(), w))
                    .unzip();
                PseudoDistribution::from_support(self.n(), self.alphabet(), a, w)
            }
            Backing::Table { .. } => self.condition_table(u, value, p, params),
        }
    }

    fn condition_table(&self, u: usize, value: u8, p: f64, params: &SolveParams) -> Result<PseudoDistribution> {
        let atoms = &self.atoms;
        let mut state = (*self.state).clone();
        fix_literal(atoms, &mut state, u, value);
        let layout = Layout::build(atoms, &state, self.degree)?;
        let nk = layout.table.keys.len();
        let mut y0 = vec![0.0; nk];
        let mut pinned = vec![None; nk];
        let mut lits = Vec::with_capacity(self.degree + 1);
        for (i, k) in layout.table.keys.iter().enumerate() {
            lits.clear();
            lits.extend(k.iter().map(|&a| (atoms.vertex(a), atoms.symbol(a))));
            if lits.len() < self.degree {
                lits.push((u, value));
                let v = self.prob(&lits)? / p;
                y0[i] = v;
                pinned[i] = Some(v);
            } else {
                y0[i] = self.prob(&lits).unwrap_or(0.0).clamp(0.0, 1.0);
            }
        }
        let state = Arc::new(state);
        let mut flags = self.residuals.flags.clone();
        let pinned_problem = Problem { layout: &layout, objective: vec![0.0; nk], pinned, constraints: Vec::new() };
        // pinned values inherit the parent's slack amplified by 1 / p
        let tol = params.tol.max(2.0 * self.residuals.tau / p);
        let quick = SolveParams { max_iters: params.max_iters.min(PINNED_ITERS), tol, ..params.clone() };
        let out = pinned_problem.solve(&y0, &quick)?;
        let out = if out.converged {
            out
        } else {
            flags.push(format!("conditioning on x_{u} = {value} re-solved without pins"));
            let free = problem_for(&layout, atoms, &state, &[], &[], &self.inequalities)?;
            free.solve(&out.y, params)?
        };
        if !out.converged {
            flags.push(format!("conditioning on x_{u} = {value} did not converge"));
        }
        Ok(super::finish(
            &layout,
            self.atoms.clone(),
            state,
            self.degree,
            self.inequalities.clone(),
            out,
            false,
            flags,
        ))
    }

    /// `pE'[f] = pE[f s] / pE[s]`. The result has degree
    /// `degree - deg(s)`; `slack_degree` is the degree the caller still
    /// needs afterwards. `s` must be non-negative under the program's
    /// constraints; for support-backed inputs this is checked pointwise.
    pub fn reweight(&self, s: &Poly, slack_degree: usize) -> Result<PseudoDistribution> {
        if s.copies() > 1 {
            return Err(Error::param("reweighting polynomial must live on a single copy"));
        }
        let k = s.degree();
        if k + slack_degree > self.degree {
            return Err(Error::DegreeOverflow { needed: k + slack_degree, available: self.degree });
        }
        match &self.backing {
            Backing::Support(sup) => {
                let mut w = Vec::with_capacity(sup.weights.len());
                for (a, &wt) in sup.assignments.iter().zip(&sup.weights) {
                    let v = eval_on_assignment(s, a);
                    if v < -1e-12 {
                        return Err(Error::param("reweighting polynomial is negative on the support"));
                    }
                    w.push(wt * v.max(0.0));
                }
                let norm: f64 = w.iter().sum();
                if !(norm >= MIN_EVENT_PROB) {
                    return Err(Error::NullEvent(norm));
                }
                PseudoDistribution::from_support(self.n(), self.alphabet(), sup.assignments.clone(), w)
            }
            Backing::Table { table, .. } => {
                let norm = self.pseudo_expect(s)?;
                if !(norm >= MIN_EVENT_PROB) {
                    return Err(Error::NullEvent(norm));
                }
                let degree = self.degree - k;
                let mut new_table = super::KeyTable::default();
                let mut values = Vec::new();
                let mut buf = Vec::new();
                for key in table.keys.iter().filter(|key| key.len() <= degree) {
                    let mut total = 0.0;
                    for (c, lits) in &s.terms {
                        buf.clear();
                        buf.extend(key.iter().map(|&a| (self.atoms.vertex(a), self.atoms.symbol(a))));
                        buf.extend(lits.iter().map(|l| (l.vertex, l.symbol)));
                        total += c * self.prob(&buf)?;
                    }
                    new_table.insert(key.clone());
                    values.push(total / norm);
                }
                let mut residuals = Residuals { flags: self.residuals.flags.clone(), ..self.residuals.clone() };
                residuals.flags.push(format!("reweighted by a degree-{k} polynomial"));
                Ok(PseudoDistribution {
                    degree,
                    atoms: self.atoms.clone(),
                    state: self.state.clone(),
                    backing: Backing::Table { table: Arc::new(new_table), values: Arc::new(values) },
                    inequalities: self.inequalities.clone(),
                    residuals,
                })
            }
        }
    }
}

fn eval_on_assignment(s: &Poly, a: &[u8]) -> f64 {
    s.terms
        .iter()
        .filter(|(_, lits)| lits.iter().all(|l| a[l.vertex] == l.symbol))
        .map(|(c, _)| c)
        .sum()
}

/// Result of [`condition_product_copies`].
#[derive(Clone, Debug)]
pub struct ProductConditioning {
    pub copies: Vec<PseudoDistribution>,
    /// Literals conditioned on, per copy.
    pub sets: Vec<Vec<(usize, u8)>>,
    /// `pE_{μ_1 × ... × μ_t}[P]` after conditioning.
    pub value: f64,
    pub avg_mi: Vec<f64>,
    pub attempts: usize,
    pub success: bool,
}

/// Conditions each of `t` copies of `pd` on values of a random vertex set,
/// sampled from the current marginals, until every copy has average
/// pairwise mutual information at most `tau` and the product keeps
/// `pE[P] >= beta / 2`. The set size is drawn uniformly from
/// `0..=min(n, ceil(t / (beta tau)))` per copy and attempt; at most 50
/// attempts are made and the best one is returned when none succeeds.
pub fn condition_product_copies(
    pd: &PseudoDistribution,
    t: usize,
    p: &Poly,
    beta: f64,
    tau: f64,
    seed: u64,
    params: &SolveParams,
) -> Result<ProductConditioning> {
    condition_product_copies_with(pd, t, |prod| prod.pseudo_expect(p), beta, tau, seed, params)
}

/// As [`condition_product_copies`] with `pE[P]` supplied as a function of
/// the product, for polynomials too large to expand into literal terms.
pub fn condition_product_copies_with<F>(
    pd: &PseudoDistribution,
    t: usize,
    eval: F,
    beta: f64,
    tau: f64,
    seed: u64,
    params: &SolveParams,
) -> Result<ProductConditioning>
where
    F: Fn(&ProductPseudoDistribution) -> Result<f64>,
{
    if t == 0 || !(beta > 0.0) || !(tau > 0.0) {
        return Err(Error::param("need t >= 1, beta > 0 and tau > 0"));
    }
    let base = ProductPseudoDistribution { copies: vec![pd.clone(); t] };
    let start = eval(&base)?;
    if start < beta - 1e-12 {
        return Err(Error::param(format!("pE[P] = {start} is below beta = {beta}")));
    }
    let n = pd.n();
    let k_max = ((t as f64 / (beta * tau)).ceil() as usize).min(n);
    let mut best: Option<ProductConditioning> = None;
    for attempt in 0..50 {
        let mut rng = sub_rng(seed, attempt as u64);
        let mut copies = Vec::with_capacity(t);
        let mut sets = Vec::with_capacity(t);
        for _ in 0..t {
            let size = if attempt == 0 { 0 } else { rng.random_range(0..=k_max) };
            let mut cur = pd.clone();
            let mut set: Vec<(usize, u8)> = Vec::new();
            let mut order: Vec<usize> = (0..n).collect();
            rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
            for &v in order.iter().take(size) {
                let value = cur.sample_value(v, &mut rng);
                match cur.condition_on_value(v, value, params) {
                    Ok(next) => {
                        cur = next;
                        set.push((v, value));
                    }
                    Err(Error::NullEvent(_)) => continue,
                    Err(e) => return Err(e),
                }
            }
            copies.push(cur);
            sets.push(set);
        }
        let avg_mi: Vec<f64> =
            copies.iter().map(|c| pairwise_mutual_information(c, Exec::Auto).map(|r| r.avg_mi)).collect::<Result<_>>()?;
        let value = eval(&ProductPseudoDistribution { copies: copies.clone() })?;
        let success = avg_mi.iter().all(|&m| m <= tau) && value >= beta / 2.0;
        let cand = ProductConditioning { copies, sets, value, avg_mi, attempts: attempt + 1, success };
        let better = match &best {
            None => true,
            Some(b) => (cand.success, cand.value) > (b.success, b.value),
        };
        if better {
            best = Some(cand);
        }
        if success {
            break;
        }
    }
    let mut out = best.expect("at least one attempt");
    out.attempts = out.attempts.max(1);
    Ok(out)
}
