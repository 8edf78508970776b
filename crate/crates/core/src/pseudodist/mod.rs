//! Pseudo-distributions: moment tables that behave like expectations over
//! solutions on every polynomial of bounded degree.
//!
//! A [`PseudoDistribution`] is backed either by a solved moment table or by
//! an explicit finitely-supported distribution ([`Support`]); the second
//! kind is an honest distribution and supports every degree. Queries are
//! phrased as products of indicator literals `1(x_u = s)`.

mod admm;
mod condition;
mod correlation;
mod system;

pub use admm::{SolveMode, SolveParams};
pub use condition::{condition_product_copies, condition_product_copies_with, ProductConditioning, MIN_EVENT_PROB};
pub(crate) use correlation::reduce_with;
pub use correlation::{
    joint_table, mutual_information, pairwise_mutual_information, reduce_global_correlation,
    reduce_total_correlation, total_correlation, CorrelationReduction, MiReport, TcMode,
};
pub use system::{
    build_coloring_relaxation, build_is_relaxation, ConstraintSystem, LinearConstraint, MomentKey, MAX_MATRIX_SIDE,
};

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::graphs::Graph;
use crate::patterns::{Alphabet, LocalMoments};
use crate::rng::Rng;
use crate::{Error, Result};
use admm::{Cons, Problem};
use system::{canonical, Atoms, KeyTable, Layout, FALSE, FREE, TRUE};

/// Achieved accuracy of a solve.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// Largest violation of a linear side constraint.
    pub affine: f64,
    /// Smallest eigenvalue of the moment matrix.
    pub min_eigenvalue: f64,
    /// `max(affine, -min_eigenvalue, 0)`.
    pub tau: f64,
    pub iterations: usize,
    pub converged: bool,
    pub infeasible: bool,
    pub objective: Option<f64>,
    pub flags: Vec<String>,
}

impl Residuals {
    fn exact() -> Self {
        Residuals { converged: true, ..Residuals::default() }
    }
}

/// An explicit distribution over assignments (one symbol per vertex).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Support {
    pub assignments: Vec<Vec<u8>>,
    pub weights: Vec<f64>,
}

#[derive(Clone, Debug)]
enum Backing {
    Table { table: Arc<KeyTable>, values: Arc<Vec<f64>> },
    Support(Arc<Support>),
}

/// A literal `1(x_u^{(copy)} = symbol)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub copy: usize,
    pub vertex: usize,
    pub symbol: u8,
}

impl Literal {
    pub fn new(vertex: usize, symbol: u8) -> Self {
        Literal { copy: 0, vertex, symbol }
    }

    pub fn in_copy(copy: usize, vertex: usize, symbol: u8) -> Self {
        Literal { copy, vertex, symbol }
    }
}

/// A polynomial as a weighted sum of literal products.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    pub terms: Vec<(f64, Vec<Literal>)>,
}

impl Poly {
    pub fn constant(c: f64) -> Self {
        Poly { terms: vec![(c, Vec::new())] }
    }

    pub fn monomial(c: f64, lits: Vec<Literal>) -> Self {
        Poly { terms: vec![(c, lits)] }
    }

    pub fn add(&mut self, c: f64, lits: Vec<Literal>) -> &mut Self {
        self.terms.push((c, lits));
        self
    }

    /// Largest number of distinct vertices in one copy of one term.
    pub fn degree(&self) -> usize {
        self.terms
            .iter()
            .map(|(_, lits)| {
                let mut vs: Vec<(usize, usize)> = lits.iter().map(|l| (l.copy, l.vertex)).collect();
                vs.sort_unstable();
                vs.dedup();
                let mut best = 0;
                let mut i = 0;
                while i < vs.len() {
                    let j = vs[i..].iter().take_while(|p| p.0 == vs[i].0).count();
                    best = best.max(j);
                    i += j;
                }
                best
            })
            .max()
            .unwrap_or(0)
    }

    pub fn copies(&self) -> usize {
        self.terms.iter().flat_map(|(_, l)| l.iter().map(|x| x.copy + 1)).max().unwrap_or(1)
    }
}

#[derive(Clone, Debug)]
pub struct PseudoDistribution {
    degree: usize,
    atoms: Arc<Atoms>,
    state: Arc<Vec<i8>>,
    backing: Backing,
    inequalities: Arc<Vec<LinearConstraint>>,
    pub residuals: Residuals,
}

/// Serialized form of a pseudo-distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PseudoDistributionRecord {
    pub degree: usize,
    pub alphabet: Alphabet,
    pub n: usize,
    /// Literals fixed by conditioning.
    pub fixed: Vec<(u32, u8)>,
    pub moments: Vec<(MomentKey, f64)>,
    pub support: Option<Support>,
    pub residuals: Residuals,
}

impl PseudoDistribution {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn alphabet(&self) -> Alphabet {
        self.atoms.alphabet
    }

    pub fn n(&self) -> usize {
        self.atoms.n
    }

    pub fn is_support_backed(&self) -> bool {
        matches!(self.backing, Backing::Support(_))
    }

    pub fn support(&self) -> Option<&Support> {
        match &self.backing {
            Backing::Support(s) => Some(s),
            Backing::Table { .. } => None,
        }
    }

    /// A genuine distribution with the given support. Weights are
    /// normalised; the degree is unlimited in practice and reported as `n`.
    pub fn from_support(n: usize, alphabet: Alphabet, assignments: Vec<Vec<u8>>, weights: Vec<f64>) -> Result<Self> {
        if assignments.is_empty() || assignments.len() != weights.len() {
            return Err(Error::param("support needs matching non-empty assignments and weights"));
        }
        let q = alphabet.size() as u8;
        if assignments.iter().any(|a| a.len() != n || a.iter().any(|&s| s >= q)) {
            return Err(Error::param("every assignment needs n symbols from the alphabet"));
        }
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::param("support weights must be finite and non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::param("support weights sum to zero"));
        }
        let weights = weights.iter().map(|w| w / total).collect();
        let atoms = Atoms { alphabet, n, conflicts: vec![Vec::new(); n * if alphabet == Alphabet::Boolean { 1 } else { 3 }] };
        Ok(PseudoDistribution {
            degree: n,
            state: Arc::new(vec![FREE; atoms.count()]),
            atoms: Arc::new(atoms),
            backing: Backing::Support(Arc::new(Support { assignments, weights })),
            inequalities: Arc::new(Vec::new()),
            residuals: Residuals::exact(),
        })
    }

    /// Independent coordinates with the given marginal vectors.
    pub fn product_of_marginals(marginals: &[Vec<f64>], alphabet: Alphabet, degree: usize) -> Result<Self> {
        let n = marginals.len();
        let q = alphabet.size();
        if marginals.iter().any(|m| m.len() != q) {
            return Err(Error::param("each marginal needs one entry per symbol"));
        }
        let atoms = Arc::new(Atoms { alphabet, n, conflicts: vec![Vec::new(); n * q.saturating_sub(1).max(1)] });
        let state = vec![FREE; atoms.count()];
        let layout = Layout::build(&atoms, &state, degree)?;
        let values: Vec<f64> = layout
            .table
            .keys
            .iter()
            .map(|k| {
                let mut vs: Vec<usize> = k.iter().map(|&a| atoms.vertex(a)).collect();
                vs.dedup();
                if vs.len() < k.len() {
                    return 0.0;
                }
                k.iter().map(|&a| marginals[atoms.vertex(a)][atoms.symbol(a) as usize]).product()
            })
            .collect();
        Ok(PseudoDistribution {
            degree,
            atoms,
            state: Arc::new(state),
            backing: Backing::Table { table: layout.table.clone(), values: Arc::new(values) },
            inequalities: Arc::new(Vec::new()),
            residuals: Residuals::exact(),
        })
    }

    /// `pE[Π 1(x_u = s)]` over literals of a single copy.
    pub fn prob(&self, lits: &[(usize, u8)]) -> Result<f64> {
        let q = self.alphabet().size() as u8;
        let mut ls: Vec<(usize, u8)> = lits.to_vec();
        ls.sort_unstable();
        ls.dedup();
        for w in ls.windows(2) {
            if w[0].0 == w[1].0 {
                return Ok(0.0);
            }
        }
        if let Some(&(u, s)) = ls.iter().find(|&&(u, s)| u >= self.n() || s >= q) {
            return Err(Error::param(format!("literal x_{u} = {s} out of range")));
        }
        match &self.backing {
            Backing::Support(sup) => Ok(sup
                .assignments
                .iter()
                .zip(&sup.weights)
                .filter(|(a, _)| ls.iter().all(|&(u, s)| a[u] == s))
                .map(|(_, w)| w)
                .sum()),
            Backing::Table { table, values } => {
                if ls.len() > self.degree {
                    return Err(Error::DegreeOverflow { needed: ls.len(), available: self.degree });
                }
                let mut pos = Vec::with_capacity(ls.len());
                let mut neg = Vec::new();
                for &(u, s) in &ls {
                    match self.atoms.atom(u, s) {
                        Some(a) => pos.push(a),
                        None => neg.push(u),
                    }
                }
                self.expand(table, values, &mut pos, &neg)
            }
        }
    }

    /// Inclusion-exclusion over negative literals, each `1 - Σ atoms of u`.
    fn expand(&self, table: &KeyTable, values: &[f64], pos: &mut Vec<u32>, neg: &[usize]) -> Result<f64> {
        let Some((&u, rest)) = neg.split_first() else {
            return self.atom_moment(table, values, pos);
        };
        let mut total = self.expand(table, values, pos, rest)?;
        for s in 1..=self.atoms.per_vertex() as u8 {
            let s = if self.alphabet() == Alphabet::Boolean { 1 } else { s };
            let a = self.atoms.atom(u, s).expect("positive literal");
            pos.push(a);
            total -= self.expand(table, values, pos, rest)?;
            pos.pop();
        }
        Ok(total)
    }

    fn atom_moment(&self, table: &KeyTable, values: &[f64], atoms: &[u32]) -> Result<f64> {
        match canonical(&self.atoms, &self.state, atoms) {
            None => Ok(0.0),
            Some(k) => match table.get(&k) {
                Some(i) => Ok(values[i as usize]),
                None => Err(Error::DegreeOverflow { needed: k.len(), available: self.degree }),
            },
        }
    }

    /// `pE[poly]` for a single-copy polynomial.
    pub fn pseudo_expect(&self, poly: &Poly) -> Result<f64> {
        let mut total = 0.0;
        let mut buf = Vec::new();
        for (c, lits) in &poly.terms {
            if lits.iter().any(|l| l.copy != 0) {
                return Err(Error::param("literal refers to a copy other than 0; use a product"));
            }
            buf.clear();
            buf.extend(lits.iter().map(|l| (l.vertex, l.symbol)));
            total += c * self.prob(&buf)?;
        }
        Ok(total)
    }

    /// `pE[x_S]` for a vertex set of the Boolean program.
    pub fn moment(&self, vertices: &[usize]) -> Result<f64> {
        let lits: Vec<(usize, u8)> = vertices.iter().map(|&v| (v, 1)).collect();
        self.prob(&lits)
    }

    /// Marginal vector of vertex `u`, indexed by symbol.
    pub fn marginal_vector(&self, u: usize) -> Vec<f64> {
        (0..self.alphabet().size() as u8).map(|s| self.prob(&[(u, s)]).unwrap_or(0.0)).collect()
    }

    /// `pE[x_u]` (Boolean) for every vertex.
    pub fn means(&self) -> Vec<f64> {
        (0..self.n()).map(|u| self.prob(&[(u, 1)]).unwrap_or(0.0)).collect()
    }

    /// Literals fixed by earlier conditionings.
    pub fn fixed_literals(&self) -> Vec<(usize, u8)> {
        let mut out = Vec::new();
        for a in 0..self.atoms.count() as u32 {
            if self.state[a as usize] == TRUE {
                out.push((self.atoms.vertex(a), self.atoms.symbol(a)));
            }
        }
        if self.alphabet() == Alphabet::Boolean {
            for u in 0..self.n() {
                if self.state[u] == FALSE && !self.atoms.conflicts[u].iter().any(|&b| self.state[b as usize] == TRUE) {
                    out.push((u, 0));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// True when every stored moment is within `tol` of 0 or 1.
    pub fn is_integral(&self, tol: f64) -> bool {
        match &self.backing {
            Backing::Table { values, .. } => values.iter().all(|&v| v.abs() <= tol || (v - 1.0).abs() <= tol),
            Backing::Support(s) => s.weights.iter().filter(|&&w| w > tol).count() == 1,
        }
    }

    /// Samples an assignment of `u` from its (clamped) marginal.
    pub fn sample_value(&self, u: usize, rng: &mut Rng) -> u8 {
        use rand::Rng as _;
        let m = crate::patterns::clamp_simplex(&self.marginal_vector(u));
        let mut r: f64 = rng.random();
        for (s, p) in m.iter().enumerate() {
            if r < *p {
                return s as u8;
            }
            r -= p;
        }
        m.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|(s, _)| s as u8).unwrap_or(0)
    }

    pub fn to_record(&self) -> PseudoDistributionRecord {
        let fixed = self.fixed_literals().into_iter().map(|(u, s)| (u as u32, s)).collect();
        let (moments, support) = match &self.backing {
            Backing::Table { table, values } => {
                let mut m: Vec<(MomentKey, f64)> =
                    table.keys.iter().zip(values.iter()).map(|(k, &v)| (self.atoms.moment_key(k), v)).collect();
                m.sort_by(|a, b| a.0.cmp(&b.0));
                (m, None)
            }
            Backing::Support(s) => (Vec::new(), Some((**s).clone())),
        };
        PseudoDistributionRecord {
            degree: self.degree,
            alphabet: self.alphabet(),
            n: self.n(),
            fixed,
            moments,
            support,
            residuals: self.residuals.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_record())?)
    }

    /// Rebuilds a pseudo-distribution over `g` from its record.
    pub fn from_record(g: &Graph, rec: &PseudoDistributionRecord) -> Result<Self> {
        if rec.n != g.n() {
            return Err(Error::param("record and graph disagree on n"));
        }
        if let Some(s) = &rec.support {
            let mut pd = Self::from_support(rec.n, rec.alphabet, s.assignments.clone(), s.weights.clone())?;
            pd.residuals = rec.residuals.clone();
            return Ok(pd);
        }
        let atoms = Arc::new(match rec.alphabet {
            Alphabet::Boolean => Atoms::boolean(g),
            Alphabet::Coloring => Atoms::coloring(g),
        });
        let mut state = vec![FREE; atoms.count()];
        for &(u, s) in &rec.fixed {
            fix_literal(&atoms, &mut state, u as usize, s);
        }
        let mut table = KeyTable::default();
        let mut values = Vec::with_capacity(rec.moments.len());
        for (k, v) in &rec.moments {
            table.insert(atoms.key_atoms(k)?);
            values.push(*v);
        }
        Ok(PseudoDistribution {
            degree: rec.degree,
            atoms,
            state: Arc::new(state),
            backing: Backing::Table { table: Arc::new(table), values: Arc::new(values) },
            inequalities: Arc::new(Vec::new()),
            residuals: rec.residuals.clone(),
        })
    }

    /// Equality residual of the conflict products: the largest `|pE|` of a
    /// forbidden pair. Zero by construction for solved tables.
    pub fn max_conflict_moment(&self, g: &Graph) -> f64 {
        let mut worst = 0.0f64;
        let colors: &[u8] = if self.alphabet() == Alphabet::Boolean { &[1] } else { &[1, 2, 3] };
        for &(u, v) in g.edges() {
            for &s in colors {
                worst = worst.max(self.prob(&[(u as usize, s), (v as usize, s)]).unwrap_or(0.0).abs());
            }
        }
        worst
    }
}

/// Marks literal `x_u = s` as fixed and propagates through conflicts.
fn fix_literal(atoms: &Atoms, state: &mut [i8], u: usize, s: u8) {
    match atoms.atom(u, s) {
        Some(a) => {
            state[a as usize] = TRUE;
            for &b in &atoms.conflicts[a as usize] {
                state[b as usize] = FALSE;
            }
        }
        None => {
            for r in 1..=atoms.per_vertex() as u8 {
                let r = if atoms.alphabet == Alphabet::Boolean { 1 } else { r };
                let a = atoms.atom(u, r).expect("positive literal");
                state[a as usize] = FALSE;
            }
        }
    }
}

impl LocalMoments for PseudoDistribution {
    fn n(&self) -> usize {
        self.atoms.n
    }
    fn alphabet(&self) -> Alphabet {
        self.atoms.alphabet
    }
    fn marginal(&self, u: usize, s: u8) -> f64 {
        self.prob(&[(u, s)]).unwrap_or(0.0)
    }
    fn joint(&self, u: usize, v: usize, s: u8, r: u8) -> f64 {
        self.prob(&[(u, s), (v, r)]).unwrap_or(0.0)
    }
}

/// `t` copies with factorised cross-copy moments.
#[derive(Clone, Debug)]
pub struct ProductPseudoDistribution {
    pub copies: Vec<PseudoDistribution>,
}

/// `μ^{⊗t}`.
pub fn product(pd: &PseudoDistribution, t: usize) -> Result<ProductPseudoDistribution> {
    if t == 0 {
        return Err(Error::param("product needs t >= 1"));
    }
    Ok(ProductPseudoDistribution { copies: vec![pd.clone(); t] })
}

impl ProductPseudoDistribution {
    /// Product of distinct pseudo-distributions over one vertex set.
    pub fn of(copies: Vec<PseudoDistribution>) -> Result<Self> {
        let first = copies.first().ok_or_else(|| Error::param("need at least one copy"))?;
        if copies.iter().any(|c| c.n() != first.n() || c.alphabet() != first.alphabet()) {
            return Err(Error::param("copies must share n and the alphabet"));
        }
        Ok(ProductPseudoDistribution { copies })
    }

    pub fn t(&self) -> usize {
        self.copies.len()
    }

    /// `pE[poly]`, each term factored over copies.
    pub fn pseudo_expect(&self, poly: &Poly) -> Result<f64> {
        let t = self.copies.len();
        let mut per: Vec<Vec<(usize, u8)>> = vec![Vec::new(); t];
        let mut total = 0.0;
        for (c, lits) in &poly.terms {
            per.iter_mut().for_each(Vec::clear);
            for l in lits {
                if l.copy >= t {
                    return Err(Error::param(format!("copy {} out of range for t = {t}", l.copy)));
                }
                per[l.copy].push((l.vertex, l.symbol));
            }
            let mut term = *c;
            for (pd, ls) in self.copies.iter().zip(&per) {
                if term == 0.0 {
                    break;
                }
                if !ls.is_empty() {
                    term *= pd.prob(ls)?;
                }
            }
            total += term;
        }
        Ok(total)
    }
}

pub(crate) fn problem_for<'a>(
    layout: &'a Layout,
    atoms: &Atoms,
    state: &[i8],
    objective: &[(MomentKey, f64)],
    equalities: &[LinearConstraint],
    inequalities: &[LinearConstraint],
) -> Result<Problem<'a>> {
    let nk = layout.table.keys.len();
    let map = |k: &MomentKey| -> Result<Option<u32>> {
        let a = atoms.key_atoms(k)?;
        Ok(canonical(atoms, state, &a).map(|c| layout.table.get(&c).expect("key within degree")))
    };
    let mut obj = vec![0.0; nk];
    for (k, c) in objective {
        if let Some(i) = map(k)? {
            obj[i as usize] += c;
        }
    }
    let mut pinned = vec![None; nk];
    let mut constraints = Vec::new();
    let mut add = |c: &LinearConstraint, equality: bool| -> Result<()> {
        let mut rhs = c.rhs;
        let mut terms: Vec<(u32, f64)> = Vec::new();
        for (k, a) in &c.terms {
            match map(k)? {
                Some(i) => terms.push((i, *a)),
                None => {}
            }
        }
        terms.sort_by_key(|p| p.0);
        terms.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 += b.1;
                true
            } else {
                false
            }
        });
        // the normalisation key collapses to a constant once pinned
        if let Some(pos) = terms.iter().position(|&(i, _)| layout.table.keys[i as usize].is_empty()) {
            rhs -= terms[pos].1;
            terms.remove(pos);
        }
        if terms.is_empty() {
            return Ok(());
        }
        if equality && terms.len() == 1 {
            pinned[terms[0].0 as usize] = Some(rhs / terms[0].1);
        } else {
            constraints.push(Cons { terms, rhs, equality });
        }
        Ok(())
    };
    for c in equalities {
        add(c, true)?;
    }
    for c in inequalities {
        add(c, false)?;
    }
    let empty = layout.table.get(&[]).expect("empty key");
    pinned[empty as usize] = Some(1.0);
    Ok(Problem { layout, objective: obj, pinned, constraints })
}

/// Cold start: independent coordinates at uniform marginals.
fn cold_start(layout: &Layout, atoms: &Atoms) -> Vec<f64> {
    let p = 1.0 / (atoms.per_vertex() + 1) as f64;
    layout.table.keys.iter().map(|k| p.powi(k.len() as i32)).collect()
}

fn finish(
    layout: &Layout,
    atoms: Arc<Atoms>,
    state: Arc<Vec<i8>>,
    degree: usize,
    inequalities: Arc<Vec<LinearConstraint>>,
    out: admm::Outcome,
    with_objective: bool,
    flags: Vec<String>,
) -> PseudoDistribution {
    let tau = out.violation.max(-out.min_eigenvalue).max(0.0);
    PseudoDistribution {
        degree,
        atoms,
        state,
        backing: Backing::Table { table: layout.table.clone(), values: Arc::new(out.y) },
        inequalities,
        residuals: Residuals {
            affine: out.violation,
            min_eigenvalue: out.min_eigenvalue,
            tau,
            iterations: out.iterations,
            converged: out.converged,
            infeasible: out.infeasible,
            objective: with_objective.then_some(out.objective),
            flags,
        },
    }
}

/// Solves a constraint system from a cold start. Non-convergence and
/// detected infeasibility are reported in the residuals, not as errors.
pub fn solve(cs: &ConstraintSystem, params: &SolveParams) -> Result<PseudoDistribution> {
    let y0 = cold_start(&cs.layout, &cs.atoms);
    solve_from(cs, &y0, params)
}

/// Solves a constraint system warm-started from another pseudo-distribution
/// over the same program.
pub fn solve_warm(cs: &ConstraintSystem, warm: &PseudoDistribution, params: &SolveParams) -> Result<PseudoDistribution> {
    let y0: Vec<f64> = cs
        .layout
        .table
        .keys
        .iter()
        .map(|k| {
            let lits: Vec<(usize, u8)> = k.iter().map(|&a| (cs.atoms.vertex(a), cs.atoms.symbol(a))).collect();
            warm.prob(&lits).unwrap_or(0.0)
        })
        .collect();
    solve_from(cs, &y0, params)
}

fn solve_from(cs: &ConstraintSystem, y0: &[f64], params: &SolveParams) -> Result<PseudoDistribution> {
    let mut kept = cs.inequalities.clone();
    kept.extend(cs.floor_constraint());
    let feasibility = params.mode == SolveMode::Feasibility && cs.objective_floor.is_some();
    let (objective, ineqs): (&[(MomentKey, f64)], &[LinearConstraint]) =
        if feasibility { (&[], &kept) } else { (&cs.objective, &cs.inequalities) };
    let prob = problem_for(&cs.layout, &cs.atoms, &cs.state, objective, &cs.equalities, ineqs)?;
    let mut out = prob.solve(y0, params)?;
    if feasibility {
        let full = problem_for(&cs.layout, &cs.atoms, &cs.state, &cs.objective, &[], &[])?;
        out.objective = full.objective_value(&out.y);
    }
    let mut flags = Vec::new();
    if !out.converged {
        flags.push(if out.infeasible { "infeasible" } else { "not converged" }.to_string());
    }
    let below = cs.objective_floor.is_some_and(|f| out.objective < f - params.tol.max(1e-9));
    if below {
        flags.push("objective below floor".to_string());
    }
    let mut pd = finish(&cs.layout, cs.atoms.clone(), cs.state.clone(), cs.degree, Arc::new(kept), out, true, flags);
    pd.residuals.infeasible |= below;
    Ok(pd)
}

fn bitsets(s: &Support) -> Vec<Vec<u64>> {
    s.assignments
        .iter()
        .map(|a| {
            let mut b = vec![0u64; a.len().div_ceil(64)];
            a.iter().enumerate().filter(|(_, &x)| x == 1).for_each(|(u, _)| b[u / 64] |= 1 << (u % 64));
            b
        })
        .collect()
}

/// Visits every tuple of the product support with its weight and the
/// fraction of vertices labelled 1 in all copies.
pub(crate) fn for_each_tuple(sups: &[&Support], max_tuples: usize, mut f: impl FnMut(&[usize], f64, f64)) -> Result<()> {
    let total = sups.iter().try_fold(1usize, |acc, s| acc.checked_mul(s.weights.len()));
    if total.is_none_or(|t| t > max_tuples) {
        return Err(Error::Budget(format!("product support exceeds {max_tuples} tuples")));
    }
    let bits: Vec<Vec<Vec<u64>>> = sups.iter().map(|s| bitsets(s)).collect();
    let n = sups[0].assignments[0].len();
    let words = n.div_ceil(64);
    let mut idx = vec![0usize; sups.len()];
    let mut acc = vec![0u64; words];
    loop {
        acc.iter_mut().for_each(|w| *w = u64::MAX);
        let mut w = 1.0;
        for (c, &i) in idx.iter().enumerate() {
            w *= sups[c].weights[i];
            acc.iter_mut().zip(&bits[c][i]).for_each(|(a, b)| *a &= b);
        }
        let ones: u32 = acc.iter().map(|x| x.count_ones()).sum();
        f(&idx, w, ones as f64 / n as f64);
        let mut c = 0;
        loop {
            if c == idx.len() {
                return Ok(());
            }
            idx[c] += 1;
            if idx[c] < sups[c].weights.len() {
                break;
            }
            idx[c] = 0;
            c += 1;
        }
    }
}

/// `E[h(fraction labelled 1 in every copy)]` over the product support.
pub(crate) fn product_expect(sups: &[&Support], max_tuples: usize, h: impl Fn(f64) -> f64) -> Result<f64> {
    let mut total = 0.0;
    for_each_tuple(sups, max_tuples, |_, w, z| total += w * h(z))?;
    Ok(total)
}
