//! Atoms, moment keys and the constraint systems built over them.
//!
//! Every Boolean variable of a program is an *atom*: `x_u` for the
//! independent-set program, `x̄_{u,σ}` for `σ ∈ [3]` in the coloring program.
//! The ⊥ indicator is not an atom; it is the affine expression
//! `1 - Σ_σ x̄_{u,σ}`, which makes the per-vertex simplex equality hold
//! identically. Two atoms *conflict* when their product is forced to zero
//! (an edge, two colors of one vertex, or one color on an edge), so a
//! moment key is a conflict-free set of atoms.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::graphs::Graph;
use crate::patterns::Alphabet;
use crate::{Error, Result};

/// Largest moment matrix side the solver accepts.
pub const MAX_MATRIX_SIDE: usize = 2500;

/// A monomial in canonical form: sorted `(vertex, symbol)` pairs. Boolean
/// keys use symbol 1; coloring keys use colors `1..=3`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MomentKey(pub Vec<(u32, u8)>);

impl MomentKey {
    pub fn empty() -> Self {
        MomentKey(Vec::new())
    }

    pub fn vertices(vs: &[usize]) -> Self {
        let mut k: Vec<(u32, u8)> = vs.iter().map(|&v| (v as u32, 1)).collect();
        k.sort_unstable();
        k.dedup();
        MomentKey(k)
    }

    pub fn colored(vs: &[(usize, u8)]) -> Self {
        let mut k: Vec<(u32, u8)> = vs.iter().map(|&(v, s)| (v as u32, s)).collect();
        k.sort_unstable();
        k.dedup();
        MomentKey(k)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug)]
pub(crate) struct Atoms {
    pub alphabet: Alphabet,
    pub n: usize,
    pub conflicts: Vec<Vec<u32>>,
}

impl Atoms {
    pub fn per_vertex(&self) -> usize {
        match self.alphabet {
            Alphabet::Boolean => 1,
            Alphabet::Coloring => 3,
        }
    }

    pub fn count(&self) -> usize {
        self.n * self.per_vertex()
    }

    /// Atom of a positive literal (`s = 1` for Boolean, a color otherwise).
    pub fn atom(&self, u: usize, s: u8) -> Option<u32> {
        match (self.alphabet, s) {
            (Alphabet::Boolean, 1) => Some(u as u32),
            (Alphabet::Coloring, 1..=3) => Some((3 * u + s as usize - 1) as u32),
            _ => None,
        }
    }

    pub fn vertex(&self, a: u32) -> usize {
        a as usize / self.per_vertex()
    }

    pub fn symbol(&self, a: u32) -> u8 {
        match self.alphabet {
            Alphabet::Boolean => 1,
            Alphabet::Coloring => (a % 3) as u8 + 1,
        }
    }

    pub fn conflict(&self, a: u32, b: u32) -> bool {
        self.conflicts[a as usize].binary_search(&b).is_ok()
    }

    pub fn boolean(g: &Graph) -> Self {
        let conflicts = (0..g.n()).map(|u| g.neighbors(u).to_vec()).collect();
        Atoms { alphabet: Alphabet::Boolean, n: g.n(), conflicts }
    }

    pub fn coloring(g: &Graph) -> Self {
        let n = g.n();
        let mut conflicts = vec![Vec::new(); 3 * n];
        for u in 0..n {
            for s in 0..3u32 {
                let a = 3 * u as u32 + s;
                let c = &mut conflicts[a as usize];
                c.extend((0..3).filter(|&r| r != s).map(|r| 3 * u as u32 + r));
                c.extend(g.neighbors(u).iter().map(|&v| 3 * v + s));
                c.sort_unstable();
            }
        }
        Atoms { alphabet: Alphabet::Coloring, n, conflicts }
    }

    pub fn key_atoms(&self, key: &MomentKey) -> Result<Vec<u32>> {
        key.0
            .iter()
            .map(|&(v, s)| {
                if v as usize >= self.n {
                    return Err(Error::param(format!("vertex {v} out of range")));
                }
                self.atom(v as usize, s).ok_or_else(|| Error::param(format!("symbol {s} is not a moment variable")))
            })
            .collect()
    }

    pub fn moment_key(&self, atoms: &[u32]) -> MomentKey {
        MomentKey(atoms.iter().map(|&a| (self.vertex(a) as u32, self.symbol(a))).collect())
    }
}

/// Atom status after point conditionings.
pub(crate) const FREE: i8 = 0;
pub(crate) const TRUE: i8 = 1;
pub(crate) const FALSE: i8 = -1;

/// Canonical form of a product of atoms under the given fixings: `None` when
/// the product is identically zero.
pub(crate) fn canonical(atoms: &Atoms, state: &[i8], list: &[u32]) -> Option<Vec<u32>> {
    let mut k: Vec<u32> = list.to_vec();
    k.sort_unstable();
    k.dedup();
    if k.iter().any(|&a| state[a as usize] == FALSE) {
        return None;
    }
    k.retain(|&a| state[a as usize] == FREE);
    for (i, &a) in k.iter().enumerate() {
        if k[i + 1..].iter().any(|&b| atoms.conflict(a, b)) {
            return None;
        }
    }
    Some(k)
}

/// Distinct keys with a lookup index.
#[derive(Debug, Default)]
pub(crate) struct KeyTable {
    pub keys: Vec<Vec<u32>>,
    pub index: HashMap<Vec<u32>, u32>,
}

impl KeyTable {
    pub fn insert(&mut self, k: Vec<u32>) -> u32 {
        if let Some(&i) = self.index.get(&k) {
            return i;
        }
        let i = self.keys.len() as u32;
        self.index.insert(k.clone(), i);
        self.keys.push(k);
        i
    }

    pub fn get(&self, k: &[u32]) -> Option<u32> {
        self.index.get(k).copied()
    }
}

pub(crate) const ZERO_ENTRY: u32 = u32::MAX;

/// Moment matrix structure: rows are conflict-free free-atom sets of size at
/// most `degree / 2`, and entry `(i, j)` holds the moment of the union of
/// rows `i` and `j`.
#[derive(Debug)]
pub(crate) struct Layout {
    pub rows: Vec<Vec<u32>>,
    pub table: Arc<KeyTable>,
    /// Key of each upper-triangle entry `(i, j)`, `i <= j`, in row-major
    /// order; `ZERO_ENTRY` for conflicting unions.
    pub entry_key: Vec<u32>,
    /// Number of full-matrix entries carrying each key.
    pub mult: Vec<f64>,
}

impl Layout {
    pub fn build(atoms: &Atoms, state: &[i8], degree: usize) -> Result<Layout> {
        let free: Vec<u32> = (0..atoms.count() as u32).filter(|&a| state[a as usize] == FREE).collect();
        let mut rows: Vec<Vec<u32>> = vec![Vec::new()];
        rows.extend(free.iter().map(|&a| vec![a]));
        if degree >= 4 {
            for (i, &a) in free.iter().enumerate() {
                for &b in &free[i + 1..] {
                    if !atoms.conflict(a, b) {
                        rows.push(vec![a, b]);
                    }
                }
                if rows.len() > MAX_MATRIX_SIDE {
                    break;
                }
            }
        }
        let side = rows.len();
        if side > MAX_MATRIX_SIDE {
            return Err(Error::Budget(format!(
                "moment matrix side exceeds {MAX_MATRIX_SIDE} at degree {degree}"
            )));
        }
        let mut table = KeyTable::default();
        let mut entry_key = Vec::with_capacity(side * (side + 1) / 2);
        let mut mult: Vec<f64> = Vec::new();
        let mut buf = Vec::with_capacity(degree);
        for i in 0..side {
            for j in i..side {
                buf.clear();
                buf.extend_from_slice(&rows[i]);
                buf.extend_from_slice(&rows[j]);
                let id = match canonical(atoms, state, &buf) {
                    Some(k) => {
                        let id = table.insert(k);
                        if id as usize == mult.len() {
                            mult.push(0.0);
                        }
                        mult[id as usize] += if i == j { 1.0 } else { 2.0 };
                        id
                    }
                    None => ZERO_ENTRY,
                };
                entry_key.push(id);
            }
        }
        Ok(Layout { rows, table: Arc::new(table), entry_key, mult })
    }

    pub fn side(&self) -> usize {
        self.rows.len()
    }

    /// Dense symmetric matrix from key values.
    pub fn assemble(&self, y: &[f64], out: &mut [f64]) {
        let n = self.side();
        let mut e = 0;
        for i in 0..n {
            for j in i..n {
                let k = self.entry_key[e];
                let v = if k == ZERO_ENTRY { 0.0 } else { y[k as usize] };
                out[i * n + j] = v;
                out[j * n + i] = v;
                e += 1;
            }
        }
    }

    /// Per-key sums of a dense symmetric matrix, counting each off-diagonal
    /// entry twice.
    pub fn key_sums(&self, m: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let n = self.side();
        let mut e = 0;
        for i in 0..n {
            for j in i..n {
                let k = self.entry_key[e];
                if k != ZERO_ENTRY {
                    out[k as usize] += if i == j { m[i * n + j] } else { m[i * n + j] + m[j * n + i] };
                }
                e += 1;
            }
        }
    }
}

/// `Σ coef · y_key` compared against `rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub terms: Vec<(MomentKey, f64)>,
    pub rhs: f64,
}

/// A degree-`d` moment program: maximize `objective` over pseudo-
/// distributions satisfying `equalities` (`= rhs`) and `inequalities`
/// (`<= rhs`). The program's lower bound on the objective itself (the mean
/// constraint) is kept apart as `objective_floor`: the solver maximizes
/// and then reports whether the floor is met, so an instance whose optimum
/// lies below the floor still yields its optimum.
///
/// Booleanity and the conflict products are structural: they are built
/// into the key set and hold exactly. They are also listed in
/// `equalities` (one pinned product per conflicting atom pair) so the
/// system can be inspected.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    pub degree: usize,
    pub alphabet: Alphabet,
    pub n: usize,
    pub objective: Vec<(MomentKey, f64)>,
    pub objective_floor: Option<f64>,
    pub equalities: Vec<LinearConstraint>,
    pub inequalities: Vec<LinearConstraint>,
    pub(crate) atoms: Arc<Atoms>,
    pub(crate) state: Arc<Vec<i8>>,
    pub(crate) layout: Arc<Layout>,
}

impl ConstraintSystem {
    pub(crate) fn new(
        atoms: Arc<Atoms>,
        state: Arc<Vec<i8>>,
        degree: usize,
        objective: Vec<(MomentKey, f64)>,
        objective_floor: Option<f64>,
        extra_equalities: Vec<LinearConstraint>,
        inequalities: Vec<LinearConstraint>,
    ) -> Result<Self> {
        if degree != 2 && degree != 4 {
            return Err(Error::param(format!("degree {degree} unsupported; use 2 or 4")));
        }
        let layout = Arc::new(Layout::build(&atoms, &state, degree)?);
        let mut equalities = vec![LinearConstraint { terms: vec![(MomentKey::empty(), 1.0)], rhs: 1.0 }];
        for a in 0..atoms.count() as u32 {
            for &b in &atoms.conflicts[a as usize] {
                if a < b {
                    equalities.push(LinearConstraint { terms: vec![(atoms.moment_key(&[a, b]), 1.0)], rhs: 0.0 });
                }
            }
        }
        equalities.extend(extra_equalities);
        Ok(ConstraintSystem {
            degree,
            alphabet: atoms.alphabet,
            n: atoms.n,
            objective,
            objective_floor,
            equalities,
            inequalities,
            atoms,
            state,
            layout,
        })
    }

    /// Side of the moment matrix.
    pub fn matrix_side(&self) -> usize {
        self.layout.side()
    }

    /// Number of distinct non-zero moments.
    pub fn num_moments(&self) -> usize {
        self.layout.table.keys.len()
    }

    /// The objective floor as an inequality `-objective <= -floor`.
    pub fn floor_constraint(&self) -> Option<LinearConstraint> {
        self.objective_floor.map(|f| LinearConstraint {
            terms: self.objective.iter().map(|(k, c)| (k.clone(), -c)).collect(),
            rhs: -f,
        })
    }

    /// Equalities pinning a conflicting product to zero.
    pub fn conflict_equalities(&self) -> usize {
        self.equalities.iter().filter(|c| c.terms.len() == 1 && c.terms[0].0.len() == 2 && c.rhs == 0.0).count()
    }
}

/// Degree-`degree` relaxation of the independent-set program: maximize
/// `E_u x_u` subject to `x_u x_v = 0` on edges, with floor
/// `E_u x_u >= 1/2 - eps`.
pub fn build_is_relaxation(g: &Graph, eps: f64, degree: usize) -> Result<ConstraintSystem> {
    if !(eps >= 0.0) {
        return Err(Error::param(format!("eps = {eps} must be non-negative")));
    }
    let n = g.n();
    let atoms = Arc::new(Atoms::boolean(g));
    let state = Arc::new(vec![FREE; n]);
    let w = 1.0 / n.max(1) as f64;
    let singles: Vec<(MomentKey, f64)> = (0..n).map(|u| (MomentKey::vertices(&[u]), w)).collect();
    ConstraintSystem::new(atoms, state, degree, singles, Some(0.5 - eps), Vec::new(), Vec::new())
}

/// Degree-`degree` relaxation of the almost-3-coloring program with color
/// caps `E_u 1(x_u = σ) <= 1/2 + gamma`. The objective maximizes the
/// colored mass `E_u Σ_σ x̄_{u,σ}`, whose floor `1 - eps` is the ⊥ cap
/// `E_u 1(x_u = ⊥) <= eps`.
pub fn build_coloring_relaxation(g: &Graph, eps: f64, gamma: f64, degree: usize) -> Result<ConstraintSystem> {
    if !(0.0..=1.0).contains(&eps) || !(0.0..=1.0).contains(&gamma) {
        return Err(Error::param(format!("eps = {eps} and gamma = {gamma} must lie in [0, 1]")));
    }
    let n = g.n();
    let atoms = Arc::new(Atoms::coloring(g));
    let state = Arc::new(vec![FREE; 3 * n]);
    let w = 1.0 / n.max(1) as f64;
    let objective: Vec<(MomentKey, f64)> =
        (0..n).flat_map(|u| (1..=3).map(move |s| (MomentKey::colored(&[(u, s)]), w))).collect();
    let caps: Vec<LinearConstraint> = (1..=3u8)
        .map(|s| LinearConstraint {
            terms: (0..n).map(|u| (MomentKey::colored(&[(u, s)]), w)).collect(),
            rhs: 0.5 + gamma,
        })
        .collect();
    ConstraintSystem::new(atoms, state, degree, objective, Some(1.0 - eps), Vec::new(), caps)
}
