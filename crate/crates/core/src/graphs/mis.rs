use super::Graph;
use crate::{Error, Result};

/// Largest independent set found by the exact search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MisResult {
    pub size: usize,
    pub set: Vec<usize>,
    /// Search nodes visited.
    pub nodes: u64,
}

const DEFAULT_NODE_BUDGET: u64 = 200_000_000;

/// Exact maximum independent set by branch and bound (graphs with at most
/// 128 vertices).
pub fn exact_max_independent_set(g: &Graph) -> Result<MisResult> {
    exact_max_independent_set_with_budget(g, DEFAULT_NODE_BUDGET)
}

pub fn exact_max_independent_set_with_budget(g: &Graph, max_nodes: u64) -> Result<MisResult> {
    let n = g.n();
    if n > 128 {
        return Err(Error::param(format!("exact oracle supports n <= 128, got {n}")));
    }
    let nb = neighbourhoods(g);
    let all = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    let mut s = Search { nb: &nb, best: 0, best_size: 0, nodes: 0, budget: max_nodes };
    s.run(all, 0, 0);
    if s.nodes > s.budget {
        return Err(Error::Budget(format!(
            "node budget {max_nodes} exhausted; best independent set so far has size {}",
            s.best_size
        )));
    }
    Ok(MisResult { size: s.best_size, set: bits(s.best), nodes: s.nodes })
}

fn neighbourhoods(g: &Graph) -> Vec<u128> {
    (0..g.n()).map(|u| g.neighbors(u).iter().fold(0u128, |acc, &v| acc | 1u128 << v)).collect()
}

fn bits(mut x: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(x.count_ones() as usize);
    while x != 0 {
        out.push(x.trailing_zeros() as usize);
        x &= x - 1;
    }
    out
}

/// Upper bound on the independence number of `cand` from a greedy partition
/// into cliques.
fn clique_cover(nb: &[u128], mut cand: u128) -> usize {
    let mut count = 0;
    while cand != 0 {
        let v = cand.trailing_zeros() as usize;
        cand &= !(1u128 << v);
        let mut common = cand & nb[v];
        while common != 0 {
            let w = common.trailing_zeros() as usize;
            cand &= !(1u128 << w);
            common &= nb[w] & !(1u128 << w);
        }
        count += 1;
    }
    count
}

struct Search<'a> {
    nb: &'a [u128],
    best: u128,
    best_size: usize,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn run(&mut self, mut cand: u128, mut cur: u128, mut size: usize) {
        self.nodes += 1;
        if self.nodes > self.budget {
            return;
        }
        // vertices with at most one candidate neighbour can always be taken
        loop {
            let mut changed = false;
            let mut it = cand;
            while it != 0 {
                let v = it.trailing_zeros() as usize;
                it &= it - 1;
                if cand >> v & 1 == 1 && (self.nb[v] & cand).count_ones() <= 1 {
                    cur |= 1u128 << v;
                    size += 1;
                    cand &= !(self.nb[v] | 1u128 << v);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if cand == 0 {
            if size > self.best_size {
                self.best_size = size;
                self.best = cur;
            }
            return;
        }
        if size + clique_cover(self.nb, cand) <= self.best_size {
            return;
        }
        let mut pick = 0;
        let mut deg = 0;
        let mut it = cand;
        while it != 0 {
            let v = it.trailing_zeros() as usize;
            it &= it - 1;
            let d = (self.nb[v] & cand).count_ones();
            if d > deg {
                deg = d;
                pick = v;
            }
        }
        let bit = 1u128 << pick;
        self.run(cand & !(self.nb[pick] | bit), cur | bit, size + 1);
        self.run(cand & !bit, cur, size);
    }
}

/// All independent sets with at least `min_size` vertices, as bitmasks
/// (graphs with at most 64 vertices).
pub fn enumerate_independent_sets(g: &Graph, min_size: usize) -> Result<Vec<u64>> {
    enumerate_independent_sets_with_budget(g, min_size, u64::MAX)
}

/// As [`enumerate_independent_sets`], failing after `max_nodes` search nodes.
pub fn enumerate_independent_sets_with_budget(g: &Graph, min_size: usize, max_nodes: u64) -> Result<Vec<u64>> {
    let n = g.n();
    if n > 64 {
        return Err(Error::param(format!("enumeration supports n <= 64, got {n}")));
    }
    let mut e = Enumerator { nb: neighbourhoods(g), n, min: min_size, out: Vec::new(), nodes: 0, max_nodes };
    if !e.run(0, 0, 0) {
        return Err(Error::Budget(format!("independent set enumeration exceeded {max_nodes} nodes")));
    }
    Ok(e.out)
}

struct Enumerator {
    nb: Vec<u128>,
    n: usize,
    min: usize,
    out: Vec<u64>,
    nodes: u64,
    max_nodes: u64,
}

impl Enumerator {
    fn run(&mut self, v: usize, cur: u128, size: usize) -> bool {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return false;
        }
        if size + (self.n - v) < self.min {
            return true;
        }
        if v == self.n {
            self.out.push(cur as u64);
            return true;
        }
        if self.nb[v] & cur == 0 && !self.run(v + 1, cur | 1u128 << v, size + 1) {
            return false;
        }
        self.run(v + 1, cur, size)
    }
}
