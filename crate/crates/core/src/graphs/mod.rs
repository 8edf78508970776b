//! Simple undirected graphs, instance generators and exact oracles.

mod r#gen;
mod io;
mod mis;
mod spectral;

pub use r#gen::{
    gen_almost_3colorable_expander, gen_noisy_hypercube, gen_planted_is_expander,
    gen_planted_is_expander_with, gen_random_regular, noisy_hypercube_radius,
    overlay_bipartite_expander, ColoredInstance, PlantedParams,
};
pub use io::{parse_edge_list, write_edge_list, PlantedInstance};
pub use mis::{
    enumerate_independent_sets, enumerate_independent_sets_with_budget, exact_max_independent_set, exact_max_independent_set_with_budget,
    MisResult,
};
pub use spectral::{spectral_stats, SpectralStats};

use crate::{Error, Result};

/// Undirected simple graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<u32>>,
    edges: Vec<(u32, u32)>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, out-of-range endpoints and
    /// repeated edges.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::param(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::param(format!("self-loop at {u}")));
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            list.push((a as u32, b as u32));
            adj[a].push(b as u32);
            adj[b].push(a as u32);
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::param(format!("repeated edge ({}, {})", w[0].0, w[0].1)));
        }
        for nb in &mut adj {
            nb.sort_unstable();
        }
        Ok(Graph { n, adj, edges: list })
    }

    /// Like [`Graph::new`] but silently drops repeated edges.
    pub fn from_edges_dedup(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(u, v)| if u < v { (u, v) } else { (v, u) })
            .collect();
        list.sort_unstable();
        list.dedup();
        Graph::new(n, list)
    }

    pub fn empty(n: usize) -> Self {
        Graph { n, adj: vec![Vec::new(); n], edges: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].binary_search(&(v as u32)).is_ok()
    }

    /// Common degree if the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first().map_or(0, Vec::len);
        self.adj.iter().all(|a| a.len() == d).then_some(d)
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        let mut mark = vec![false; self.n];
        for &u in set {
            if u >= self.n {
                return false;
            }
            mark[u] = true;
        }
        self.edges.iter().all(|&(u, v)| !(mark[u as usize] && mark[v as usize]))
    }

    /// Checks that `colors[u] != colors[v]` on every edge, ignoring vertices
    /// whose color is `skip`.
    pub fn is_proper_coloring(&self, colors: &[u8], skip: Option<u8>) -> bool {
        colors.len() == self.n
            && self.edges.iter().all(|&(u, v)| {
                let (a, b) = (colors[u as usize], colors[v as usize]);
                a != b || Some(a) == skip
            })
    }

    /// Union with another graph on the same vertex set; repeated edges are dropped.
    pub fn union(&self, other: &Graph) -> Result<Graph> {
        if self.n != other.n {
            return Err(Error::param("graph union needs equal vertex counts"));
        }
        let all = self.edges.iter().chain(other.edges.iter()).map(|&(u, v)| (u as usize, v as usize));
        Graph::from_edges_dedup(self.n, all)
    }

    /// Subgraph induced on `keep`, relabelled to `0..keep.len()` in order.
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n];
        for (i, &u) in keep.iter().enumerate() {
            index[u] = i;
        }
        let edges = self.edges.iter().filter_map(|&(u, v)| {
            let (a, b) = (index[u as usize], index[v as usize]);
            (a != usize::MAX && b != usize::MAX).then_some((a, b))
        });
        Graph::new(keep.len(), edges).expect("induced subgraph of a simple graph is simple")
    }

    pub fn cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle needs n >= 3")
    }

    pub fn complete(n: usize) -> Graph {
        Graph::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).expect("simple")
    }

    /// Complete multipartite graph with the given part sizes.
    pub fn complete_multipartite(parts: &[usize]) -> Graph {
        let mut label = Vec::new();
        for (p, &s) in parts.iter().enumerate() {
            label.extend(std::iter::repeat_n(p, s));
        }
        let n = label.len();
        let label = &label;
        Graph::new(n, (0..n).flat_map(|i| (i + 1..n).filter(move |&j| label[i] != label[j]).map(move |j| (i, j))))
            .expect("simple")
    }

    pub fn petersen() -> Graph {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        Graph::new(10, outer.chain(spokes).chain(inner)).expect("simple")
    }

    /// Cartesian product of two graphs.
    pub fn cartesian(a: &Graph, b: &Graph) -> Graph {
        let nb = b.n;
        let mut edges = Vec::new();
        for x in 0..a.n {
            for &(u, v) in b.edges() {
                edges.push((x * nb + u as usize, x * nb + v as usize));
            }
        }
        for &(u, v) in a.edges() {
            for y in 0..nb {
                edges.push((u as usize * nb + y, v as usize * nb + y));
            }
        }
        Graph::new(a.n * nb, edges).expect("simple")
    }
}
