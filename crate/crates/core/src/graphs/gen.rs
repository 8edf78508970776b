use rand::seq::SliceRandom;
use rand::Rng as _;

use super::{spectral_stats, Graph};
use crate::rng::{self, Rng};
use crate::{Error, Result};

const PAIRING_RESTARTS: usize = 2000;

/// Pairs `stubs[v]` half-edges at each vertex, choosing a uniformly random
/// suitable pair at every step and restarting on dead ends. `allowed`
/// decides which vertex pairs may be joined; loops and repeated edges are
/// always rejected.
fn pair_stubs(
    stubs: &[usize],
    allowed: impl Fn(usize, usize) -> bool,
    rng: &mut Rng,
) -> Result<Vec<(usize, usize)>> {
    let total: usize = stubs.iter().sum();
    if total % 2 == 1 {
        return Err(Error::Generation("odd number of half-edges".into()));
    }
    let n = stubs.len();
    'restart: for _ in 0..PAIRING_RESTARTS {
        let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, stubs[v])).collect();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut edges = Vec::with_capacity(total / 2);
        let mut fails = 0usize;
        while points.len() >= 2 {
            let len = points.len();
            let i = rng.random_range(0..len);
            let j = rng.random_range(0..len);
            let (u, v) = (points[i], points[j]);
            if i != j && u != v && allowed(u, v) && !adj[u].contains(&v) {
                adj[u].push(v);
                adj[v].push(u);
                edges.push((u, v));
                let (hi, lo) = if i > j { (i, j) } else { (j, i) };
                points.swap_remove(hi);
                points.swap_remove(lo);
                fails = 0;
                continue;
            }
            fails += 1;
            if fails > 64 * len + 256 {
                let stuck = !points.iter().enumerate().any(|(a, &x)| {
                    points[a + 1..].iter().any(|&y| x != y && allowed(x, y) && !adj[x].contains(&y))
                });
                if stuck {
                    continue 'restart;
                }
                fails = 0;
            }
        }
        return Ok(edges);
    }
    Err(Error::Generation(format!("pairing failed after {PAIRING_RESTARTS} restarts")))
}

fn relabel(n: usize, edges: &[(usize, usize)], rng: &mut Rng) -> (Vec<usize>, Vec<(usize, usize)>) {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let edges = edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
    (perm, edges)
}

/// Uniform-ish random `d`-regular graph on `n` vertices.
pub fn gen_random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if d >= n.max(1) || (n * d) % 2 == 1 {
        return Err(Error::param(format!("no simple {d}-regular graph on {n} vertices")));
    }
    let mut rng = rng::rng(seed);
    let edges = pair_stubs(&vec![d; n], |_, _| true, &mut rng)?;
    Graph::new(n, edges)
}

/// Parameters for [`gen_planted_is_expander_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct PlantedParams {
    pub n: usize,
    pub eps: f64,
    pub d: usize,
    pub seed: u64,
    /// Resample until `lambda2` is at most this value. `None` accepts the
    /// first sample.
    pub lambda2_bound: Option<f64>,
    pub max_attempts: usize,
}

impl PlantedParams {
    pub fn new(n: usize, eps: f64, d: usize, seed: u64) -> Self {
        PlantedParams { n, eps, d, seed, lambda2_bound: Some(1.0 - 40.0 * eps), max_attempts: 200 }
    }
}

/// `d`-regular graph with a planted independent set of size
/// `ceil((1/2 - eps) n)`, resampled until `lambda2 <= 1 - 40 eps`.
pub fn gen_planted_is_expander(n: usize, eps: f64, d: usize, seed: u64) -> Result<super::PlantedInstance> {
    gen_planted_is_expander_with(&PlantedParams::new(n, eps, d, seed))
}

/// Planted independent set `I` whose vertices send all `d` edges to the
/// complement `C`. The remaining degree inside `C` is forced by regularity
/// and filled with a random graph.
pub fn gen_planted_is_expander_with(p: &PlantedParams) -> Result<super::PlantedInstance> {
    let PlantedParams { n, eps, d, .. } = *p;
    if !(0.0..=0.1).contains(&eps) {
        return Err(Error::param(format!("eps = {eps} outside [0, 0.1]")));
    }
    let a = (((0.5 - eps) * n as f64) - 1e-9).ceil().max(1.0) as usize;
    let b = n - a;
    if d == 0 || d > b || a > b {
        return Err(Error::param(format!("cannot plant {a} of {n} vertices at degree {d}")));
    }
    // I-degree of each complement vertex, spread as evenly as possible
    let cross = a * d;
    let k: Vec<usize> = (0..b).map(|i| cross / b + usize::from(i < cross % b)).collect();
    let inner: Vec<usize> = k.iter().map(|&x| d - x).collect();
    if inner.iter().sum::<usize>() % 2 == 1 || inner.iter().any(|&x| x >= b.max(1)) {
        return Err(Error::param(format!("degree sequence inside the complement is not graphical for n = {n}, d = {d}")));
    }
    let mut rng = rng::rng(p.seed);
    for _ in 0..p.max_attempts.max(1) {
        let mut stubs = vec![d; a];
        stubs.extend_from_slice(&k);
        let mut edges = pair_stubs(&stubs, |u, v| (u < a) != (v < a), &mut rng)?;
        let mut stubs_c = vec![0; a];
        stubs_c.extend_from_slice(&inner);
        edges.extend(pair_stubs(&stubs_c, |u, v| u >= a && v >= a, &mut rng)?);
        let (perm, edges) = relabel(n, &edges, &mut rng);
        let g = Graph::new(n, edges)?;
        let lambda2 = spectral_stats(&g)?.lambda2;
        if p.lambda2_bound.is_none_or(|bound| lambda2 <= bound) {
            let mut planted: Vec<usize> = perm[..a].to_vec();
            planted.sort_unstable();
            return Ok(super::PlantedInstance::from_graph(&g, planted, eps, lambda2));
        }
    }
    Err(Error::Generation(format!(
        "no sample met lambda2 <= {:?} within {} attempts",
        p.lambda2_bound, p.max_attempts
    )))
}

/// A graph together with a planted coloring. Color 0 marks the uncolored
/// (bottom) vertices, colors 1..=3 the classes.
#[derive(Clone, Debug, PartialEq)]
pub struct ColoredInstance {
    pub graph: Graph,
    pub coloring: Vec<u8>,
    pub epsilon: f64,
    pub lambda2: f64,
}

/// `d`-regular graph that is properly 3-colored outside `ceil(eps n)`
/// unconstrained vertices, with three near-equal classes.
pub fn gen_almost_3colorable_expander(n: usize, eps: f64, d: usize, seed: u64) -> Result<ColoredInstance> {
    if !(0.0..=0.1).contains(&eps) {
        return Err(Error::param(format!("eps = {eps} outside [0, 0.1]")));
    }
    let bot = ((eps * n as f64) - 1e-9).ceil().max(0.0) as usize;
    let rest = n.saturating_sub(bot);
    let biggest = rest.div_ceil(3);
    if d == 0 || d + biggest > n || (n * d) % 2 == 1 {
        return Err(Error::param(format!("no 3-partite {d}-regular template on {n} vertices")));
    }
    let mut rng = rng::rng(seed);
    let mut class: Vec<u8> = (0..n).map(|i| if i < bot { 0 } else { 1 + ((i - bot) % 3) as u8 }).collect();
    class.shuffle(&mut rng);
    let cls = &class;
    let edges = pair_stubs(&vec![d; n], |u, v| cls[u] == 0 || cls[v] == 0 || cls[u] != cls[v], &mut rng)?;
    let graph = Graph::new(n, edges)?;
    let lambda2 = spectral_stats(&graph)?.lambda2;
    Ok(ColoredInstance { graph, coloring: class, epsilon: eps, lambda2 })
}

/// Hamming radius used by [`gen_noisy_hypercube`]: `floor(gamma n)`, at least 1.
pub fn noisy_hypercube_radius(n: usize, gamma: f64) -> usize {
    ((gamma * n as f64 + 1e-9).floor() as usize).max(1)
}

/// Vertices `{0,1}^n`, edges between distinct points at Hamming distance at
/// most `floor(gamma n)` (at least 1).
pub fn gen_noisy_hypercube(n: usize, gamma: f64) -> Result<Graph> {
    if n == 0 || n > 16 {
        return Err(Error::param(format!("dimension {n} outside 1..=16")));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::param(format!("gamma = {gamma} outside (0, 1]")));
    }
    let r = noisy_hypercube_radius(n, gamma).min(n);
    let masks: Vec<usize> = (1..1usize << n).filter(|m| m.count_ones() as usize <= r).collect();
    let mut edges = Vec::new();
    for x in 0..1usize << n {
        for &m in &masks {
            let y = x ^ m;
            if x < y {
                edges.push((x, y));
            }
        }
    }
    Graph::new(1 << n, edges)
}

/// Adds a random bipartite graph across a random balanced bipartition.
/// Vertices on the smaller side get exactly `d_h` new neighbours; the larger
/// side shares the same number of edges as evenly as possible. Edges already
/// in `g` are dropped. Returns the union and the side of each vertex.
pub fn overlay_bipartite_expander(g: &Graph, d_h: usize, seed: u64) -> Result<(Graph, Vec<bool>)> {
    let n = g.n();
    let small = n / 2;
    if d_h == 0 || d_h > small {
        return Err(Error::param(format!("d_h = {d_h} outside 1..={small}")));
    }
    let mut rng = rng::rng(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    // positions 0..small form the smaller side
    let large = n - small;
    let cross = small * d_h;
    let mut stubs = vec![d_h; small];
    stubs.extend((0..large).map(|i| cross / large + usize::from(i < cross % large)));
    let edges = pair_stubs(&stubs, |u, v| (u < small) != (v < small), &mut rng)?;
    let h = Graph::new(n, edges.into_iter().map(|(u, v)| (perm[u], perm[v])))?;
    let mut side = vec![false; n];
    for &u in &perm[..small] {
        side[u] = true;
    }
    Ok((g.union(&h)?, side))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_generator() {
        for (n, d) in [(10, 3), (50, 4), (60, 17), (300, 40)] {
            let g = gen_random_regular(n, d, 7).unwrap();
            assert_eq!(g.regular_degree(), Some(d));
        }
        assert!(gen_random_regular(5, 3, 0).is_err());
        assert_eq!(gen_random_regular(40, 5, 3).unwrap(), gen_random_regular(40, 5, 3).unwrap());
    }

    #[test]
    fn planted_instances() {
        let p = gen_planted_is_expander(200, 0.001, 16, 1).unwrap();
        let g = p.graph().unwrap();
        assert_eq!(g.regular_degree(), Some(16));
        assert_eq!(p.planted_set.len(), 100);
        assert!(g.is_independent(&p.planted_set));
        assert!(p.lambda2 <= 0.96);

        let mut q = PlantedParams::new(400, 0.05, 10, 2);
        q.lambda2_bound = None;
        let p = gen_planted_is_expander_with(&q).unwrap();
        let g = p.graph().unwrap();
        assert_eq!(g.regular_degree(), Some(10));
        assert_eq!(p.planted_set.len(), 180);
        assert!(g.is_independent(&p.planted_set));
    }

    #[test]
    fn colored_instances() {
        let c = gen_almost_3colorable_expander(300, 0.0, 40, 3).unwrap();
        assert_eq!(c.graph.regular_degree(), Some(40));
        assert!(c.graph.is_proper_coloring(&c.coloring, None));
        for col in 1..=3u8 {
            let size = c.coloring.iter().filter(|&&x| x == col).count();
            assert!(size as f64 <= (0.5 + 1e-3) * 300.0);
        }
        let c = gen_almost_3colorable_expander(120, 0.05, 10, 4).unwrap();
        assert_eq!(c.coloring.iter().filter(|&&x| x == 0).count(), 6);
        assert!(c.graph.is_proper_coloring(&c.coloring, Some(0)));
    }

    #[test]
    fn noisy_hypercube_degrees() {
        assert_eq!(gen_noisy_hypercube(3, 1.0 / 3.0).unwrap().regular_degree(), Some(3));
        assert_eq!(gen_noisy_hypercube(4, 0.5).unwrap().regular_degree(), Some(10));
        assert_eq!(gen_noisy_hypercube(8, 0.25).unwrap().regular_degree(), Some(36));
    }

    #[test]
    fn overlay_on_empty_graph_is_complete_bipartite() {
        let (g, side) = overlay_bipartite_expander(&Graph::empty(10), 5, 9).unwrap();
        assert_eq!(g.m(), 25);
        assert!(g.edges().iter().all(|&(u, v)| side[u as usize] != side[v as usize]));
    }
}
