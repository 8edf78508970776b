use serde::{Deserialize, Serialize};

use super::Graph;
use crate::{Error, Result};

/// Parses the edge-list format: a header line `n m`, then `m` lines `u v`.
/// Blank lines and `#` comments are ignored.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or(Error::Parse { line: 0, msg: "missing header".into() })?;
    let [n, m] = parse_pair(hline, header)?;
    let mut edges = Vec::with_capacity(m);
    for (line, l) in lines {
        let [u, v] = parse_pair(line, l)?;
        if u >= n || v >= n {
            return Err(Error::Parse { line, msg: format!("vertex out of range in ({u}, {v})") });
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::Parse { line: 0, msg: format!("header declares {m} edges, found {}", edges.len()) });
    }
    Graph::new(n, edges)
}

fn parse_pair(line: usize, l: &str) -> Result<[usize; 2]> {
    let mut it = l.split_whitespace().map(str::parse::<usize>);
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok([a, b]),
        _ => Err(Error::Parse { line, msg: format!("expected two non-negative integers, got {l:?}") }),
    }
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut s = format!("{} {}\n", g.n(), g.m());
    for &(u, v) in g.edges() {
        s.push_str(&format!("{u} {v}\n"));
    }
    s
}

/// Planted-instance JSON record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantedInstance {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub planted_set: Vec<usize>,
    pub epsilon: f64,
    pub lambda2: f64,
}

impl PlantedInstance {
    pub fn graph(&self) -> Result<Graph> {
        Graph::new(self.n, self.edges.iter().copied())
    }

    pub fn from_graph(g: &Graph, planted_set: Vec<usize>, epsilon: f64, lambda2: f64) -> Self {
        PlantedInstance {
            n: g.n(),
            edges: g.edges().iter().map(|&(u, v)| (u as usize, v as usize)).collect(),
            planted_set,
            epsilon,
            lambda2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_comments() {
        let text = "# triangle\n3 3\n0 1\n1 2 # last-but-one\n\n0 2\n";
        let g = parse_edge_list(text).unwrap();
        assert_eq!(g.m(), 3);
        assert_eq!(parse_edge_list(&write_edge_list(&g)).unwrap(), g);
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(parse_edge_list("3 1\n0 x\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_edge_list("3 2\n0 1\n").is_err());
        assert!(parse_edge_list("3 1\n0 3\n").is_err());
        assert!(parse_edge_list("").is_err());
    }

    #[test]
    fn planted_json_rejects_unknown_keys() {
        let ok = r#"{"n":2,"edges":[[0,1]],"planted_set":[0],"epsilon":0.0,"lambda2":-1.0}"#;
        let p: PlantedInstance = serde_json::from_str(ok).unwrap();
        assert_eq!(p.graph().unwrap().m(), 1);
        let bad = r#"{"n":2,"edges":[],"planted_set":[],"epsilon":0.0,"lambda2":0.0,"extra":1}"#;
        assert!(serde_json::from_str::<PlantedInstance>(bad).is_err());
    }
}
