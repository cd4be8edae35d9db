//! Immutable simple undirected graphs, the edge-list text format and seeded
//! generators.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: endpoint {endpoint} out of range (n = {n})")]
    EndpointOutOfRange { line: usize, endpoint: usize, n: usize },
    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("line {line}: duplicate edge ({u}, {v})")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("header declares {declared} edges but {found} were given")]
    EdgeCountMismatch { declared: usize, found: usize },
    #[error("{0}")]
    InvalidParams(String),
}

/// A simple undirected graph on vertices `0..n`.
///
/// Edges are stored normalized as `(u, v)` with `u < v`, in insertion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from an edge list, rejecting self-loops, duplicates
    /// (in either orientation) and out-of-range endpoints. Errors carry the
    /// 1-based position of the offending edge.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        Self::build(n, edges.iter().enumerate().map(|(i, &e)| (i + 1, e)))
    }

    fn build(
        n: usize,
        edges: impl Iterator<Item = (usize, (usize, usize))>,
    ) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n);
        let mut seen = HashSet::new();
        for (line, (a, b)) in edges {
            for endpoint in [a, b] {
                if endpoint >= n {
                    return Err(GraphError::EndpointOutOfRange { line, endpoint, n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop { line, vertex: a });
            }
            let (u, v) = (a.min(b), a.max(b));
            if !seen.insert((u, v)) {
                return Err(GraphError::DuplicateEdge { line, u, v });
            }
            g.edges.push((u, v));
            g.adj[u].push(v);
            g.adj[v].push(u);
        }
        for list in &mut g.adj {
            list.sort_unstable();
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Serializes into the edge-list text format accepted by [`load_graph`].
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.m());
        for &(u, v) in &self.edges {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }
}

/// Parses the edge-list format: a header line `n m` followed by `m` lines
/// `u v`. Blank trailing lines are ignored.
pub fn load_graph(source: &str) -> Result<Graph, GraphError> {
    let mut lines = source
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (header_line, header) = lines.next().ok_or(GraphError::Parse {
        line: 1,
        reason: "missing header \"n m\"".into(),
    })?;
    let [n, m] = parse_pair(header_line, header)?;

    let mut edges = Vec::with_capacity(m);
    for (line, text) in lines {
        let [u, v] = parse_pair(line, text)?;
        edges.push((line, (u, v)));
    }
    if edges.len() != m {
        return Err(GraphError::EdgeCountMismatch {
            declared: m,
            found: edges.len(),
        });
    }
    Graph::build(n, edges.into_iter())
}

fn parse_pair(line: usize, text: &str) -> Result<[usize; 2], GraphError> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(GraphError::Parse {
            line,
            reason: format!("expected two integers, found {:?}", text),
        });
    }
    let mut out = [0usize; 2];
    for (slot, field) in out.iter_mut().zip(&fields) {
        *slot = field.parse().map_err(|_| GraphError::Parse {
            line,
            reason: format!("not a non-negative integer: {field:?}"),
        })?;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphKind {
    Path,
    Cycle,
    Complete,
    Star,
    /// Erdős–Rényi G(n, p).
    Gnp { p: f64 },
}

/// Deterministic generator: identical `(kind, n, seed)` always yields the
/// identical edge sequence. The seed only matters for `Gnp`.
pub fn gen_graph(kind: GraphKind, n: usize, seed: u64) -> Result<Graph, GraphError> {
    if n == 0 {
        return Err(GraphError::InvalidParams("n must be at least 1".into()));
    }
    let edges: Vec<(usize, usize)> = match kind {
        GraphKind::Path => (1..n).map(|v| (v - 1, v)).collect(),
        GraphKind::Cycle => {
            if n < 3 {
                return Err(GraphError::InvalidParams(
                    "a simple cycle needs n >= 3".into(),
                ));
            }
            (1..n).map(|v| (v - 1, v)).chain([(0, n - 1)]).collect()
        }
        GraphKind::Complete => (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect(),
        GraphKind::Star => (1..n).map(|v| (0, v)).collect(),
        GraphKind::Gnp { p } => {
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                return Err(GraphError::InvalidParams("probability out of range".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
            edges
        }
    };
    Graph::from_edges(n, &edges)
}

/// Spreads the edges of `g` over `machines` machines: a seeded shuffle
/// followed by round-robin dealing, so every machine holds either
/// `floor(m / machines)` or `ceil(m / machines)` edges.
pub fn distribute_edges(g: &Graph, machines: usize, seed: u64) -> Vec<Vec<(usize, usize)>> {
    assert!(machines >= 1, "need at least one machine");
    let mut edges = g.edges().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    edges.shuffle(&mut rng);
    let mut out = vec![Vec::new(); machines];
    for (i, e) in edges.into_iter().enumerate() {
        out[i % machines].push(e);
    }
    out
}

/// Flattens per-machine edge lists into `[u, v, u, v, ...]` word inputs.
pub fn edges_to_words(placement: &[Vec<(usize, usize)>]) -> Vec<Vec<u64>> {
    placement
        .iter()
        .map(|edges| {
            edges
                .iter()
                .flat_map(|&(u, v)| [u as u64, v as u64])
                .collect()
        })
        .collect()
}

/// Random connected graph: a uniformly random recursive tree plus G(n, p)
/// extra edges. Used by tests and the acceptance suite.
pub fn gen_connected(n: usize, extra_p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = HashSet::new();
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        set.insert((u, v));
        edges.push((u, v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(extra_p) && set.insert((u, v)) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).expect("generated edges are simple")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_small_path() {
        let g = load_graph("3 2\n0 1\n1 2").unwrap();
        assert_eq!((g.n(), g.m()), (3, 2));
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn loads_edgeless() {
        let g = load_graph("4 0").unwrap();
        assert_eq!((g.n(), g.m()), (4, 0));
    }

    #[test]
    fn rejects_out_of_range() {
        let err = load_graph("2 1\n0 5").unwrap_err();
        assert_eq!(
            err,
            GraphError::EndpointOutOfRange {
                line: 2,
                endpoint: 5,
                n: 2
            }
        );
    }

    #[test]
    fn rejects_bad_input_with_line_numbers() {
        assert!(matches!(
            load_graph("3 1\n1 1"),
            Err(GraphError::SelfLoop { line: 2, .. })
        ));
        assert!(matches!(
            load_graph("3 2\n0 1\n1 0"),
            Err(GraphError::DuplicateEdge { line: 3, .. })
        ));
        assert!(matches!(
            load_graph("3 2\n0 1"),
            Err(GraphError::EdgeCountMismatch { declared: 2, found: 1 })
        ));
        assert!(matches!(
            load_graph("3 1\n0 x"),
            Err(GraphError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            load_graph("3 1\n0 1 2"),
            Err(GraphError::Parse { line: 2, .. })
        ));
        assert!(load_graph("").is_err());
    }

    #[test]
    fn generators() {
        assert_eq!(gen_graph(GraphKind::Complete, 4, 0).unwrap().m(), 6);
        let path = gen_graph(GraphKind::Path, 5, 0).unwrap();
        assert_eq!(path.edges(), &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert_eq!(gen_graph(GraphKind::Cycle, 5, 0).unwrap().m(), 5);
        let star = gen_graph(GraphKind::Star, 6, 0).unwrap();
        assert_eq!(star.degree(0), 5);
        assert!(gen_graph(GraphKind::Gnp { p: 1.5 }, 4, 0).is_err());
        assert!(gen_graph(GraphKind::Path, 0, 0).is_err());
    }

    #[test]
    fn gnp_is_deterministic() {
        let a = gen_graph(GraphKind::Gnp { p: 0.05 }, 64, 7).unwrap();
        let b = gen_graph(GraphKind::Gnp { p: 0.05 }, 64, 7).unwrap();
        assert_eq!(a.edges(), b.edges());
        let c = gen_graph(GraphKind::Gnp { p: 0.05 }, 64, 8).unwrap();
        assert_ne!(a.edges(), c.edges());
    }

    #[test]
    fn edge_list_round_trips() {
        let g = gen_graph(GraphKind::Gnp { p: 0.2 }, 20, 3).unwrap();
        assert_eq!(load_graph(&g.to_edge_list()).unwrap(), g);
    }

    #[test]
    fn distribution_is_balanced() {
        let g = gen_graph(GraphKind::Complete, 10, 0).unwrap();
        let parts = distribute_edges(&g, 4, 1);
        let sizes: Vec<usize> = parts.iter().map(Vec::len).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 45);
        assert!(sizes.iter().all(|&s| s == 11 || s == 12));
    }

    #[test]
    fn connected_generator_is_connected() {
        let g = gen_connected(40, 0.02, 9);
        let labels = crate::oracle::components_bfs(&g);
        assert!(labels.iter().all(|&l| l == 0));
    }

    proptest::proptest! {
        #[test]
        fn degree_sum_is_twice_m(n in 1usize..40, p in 0.0f64..1.0, seed in 0u64..1000) {
            let g = gen_graph(GraphKind::Gnp { p }, n, seed).unwrap();
            proptest::prop_assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.m());
            proptest::prop_assert!(g.max_degree() < n.max(1));
        }
    }
}
