//! Ground-truth connectivity labelings. Every component is labeled by its
//! minimum vertex id.

use std::collections::VecDeque;

use crate::graph::Graph;

/// Union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns `true` if `a` and `b` were in different sets.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    /// Min-id representative label for every element.
    pub fn min_labels(&mut self) -> Vec<usize> {
        let n = self.parent.len();
        let mut min_of_root = vec![usize::MAX; n];
        for v in 0..n {
            let r = self.find(v);
            min_of_root[r] = min_of_root[r].min(v);
        }
        (0..n).map(|v| min_of_root[self.find(v)]).collect()
    }
}

pub fn components_union_find(g: &Graph) -> Vec<usize> {
    let mut sets = DisjointSets::new(g.n());
    for &(u, v) in g.edges() {
        sets.union(u, v);
    }
    sets.min_labels()
}

/// BFS from each unvisited vertex in ascending order; the start vertex is
/// necessarily the component minimum.
pub fn components_bfs(g: &Graph) -> Vec<usize> {
    let mut label = vec![usize::MAX; g.n()];
    let mut queue = VecDeque::new();
    for start in 0..g.n() {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = start;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &w in g.neighbors(u) {
                if label[w] == usize::MAX {
                    label[w] = start;
                    queue.push_back(w);
                }
            }
        }
    }
    label
}

/// Component labeling checked by two independent implementations.
///
/// # Panics
///
/// Panics if union-find and BFS disagree, which would indicate a bug in one
/// of them.
pub fn components_oracle(g: &Graph) -> Vec<usize> {
    let uf = components_union_find(g);
    let bfs = components_bfs(g);
    assert_eq!(uf, bfs, "union-find and BFS labelings disagree");
    uf
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_graph, GraphKind};

    #[test]
    fn path_is_one_component() {
        let g = gen_graph(GraphKind::Path, 3, 0).unwrap();
        assert_eq!(components_oracle(&g), vec![0, 0, 0]);
    }

    #[test]
    fn two_edges_two_components() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(components_oracle(&g), vec![0, 0, 2, 2]);
    }

    #[test]
    fn union_find_matches_bfs_on_gnp() {
        let g = gen_graph(GraphKind::Gnp { p: 0.02 }, 64, 3).unwrap();
        assert_eq!(components_union_find(&g), components_bfs(&g));
    }

    #[test]
    fn labels_are_min_and_idempotent() {
        let g = gen_graph(GraphKind::Gnp { p: 0.05 }, 50, 11).unwrap();
        let labels = components_oracle(&g);
        for v in 0..g.n() {
            assert!(labels[v] <= v);
            assert_eq!(labels[labels[v]], labels[v]);
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(1000))]
        #[test]
        fn union_find_agrees_with_bfs(n in 1usize..48, p in 0.0f64..0.3, seed in proptest::prelude::any::<u64>()) {
            let g = gen_graph(GraphKind::Gnp { p }, n, seed).unwrap();
            proptest::prop_assert_eq!(components_union_find(&g), components_bfs(&g));
        }
    }
}
