//! Pairwise spanning-forest merging on semi-MPC machines.
//!
//! Round 1: every machine replaces its edges by a spanning forest of them.
//! Merge level `k` (sent in round `k + 1`): machine `a` with
//! `a mod 2^(k+1) = 2^k` ships its forest to `a - 2^k` as a parent array of
//! `n` words, and the receiver re-sparsifies the union. After `ceil(log2 p)` levels machine 0 holds a spanning forest
//! of the whole graph and outputs the component labels.

use crate::message::{ceil_log2, Envelope, Message, Word};
use crate::oracle::DisjointSets;
use crate::program::{NodeProgram, RoundCtx, Step};

#[derive(Debug, Clone, Copy)]
pub struct ForestMerge {
    pub n: usize,
    pub p: usize,
}

pub fn semimpc_forest_merge_connectivity(n: usize, p: usize) -> ForestMerge {
    ForestMerge { n, p }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForestState {
    pub id: usize,
    /// Raw input edges until round 1, then the current forest.
    pub edges: Vec<(usize, usize)>,
    pub labels: Vec<usize>,
}

/// Kruskal over `edges` in the given order: keeps exactly the edges that join
/// two different trees.
pub fn spanning_forest(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Vec<(usize, usize)> {
    let mut sets = DisjointSets::new(n);
    edges.into_iter().filter(|&(u, v)| sets.union(u, v)).collect()
}

fn pairs(words: &[Word]) -> impl Iterator<Item = (usize, usize)> + '_ {
    words.chunks_exact(2).map(|c| (c[0] as usize, c[1] as usize))
}

/// Roots every tree of `forest` at its smallest vertex; `parents[v] = v` for
/// roots and isolated vertices.
pub fn forest_to_parents(n: usize, forest: &[(usize, usize)]) -> Vec<Word> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in forest {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut parents: Vec<Option<usize>> = vec![None; n];
    let mut stack = Vec::new();
    for root in 0..n {
        if parents[root].is_some() {
            continue;
        }
        parents[root] = Some(root);
        stack.push(root);
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if parents[w].is_none() {
                    parents[w] = Some(u);
                    stack.push(w);
                }
            }
        }
    }
    parents.into_iter().map(|p| p.unwrap() as Word).collect()
}

pub fn parents_to_forest(parents: &[Word]) -> impl Iterator<Item = (usize, usize)> + '_ {
    parents
        .iter()
        .enumerate()
        .filter(|&(v, &p)| p as usize != v)
        .map(|(v, &p)| (v, p as usize))
}

impl ForestMerge {
    pub fn levels(&self) -> usize {
        ceil_log2(self.p) as usize
    }

    /// Total rounds of a run: the local round plus one per merge level.
    pub fn rounds(&self) -> usize {
        1 + self.levels()
    }
}

impl NodeProgram for ForestMerge {
    type State = ForestState;

    fn name(&self) -> &str {
        "forest-merge"
    }

    fn init(&self, id: usize, input: &[Word]) -> ForestState {
        ForestState {
            id,
            edges: pairs(input).collect(),
            labels: Vec::new(),
        }
    }

    fn on_round(&self, ctx: RoundCtx, state: &mut ForestState, inbox: &[Message]) -> Step {
        let received = inbox.iter().flat_map(|m| parents_to_forest(&m.payload));
        state.edges = spanning_forest(self.n, state.edges.iter().copied().chain(received));

        let level = ctx.round - 1;
        if level == self.levels() {
            if state.id == 0 {
                let mut sets = DisjointSets::new(self.n);
                for &(u, v) in &state.edges {
                    sets.union(u, v);
                }
                state.labels = sets.min_labels();
            }
            return Step::halt();
        }
        let a = state.id;
        let sends = a % (1 << (level + 1)) == 1 << level;
        if !sends || state.edges.is_empty() {
            return Step::default();
        }
        let payload = forest_to_parents(self.n, &state.edges);
        let outbox = vec![Envelope::new(a - (1 << level), payload)];
        // The forest now lives on the receiver.
        state.edges.clear();
        Step::send(outbox)
    }

    fn output(&self, state: &ForestState) -> Vec<Word> {
        state.labels.iter().map(|&l| l as Word).collect()
    }

    fn space_words(&self, state: &ForestState) -> usize {
        2 * state.edges.len() + state.labels.len()
    }
}
