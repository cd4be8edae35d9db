//! Borůvka-style connectivity on the congested clique.
//!
//! Every node keeps the full label vector. A phase takes two rounds:
//!
//! 1. each node sends its leader (the minimum id of its component) the
//!    smallest label among neighbors outside the component;
//! 2. each leader that heard of an outgoing edge broadcasts its choice to
//!    all nodes.
//!
//! The first round of the next phase applies the broadcast merges locally,
//! so all label vectors stay identical. A phase in which no leader
//! broadcasts ends the run.

use crate::message::{Envelope, Message, Word};
use crate::oracle::DisjointSets;
use crate::program::{NodeProgram, RoundCtx, Step};

#[derive(Debug, Clone, Copy, Default)]
pub struct Boruvka;

pub fn cc_boruvka_connectivity() -> Boruvka {
    Boruvka
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoruvkaState {
    pub id: usize,
    pub labels: Vec<usize>,
    pub neighbors: Vec<usize>,
    /// Phases in which at least one merge happened.
    pub merge_phases: usize,
}

impl Boruvka {
    fn candidate(state: &BoruvkaState) -> Option<usize> {
        let own = state.labels[state.id];
        state
            .neighbors
            .iter()
            .map(|&w| state.labels[w])
            .filter(|&l| l != own)
            .min()
    }
}

/// Number of merging phases of a finished run with `rounds` rounds.
pub fn boruvka_merge_phases(rounds: usize) -> usize {
    (rounds.saturating_sub(1) / 2).saturating_sub(1)
}

impl NodeProgram for Boruvka {
    type State = BoruvkaState;

    fn name(&self) -> &str {
        "boruvka"
    }

    fn init(&self, id: usize, input: &[Word]) -> BoruvkaState {
        BoruvkaState {
            id,
            labels: Vec::new(),
            neighbors: input.iter().map(|&w| w as usize).collect(),
            merge_phases: 0,
        }
    }

    fn on_round(&self, ctx: RoundCtx, state: &mut BoruvkaState, inbox: &[Message]) -> Step {
        let n = ctx.participants;
        if ctx.round == 1 {
            state.labels = (0..n).collect();
        } else if ctx.round.is_multiple_of(2) {
            // Leader: pick the smallest reported outside label.
            let Some(target) = inbox.iter().map(|m| m.payload[0]).min() else {
                return Step::default();
            };
            return Step::send((0..n).map(|v| Envelope::single(v, target)).collect());
        } else {
            if inbox.is_empty() {
                return Step::halt();
            }
            let mut sets = DisjointSets::new(n);
            for m in inbox {
                sets.union(m.src, m.payload[0] as usize);
            }
            let merged = sets.min_labels();
            for l in state.labels.iter_mut() {
                *l = merged[*l];
            }
            state.merge_phases += 1;
        }
        let outbox = Self::candidate(state)
            .map(|c| vec![Envelope::single(state.labels[state.id], c as Word)])
            .unwrap_or_default();
        Step::send(outbox)
    }

    fn output(&self, state: &BoruvkaState) -> Vec<Word> {
        vec![state.labels[state.id] as Word]
    }

    fn space_words(&self, state: &BoruvkaState) -> usize {
        state.labels.len() + state.neighbors.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::labels_from_nodes;
    use crate::engine::run_clique;
    use crate::graph::{gen_graph, Graph, GraphKind};
    use crate::message::ceil_log2;
    use crate::oracle::components_oracle;
    use crate::params::{Constants, ModelParams};

    fn run(g: &Graph) -> (Vec<usize>, usize) {
        let r = run_clique(&Boruvka, g, &ModelParams::clique(g.n(), Constants::default())).unwrap();
        assert!(r.is_clean(), "{:?}", r.violations);
        (labels_from_nodes(&r.outputs), r.rounds)
    }

    #[test]
    fn triangle() {
        let g = gen_graph(GraphKind::Complete, 3, 0).unwrap();
        let (labels, t) = run(&g);
        assert_eq!(labels, vec![0, 0, 0]);
        // one merge phase, one empty phase, one halting round
        assert_eq!(t, 5);
        assert_eq!(boruvka_merge_phases(t), 1);
    }

    #[test]
    fn two_disjoint_edges() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(run(&g).0, vec![0, 0, 2, 2]);
    }

    #[test]
    fn edgeless() {
        let (labels, t) = run(&Graph::empty(3));
        assert_eq!(labels, vec![0, 1, 2]);
        assert_eq!(boruvka_merge_phases(t), 0);
    }

    #[test]
    fn gnp_128() {
        let g = gen_graph(GraphKind::Gnp { p: 0.03 }, 128, 5).unwrap();
        let (labels, t) = run(&g);
        assert_eq!(labels, components_oracle(&g));
        assert!(boruvka_merge_phases(t) <= 7);
    }

    #[test]
    fn path_needs_several_phases() {
        let g = gen_graph(GraphKind::Path, 16, 0).unwrap();
        let (labels, t) = run(&g);
        assert_eq!(labels, vec![0; 16]);
        let phases = boruvka_merge_phases(t);
        assert!(phases >= 1 && phases <= ceil_log2(16) as usize);
    }

    #[test]
    fn random_graphs_match_oracle() {
        for seed in 0..40 {
            let n = 1 + (seed as usize * 13) % 90;
            let g = gen_graph(GraphKind::Gnp { p: 0.04 }, n, seed).unwrap();
            let (labels, t) = run(&g);
            assert_eq!(labels, components_oracle(&g));
            assert!(boruvka_merge_phases(t) <= ceil_log2(n) as usize);
        }
    }
}
