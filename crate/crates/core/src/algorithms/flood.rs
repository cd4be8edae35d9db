//! Min-label flooding for CONGEST.

use crate::message::{Envelope, Message, Word};
use crate::program::{NodeProgram, RoundCtx, Step};

/// Every round each vertex adopts the smallest label it has seen and sends
/// it to all neighbors. A vertex votes to halt in a round where its label
/// did not change, or once the round index reaches the vertex count.
#[derive(Debug, Clone, Copy, Default)]
pub struct Flood;

pub fn congest_flood_components() -> Flood {
    Flood
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FloodState {
    pub label: usize,
    pub neighbors: Vec<usize>,
}

impl NodeProgram for Flood {
    type State = FloodState;

    fn name(&self) -> &str {
        "flood"
    }

    fn init(&self, id: usize, input: &[Word]) -> FloodState {
        FloodState {
            label: id,
            neighbors: input.iter().map(|&w| w as usize).collect(),
        }
    }

    fn on_round(&self, ctx: RoundCtx, state: &mut FloodState, inbox: &[Message]) -> Step {
        // Round 1 reads neighbor ids from the local input.
        let seen = if ctx.round == 1 {
            state.neighbors.iter().copied().min()
        } else {
            inbox.iter().map(|m| m.payload[0] as usize).min()
        };
        let before = state.label;
        if let Some(l) = seen {
            state.label = state.label.min(l);
        }
        let outbox = state
            .neighbors
            .iter()
            .map(|&w| Envelope::single(w, state.label as Word))
            .collect();
        Step {
            outbox,
            halt: state.label == before || ctx.round >= ctx.participants,
        }
    }

    fn output(&self, state: &FloodState) -> Vec<Word> {
        vec![state.label as Word]
    }

    fn space_words(&self, state: &FloodState) -> usize {
        state.neighbors.len() + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::labels_from_nodes;
    use crate::engine::run_congest;
    use crate::graph::{gen_graph, Graph, GraphKind};
    use crate::oracle::components_oracle;
    use crate::params::{Constants, ModelParams};

    fn run(g: &Graph) -> (Vec<usize>, usize) {
        let r = run_congest(&Flood, g, &ModelParams::congest(g.n(), Constants::default())).unwrap();
        assert!(r.is_clean(), "{:?}", r.violations);
        (labels_from_nodes(&r.outputs), r.rounds)
    }

    /// Rounds until no label changes: largest eccentricity of a component
    /// minimum, plus one detection round.
    fn expected_rounds(g: &Graph) -> usize {
        let labels = components_oracle(g);
        let mut worst = 0;
        for v in 0..g.n() {
            if labels[v] == v {
                let mut dist = vec![usize::MAX; g.n()];
                dist[v] = 0;
                let mut queue = std::collections::VecDeque::from([v]);
                while let Some(u) = queue.pop_front() {
                    for &w in g.neighbors(u) {
                        if dist[w] == usize::MAX {
                            dist[w] = dist[u] + 1;
                            worst = worst.max(dist[w]);
                            queue.push_back(w);
                        }
                    }
                }
            }
        }
        worst + 1
    }

    #[test]
    fn path_of_three() {
        let g = gen_graph(GraphKind::Path, 3, 0).unwrap();
        assert_eq!(run(&g), (vec![0, 0, 0], 3));
    }

    #[test]
    fn edgeless_stabilizes_immediately() {
        assert_eq!(run(&Graph::empty(3)), (vec![0, 1, 2], 1));
    }

    #[test]
    fn cycle_of_eight() {
        let g = gen_graph(GraphKind::Cycle, 8, 0).unwrap();
        let (labels, t) = run(&g);
        assert_eq!(labels, vec![0; 8]);
        assert_eq!(t, 5);
    }

    #[test]
    fn random_graphs_match_oracle() {
        for seed in 0..40 {
            let n = 1 + (seed as usize * 7) % 60;
            let g = gen_graph(GraphKind::Gnp { p: 0.05 }, n, seed).unwrap();
            let (labels, t) = run(&g);
            assert_eq!(labels, components_oracle(&g));
            assert_eq!(t, expected_rounds(&g));
        }
    }
}
