//! Congested clique on semi-MPC: machine `v` plays clique node `v`.
//!
//! Round 1 tells both endpoints of every stored edge about it, so machine
//! `v` ends up with the neighbor list that is node `v`'s clique input.
//! Rounds `2..=T+1` replay the clique program one round at a time; a clique
//! node sends at most `n - 1` words per round, within the machine budget.

use std::collections::BTreeMap;

use crate::engine::{run_clique, run_mpc};
use crate::graph::{distribute_edges, edges_to_words, Graph};
use crate::message::{Envelope, Message, Word};
use crate::params::{Constants, ModelKind, ModelParams};
use crate::program::{NodeProgram, RoundCtx, Step};

use super::{AdapterError, SimulationReport};

struct CliqueOnMachines<'a, P> {
    inner: &'a P,
}

#[derive(Clone)]
enum HostState<S> {
    Stored(Vec<(usize, usize)>),
    Node(S),
}

fn replay_inbox(inbox: &[Message]) -> Vec<Message> {
    inbox
        .iter()
        .map(|m| Message {
            round: m.round - 1,
            ..m.clone()
        })
        .collect()
}

impl<P: NodeProgram> NodeProgram for CliqueOnMachines<'_, P> {
    type State = HostState<P::State>;

    fn name(&self) -> &str {
        self.inner.name()
    }

    fn init(&self, _id: usize, input: &[Word]) -> Self::State {
        HostState::Stored(input.chunks_exact(2).map(|c| (c[0] as usize, c[1] as usize)).collect())
    }

    fn on_round(&self, ctx: RoundCtx, state: &mut Self::State, inbox: &[Message]) -> Step {
        if ctx.round == 1 {
            let HostState::Stored(edges) = state else {
                unreachable!("machines start with stored edges")
            };
            let outbox = edges
                .iter()
                .flat_map(|&(u, v)| [Envelope::single(u, v as Word), Envelope::single(v, u as Word)])
                .collect();
            edges.clear();
            return Step::send(outbox);
        }
        let inner_ctx = RoundCtx {
            round: ctx.round - 1,
            ..ctx
        };
        if ctx.round == 2 {
            let mut neighbors: Vec<Word> = inbox.iter().flat_map(|m| m.payload.iter().copied()).collect();
            neighbors.sort_unstable();
            let mut node = self.inner.init(ctx.id, &neighbors);
            let step = self.inner.on_round(inner_ctx, &mut node, &[]);
            *state = HostState::Node(node);
            return step;
        }
        let HostState::Node(node) = state else {
            unreachable!("node state exists from round 2 on")
        };
        self.inner.on_round(inner_ctx, node, &replay_inbox(inbox))
    }

    fn output(&self, state: &Self::State) -> Vec<Word> {
        match state {
            HostState::Node(node) => self.inner.output(node),
            HostState::Stored(_) => Vec::new(),
        }
    }

    fn space_words(&self, state: &Self::State) -> usize {
        match state {
            HostState::Stored(edges) => 2 * edges.len(),
            HostState::Node(node) => self.inner.space_words(node),
        }
    }
}

/// Runs `prog` natively on the clique and then on `n` semi-MPC machines.
///
/// `placement[a]` lists the edges initially stored on machine `a`; when
/// omitted the edges are spread evenly. The simulation is refused when the
/// native run needs more than `c_space * n` words at some node.
pub fn simulate_cc_on_semimpc<P: NodeProgram>(
    prog: &P,
    g: &Graph,
    constants: Constants,
    placement: Option<Vec<Vec<(usize, usize)>>>,
) -> Result<SimulationReport, AdapterError> {
    let n = g.n();
    let native = run_clique(prog, g, &ModelParams::clique(n, constants))?;
    if !native.is_clean() {
        return Err(AdapterError::NativeViolations(native.violations.len()));
    }
    let budget = constants.c_space * n;
    let native_space = native.trace.max_space();
    if native_space > budget {
        return Err(AdapterError::Hypothesis(format!(
            "native node space {native_space} words exceeds {budget}"
        )));
    }

    let placement = placement.unwrap_or_else(|| distribute_edges(g, n, 0));
    if placement.len() != n {
        return Err(AdapterError::Hypothesis(format!(
            "placement covers {} machines, need {n}",
            placement.len()
        )));
    }
    if let Some(a) = placement.iter().position(|e| 2 * e.len() > budget) {
        return Err(AdapterError::Hypothesis(format!(
            "machine {a} initially stores more than {budget} words"
        )));
    }
    let inputs = edges_to_words(&placement);
    let params = ModelParams::semi_mpc(n, n, constants).with_input_size(2 * g.m());
    let simulated = run_mpc(&CliqueOnMachines { inner: prog }, inputs, &params)?;

    let t = native.rounds;
    let traffic = simulated.trace.max_traffic();
    let space = simulated.trace.max_space();
    let per_n = |x: usize| x as f64 / n.max(1) as f64;
    let bound_checks = BTreeMap::from([
        ("rounds_ok".to_string(), simulated.rounds == t + 1),
        ("rounds_within_2t".to_string(), simulated.rounds <= 2 * t),
        ("machines_ok".to_string(), simulated.params.p == n),
        ("traffic_ok".to_string(), traffic <= constants.c_traffic * n),
        ("space_ok".to_string(), space <= budget),
        ("outputs_match".to_string(), simulated.outputs == native.outputs),
    ]);
    let measured_constants = BTreeMap::from([
        ("rounds_over_t".to_string(), simulated.rounds as f64 / t as f64),
        ("traffic_over_n".to_string(), per_n(traffic)),
        ("space_over_n".to_string(), per_n(space)),
        ("native_space_over_n".to_string(), per_n(native_space)),
    ]);
    Ok(SimulationReport {
        source: ModelKind::Clique,
        target: ModelKind::Semimpc,
        algorithm: prog.name().to_string(),
        simulated_outputs: simulated.outputs.clone(),
        native,
        simulated,
        assignment: None,
        bound_checks,
        measured_constants,
        flags: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{labels_from_nodes, Boruvka};
    use crate::checker::check_trace;
    use crate::graph::{gen_graph, GraphKind};
    use crate::oracle::components_oracle;

    /// Outputs its own input and halts at once.
    struct Echo;

    impl NodeProgram for Echo {
        type State = Vec<Word>;
        fn name(&self) -> &str {
            "echo"
        }
        fn init(&self, _id: usize, input: &[Word]) -> Vec<Word> {
            input.to_vec()
        }
        fn on_round(&self, _ctx: RoundCtx, _state: &mut Vec<Word>, _inbox: &[Message]) -> Step {
            Step::halt()
        }
        fn output(&self, state: &Vec<Word>) -> Vec<Word> {
            state.clone()
        }
        fn space_words(&self, state: &Vec<Word>) -> usize {
            state.len()
        }
    }

    #[test]
    fn immediate_halt_adds_only_redistribution() {
        let g = gen_graph(GraphKind::Gnp { p: 0.3 }, 10, 7).unwrap();
        let r = simulate_cc_on_semimpc(&Echo, &g, Constants::default(), None).unwrap();
        assert_eq!(r.native.rounds, 1);
        assert_eq!(r.simulated.rounds, 2);
        assert!(r.passed(), "{:?}", r.failed_checks());
    }

    #[test]
    fn boruvka_gnp_64() {
        let g = gen_graph(GraphKind::Gnp { p: 0.1 }, 64, 2).unwrap();
        let r = simulate_cc_on_semimpc(&Boruvka, &g, Constants::default(), None).unwrap();
        assert_eq!(r.simulated.rounds, r.native.rounds + 1);
        assert_eq!(labels_from_nodes(&r.simulated_outputs), components_oracle(&g));
        assert!(r.passed(), "{:?}", r.failed_checks());
        let recheck = check_trace(&r.simulated.trace, &r.simulated.params, None);
        assert!(recheck.is_empty());
    }

    #[test]
    fn star_redistribution_from_one_machine() {
        let n = 8;
        let g = gen_graph(GraphKind::Star, n, 0).unwrap();
        let mut placement = vec![Vec::new(); n];
        placement[3] = g.edges().to_vec();
        let r = simulate_cc_on_semimpc(&Boruvka, &g, Constants::default(), Some(placement)).unwrap();
        assert_eq!(r.simulated.trace.recv_words(1, n)[0], 7);
        assert!(r.passed());
    }

    #[test]
    fn refuses_oversized_placement() {
        let g = gen_graph(GraphKind::Complete, 6, 0).unwrap();
        let mut placement = vec![Vec::new(); 6];
        placement[0] = g.edges().to_vec();
        let err = simulate_cc_on_semimpc(&Boruvka, &g, Constants::default(), Some(placement));
        assert!(matches!(err, Err(AdapterError::Hypothesis(_))));
    }

    #[test]
    fn refuses_space_hungry_program() {
        let g = gen_graph(GraphKind::Complete, 6, 0).unwrap();
        let c = Constants {
            c_space: 1,
            ..Constants::default()
        };
        // Borůvka keeps n labels plus the neighbor list: more than n words.
        let err = simulate_cc_on_semimpc(&Boruvka, &g, c, None);
        assert!(matches!(err, Err(AdapterError::Hypothesis(_))));
    }
}
