use proptest::prelude::*;

use semimpc::adapters::{simulate_cc_on_semimpc, simulate_congest_on_semimpc, simulate_semimpc_on_cc};
use semimpc::algorithms::{Boruvka, Flood, ForestMerge};
use semimpc::graph::{distribute_edges, edges_to_words, gen_graph, GraphKind};
use semimpc::{
    check_trace, run_clique, run_mpc, Constants, Envelope, Graph, Message, ModelParams, NodeProgram, RoundCtx,
    Step, Word,
};

/// `plan[id][round - 1]` lists `(dst, words)` sends; the run halts after the
/// last planned round. A participant retains every word it receives.
#[derive(Debug)]
struct Scripted {
    plan: Vec<Vec<Vec<(usize, usize)>>>,
    rounds: usize,
}

impl NodeProgram for Scripted {
    type State = usize;

    fn name(&self) -> &str {
        "scripted"
    }

    fn init(&self, _id: usize, _input: &[Word]) -> usize {
        0
    }

    fn on_round(&self, ctx: RoundCtx, held: &mut usize, inbox: &[Message]) -> Step {
        *held += inbox.iter().map(|m| m.payload.len()).sum::<usize>();
        let outbox = self.plan[ctx.id][ctx.round - 1]
            .iter()
            .map(|&(dst, words)| Envelope::new(dst, vec![1; words]))
            .collect();
        Step {
            outbox,
            halt: ctx.round >= self.rounds,
        }
    }

    fn output(&self, held: &usize) -> Vec<Word> {
        vec![*held as Word]
    }

    fn space_words(&self, held: &usize) -> usize {
        *held
    }
}

fn scripted(p: usize, rounds: usize) -> impl Strategy<Value = Scripted> {
    prop::collection::vec(
        prop::collection::vec(prop::collection::vec((0..p, 1usize..3), 0..4), rounds),
        p,
    )
    .prop_map(move |plan| Scripted { plan, rounds })
}

fn small_graph() -> impl Strategy<Value = Graph> {
    (2usize..24, 0.0f64..0.4, any::<u64>())
        .prop_map(|(n, p, seed)| gen_graph(GraphKind::Gnp { p }, n, seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn engine_and_checker_agree_on_clique(prog in (2usize..6, 1usize..4).prop_flat_map(|(p, r)| scripted(p, r))) {
        let p = prog.plan.len();
        let params = ModelParams::clique(p, Constants::default());
        let inputs = vec![Vec::new(); p];
        let r = semimpc::engine::run_clique_with_inputs(&prog, inputs, &params).unwrap();
        prop_assert_eq!(check_trace(&r.trace, &params, None), r.violations.clone());
        for round in 1..=r.rounds {
            let sent: usize = r.trace.sent_words(round, p).iter().sum();
            let recv: usize = r.trace.recv_words(round, p).iter().sum();
            prop_assert_eq!(sent, recv);
        }
    }

    #[test]
    fn engine_and_checker_agree_on_semimpc(
        prog in (2usize..6, 1usize..4).prop_flat_map(|(p, r)| scripted(p, r)),
        n in 1usize..4,
    ) {
        let p = prog.plan.len();
        let params = ModelParams::semi_mpc(n, p, Constants { c_space: 1, ..Constants::default() });
        let r = run_mpc(&prog, vec![Vec::new(); p], &params).unwrap();
        prop_assert_eq!(check_trace(&r.trace, &params, None), r.violations.clone());
    }

    #[test]
    fn clique_adapter_preserves_outputs(g in small_graph()) {
        let r = simulate_cc_on_semimpc(&Boruvka, &g, Constants::default(), None).unwrap();
        prop_assert!(r.passed(), "{:?}", r.failed_checks());
        prop_assert_eq!(&r.simulated_outputs, &r.native.outputs);
        prop_assert!(check_trace(&r.simulated.trace, &r.simulated.params, None).is_empty());
    }

    #[test]
    fn congest_adapter_preserves_outputs(g in small_graph()) {
        let r = simulate_congest_on_semimpc(&Flood, &g, Constants::default(), None, None).unwrap();
        prop_assert!(r.passed(), "{:?}", r.failed_checks());
        prop_assert_eq!(&r.simulated_outputs, &r.native.outputs);
        prop_assert!(check_trace(&r.native.trace, &r.native.params, Some(&g)).is_empty());
        prop_assert!(check_trace(&r.simulated.trace, &r.simulated.params, None).is_empty());
    }

    #[test]
    fn semimpc_adapter_preserves_outputs(g in small_graph(), p in 1usize..6, seed in any::<u64>()) {
        let n = g.n();
        let p = p.min(n);
        let params = ModelParams::semi_mpc(n, p, Constants::default());
        let inputs = edges_to_words(&distribute_edges(&g, p, seed));
        prop_assume!(inputs.iter().all(|x| x.len() <= params.s));
        let r = simulate_semimpc_on_cc(&ForestMerge { n, p }, inputs, &params).unwrap();
        prop_assert!(r.passed(), "{:?}", r.failed_checks());
        prop_assert_eq!(&r.simulated_outputs, &r.native.outputs);
        prop_assert!(check_trace(&r.simulated.trace, &r.simulated.params, None).is_empty());
    }

    #[test]
    fn runs_are_deterministic(g in small_graph()) {
        let params = ModelParams::clique(g.n(), Constants::default());
        let a = run_clique(&Boruvka, &g, &params).unwrap();
        let b = run_clique(&Boruvka, &g, &params).unwrap();
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
