//! Re-verification of a recorded trace, independent of the engine that
//! produced it. Budgets are recomputed from the raw transfer list.

use std::collections::HashMap;

use crate::graph::Graph;
use crate::params::{ModelKind, ModelParams};
use crate::trace::{sort_violations, RoundTrace, Violation, ViolationKind};

/// Returns every budget violation found in `trace`, sorted by round.
///
/// CONGEST edge discipline is only checked when `graph` is given.
pub fn check_trace(trace: &RoundTrace, params: &ModelParams, graph: Option<&Graph>) -> Vec<Violation> {
    let mut report = Vec::new();

    if params.kind.is_mpc() {
        if params.p > params.s {
            report.push(Violation::new(
                0,
                ViolationKind::MachinesExceedSpace,
                params.p as f64,
                params.s as f64,
            ));
        }
        if params.kind == ModelKind::Mpc {
            let total = params.p as f64 * params.s as f64;
            let limit = params.total_space_limit();
            if total > limit {
                report.push(Violation::new(0, ViolationKind::TotalSpace, total, limit));
            }
        }
        for (round, row) in trace.space_high_water.iter().enumerate() {
            for (participant, &words) in row.iter().enumerate() {
                if words > params.s {
                    report.push(Violation::new(
                        round,
                        ViolationKind::SpaceBudget { participant },
                        words as f64,
                        params.s as f64,
                    ));
                }
            }
        }
    }

    for (i, record) in trace.per_round.iter().enumerate() {
        let round = i + 1;
        match params.kind {
            ModelKind::Clique | ModelKind::Congest => {
                let mut per_pair: HashMap<(usize, usize), usize> = HashMap::new();
                for &(src, dst, words) in &record.transfers {
                    if src != dst {
                        *per_pair.entry((src, dst)).or_default() += words;
                    }
                }
                for (&(src, dst), &words) in &per_pair {
                    if words > 1 {
                        report.push(Violation::new(
                            round,
                            ViolationKind::PairCapacity { src, dst },
                            words as f64,
                            1.0,
                        ));
                    }
                    if params.kind == ModelKind::Congest {
                        if let Some(g) = graph {
                            if !g.has_edge(src, dst) {
                                report.push(Violation::new(
                                    round,
                                    ViolationKind::NonEdge { src, dst },
                                    words as f64,
                                    0.0,
                                ));
                            }
                        }
                    }
                }
            }
            ModelKind::Mpc | ModelKind::Semimpc => {
                let mut sent: HashMap<usize, usize> = HashMap::new();
                let mut recv: HashMap<usize, usize> = HashMap::new();
                for &(src, dst, words) in &record.transfers {
                    if src != dst {
                        *sent.entry(src).or_default() += words;
                        *recv.entry(dst).or_default() += words;
                    }
                }
                for (&participant, &words) in &sent {
                    if words > params.s {
                        report.push(Violation::new(
                            round,
                            ViolationKind::SendBudget { participant },
                            words as f64,
                            params.s as f64,
                        ));
                    }
                }
                for (&participant, &words) in &recv {
                    if words > params.s {
                        report.push(Violation::new(
                            round,
                            ViolationKind::RecvBudget { participant },
                            words as f64,
                            params.s as f64,
                        ));
                    }
                }
            }
        }
    }

    sort_violations(&mut report);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Constants;
    use crate::trace::RoundRecord;

    fn trace(rounds: Vec<Vec<(usize, usize, usize)>>, space: Vec<Vec<usize>>) -> RoundTrace {
        RoundTrace {
            per_round: rounds
                .into_iter()
                .map(|transfers| RoundRecord { transfers })
                .collect(),
            space_high_water: space,
        }
    }

    #[test]
    fn clean_clique_trace() {
        let t = trace(vec![vec![(0, 1, 1), (1, 0, 1)]], vec![vec![0, 0], vec![1, 1]]);
        assert!(check_trace(&t, &ModelParams::clique(2, Constants::default()), None).is_empty());
    }

    #[test]
    fn doctored_pair_load_names_round() {
        let t = trace(
            vec![vec![(0, 1, 1)], vec![], vec![(2, 1, 2)]],
            vec![vec![0; 3]; 4],
        );
        let report = check_trace(&t, &ModelParams::clique(3, Constants::default()), None);
        assert_eq!(report.len(), 1);
        assert_eq!(report[0].round, 3);
        assert_eq!(report[0].kind, ViolationKind::PairCapacity { src: 2, dst: 1 });
    }

    #[test]
    fn split_pair_entries_are_summed() {
        let t = trace(vec![vec![(0, 1, 1), (0, 1, 1)]], vec![vec![0; 2]; 2]);
        let report = check_trace(&t, &ModelParams::clique(2, Constants::default()), None);
        assert_eq!(report[0].measured, 2.0);
    }

    #[test]
    fn congest_non_edge_needs_graph() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let t = trace(vec![vec![(0, 2, 1)]], vec![vec![0; 3]; 2]);
        let params = ModelParams::congest(3, Constants::default());
        assert!(check_trace(&t, &params, None).is_empty());
        let report = check_trace(&t, &params, Some(&g));
        assert_eq!(report[0].kind, ViolationKind::NonEdge { src: 0, dst: 2 });
    }

    #[test]
    fn semi_mpc_space_boundary() {
        let n = 8;
        let params = ModelParams::semi_mpc(n, 2, Constants::default());
        let at = trace(vec![vec![]], vec![vec![0, 0], vec![4 * n, 0]]);
        assert!(check_trace(&at, &params, None).is_empty());
        let over = trace(vec![vec![]], vec![vec![0, 0], vec![4 * n + 1, 0]]);
        let report = check_trace(&over, &params, None);
        assert_eq!(report.len(), 1);
        assert_eq!(report[0].kind, ViolationKind::SpaceBudget { participant: 0 });
        assert_eq!(report[0].round, 1);
    }

    #[test]
    fn mpc_traffic_budget() {
        let params = ModelParams::semi_mpc(2, 2, Constants::default());
        let t = trace(vec![vec![(0, 1, 9)]], vec![vec![0, 0]; 2]);
        let kinds: Vec<_> = check_trace(&t, &params, None).into_iter().map(|v| v.kind).collect();
        assert_eq!(
            kinds,
            vec![
                ViolationKind::SendBudget { participant: 0 },
                ViolationKind::RecvBudget { participant: 1 }
            ]
        );
    }
}
