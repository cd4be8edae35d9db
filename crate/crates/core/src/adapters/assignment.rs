//! Degree-balanced placement of CONGEST nodes on machines.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub machines: usize,
    /// `machine_of[v]` hosts vertex `v`.
    pub machine_of: Vec<usize>,
    /// Hosted vertices per machine, in sorted-list order.
    pub vertex_sets: Vec<Vec<usize>>,
    /// Degree sum of each machine's vertices.
    pub loads: Vec<usize>,
}

impl Assignment {
    pub fn max_load(&self) -> usize {
        self.loads.iter().copied().max().unwrap_or(0)
    }
}

/// Sorts vertices by degree (descending, ties by ascending id) and deals
/// them round-robin: sorted position `i` goes to machine `i mod machines`.
///
/// # Panics
///
/// Panics if `machines` is zero.
pub fn compute_node_assignment(degrees: &[usize], machines: usize) -> Assignment {
    assert!(machines >= 1, "need at least one machine");
    let mut order: Vec<usize> = (0..degrees.len()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(degrees[v]), v));

    let mut machine_of = vec![0; degrees.len()];
    let mut vertex_sets = vec![Vec::new(); machines];
    let mut loads = vec![0; machines];
    for (i, &v) in order.iter().enumerate() {
        let a = i % machines;
        machine_of[v] = a;
        vertex_sets[a].push(v);
        loads[a] += degrees[v];
    }
    Assignment {
        machines,
        machine_of,
        vertex_sets,
        loads,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_example() {
        let a = compute_node_assignment(&[3, 1, 2, 2], 2);
        assert_eq!(a.vertex_sets, vec![vec![0, 3], vec![2, 1]]);
        assert_eq!(a.loads, vec![5, 3]);
        assert_eq!(a.machine_of, vec![0, 1, 1, 0]);
    }

    #[test]
    fn single_machine_takes_everything() {
        let a = compute_node_assignment(&[2, 0, 1, 1], 1);
        assert_eq!(a.machine_of, vec![0; 4]);
        assert_eq!(a.loads, vec![4]);
    }

    #[test]
    fn many_machines_one_vertex_each() {
        let a = compute_node_assignment(&[1, 2, 1], 5);
        assert_eq!(a.vertex_sets, vec![vec![1], vec![0], vec![2], vec![], vec![]]);
    }

    proptest! {
        #[test]
        fn partition_and_load_bound(
            degrees in prop::collection::vec(0usize..40, 1..80),
            machines in 1usize..20,
        ) {
            let a = compute_node_assignment(&degrees, machines);
            let mut seen: Vec<usize> = a.vertex_sets.iter().flatten().copied().collect();
            seen.sort_unstable();
            prop_assert_eq!(seen, (0..degrees.len()).collect::<Vec<_>>());
            for (m, set) in a.vertex_sets.iter().enumerate() {
                prop_assert_eq!(a.loads[m], set.iter().map(|&v| degrees[v]).sum::<usize>());
            }
            // Round-robin over a descending list: each machine's load is at
            // most the average plus the largest degree.
            let total: usize = degrees.iter().sum();
            let max_d = degrees.iter().copied().max().unwrap();
            prop_assert!(a.max_load() <= total.div_ceil(machines) + max_d);
            prop_assert!(a.max_load() <= 2 * (total.div_ceil(machines)).max(max_d));
        }
    }
}
