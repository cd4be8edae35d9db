//! Reference connectivity algorithms, one per model.

pub mod boruvka;
pub mod flood;
pub mod forest_merge;

pub use boruvka::{boruvka_merge_phases, cc_boruvka_connectivity, Boruvka, BoruvkaState};
pub use flood::{congest_flood_components, Flood, FloodState};
pub use forest_merge::{
    forest_to_parents, parents_to_forest, semimpc_forest_merge_connectivity, spanning_forest, ForestMerge,
    ForestState,
};

use crate::message::Word;

/// Labels of a CONGEST/clique run: one word per node.
pub fn labels_from_nodes(outputs: &[Vec<Word>]) -> Vec<usize> {
    outputs.iter().map(|o| o[0] as usize).collect()
}
