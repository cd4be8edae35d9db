//! Constant-round delivery of arbitrary loads on the congested clique, as
//! long as every node sources and sinks O(n) words.
//!
//! A central planner edge-colors the demand multigraph and routes each word
//! through one intermediate node; the resulting schedule is then replayed on
//! the constraint-checked clique engine.

mod coloring;
mod schedule;

pub use coloring::{edge_color_bipartite, BipartiteMultigraph, ColoringError};
pub use schedule::{
    execute_schedule, plan_routing, route_payloads, DeliveredWord, Delivery, DemandMatrix, Hop,
    RoutedWord, RoutingEpisode, RoutingError, Schedule,
};
