//! Bernoulli bond percolation on finite regions.

mod crossing;
mod events;
mod explore;
mod sweep;
mod theta;
mod unionfind;

pub use crossing::{crossing_direct, crossing_sweep, Direction};
pub use events::{
    connected, connected_bfs, crossing_h, crossing_v, dual_crossing_tb, duality_complement_check, exact_probability,
    open_clusters, product_correlation, sample, MAX_ENUMERATION_EDGES,
};
pub use explore::{
    explore, explore_tree, influence_sum_bound_exact, influence_sum_bound_mc, lexicographic_order,
    revealment_bound_check, revealment_bound_exact, revealment_bound_mc, EdgeBound, ExploreTranscript,
    InfluenceSumReport, OneArmTarget, RevealmentBoundReport, MAX_EXACT_EXPLORE_EDGES,
};
pub use sweep::{
    binomial_tail, binomial_weights, curve_from_hits, direct_sweep, hitting_counts, log_factorials,
    newman_ziff_sweep, ConnectionEvent, CountEvent, DirectSweep, IncrementalEvent,
};
pub use theta::{theta_curve, theta_sweep, ThetaSweep};
pub use unionfind::UnionFind;
