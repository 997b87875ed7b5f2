//! Variation of Information analytics for temporally sampled, clustered
//! networks.
//!
//! The crate measures how much a clustered network changes between
//! consecutive observations, splits that change into a part forced by the
//! change of cluster sizes and a compositional remainder, attributes it to
//! individual nodes and teams, and turns the per-transition values into
//! time-series analytics and event correlations.

pub mod analysis;
pub mod cli;
pub mod clustering;
pub mod formation;
pub mod ingest;
pub mod insight;
pub mod metric;
pub mod synth;

pub use clustering::{
    canonical_key, confusion, formation_of, CanonicalKey, Clustering, ClusteringError, ConfusionMatrix, Formation,
    NodeId, NodeInfo, Profile, Role, Team,
};
pub use metric::{breakdown, node_contribution, vi, vi_bounds, vi_rate, Bits, RateBits, ViBreakdown};
