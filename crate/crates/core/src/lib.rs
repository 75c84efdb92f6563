//! Coupling experiments for sparse random graph models.
//!
//! Implements exact edit-distance optimal transport between a planted
//! two-community block model and the uniform random graph of the same
//! average degree on tiny graph spaces, plus Monte Carlo witness statistics
//! (cycle counts, edge-disjoint cycle packings, minimum bisections),
//! concentration checks, and threshold detection estimators around the
//! delta = sqrt(c) boundary.

pub mod canon;
pub mod error;
pub mod graph;
pub mod models;
pub mod sim;
pub mod stats;
pub mod transport;

pub use canon::{distance_matrix, edit_distance, CanonicalClass, ClassEnumeration, DistanceMatrix};
pub use error::{Error, Result};
pub use graph::{parse_edge_list, to_edge_list, Graph};
pub use models::{
    exact_distribution, sample_kernel_graph, sample_model, sample_sbm, BlockKernel, Flavor,
    GraphDistribution, ModelSpec, TypedSample, VertexTypes,
};
pub use sim::{derive_seed, stream_rng, MonteCarloEstimate, RunningStats};
