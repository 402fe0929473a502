//! Virtual network embedding with heavy-clique coarsening.
//!
//! A virtual network is first coarsened into dense groups that fit on one
//! substrate node, the grouping is refined to cut crossing bandwidth, and the
//! groups are placed by a backtracking search. Links inside a group cost no
//! substrate bandwidth.

pub mod amount;
pub mod cli;
pub mod coarsening;
pub mod embedding;
pub mod error;
pub mod network;
pub mod refinement;
pub mod simulation;
pub mod workload;

pub use amount::Amount;
pub use coarsening::{coarsen, Caps, CoarsenedGraph};
pub use embedding::{hcm_embed, Algorithm, BacktrackLimit, EmbedOutcome, EmbedParams, FailureReason};
pub use error::{Error, ModelError, ParseError, Result};
pub use network::{
    cost, revenue, EmbeddingMap, Residuals, SubstrateNetwork, VirtualNetwork, VnRequest,
};
pub use refinement::optimize;
