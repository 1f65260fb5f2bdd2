//! Exact distributed top-k query processing over horizontally partitioned
//! data in simulated peer-to-peer networks.
//!
//! The coordinator answers a top-k query by iteratively fetching batches of
//! best-scoring objects from the peers, pruning peers that can no longer
//! contribute, and publishing buffered objects once they dominate every
//! peer's maximum remaining score. Six fetch-size policies and a sequential
//! remainder-query baseline are provided, and a simulated cost model turns
//! each execution into system-effort and query-answer-time metrics.

pub mod arto;
pub mod coordinator;
pub mod costsim;
pub mod error;
pub mod harness;
pub mod heuristics;
pub mod local_engine;
pub mod model;

pub use arto::arto_top_k;
pub use coordinator::{adit_top_k, ExecutionResult, FetchBuffer, IterationTrace};
pub use costsim::{comm_costs, query_answer_time, ratios, system_effort, trans_costs, CostLedger};
pub use error::{Error, Result};
pub use heuristics::{
    basic_fetch_size, compute_weights, enhanced_fetch_size, fetch_size, HeuristicPolicy,
    NetworkProfile, PeerProfile, PeerQueryState, PolicyKind, Weights,
};
pub use local_engine::{
    estimate_db_cost, open_cursor, DbCostConstants, FetchResult, LocalCursor, PeerStore,
};
pub use model::{
    score, similarity, AttributeDef, AttributeKind, AttributeValue, ObjectRecord, ObjectiveKind,
    PeerId, Query, RelationSchema, Restriction, ScoredObject,
};
