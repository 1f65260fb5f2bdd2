//! Per-peer reentrant local top-k query processor.
//!
//! The local processor is a black box to the coordinator: successive fetches
//! return the next-best objects with no repeats, so cumulative batches equal
//! a single larger top-k call. This implementation materializes one sorted
//! run per query; its cost is modeled by [`estimate_db_cost`], not measured.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heuristics::PeerProfile;
use crate::model::{score, ObjectRecord, PeerId, Query, RelationSchema, ScoredObject};

/// The objects one peer stores for the relation.
#[derive(Debug, Clone)]
pub struct PeerStore {
    pub peer_id: PeerId,
    pub objects: Vec<ObjectRecord>,
}

impl PeerStore {
    pub fn new(peer_id: PeerId, objects: Vec<ObjectRecord>) -> Result<Self> {
        let mut ids: Vec<u64> = objects.iter().map(|o| o.object_id).collect();
        ids.sort_unstable();
        for w in ids.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateObjectId(w[0]));
            }
        }
        Ok(PeerStore { peer_id, objects })
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }
}

/// A reentrant cursor over one peer's objects for one query.
///
/// The sorted run is non-increasing in score with ties broken by object id
/// ascending, so the last delivered score is a valid upper bound on every
/// undelivered object's score.
#[derive(Debug)]
pub struct LocalCursor {
    sorted_run: Vec<ScoredObject>,
    delivered: usize,
    last_delivered_score: Option<f64>,
}

/// Result of one [`LocalCursor::fetch_next`] call.
#[derive(Debug)]
pub struct FetchResult {
    pub batch: Vec<ScoredObject>,
    /// Upper bound on any undelivered object's score; 0.0 for an empty store.
    pub remaining_bound: f64,
    pub exhausted: bool,
}

/// Opens a cursor: scores every object, sorts descending, delivers nothing.
pub fn open_cursor(store: &PeerStore, query: &Query, schema: &RelationSchema) -> Result<LocalCursor> {
    query.validate(schema)?;
    let mut run = Vec::with_capacity(store.objects.len());
    for obj in &store.objects {
        let s = score(obj, query, schema)?;
        run.push(ScoredObject {
            object: obj.clone(),
            score: s,
            origin_peer: store.peer_id,
        });
    }
    run.sort_by(|a, b| a.rank_cmp(b));
    Ok(LocalCursor {
        sorted_run: run,
        delivered: 0,
        last_delivered_score: None,
    })
}

impl LocalCursor {
    pub fn delivered_count(&self) -> usize {
        self.delivered
    }

    pub fn remaining(&self) -> usize {
        self.sorted_run.len() - self.delivered
    }

    /// Delivers the next `n` best objects not previously delivered.
    ///
    /// The union of all batches so far equals the store's top-(sum of batch
    /// sizes). Requesting more than remains returns a short batch.
    pub fn fetch_next(&mut self, n: usize) -> FetchResult {
        assert!(n >= 1, "fetch size must be >= 1");
        let take = n.min(self.remaining());
        let batch: Vec<ScoredObject> =
            self.sorted_run[self.delivered..self.delivered + take].to_vec();
        self.delivered += take;
        if let Some(last) = batch.last() {
            self.last_delivered_score = Some(last.score);
        }
        FetchResult {
            batch,
            remaining_bound: self.last_delivered_score.unwrap_or(0.0),
            exhausted: self.delivered == self.sorted_run.len(),
        }
    }
}

/// Constants of the simulated local-search cost model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DbCostConstants {
    pub base: f64,
    pub per_restriction_log: f64,
    pub per_object: f64,
}

impl Default for DbCostConstants {
    fn default() -> Self {
        DbCostConstants {
            base: 0.01,
            per_restriction_log: 0.001,
            per_object: 0.0001,
        }
    }
}

/// Estimated seconds peer `p` needs to search its store for `n` objects:
/// `(c0 + c1 * m * log2(1 + storeSize) + c2 * n) / speed`. A fetch that
/// returns nothing still pays the base term, since the query must be
/// evaluated to know nothing qualifies.
pub fn estimate_db_cost(
    profile: &PeerProfile,
    query: &Query,
    n: usize,
    constants: &DbCostConstants,
) -> f64 {
    let m = query.restrictions.len() as f64;
    let size_term = (1.0 + profile.objects_stored as f64).log2();
    (constants.base + constants.per_restriction_log * m * size_term + constants.per_object * n as f64)
        / profile.speed
}
