//! The iterative protocol driver: relevant-peer selection, fetch-size
//! assignment, logically parallel broadcast, buffer merge, threshold
//! publishing and termination.
//!
//! Within one iteration the per-peer fetches are logically concurrent; the
//! implementation runs them serially, the cost simulator models the
//! parallelism, so results and metrics are schedule independent. Publishing
//! only starts after every relevant peer has responded.

use crate::costsim::{comm_costs, trans_costs, CostLedger, CostRow, IterationCosts};
use crate::error::Result;
use crate::heuristics::{
    fetch_size, HeuristicPolicy, NetworkProfile, PeerQueryState,
};
use crate::local_engine::{estimate_db_cost, open_cursor, DbCostConstants, LocalCursor, PeerStore};
use crate::model::{PeerId, Query, RelationSchema, ScoredObject};

/// Globally buffered fetched objects, sorted by (score desc, peer asc,
/// object id asc). Entries before the `published` marker are final output;
/// the buffer never discards fetched-but-unpublished objects.
#[derive(Debug, Default)]
pub struct FetchBuffer {
    entries: Vec<ScoredObject>,
    published: usize,
}

impl FetchBuffer {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn published_count(&self) -> usize {
        self.published
    }

    pub fn pending_count(&self) -> usize {
        self.entries.len() - self.published
    }

    /// Score of the k-th best buffered entry, if the buffer holds at least
    /// k entries.
    pub fn kth_score(&self, k: usize) -> Option<f64> {
        self.entries.get(k - 1).map(|e| e.score)
    }

    /// Merges a delivered batch. Later deliveries always rank after already
    /// published entries, so only the pending region needs re-sorting.
    pub fn merge(&mut self, batch: Vec<ScoredObject>) {
        if batch.is_empty() {
            return;
        }
        self.entries.extend(batch);
        self.entries[self.published..].sort_by(|a, b| a.rank_cmp(b));
        debug_assert!(self.entries.windows(2).all(|w| {
            w[0].object.object_id != w[1].object.object_id
        }));
    }

    pub fn published_entries(&self) -> &[ScoredObject] {
        &self.entries[..self.published]
    }
}

/// Observability record for one protocol iteration.
#[derive(Debug, Clone)]
pub struct IterationTrace {
    pub iteration_index: usize,
    pub per_peer_fetch_size: Vec<(PeerId, usize)>,
    pub per_peer_delivered: Vec<(PeerId, usize)>,
    pub messages_sent: usize,
    pub objects_published: usize,
    pub max_rem_score_after: f64,
}

/// Outcome of one distributed query execution.
#[derive(Debug)]
pub struct ExecutionResult {
    /// The published top-k, sorted by (score desc, peer asc, object id asc).
    pub results: Vec<ScoredObject>,
    pub ledger: CostLedger,
    pub traces: Vec<IterationTrace>,
    /// Set when the network held fewer than k objects.
    pub short_result: bool,
}

/// Maximum remaining score over all non-exhausted peers; 0 once every peer
/// is exhausted.
pub(crate) fn max_remaining_score(states: &[PeerQueryState]) -> f64 {
    states
        .iter()
        .filter(|s| !s.exhausted)
        .map(|s| s.remaining_bound)
        .fold(0.0, f64::max)
}

/// Peers that could still contribute to the top-k: non-exhausted, and either
/// fewer than k objects have been fetched in total or the peer's bound ties
/// or beats the k-th best buffered score.
pub(crate) fn relevant_peers(
    states: &[PeerQueryState],
    buffer: &FetchBuffer,
    k: usize,
) -> Vec<usize> {
    let threshold = if buffer.len() < k {
        None
    } else {
        buffer.kth_score(k)
    };
    (0..states.len())
        .filter(|&i| {
            if states[i].exhausted {
                return false;
            }
            match threshold {
                None => true,
                Some(t) => states[i].effective_bound() >= t,
            }
        })
        .collect()
}

/// Runs one complete ADiT query and returns the exact top-k with its cost
/// ledger and per-iteration traces.
pub fn adit_top_k(
    network: &NetworkProfile,
    stores: &[PeerStore],
    query: &Query,
    schema: &RelationSchema,
    policy: &HeuristicPolicy,
    db_constants: &DbCostConstants,
) -> Result<ExecutionResult> {
    let mut exec = Execution::new(network, stores, query, schema, db_constants)?;
    let k = query.k;

    loop {
        if exec.total_published() >= k {
            break;
        }
        let relevant = relevant_peers(&exec.states, &exec.buffer, k);
        if relevant.is_empty() {
            // Nothing left to fetch; drain what the threshold already allows.
            let published_now = exec.publish_step(k);
            if published_now == 0 {
                break;
            }
            exec.record_trace(&[], &[], 0, published_now);
            continue;
        }
        exec.run_iteration(&relevant, policy, k)?;
    }

    Ok(exec.finish(k))
}

/// Shared execution state for the iterative drivers (ADiT and the
/// remainder-query baseline).
pub(crate) struct Execution<'a> {
    pub network: &'a NetworkProfile,
    pub query: &'a Query,
    pub db_constants: &'a DbCostConstants,
    pub peer_ids: Vec<PeerId>,
    pub cursors: Vec<LocalCursor>,
    pub states: Vec<PeerQueryState>,
    pub buffer: FetchBuffer,
    pub ledger: CostLedger,
    pub traces: Vec<IterationTrace>,
}

impl<'a> Execution<'a> {
    pub fn new(
        network: &'a NetworkProfile,
        stores: &'a [PeerStore],
        query: &'a Query,
        schema: &'a RelationSchema,
        db_constants: &'a DbCostConstants,
    ) -> Result<Self> {
        assert_eq!(
            network.peers.len(),
            stores.len(),
            "one store per network peer"
        );
        let mut indexed: Vec<&PeerStore> = stores.iter().collect();
        indexed.sort_by_key(|s| s.peer_id);
        let mut peer_ids = Vec::with_capacity(indexed.len());
        let mut cursors = Vec::with_capacity(indexed.len());
        let mut states = Vec::with_capacity(indexed.len());
        for store in indexed {
            debug_assert!(network
                .peers
                .iter()
                .any(|p| p.peer_id == store.peer_id));
            peer_ids.push(store.peer_id);
            cursors.push(open_cursor(store, query, schema)?);
            let mut state = PeerQueryState::default();
            if store.is_empty() {
                state.exhausted = true;
                state.remaining_bound = 0.0;
            }
            states.push(state);
        }
        Ok(Execution {
            network,
            query,
            db_constants,
            peer_ids,
            cursors,
            states,
            buffer: FetchBuffer::default(),
            ledger: CostLedger::default(),
            traces: Vec::new(),
        })
    }

    pub fn total_published(&self) -> usize {
        self.buffer.published_count()
    }

    pub fn peer_index(&self, peer_id: PeerId) -> usize {
        self.peer_ids
            .binary_search(&peer_id)
            .expect("unknown peer id")
    }

    /// Issues one fetch to peer `idx`, merges the batch, updates state, and
    /// returns the cost row plus delivered count.
    pub fn fetch_from(&mut self, idx: usize, fetch: usize) -> (CostRow, usize) {
        let profile = self.network.profile(self.peer_ids[idx]);
        self.states[idx].msg_count += 1;
        let res = self.cursors[idx].fetch_next(fetch);
        let delivered = res.batch.len();
        self.states[idx].objects_retrieved += delivered;
        self.states[idx].remaining_bound = res.remaining_bound;
        self.states[idx].exhausted = res.exhausted;
        let row = CostRow {
            peer_id: self.peer_ids[idx],
            comm_seconds: comm_costs(profile, 1),
            db_seconds: estimate_db_cost(profile, self.query, delivered, self.db_constants),
            trans_seconds: trans_costs(profile, delivered),
            msg_count: 1,
            object_count: delivered,
        };
        self.buffer.merge(res.batch);
        (row, delivered)
    }

    /// Recomputes the threshold and publishes what it allows. Returns how
    /// many objects were published by this pass.
    pub fn publish_step(&mut self, k: usize) -> usize {
        let max_rem = max_remaining_score(&self.states);
        let mut published_now = 0;
        while self.buffer.published < self.buffer.entries.len() && self.buffer.published < k {
            let entry = &self.buffer.entries[self.buffer.published];
            if entry.score < max_rem {
                break;
            }
            if entry.score == max_rem {
                let origin = entry.origin_peer;
                let score = entry.score;
                let blocked = self
                    .peer_ids
                    .iter()
                    .zip(self.states.iter())
                    .any(|(&pid, s)| {
                        pid < origin && !s.exhausted && s.remaining_bound == score
                    });
                if blocked {
                    break;
                }
            }
            let origin = entry.origin_peer;
            let origin_idx = self.peer_index(origin);
            self.states[origin_idx].objects_published += 1;
            self.buffer.published += 1;
            published_now += 1;
        }
        published_now
    }

    /// One parallel broadcast round over the given relevant peers followed by
    /// a publish pass; the barrier before publishing is implicit in the
    /// serial simulation.
    pub fn run_iteration(
        &mut self,
        relevant: &[usize],
        policy: &HeuristicPolicy,
        k: usize,
    ) -> Result<()> {
        let obj_pub_n = self.total_published();
        debug_assert!(obj_pub_n < k);

        // Fetch sizes are assigned before the broadcast, from the states as
        // they stand at the start of the iteration.
        let sizes: Vec<usize> = relevant
            .iter()
            .map(|&i| {
                fetch_size(
                    policy,
                    k,
                    self.network,
                    &self.states[i],
                    self.network.profile(self.peer_ids[i]),
                    obj_pub_n,
                    relevant.len(),
                )
            })
            .collect();

        let mut rows = Vec::with_capacity(relevant.len());
        let mut fetch_sizes = Vec::with_capacity(relevant.len());
        let mut delivered_counts = Vec::with_capacity(relevant.len());
        for (&i, &fetch) in relevant.iter().zip(sizes.iter()) {
            let (row, delivered) = self.fetch_from(i, fetch);
            fetch_sizes.push((self.peer_ids[i], fetch));
            delivered_counts.push((self.peer_ids[i], delivered));
            rows.push(row);
        }

        let published_now = self.publish_step(k);
        self.ledger.push(IterationCosts {
            sequential: false,
            rows,
        });
        self.traces.push(IterationTrace {
            iteration_index: self.traces.len(),
            per_peer_fetch_size: fetch_sizes,
            per_peer_delivered: delivered_counts,
            messages_sent: relevant.len(),
            objects_published: published_now,
            max_rem_score_after: max_remaining_score(&self.states),
        });
        Ok(())
    }

    pub fn record_trace(
        &mut self,
        fetch_sizes: &[(PeerId, usize)],
        delivered: &[(PeerId, usize)],
        messages: usize,
        published_now: usize,
    ) {
        self.ledger.push(IterationCosts {
            sequential: false,
            rows: Vec::new(),
        });
        self.traces.push(IterationTrace {
            iteration_index: self.traces.len(),
            per_peer_fetch_size: fetch_sizes.to_vec(),
            per_peer_delivered: delivered.to_vec(),
            messages_sent: messages,
            objects_published: published_now,
            max_rem_score_after: max_remaining_score(&self.states),
        });
    }

    pub fn finish(self, k: usize) -> ExecutionResult {
        let short = self.buffer.published_count() < k;
        ExecutionResult {
            results: self.buffer.published_entries().to_vec(),
            ledger: self.ledger,
            traces: self.traces,
            short_result: short,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        AttributeDef, AttributeKind, AttributeValue, ObjectRecord, ObjectiveKind, Restriction,
    };
    use crate::heuristics::PolicyKind;

    fn schema() -> RelationSchema {
        RelationSchema {
            name: "r".into(),
            attributes: vec![AttributeDef {
                name: "x".into(),
                kind: AttributeKind::Numeric { min: 0.0, max: 1.0 },
            }],
        }
    }

    fn query(k: usize) -> Query {
        Query {
            relation: "r".into(),
            k,
            restrictions: vec![Restriction {
                attribute_index: 0,
                // target 0 over range [0, 1]: score = 1 - value, so scores
                // can be chosen exactly representable
                target: AttributeValue::Numeric(0.0),
                weight: 1.0,
            }],
            objective: ObjectiveKind::WeightedAverage,
        }
    }

    fn store(peer: PeerId, first_id: u64, scores: &[f64]) -> PeerStore {
        PeerStore::new(
            peer,
            scores
                .iter()
                .enumerate()
                .map(|(i, s)| ObjectRecord {
                    object_id: first_id + i as u64,
                    attributes: vec![AttributeValue::Numeric(1.0 - s)],
                })
                .collect(),
        )
        .unwrap()
    }

    fn uniform_network(peer_ids: &[PeerId], stored: usize) -> NetworkProfile {
        NetworkProfile::new(
            peer_ids
                .iter()
                .map(|&peer_id| crate::heuristics::PeerProfile {
                    peer_id,
                    objects_stored: stored,
                    speed: 5.0,
                    trans_rate_mbit: 4.0,
                    msg_cost_seconds: 0.05,
                    object_size_bytes: 1000,
                })
                .collect(),
        )
        .unwrap()
    }

    fn policy(kind: PolicyKind) -> HeuristicPolicy {
        HeuristicPolicy {
            kind,
            cons_factor: 2.0,
        }
    }

    #[test]
    fn single_peer_fixed_k_one_iteration() {
        let network = uniform_network(&[0], 5);
        let stores = vec![store(0, 0, &[0.5, 0.25, 0.75, 0.125, 0.625])];
        let q = query(5);
        let res = adit_top_k(
            &network,
            &stores,
            &q,
            &schema(),
            &policy(PolicyKind::FixedK),
            &DbCostConstants::default(),
        )
        .unwrap();
        assert_eq!(res.traces.len(), 1);
        assert_eq!(res.traces[0].objects_published, 5);
        let scores: Vec<f64> = res.results.iter().map(|s| s.score).collect();
        assert_eq!(scores, vec![0.75, 0.625, 0.5, 0.25, 0.125]);
        assert!(!res.short_result);
    }

    #[test]
    fn fixed1_hand_trace_publishes_threshold_dominated_objects() {
        // peer 0 holds {0.875, 0.625, 0.375}, peer 1 holds {0.75, 0.5, 0.25}.
        let network = uniform_network(&[0, 1], 3);
        let stores = vec![
            store(0, 0, &[0.875, 0.625, 0.375]),
            store(1, 10, &[0.75, 0.5, 0.25]),
        ];
        let q = query(4);
        let res = adit_top_k(
            &network,
            &stores,
            &q,
            &schema(),
            &policy(PolicyKind::Fixed1),
            &DbCostConstants::default(),
        )
        .unwrap();
        let scores: Vec<f64> = res.results.iter().map(|s| s.score).collect();
        assert_eq!(scores, vec![0.875, 0.75, 0.625, 0.5]);
        // iteration 1: fetches 0.875 / 0.75, maxRem 0.875, publishes 0.875
        // iteration 2: fetches 0.625 / 0.5, maxRem 0.625, publishes 0.75 and
        //   0.625; iteration 3 publishes 0.5 reaching k
        assert_eq!(res.traces.len(), 3);
        let published: Vec<usize> = res.traces.iter().map(|t| t.objects_published).collect();
        assert_eq!(published, vec![1, 2, 1]);
        assert!((res.traces[0].max_rem_score_after - 0.875).abs() < 1e-15);
    }

    #[test]
    fn exhausted_peer_leaves_relevant_set() {
        let network = uniform_network(&[0, 1], 3);
        let stores = vec![store(0, 0, &[0.875]), store(1, 10, &[0.75, 0.5, 0.25])];
        let q = query(3);
        let res = adit_top_k(
            &network,
            &stores,
            &q,
            &schema(),
            &policy(PolicyKind::Fixed1),
            &DbCostConstants::default(),
        )
        .unwrap();
        let scores: Vec<f64> = res.results.iter().map(|s| s.score).collect();
        assert_eq!(scores, vec![0.875, 0.75, 0.5]);
        // peer 0 exhausts after its single object; later iterations only
        // message peer 1
        let last = res.traces.last().unwrap();
        assert_eq!(last.per_peer_fetch_size.len(), 1);
        assert_eq!(last.per_peer_fetch_size[0].0, 1);
    }

    #[test]
    fn k_beyond_total_returns_all_flagged_short() {
        let network = uniform_network(&[0, 1], 2);
        let stores = vec![store(0, 0, &[0.5, 0.25]), store(1, 10, &[0.75])];
        let q = query(10);
        let res = adit_top_k(
            &network,
            &stores,
            &q,
            &schema(),
            &policy(PolicyKind::FixedK),
            &DbCostConstants::default(),
        )
        .unwrap();
        assert!(res.short_result);
        assert_eq!(res.results.len(), 3);
        let scores: Vec<f64> = res.results.iter().map(|s| s.score).collect();
        assert_eq!(scores, vec![0.75, 0.5, 0.25]);
    }

    #[test]
    fn cross_peer_ties_follow_global_order() {
        // identical score multisets on both peers; published order must
        // break ties by (peer id, object id)
        let network = uniform_network(&[0, 1], 3);
        let stores = vec![
            store(0, 0, &[0.5, 0.5, 0.25]),
            store(1, 10, &[0.5, 0.5, 0.25]),
        ];
        let q = query(5);
        for kind in PolicyKind::ALL {
            let res = adit_top_k(
                &network,
                &stores,
                &q,
                &schema(),
                &policy(kind),
                &DbCostConstants::default(),
            )
            .unwrap();
            let keys: Vec<(PeerId, u64)> = res
                .results
                .iter()
                .map(|s| (s.origin_peer, s.object.object_id))
                .collect();
            assert_eq!(
                keys,
                vec![(0, 0), (0, 1), (1, 10), (1, 11), (0, 2)],
                "policy {kind:?}"
            );
        }
    }

    #[test]
    fn message_accounting_matches_traces() {
        let network = uniform_network(&[0, 1, 2], 4);
        let stores = vec![
            store(0, 0, &[0.9375, 0.625, 0.5, 0.0625]),
            store(1, 10, &[0.875, 0.5625, 0.25, 0.125]),
            store(2, 20, &[0.8125, 0.75, 0.6875, 0.1875]),
        ];
        let q = query(6);
        let res = adit_top_k(
            &network,
            &stores,
            &q,
            &schema(),
            &policy(PolicyKind::CeilKOverN),
            &DbCostConstants::default(),
        )
        .unwrap();
        let trace_msgs: usize = res.traces.iter().map(|t| t.messages_sent).sum();
        assert_eq!(res.ledger.total_messages(), trace_msgs);
    }
}
