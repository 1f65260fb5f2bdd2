//! Baseline competitor: one parallel initial round, then sequential
//! remainder fetches to the single peer with the highest remaining score.

use crate::coordinator::{max_remaining_score, Execution, ExecutionResult};
use crate::costsim::IterationCosts;
use crate::error::Result;
use crate::heuristics::NetworkProfile;
use crate::local_engine::{DbCostConstants, PeerStore};
use crate::model::{Query, RelationSchema};

/// Runs the remainder-query baseline.
///
/// Phase 1 fetches `initial_batch` objects from every peer in one logically
/// parallel round. Phase 2 repeatedly asks the non-exhausted peer with the
/// highest remaining bound (ties: lowest peer id) for `remainder_batch` more
/// objects, republishing after each fetch. Phase-2 fetches are strictly
/// sequential, so each one contributes its full cost to the answer time.
pub fn arto_top_k(
    network: &NetworkProfile,
    stores: &[PeerStore],
    query: &Query,
    schema: &RelationSchema,
    initial_batch: usize,
    remainder_batch: usize,
    db_constants: &DbCostConstants,
) -> Result<ExecutionResult> {
    assert!(initial_batch >= 1 && remainder_batch >= 1);
    let mut exec = Execution::new(network, stores, query, schema, db_constants)?;
    let k = query.k;

    // Phase 1: parallel round over every peer holding data.
    let active: Vec<usize> = (0..exec.states.len())
        .filter(|&i| !exec.states[i].exhausted)
        .collect();
    let mut rows = Vec::with_capacity(active.len());
    let mut fetch_sizes = Vec::with_capacity(active.len());
    let mut delivered_counts = Vec::with_capacity(active.len());
    for &i in &active {
        let (row, delivered) = exec.fetch_from(i, initial_batch);
        fetch_sizes.push((exec.peer_ids[i], initial_batch));
        delivered_counts.push((exec.peer_ids[i], delivered));
        rows.push(row);
    }
    let published_now = exec.publish_step(k);
    exec.ledger.push(IterationCosts {
        sequential: false,
        rows,
    });
    exec.traces.push(crate::coordinator::IterationTrace {
        iteration_index: 0,
        per_peer_fetch_size: fetch_sizes,
        per_peer_delivered: delivered_counts,
        messages_sent: active.len(),
        objects_published: published_now,
        max_rem_score_after: max_remaining_score(&exec.states),
    });

    // Phase 2: sequential remainder queries.
    while exec.total_published() < k {
        let target = exec
            .states
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.exhausted)
            .max_by(|(ia, a), (ib, b)| {
                a.remaining_bound
                    .partial_cmp(&b.remaining_bound)
                    .unwrap()
                    .then(ib.cmp(ia)) // ties: lowest peer id wins the max
            })
            .map(|(i, _)| i);
        let Some(i) = target else {
            // Everyone exhausted; drain whatever the zero threshold allows.
            let published_now = exec.publish_step(k);
            if published_now > 0 {
                exec.record_trace(&[], &[], 0, published_now);
            }
            break;
        };
        let (row, delivered) = exec.fetch_from(i, remainder_batch);
        let published_now = exec.publish_step(k);
        exec.ledger.push(IterationCosts {
            sequential: true,
            rows: vec![row],
        });
        exec.traces.push(crate::coordinator::IterationTrace {
            iteration_index: exec.traces.len(),
            per_peer_fetch_size: vec![(exec.peer_ids[i], remainder_batch)],
            per_peer_delivered: vec![(exec.peer_ids[i], delivered)],
            messages_sent: 1,
            objects_published: published_now,
            max_rem_score_after: max_remaining_score(&exec.states),
        });
    }

    Ok(exec.finish(k))
}

/// Default phase-1 batch: `ceil(k / peer count)`.
pub fn default_initial_batch(k: usize, peer_count: usize) -> usize {
    k.div_ceil(peer_count).max(1)
}
