//! Fetch-size policies: four fixed baselines, the basic heuristics, and the
//! enhanced per-peer heuristics.
//!
//! All policies answer the same question each iteration: how many objects
//! should the coordinator request from peer p. The basic heuristics derives a
//! common size from the peer count and k; the enhanced heuristics scales it
//! per peer with five multiplicative weights, each mapped into [1, 2], so it
//! never fetches fewer objects than the basic heuristics suggested.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::PeerId;

/// Static capabilities of one peer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeerProfile {
    pub peer_id: PeerId,
    /// Number of objects stored on this peer.
    pub objects_stored: usize,
    /// Query processing speed on a 1 (slowest) to 10 (fastest) scale.
    pub speed: f64,
    /// Transmission rate in Mbit/s.
    pub trans_rate_mbit: f64,
    /// Constant cost in seconds of sending one request to this peer.
    pub msg_cost_seconds: f64,
    /// Size of one object of the queried relation in bytes.
    pub object_size_bytes: usize,
}

/// Aggregate view of the whole network, with the maxima the enhanced
/// heuristics normalizes against.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkProfile {
    pub peers: Vec<PeerProfile>,
    pub n_size: usize,
    pub objects_stored_n: usize,
    pub max_speed_n: f64,
    pub max_trans_rate_n: f64,
}

impl NetworkProfile {
    /// Builds the aggregate view. Peers are sorted by id; profiles are
    /// validated (positive speed and rate, nonnegative message cost).
    pub fn new(mut peers: Vec<PeerProfile>) -> Result<Self> {
        if peers.is_empty() {
            return Err(Error::Config("network must have at least one peer".into()));
        }
        peers.sort_by_key(|p| p.peer_id);
        for w in peers.windows(2) {
            if w[0].peer_id == w[1].peer_id {
                return Err(Error::Config(format!("duplicate peer id {}", w[0].peer_id)));
            }
        }
        for p in &peers {
            if p.speed <= 0.0 {
                return Err(Error::Config(format!(
                    "peer {} has non-positive speed {}",
                    p.peer_id, p.speed
                )));
            }
            if p.trans_rate_mbit <= 0.0 {
                return Err(Error::Config(format!(
                    "peer {} has non-positive transmission rate {}",
                    p.peer_id, p.trans_rate_mbit
                )));
            }
            if p.msg_cost_seconds < 0.0 {
                return Err(Error::Config(format!(
                    "peer {} has negative message cost {}",
                    p.peer_id, p.msg_cost_seconds
                )));
            }
            if p.object_size_bytes == 0 {
                return Err(Error::Config(format!(
                    "peer {} has zero object size",
                    p.peer_id
                )));
            }
        }
        let n_size = peers.len();
        let objects_stored_n = peers.iter().map(|p| p.objects_stored).sum();
        let max_speed_n = peers.iter().map(|p| p.speed).fold(f64::MIN, f64::max);
        let max_trans_rate_n = peers
            .iter()
            .map(|p| p.trans_rate_mbit)
            .fold(f64::MIN, f64::max);
        Ok(NetworkProfile {
            peers,
            n_size,
            objects_stored_n,
            max_speed_n,
            max_trans_rate_n,
        })
    }

    pub fn profile(&self, peer_id: PeerId) -> &PeerProfile {
        let idx = self
            .peers
            .binary_search_by_key(&peer_id, |p| p.peer_id)
            .expect("unknown peer id");
        &self.peers[idx]
    }

    /// Recomputes the aggregates after per-peer store sizes changed
    /// (partitioning updates `objects_stored` to actual counts).
    pub fn refresh_aggregates(&mut self) {
        self.objects_stored_n = self.peers.iter().map(|p| p.objects_stored).sum();
        self.max_speed_n = self.peers.iter().map(|p| p.speed).fold(f64::MIN, f64::max);
        self.max_trans_rate_n = self
            .peers
            .iter()
            .map(|p| p.trans_rate_mbit)
            .fold(f64::MIN, f64::max);
    }
}

/// Per-query progress the coordinator keeps for one peer.
#[derive(Debug, Clone, PartialEq)]
pub struct PeerQueryState {
    pub objects_retrieved: usize,
    pub objects_published: usize,
    /// Upper bound on the score of any object this peer has not yet
    /// delivered. 1.0 before the first fetch, 0.0 once exhausted.
    pub remaining_bound: f64,
    pub exhausted: bool,
    pub msg_count: usize,
}

impl Default for PeerQueryState {
    fn default() -> Self {
        PeerQueryState {
            objects_retrieved: 0,
            objects_published: 0,
            remaining_bound: 1.0,
            exhausted: false,
            msg_count: 0,
        }
    }
}

impl PeerQueryState {
    /// Bound used for relevance and publish thresholds: an exhausted peer
    /// has nothing left, so its bound is 0.
    pub fn effective_bound(&self) -> f64 {
        if self.exhausted {
            0.0
        } else {
            self.remaining_bound
        }
    }
}

/// The six fetch-size policies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Fixed1,
    FixedK,
    CeilKOverN,
    FloorKOverN,
    Basic,
    Enhanced,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 6] = [
        PolicyKind::Fixed1,
        PolicyKind::FixedK,
        PolicyKind::CeilKOverN,
        PolicyKind::FloorKOverN,
        PolicyKind::Basic,
        PolicyKind::Enhanced,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::Fixed1 => "fixed1",
            PolicyKind::FixedK => "fixed_k",
            PolicyKind::CeilKOverN => "ceil_k_over_n",
            PolicyKind::FloorKOverN => "floor_k_over_n",
            PolicyKind::Basic => "basic",
            PolicyKind::Enhanced => "enhanced",
        }
    }
}

/// A policy kind plus the consFactor the basic/enhanced heuristics use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeuristicPolicy {
    pub kind: PolicyKind,
    pub cons_factor: f64,
}

impl HeuristicPolicy {
    pub fn new(kind: PolicyKind, cons_factor: f64) -> Result<Self> {
        if cons_factor <= 0.0 {
            return Err(Error::Config(format!(
                "cons_factor must be positive, got {cons_factor}"
            )));
        }
        Ok(HeuristicPolicy { kind, cons_factor })
    }
}

/// The five enhanced-heuristics weights, each in [1, 2].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub published_fraction: f64,
    pub used_fraction: f64,
    pub db_fraction: f64,
    pub speed: f64,
    pub trans_rate: f64,
}

impl Weights {
    pub fn product(&self) -> f64 {
        self.published_fraction * self.used_fraction * self.db_fraction * self.speed
            * self.trans_rate
    }
}

fn ratio_weight(num: f64, denom: f64) -> f64 {
    if denom == 0.0 {
        1.0
    } else {
        1.0 + num / denom
    }
}

/// Common fetch size from network size and k:
/// `min(k, ceil(consFactor * ceil(nSize/k) * k / nSize))`, floored at 1.
pub fn basic_fetch_size(k: usize, n_size: usize, cons_factor: f64) -> usize {
    assert!(k >= 1 && n_size >= 1);
    let multiple = n_size.div_ceil(k);
    let raw = cons_factor * multiple as f64 * k as f64 / n_size as f64;
    let f = (raw.ceil() as usize).min(k);
    f.max(1)
}

/// The five per-peer weights. Any weight whose denominator is zero is
/// defined as 1 (neutral), which absorbs first-iteration states.
pub fn compute_weights(
    state: &PeerQueryState,
    profile: &PeerProfile,
    network: &NetworkProfile,
    obj_pub_n: usize,
) -> Weights {
    Weights {
        published_fraction: ratio_weight(state.objects_published as f64, obj_pub_n as f64),
        used_fraction: ratio_weight(
            state.objects_published as f64,
            state.objects_retrieved as f64,
        ),
        db_fraction: ratio_weight(
            profile.objects_stored as f64,
            network.objects_stored_n as f64,
        ),
        speed: ratio_weight(profile.speed, network.max_speed_n),
        trans_rate: ratio_weight(profile.trans_rate_mbit, network.max_trans_rate_n),
    }
}

/// Per-peer fetch size: `min(k - objPubN, ceil(f * product of weights))`.
pub fn enhanced_fetch_size(f: usize, weights: &Weights, k: usize, obj_pub_n: usize) -> usize {
    assert!(obj_pub_n <= k);
    let scaled = (f as f64 * weights.product()).ceil() as usize;
    scaled.min(k - obj_pub_n)
}

/// Fetch size for one relevant peer under the given policy.
///
/// `relevant_count` is the number of peers still relevant this iteration;
/// the basic and enhanced heuristics size against it, the fixed k/N policies
/// against the whole network. Every result is capped at the number of
/// missing objects and floored at 1 while objects are missing.
pub fn fetch_size(
    policy: &HeuristicPolicy,
    k: usize,
    network: &NetworkProfile,
    state: &PeerQueryState,
    profile: &PeerProfile,
    obj_pub_n: usize,
    relevant_count: usize,
) -> usize {
    debug_assert!(obj_pub_n < k);
    let missing = k - obj_pub_n;
    let n = network.n_size;
    let raw = match policy.kind {
        PolicyKind::Fixed1 => 1,
        PolicyKind::FixedK => missing,
        PolicyKind::CeilKOverN => k.div_ceil(n),
        PolicyKind::FloorKOverN => (k / n).max(1),
        PolicyKind::Basic => basic_fetch_size(k, relevant_count.max(1), policy.cons_factor),
        PolicyKind::Enhanced => {
            let f = basic_fetch_size(k, relevant_count.max(1), policy.cons_factor);
            let w = compute_weights(state, profile, network, obj_pub_n);
            enhanced_fetch_size(f, &w, k, obj_pub_n)
        }
    };
    raw.min(missing).max(1)
}
