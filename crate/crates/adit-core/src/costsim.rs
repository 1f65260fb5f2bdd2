//! Simulated cost model and metrics: communication, transmission and local
//! search costs, system effort, query answer time, and comparison ratios.
//!
//! All costs are derived from peer profiles on a simulated clock, never from
//! wall time, so every run is reproducible bit-for-bit given a seed.

use crate::error::{Error, Result};
use crate::heuristics::PeerProfile;
use crate::model::PeerId;

/// Costs charged to one peer within one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct CostRow {
    pub peer_id: PeerId,
    pub comm_seconds: f64,
    pub db_seconds: f64,
    pub trans_seconds: f64,
    pub msg_count: usize,
    pub object_count: usize,
}

impl CostRow {
    pub fn total(&self) -> f64 {
        self.comm_seconds + self.db_seconds + self.trans_seconds
    }
}

/// One barrier-delimited step of an execution. Parallel iterations contribute
/// their slowest peer to the answer time; sequential segments (the remainder
/// fetches of the baseline) contribute their single peer's full cost.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationCosts {
    pub sequential: bool,
    pub rows: Vec<CostRow>,
}

/// Per-peer, per-iteration cost accumulation for one query execution.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CostLedger {
    pub iterations: Vec<IterationCosts>,
}

impl CostLedger {
    pub fn push(&mut self, iteration: IterationCosts) {
        debug_assert!(iteration
            .rows
            .iter()
            .all(|r| r.comm_seconds >= 0.0 && r.db_seconds >= 0.0 && r.trans_seconds >= 0.0));
        self.iterations.push(iteration);
    }

    pub fn total_messages(&self) -> usize {
        self.iterations
            .iter()
            .flat_map(|it| it.rows.iter())
            .map(|r| r.msg_count)
            .sum()
    }

    pub fn total_objects_moved(&self) -> usize {
        self.iterations
            .iter()
            .flat_map(|it| it.rows.iter())
            .map(|r| r.object_count)
            .sum()
    }
}

/// Seconds spent establishing `msg_count` connections to a peer.
pub fn comm_costs(profile: &PeerProfile, msg_count: usize) -> f64 {
    profile.msg_cost_seconds * msg_count as f64
}

/// Seconds spent transmitting `n` objects from a peer.
pub fn trans_costs(profile: &PeerProfile, n: usize) -> f64 {
    let object_size_bits = profile.object_size_bytes as f64 * 8.0;
    (object_size_bits * n as f64) / (profile.trans_rate_mbit * 1e6)
}

/// Total time spent by all peers on messaging, local search and transmission.
pub fn system_effort(ledger: &CostLedger) -> f64 {
    ledger
        .iterations
        .iter()
        .flat_map(|it| it.rows.iter())
        .map(|r| r.total())
        .sum()
}

/// Elapsed time from query submission to the final result: the critical path
/// of each iteration (slowest active peer), summed over iterations.
pub fn query_answer_time(ledger: &CostLedger) -> f64 {
    ledger
        .iterations
        .iter()
        .map(|it| {
            if it.sequential {
                it.rows.iter().map(|r| r.total()).sum()
            } else {
                it.rows.iter().map(|r| r.total()).fold(0.0, f64::max)
            }
        })
        .sum()
}

/// Gain ratios of policy `i` relative to the enhanced heuristics.
pub fn ratios(se_i: f64, qat_i: f64, se_enh: f64, qat_enh: f64) -> Result<(f64, f64)> {
    if se_enh <= 0.0 || qat_enh <= 0.0 {
        return Err(Error::ZeroRatioDenominator);
    }
    Ok((se_i / se_enh, qat_i / qat_enh))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(msg_cost: f64, rate: f64, obj_bytes: usize) -> PeerProfile {
        PeerProfile {
            peer_id: 0,
            objects_stored: 100,
            speed: 1.0,
            trans_rate_mbit: rate,
            msg_cost_seconds: msg_cost,
            object_size_bytes: obj_bytes,
        }
    }

    fn row(peer: PeerId, comm: f64, db: f64, trans: f64) -> CostRow {
        CostRow {
            peer_id: peer,
            comm_seconds: comm,
            db_seconds: db,
            trans_seconds: trans,
            msg_count: 1,
            object_count: 1,
        }
    }

    #[test]
    fn comm_costs_examples() {
        let p = profile(0.05, 8.0, 1000);
        assert_eq!(comm_costs(&p, 0), 0.0);
        assert!((comm_costs(&p, 3) - 0.15).abs() < 1e-12);
        assert!((comm_costs(&p, 6) - 2.0 * comm_costs(&p, 3)).abs() < 1e-12);
    }

    #[test]
    fn trans_costs_examples() {
        let p = profile(0.0, 8.0, 1000);
        assert_eq!(trans_costs(&p, 0), 0.0);
        // (8000 * 100) / (8e6) = 0.1 s
        assert!((trans_costs(&p, 100) - 0.1).abs() < 1e-12);
        let fast = profile(0.0, 16.0, 1000);
        assert!((trans_costs(&fast, 100) - 0.05).abs() < 1e-12);
    }

    #[test]
    fn system_effort_sums() {
        let mut ledger = CostLedger::default();
        assert_eq!(system_effort(&ledger), 0.0);
        ledger.push(IterationCosts {
            sequential: false,
            rows: vec![row(0, 0.1, 0.2, 0.3)],
        });
        assert!((system_effort(&ledger) - 0.6).abs() < 1e-12);
        ledger.push(IterationCosts {
            sequential: false,
            rows: vec![row(1, 0.1, 0.2, 0.3)],
        });
        assert!((system_effort(&ledger) - 1.2).abs() < 1e-12);
    }

    #[test]
    fn qat_takes_iteration_max() {
        let mut ledger = CostLedger::default();
        ledger.push(IterationCosts {
            sequential: false,
            rows: vec![row(0, 0.2, 0.0, 0.0), row(1, 0.5, 0.0, 0.0)],
        });
        assert!((query_answer_time(&ledger) - 0.5).abs() < 1e-12);
        ledger.push(IterationCosts {
            sequential: false,
            rows: vec![row(0, 0.3, 0.0, 0.0)],
        });
        assert!((query_answer_time(&ledger) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn qat_equals_se_for_single_peer() {
        let mut ledger = CostLedger::default();
        ledger.push(IterationCosts {
            sequential: false,
            rows: vec![row(0, 0.2, 0.1, 0.05)],
        });
        assert!((query_answer_time(&ledger) - system_effort(&ledger)).abs() < 1e-12);
    }

    #[test]
    fn sequential_segments_sum() {
        let mut ledger = CostLedger::default();
        ledger.push(IterationCosts {
            sequential: true,
            rows: vec![row(0, 0.2, 0.0, 0.0)],
        });
        ledger.push(IterationCosts {
            sequential: true,
            rows: vec![row(1, 0.3, 0.0, 0.0)],
        });
        assert!((query_answer_time(&ledger) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(ratios(1.0, 1.0, 1.0, 1.0).unwrap(), (1.0, 1.0));
        let (rse, rqat) = ratios(8.0, 200.0, 1.0, 1.0).unwrap();
        assert_eq!(rse, 8.0);
        assert_eq!(rqat, 200.0);
        assert!(ratios(1.0, 1.0, 0.0, 1.0).is_err());
    }
}
