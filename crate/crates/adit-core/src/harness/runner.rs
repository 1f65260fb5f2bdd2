//! Benchmark execution: policy sweeps over generated instances, metric
//! collection, ratio tables and CSV output.

use std::path::Path;

use crate::arto::{arto_top_k, default_initial_batch};
use crate::coordinator::{adit_top_k, ExecutionResult};
use crate::costsim::{query_answer_time, ratios, system_effort};
use crate::error::{Error, Result};
use crate::heuristics::NetworkProfile;
use crate::local_engine::PeerStore;
use crate::model::{Query, RelationSchema};

use super::config::{DatasetSpec, ExperimentConfig, PolicyChoice};
use super::generate::{
    generate_dataset, generate_network, generate_query, load_csv, partition_data, synthetic_schema,
};
use super::oracle::brute_force_top_k;

/// One benchmark cell: a (query, policy) pair with its measured metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub seed: u64,
    pub peers: usize,
    pub k: usize,
    pub restrictions: usize,
    pub policy: PolicyChoice,
    pub iterations: usize,
    pub messages: usize,
    pub objects_moved: usize,
    pub se_seconds: f64,
    pub qat_seconds: f64,
    pub ratio_se: f64,
    pub ratio_qat: f64,
    pub short_result: bool,
}

pub const CSV_HEADER: &str =
    "seed,peers,k,restrictions,policy,iterations,messages,objects_moved,se_seconds,qat_seconds,ratio_se,ratio_qat,short_result";

impl BenchmarkRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.seed,
            self.peers,
            self.k,
            self.restrictions,
            self.policy.name(),
            self.iterations,
            self.messages,
            self.objects_moved,
            self.se_seconds,
            self.qat_seconds,
            self.ratio_se,
            self.ratio_qat,
            self.short_result
        )
    }
}

/// A fully generated experiment instance shared by every cell.
pub struct Instance {
    pub network: NetworkProfile,
    pub schema: RelationSchema,
    pub stores: Vec<PeerStore>,
}

/// Realizes the configured network and data: generation (or CSV ingestion),
/// then partitioning.
pub fn build_instance(config: &ExperimentConfig) -> Result<Instance> {
    let mut network = generate_network(config, config.seed)?;
    let (schema, dataset) = match &config.dataset {
        DatasetSpec::UniformRandom { .. } => {
            let schema = synthetic_schema(&config.dataset)?;
            let total: usize = network.peers.iter().map(|p| p.objects_stored).sum();
            let dataset = generate_dataset(&schema, total, config.seed);
            (schema, dataset)
        }
        DatasetSpec::CsvFile { path, schema_path } => {
            let schema_text = std::fs::read_to_string(schema_path)?;
            let schema: RelationSchema = serde_json::from_str(&schema_text)?;
            let text = std::fs::read_to_string(path)?;
            let dataset = load_csv(&text, &schema)?;
            (schema, dataset)
        }
    };
    let stores = partition_data(dataset, &mut network, config.partition_strategy, config.seed)?;
    Ok(Instance {
        network,
        schema,
        stores,
    })
}

/// Runs one query under one policy.
pub fn run_policy(
    config: &ExperimentConfig,
    instance: &Instance,
    query: &Query,
    policy: PolicyChoice,
) -> Result<ExecutionResult> {
    match policy.heuristic_kind() {
        Some(kind) => adit_top_k(
            &instance.network,
            &instance.stores,
            query,
            &instance.schema,
            &config.heuristic(kind),
            &config.db_cost_constants,
        ),
        None => {
            let initial = config
                .arto_initial_batch
                .unwrap_or_else(|| default_initial_batch(query.k, instance.network.peers.len()));
            arto_top_k(
                &instance.network,
                &instance.stores,
                query,
                &instance.schema,
                initial,
                config.arto_remainder_batch,
                &config.db_cost_constants,
            )
        }
    }
}

/// Executes the whole sweep. With `verify` set, every cell is cross-checked
/// against the brute-force oracle and a mismatch fails the cell.
pub fn run_benchmark(config: &ExperimentConfig, verify: bool) -> Result<Vec<BenchmarkRow>> {
    config.validate()?;
    let instance = build_instance(config)?;
    let mut rows = Vec::with_capacity(config.queries.len() * config.policies.len());

    for spec in &config.queries {
        let query = generate_query(&instance.schema, spec, config.seed)?;
        let cell_err = |policy: PolicyChoice, message: String| Error::Cell {
            k: spec.k,
            restrictions: spec.restriction_count,
            policy: policy.name().to_string(),
            message,
        };

        // The enhanced heuristics is the ratio denominator whether or not it
        // is part of the sweep.
        let enhanced = run_policy(config, &instance, &query, PolicyChoice::Enhanced)
            .map_err(|e| cell_err(PolicyChoice::Enhanced, e.to_string()))?;
        let se_enh = system_effort(&enhanced.ledger);
        let qat_enh = query_answer_time(&enhanced.ledger);

        for &policy in &config.policies {
            let result = if policy == PolicyChoice::Enhanced {
                None
            } else {
                Some(
                    run_policy(config, &instance, &query, policy)
                        .map_err(|e| cell_err(policy, e.to_string()))?,
                )
            };
            let result = result.as_ref().unwrap_or(&enhanced);

            if verify {
                let expect =
                    brute_force_top_k(&instance.stores, &query, &instance.schema, spec.k)
                        .map_err(|e| cell_err(policy, e.to_string()))?;
                if !results_match(&result.results, &expect) {
                    return Err(Error::OracleMismatch {
                        k: spec.k,
                        restrictions: spec.restriction_count,
                        policy: policy.name().to_string(),
                    });
                }
            }

            let se = system_effort(&result.ledger);
            let qat = query_answer_time(&result.ledger);
            let (ratio_se, ratio_qat) =
                ratios(se, qat, se_enh, qat_enh).map_err(|e| cell_err(policy, e.to_string()))?;
            rows.push(BenchmarkRow {
                seed: config.seed,
                peers: config.peer_count,
                k: spec.k,
                restrictions: spec.restriction_count,
                policy,
                iterations: result.traces.len(),
                messages: result.ledger.total_messages(),
                objects_moved: result.ledger.total_objects_moved(),
                se_seconds: se,
                qat_seconds: qat,
                ratio_se,
                ratio_qat,
                short_result: result.short_result,
            });
        }
    }
    Ok(rows)
}

/// Exact comparison against the oracle: same scores, peers and object ids in
/// the same order.
pub fn results_match(
    got: &[crate::model::ScoredObject],
    expect: &[crate::model::ScoredObject],
) -> bool {
    got.len() == expect.len()
        && got.iter().zip(expect).all(|(a, b)| {
            a.score == b.score
                && a.origin_peer == b.origin_peer
                && a.object.object_id == b.object.object_id
        })
}

pub fn rows_to_csv(rows: &[BenchmarkRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_line());
        out.push('\n');
    }
    out
}

pub fn write_csv(rows: &[BenchmarkRow], path: &Path) -> Result<()> {
    std::fs::write(path, rows_to_csv(rows))?;
    Ok(())
}
