//! Experiment configuration, loaded from JSON.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heuristics::{HeuristicPolicy, PolicyKind};
use crate::local_engine::DbCostConstants;

/// How the object corpus is obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetSpec {
    /// Synthetic census-like data: uniform per-attribute draws over a
    /// generated schema.
    UniformRandom {
        arity: usize,
        /// Fraction of attributes that are categorical; the rest numeric.
        categorical_fraction: f64,
        /// Token count per categorical attribute domain.
        #[serde(default = "default_domain_size")]
        domain_size: usize,
    },
    /// A CSV file with a header row; first column `object_id` is optional.
    CsvFile { path: String, schema_path: String },
}

fn default_domain_size() -> usize {
    16
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionStrategy {
    RoundRobin,
    SizeWeighted,
    Shuffled,
}

/// One query cell of the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuerySpec {
    pub k: usize,
    pub restriction_count: usize,
}

/// A policy selectable in config: one of the six fetch-size heuristics or
/// the remainder-query baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyChoice {
    Fixed1,
    FixedK,
    CeilKOverN,
    FloorKOverN,
    Basic,
    Enhanced,
    Arto,
}

impl PolicyChoice {
    pub const ALL: [PolicyChoice; 7] = [
        PolicyChoice::Fixed1,
        PolicyChoice::FixedK,
        PolicyChoice::CeilKOverN,
        PolicyChoice::FloorKOverN,
        PolicyChoice::Basic,
        PolicyChoice::Enhanced,
        PolicyChoice::Arto,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PolicyChoice::Arto => "arto",
            other => other.heuristic_kind().unwrap().name(),
        }
    }

    pub fn heuristic_kind(&self) -> Option<PolicyKind> {
        match self {
            PolicyChoice::Fixed1 => Some(PolicyKind::Fixed1),
            PolicyChoice::FixedK => Some(PolicyKind::FixedK),
            PolicyChoice::CeilKOverN => Some(PolicyKind::CeilKOverN),
            PolicyChoice::FloorKOverN => Some(PolicyKind::FloorKOverN),
            PolicyChoice::Basic => Some(PolicyKind::Basic),
            PolicyChoice::Enhanced => Some(PolicyKind::Enhanced),
            PolicyChoice::Arto => None,
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "fixed1" => Ok(PolicyChoice::Fixed1),
            "fixed_k" => Ok(PolicyChoice::FixedK),
            "ceil_k_over_n" => Ok(PolicyChoice::CeilKOverN),
            "floor_k_over_n" => Ok(PolicyChoice::FloorKOverN),
            "basic" => Ok(PolicyChoice::Basic),
            "enhanced" => Ok(PolicyChoice::Enhanced),
            "arto" => Ok(PolicyChoice::Arto),
            other => Err(Error::UnknownPolicy(other.to_string())),
        }
    }
}

/// Full experiment description. Identical config and seed produce byte
/// identical results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub peer_count: usize,
    pub per_peer_size_range: [usize; 2],
    pub speed_range: [f64; 2],
    pub trans_rate_range: [f64; 2],
    pub msg_cost_range: [f64; 2],
    #[serde(default = "default_object_size")]
    pub object_size_bytes: usize,
    pub dataset: DatasetSpec,
    pub partition_strategy: PartitionStrategy,
    pub queries: Vec<QuerySpec>,
    pub policies: Vec<PolicyChoice>,
    #[serde(default)]
    pub db_cost_constants: DbCostConstants,
    #[serde(default = "default_cons_factor")]
    pub cons_factor: f64,
    /// Phase-1 batch of the baseline; `ceil(k / peer_count)` when absent.
    #[serde(default)]
    pub arto_initial_batch: Option<usize>,
    #[serde(default = "default_remainder_batch")]
    pub arto_remainder_batch: usize,
}

fn default_object_size() -> usize {
    1000
}

fn default_cons_factor() -> f64 {
    2.0
}

fn default_remainder_batch() -> usize {
    1
}

impl ExperimentConfig {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: ExperimentConfig = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.peer_count == 0 {
            return Err(Error::Config("peer_count must be >= 1".into()));
        }
        let [lo, hi] = self.per_peer_size_range;
        if lo > hi || hi > 10_000_000 || lo == 0 {
            return Err(Error::Config(format!(
                "per_peer_size_range [{lo}, {hi}] must be non-empty and within [1, 1e7]"
            )));
        }
        for (name, [a, b]) in [
            ("speed_range", self.speed_range),
            ("trans_rate_range", self.trans_rate_range),
        ] {
            if !(a > 0.0 && b >= a) {
                return Err(Error::Config(format!("{name} [{a}, {b}] invalid")));
            }
        }
        let [mc_lo, mc_hi] = self.msg_cost_range;
        if !(mc_lo >= 0.0 && mc_hi >= mc_lo) {
            return Err(Error::Config(format!(
                "msg_cost_range [{mc_lo}, {mc_hi}] invalid"
            )));
        }
        if self.object_size_bytes == 0 {
            return Err(Error::Config("object_size_bytes must be positive".into()));
        }
        if self.cons_factor <= 0.0 {
            return Err(Error::Config("cons_factor must be positive".into()));
        }
        if self.queries.is_empty() {
            return Err(Error::Config("at least one query required".into()));
        }
        for q in &self.queries {
            if q.k == 0 || q.restriction_count == 0 {
                return Err(Error::Config(format!(
                    "query k={} restrictions={} invalid",
                    q.k, q.restriction_count
                )));
            }
        }
        if self.policies.is_empty() {
            return Err(Error::Config("at least one policy required".into()));
        }
        if let DatasetSpec::UniformRandom {
            arity,
            categorical_fraction,
            domain_size,
        } = &self.dataset
        {
            if *arity == 0 {
                return Err(Error::Config("dataset arity must be >= 1".into()));
            }
            if !(0.0..=1.0).contains(categorical_fraction) {
                return Err(Error::Config(
                    "categorical_fraction must lie in [0, 1]".into(),
                ));
            }
            if *domain_size == 0 {
                return Err(Error::Config("domain_size must be >= 1".into()));
            }
        }
        if self.arto_initial_batch == Some(0) || self.arto_remainder_batch == 0 {
            return Err(Error::Config("arto batch sizes must be >= 1".into()));
        }
        Ok(())
    }

    pub fn heuristic(&self, kind: PolicyKind) -> HeuristicPolicy {
        HeuristicPolicy {
            kind,
            cons_factor: self.cons_factor,
        }
    }
}

/// A small default experiment used by the CLI when no config file is given.
pub fn default_config() -> ExperimentConfig {
    ExperimentConfig {
        seed: 42,
        peer_count: 10,
        per_peer_size_range: [500, 2000],
        speed_range: [1.0, 10.0],
        trans_rate_range: [1.0, 10.0],
        msg_cost_range: [0.02, 0.2],
        object_size_bytes: 1000,
        dataset: DatasetSpec::UniformRandom {
            arity: 68,
            categorical_fraction: 1.0,
            domain_size: 16,
        },
        partition_strategy: PartitionStrategy::SizeWeighted,
        queries: vec![
            QuerySpec {
                k: 10,
                restriction_count: 4,
            },
            QuerySpec {
                k: 50,
                restriction_count: 4,
            },
        ],
        policies: PolicyChoice::ALL.to_vec(),
        db_cost_constants: DbCostConstants::default(),
        cons_factor: 2.0,
        arto_initial_batch: None,
        arto_remainder_batch: 1,
    }
}
