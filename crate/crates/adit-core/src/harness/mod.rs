//! Experiment generation and execution: synthetic networks and datasets,
//! CSV ingestion, partitioning, policy sweeps and the brute-force oracle.

pub mod config;
pub mod generate;
pub mod oracle;
pub mod plot;
pub mod runner;

pub use config::{
    default_config, DatasetSpec, ExperimentConfig, PartitionStrategy, PolicyChoice, QuerySpec,
};
pub use generate::{
    generate_dataset, generate_network, generate_query, load_csv, partition_data, synthetic_schema,
};
pub use oracle::brute_force_top_k;
pub use plot::write_svg_plots;
pub use runner::{
    build_instance, results_match, rows_to_csv, run_benchmark, run_policy, write_csv, BenchmarkRow,
    Instance, CSV_HEADER,
};
