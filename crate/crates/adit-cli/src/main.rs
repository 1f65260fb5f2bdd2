//! Command-line entry point: run a single query, sweep a benchmark,
//! verify against the brute-force oracle, or print the oracle answer.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use adit_core::harness::{
    build_instance, default_config, generate_query, rows_to_csv, run_benchmark, run_policy,
    write_svg_plots, ExperimentConfig, PolicyChoice, QuerySpec,
};
use adit_core::harness::brute_force_top_k;
use adit_core::{query_answer_time, system_effort};

#[derive(Parser)]
#[command(name = "adit", about = "Distributed top-k query simulator", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Experiment config file (JSON); a built-in default is used when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the peer count.
    #[arg(long)]
    peers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Executes one query and prints the top-k with its metrics.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Fetch-size policy (fixed1, fixed_k, ceil_k_over_n,
        /// floor_k_over_n, basic, enhanced, arto).
        #[arg(long, default_value = "enhanced")]
        policy: String,
        #[arg(long, default_value_t = 10)]
        k: usize,
        /// Number of query restrictions.
        #[arg(long, default_value_t = 4)]
        restrictions: usize,
    },
    /// Runs the full policy sweep and writes a results CSV.
    Bench {
        #[command(flatten)]
        common: CommonArgs,
        /// Output CSV path.
        #[arg(long, default_value = "results.csv")]
        out: PathBuf,
        /// Additionally writes SVG ratio charts next to the CSV.
        #[arg(long)]
        plot: bool,
    },
    /// Bench with a brute-force cross-check on every cell; exits 2 on any
    /// mismatch.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Prints the brute-force answer only.
    Oracle {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 4)]
        restrictions: usize,
    },
}

fn load_config(common: &CommonArgs) -> Result<ExperimentConfig, adit_core::Error> {
    let mut config = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => default_config(),
    };
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(peers) = common.peers {
        config.peer_count = peers;
    }
    config.validate()?;
    Ok(config)
}

fn print_results(results: &[adit_core::ScoredObject]) {
    println!("{:<6} {:<12} {:>10}", "peer", "object", "score");
    for entry in results {
        println!(
            "{:<6} {:<12} {:>10.6}",
            entry.origin_peer, entry.object.object_id, entry.score
        );
    }
}

fn cmd_run(
    common: &CommonArgs,
    policy: &str,
    k: usize,
    restrictions: usize,
) -> Result<(), adit_core::Error> {
    let config = load_config(common)?;
    let policy = PolicyChoice::parse(policy)?;
    let instance = build_instance(&config)?;
    let spec = QuerySpec {
        k,
        restriction_count: restrictions,
    };
    let query = generate_query(&instance.schema, &spec, config.seed)?;
    let result = run_policy(&config, &instance, &query, policy)?;
    print_results(&result.results);
    println!();
    println!("policy:        {}", policy.name());
    println!("iterations:    {}", result.traces.len());
    println!("messages:      {}", result.ledger.total_messages());
    println!("objects moved: {}", result.ledger.total_objects_moved());
    println!("SE  (s):       {}", system_effort(&result.ledger));
    println!("QAT (s):       {}", query_answer_time(&result.ledger));
    if result.short_result {
        println!("note: short result (network holds fewer than k objects)");
    }
    Ok(())
}

fn cmd_bench(common: &CommonArgs, out: &PathBuf, plot: bool) -> Result<(), adit_core::Error> {
    let config = load_config(common)?;
    let rows = run_benchmark(&config, false)?;
    std::fs::write(out, rows_to_csv(&rows))?;
    println!("wrote {} rows to {}", rows.len(), out.display());
    if plot {
        for path in write_svg_plots(&rows, out)? {
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn cmd_verify(common: &CommonArgs, out: Option<&PathBuf>) -> Result<(), adit_core::Error> {
    let config = load_config(common)?;
    let rows = run_benchmark(&config, true)?;
    if let Some(out) = out {
        std::fs::write(out, rows_to_csv(&rows))?;
    }
    println!("verified {} cells against the brute-force oracle", rows.len());
    Ok(())
}

fn cmd_oracle(common: &CommonArgs, k: usize, restrictions: usize) -> Result<(), adit_core::Error> {
    let config = load_config(common)?;
    let instance = build_instance(&config)?;
    let spec = QuerySpec {
        k,
        restriction_count: restrictions,
    };
    let query = generate_query(&instance.schema, &spec, config.seed)?;
    let results = brute_force_top_k(&instance.stores, &query, &instance.schema, k)?;
    print_results(&results);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run {
            common,
            policy,
            k,
            restrictions,
        } => cmd_run(common, policy, *k, *restrictions),
        Command::Bench { common, out, plot } => cmd_bench(common, out, *plot),
        Command::Verify { common, out } => cmd_verify(common, out.as_ref()),
        Command::Oracle {
            common,
            k,
            restrictions,
        } => cmd_oracle(common, *k, *restrictions),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err @ adit_core::Error::OracleMismatch { .. }) => {
            eprintln!("oracle mismatch: {err}");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
