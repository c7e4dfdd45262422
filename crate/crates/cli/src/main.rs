#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod phi;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lumpkit::aggregation::AggregationError;
use lumpkit::rules::RuleError;

use config::{Format, RunConfig, DEFAULT_TOL};
use phi::Phi;

/// Explore rule-based models and aggregate their Markov chains.
#[derive(Parser, Debug)]
#[command(name = "lumpkit", version)]
struct Cli {
    /// Tolerance for the lumping condition and transient truncation.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Cap on explored states (default 200000, or LUMPKIT_MAX_STATES).
    #[arg(long, global = true)]
    max_states: Option<usize>,
    /// Uniformization rate as a multiple of the largest exit rate.
    #[arg(long, global = true, default_value_t = 1.05)]
    slack: f64,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the main output here instead of stdout.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate the reachable mixtures of a model (`-` reads stdin).
    Explore { model: PathBuf },
    /// Test the lumping condition and the permutation criterion.
    Check {
        chain: PathBuf,
        #[command(flatten)]
        part: PartitionArgs,
    },
    /// Build the chain over the blocks of a partition.
    Aggregate {
        chain: PathBuf,
        #[command(flatten)]
        part: PartitionArgs,
        /// Also write the partition used, with labels.
        #[arg(long)]
        partition_out: Option<PathBuf>,
        /// Also write the measures used.
        #[arg(long)]
        measures_out: Option<PathBuf>,
    },
    /// Distributions at the given times (steps for stochastic chains).
    Transient {
        chain: PathBuf,
        /// Comma-separated time points.
        #[arg(long = "t", value_delimiter = ',', required = true)]
        times: Vec<f64>,
        /// A distribution file, `uniform`, or `respectful:<block distribution>`.
        #[arg(long)]
        init: String,
        #[command(flatten)]
        part: PartitionArgs,
    },
    /// Stationary distribution of an irreducible chain.
    Stationary { chain: PathBuf },
    /// Spread a distribution over blocks back onto states.
    Deaggregate {
        chain: PathBuf,
        #[command(flatten)]
        part: PartitionArgs,
        /// Distribution keyed by block label.
        #[arg(long)]
        dist: PathBuf,
    },
    /// Generate the built-in case-study models.
    Casestudy {
        #[command(subcommand)]
        which: CaseStudy,
        /// Print the model source or the explored chain.
        #[arg(long, global = true, value_enum, default_value_t = Emit::Model)]
        emit: Emit,
    },
}

#[derive(Args, Debug, Default)]
struct PartitionArgs {
    /// Partition file with blocks of state keys.
    #[arg(long, conflicts_with = "phi")]
    partition: Option<PathBuf>,
    /// Built-in abstraction; needs `--model`.
    #[arg(long, value_enum, requires = "model")]
    phi: Option<Phi>,
    /// Model whose mixtures the chain's states are.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Measures file; uniform measures otherwise.
    #[arg(long)]
    measures: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum CaseStudy {
    /// A–B–C scaffold with four binding rules.
    Scaffold {
        #[arg(long, default_value_t = 1)]
        na: u32,
        #[arg(long, default_value_t = 1)]
        nb: u32,
        #[arg(long, default_value_t = 1)]
        nc: u32,
        /// Rates of bind AB, bind BC, unbind AB, unbind BC.
        #[arg(long, value_delimiter = ',', default_value = "1,1,1,1")]
        rates: Vec<String>,
    },
    /// Two-site A/B polymerization.
    Polymer {
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Rates of bind b–a, unbind b–a, bind r–l, unbind r–l.
        #[arg(long, value_delimiter = ',', default_value = "1,1,1,1")]
        rates: Vec<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Emit {
    Model,
    Chain,
}

/// The chain does not satisfy the lumping condition for the given partition.
#[derive(Debug, thiserror::Error)]
#[error("lumping condition violated: residual {residual:e} exceeds tolerance {tol:e}")]
pub struct Violation {
    pub residual: f64,
    pub tol: f64,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(RuleError::StateCapExceeded { .. }) = cause.downcast_ref() {
            return 2;
        }
        if cause.downcast_ref::<Violation>().is_some() {
            return 3;
        }
        if let Some(AggregationError::ConditionViolated { .. }) = cause.downcast_ref() {
            return 3;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = RunConfig::resolve(cli.tol, cli.max_states, cli.slack, cli.format)
        .and_then(|cfg| commands::run(&cfg, cli.command))
        .and_then(|output| {
            commands::emit(cli.out.as_deref(), &output.text)?;
            output.violation.map_or(Ok(()), |v| Err(v.into()))
        });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
