use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mompc_cli::config::{parse_config, ExperimentConfig};
use mompc_cli::experiment::{compare_rules, run_experiment};
use mompc_cli::{CliError, RunOutcome};
use mompc_core::mpc::SelectionRule;

#[derive(Parser)]
#[command(
    name = "mompc",
    about = "Multiobjective MPC experiment runner",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a closed-loop experiment and write trace, report, and plots.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run an experiment and record the nondominated set at one
    /// iteration.
    Front {
        config: PathBuf,
        #[arg(long = "at-iteration")]
        at_iteration: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the same experiment under several subsequent-selection rules.
    Compare {
        config: PathBuf,
        /// Comma-separated rules, e.g. `ideal,min1,min2`.
        #[arg(long, value_delimiter = ',', required = true)]
        rules: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn resolve_out(cfg: &ExperimentConfig, flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("mompc_out"))
}

fn parse_rule_name(name: &str) -> Result<(String, SelectionRule), CliError> {
    let rule = match name {
        "ideal" => SelectionRule::Ideal,
        _ => match name.strip_prefix("min").and_then(|i| i.parse::<usize>().ok()) {
            Some(i) if i >= 1 => SelectionRule::MinObjective(i - 1),
            _ => {
                return Err(CliError::Config(format!(
                    "unknown rule `{name}` (expected `ideal` or `min<i>`)"
                )))
            }
        },
    };
    Ok((name.to_string(), rule))
}

fn dispatch(cli: Cli) -> Result<RunOutcome, CliError> {
    match cli.command {
        Command::Run { config, out, seed } => {
            let mut cfg = parse_config(&config)?;
            if let Some(seed) = seed {
                cfg.mpc.solver.seed = seed;
            }
            let out_dir = resolve_out(&cfg, out);
            run_experiment(&cfg, &out_dir).map(|a| a.outcome)
        }
        Command::Front {
            config,
            at_iteration,
            out,
            seed,
        } => {
            let mut cfg = parse_config(&config)?;
            if at_iteration >= cfg.mpc.iterations {
                return Err(CliError::Config(format!(
                    "--at-iteration {at_iteration} is beyond K = {}",
                    cfg.mpc.iterations
                )));
            }
            cfg.mpc.front_at = vec![at_iteration];
            if let Some(seed) = seed {
                cfg.mpc.solver.seed = seed;
            }
            let out_dir = resolve_out(&cfg, out);
            run_experiment(&cfg, &out_dir).map(|a| a.outcome)
        }
        Command::Compare {
            config,
            rules,
            out,
            seed,
        } => {
            let mut cfg = parse_config(&config)?;
            if let Some(seed) = seed {
                cfg.mpc.solver.seed = seed;
            }
            let rules = rules
                .iter()
                .map(|r| parse_rule_name(r))
                .collect::<Result<Vec<_>, _>>()?;
            let out_dir = resolve_out(&cfg, out);
            compare_rules(&cfg, &rules, &out_dir)
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(outcome) => {
            if outcome != RunOutcome::AllPassed {
                eprintln!(
                    "{}",
                    match outcome {
                        RunOutcome::ChecksFailed => "one or more diagnostic checks failed",
                        RunOutcome::SolverFailure => "solver failure; partial artifacts written",
                        RunOutcome::AllPassed => unreachable!(),
                    }
                );
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
