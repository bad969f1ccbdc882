use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rescue_planner::bound::{verify_bound, BoundError, LinearDynamicGraph};
use rescue_planner::graph::parse_instance;
use rescue_planner::harness::{emit_csv, run_grid, ExperimentGrid};
use rescue_planner::policy::PolicyKind;
use rescue_planner::ptp::solve_bnb;

#[derive(Parser)]
#[command(
    name = "rescue-planner",
    version,
    about = "Supervisor planning for failure-prone robot fleets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment grid and write CSV results.
    Run {
        /// TOML experiment description.
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated policy names; overrides the file.
        #[arg(long, value_delimiter = ',')]
        policies: Option<Vec<PolicyKind>>,
        /// Base seed; overrides the file.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (0 = one per core).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Write per-trial entity logs under OUT/traces.
        #[arg(long)]
        trace: bool,
    },
    /// Solve one static instance with branch and bound.
    Solve { file: PathBuf },
    /// Check the static/dynamic optimality gap bound on random instances.
    VerifyBound {
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 0.05)]
        beta: f64,
        #[arg(long, default_value_t = 0.1)]
        lambda: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            policies,
            seed,
            jobs,
            out,
            trace,
        } => {
            let mut grid = ExperimentGrid::load(&config)?;
            if let Some(p) = policies {
                grid.policies = p;
            }
            if let Some(s) = seed {
                grid.seed = s;
            }
            let trace_dir = trace.then(|| out.join("traces"));
            let records = run_grid(&grid, jobs, trace_dir.as_deref())?;
            emit_csv(&out, &records, &grid.policies)?;
            eprintln!("{} trials written to {}", records.len(), out.display());
        }
        Command::Solve { file } => {
            let text = std::fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let snapshot = parse_instance(&text).with_context(|| format!("parsing {}", file.display()))?;
            let sol = solve_bnb(&snapshot)?;
            println!(
                "{}\t{}\t{}\t{}\t{}",
                sol.path,
                sol.objective,
                sol.stats.nodes,
                sol.stats.cuts,
                sol.stats.elapsed.as_micros()
            );
        }
        Command::VerifyBound {
            instances,
            n,
            alpha,
            beta,
            lambda,
            seed,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut violations = 0;
            println!("instance,gap,bound,holds");
            for k in 0..instances {
                let graph = LinearDynamicGraph::random(&mut rng, n, alpha, beta, lambda);
                let (gap, bound, holds) = match verify_bound(&graph, graph.travel_time_bound()) {
                    Ok(r) => (r.gap, r.bound, true),
                    Err(BoundError::Violation { gap, bound, instance }) => {
                        eprintln!("violation on instance {k}:\n{instance}");
                        (gap, bound, false)
                    }
                    Err(e) => return Err(e.into()),
                };
                violations += usize::from(!holds);
                println!("{k},{gap},{bound},{holds}");
            }
            println!("# {violations} violations in {instances} instances");
            if violations > 0 {
                bail!("bound violated on {violations} instances");
            }
        }
    }
    Ok(())
}
