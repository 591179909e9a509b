use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use idan::bench::{self, BenchConfig, StateSpaceReport};
use idan::motion::MotionPlannerHandle;
use idan::network::{replay, solve, ActionTrace, Outcome, SolveConfig};
use idan::sim::{file, generate_scene, GenParams};

/// Exit status of `solve` when the network hits its depth limit.
const EXIT_EXHAUSTED: u8 = 3;

#[derive(Parser)]
#[command(name = "idan", version, about = "Retrieve a target object from table-top clutter")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random scene file.
    Gen {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        objects: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve one scene, print the episode log and optionally save the trace.
    Solve {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long, value_enum, default_value_t = Planner::Rrt)]
        planner: Planner,
        #[arg(long, default_value_t = 0.0)]
        pfail: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Maximum network depth; ten per movable object when omitted.
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Re-execute a trace on a fresh simulator.
    Replay {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        scene: PathBuf,
        /// Exit with an error on any violation.
        #[arg(long)]
        check: bool,
    },
    /// Run a benchmark sweep, or print state-space counts.
    Bench(BenchArgs),
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct BenchArgs {
    #[command(subcommand)]
    report: Option<BenchReport>,
    /// Sweep configuration (JSON); defaults apply to missing fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Per-episode CSV; summary and depth tables go next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum BenchReport {
    /// Propositional versus AND/OR state counts.
    StateSpace {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        objects: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Planner {
    Rrt,
    Grid,
}

impl Planner {
    fn handle(self) -> MotionPlannerHandle {
        match self {
            Planner::Rrt => MotionPlannerHandle::rrt(),
            Planner::Grid => MotionPlannerHandle::grid(),
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen { objects, seed, out } => {
            let scene = generate_scene(objects as usize, seed, &GenParams::default())?;
            file::save(&scene, &out)?;
            println!("wrote {} ({} objects, target {})", out.display(), objects, scene.target_id);
        }
        Command::Solve {
            scene,
            planner,
            pfail,
            seed,
            limit,
            trace,
        } => {
            let workspace = file::load(&scene)?;
            let config = SolveConfig {
                planner: planner.handle(),
                grasp_failure_probability: pfail,
                depth_limit: limit,
                ..SolveConfig::default()
            };
            let episode = solve(&workspace, &config, seed)?;
            if let Some(path) = trace {
                episode.trace.save(&path)?;
            }
            writeln!(io::stdout(), "{}", serde_json::to_string_pretty(&episode.log)?)?;
            if episode.log.outcome == Outcome::Exhausted {
                eprintln!("exhausted at depth {}", episode.log.depth);
                return Ok(ExitCode::from(EXIT_EXHAUSTED));
            }
        }
        Command::Replay { trace, scene, check } => {
            let workspace = file::load(&scene)?;
            let trace = ActionTrace::load(&trace)?;
            match replay(&trace, &workspace) {
                Ok(report) => println!("{}", serde_json::to_string_pretty(&report)?),
                Err(e) if check => bail!(e),
                Err(e) => println!("violation: {e}"),
            }
        }
        Command::Bench(args) => match args.report {
            Some(BenchReport::StateSpace { objects }) => {
                print!("{}", StateSpaceReport::new(objects as usize)?.to_text());
            }
            None => {
                let config = match &args.config {
                    Some(path) => BenchConfig::load(path)?,
                    None => BenchConfig::default(),
                };
                let out = args.out.context("--out is required for a sweep")?;
                let episodes = bench::run_bench(&config)?;
                let rows: Vec<_> = episodes.into_iter().map(|e| e.row).collect();
                for p in bench::write_csvs(&out, &rows)? {
                    println!("wrote {}", p.display());
                }
            }
        },
    }
    Ok(ExitCode::SUCCESS)
}
