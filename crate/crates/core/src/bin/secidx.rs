use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use secidx::cli::{self, RunReport};

/// Security indices, sensor placement and attack simulation.
#[derive(Parser)]
#[command(name = "secidx", version)]
struct Args {
    /// Sampling seed; `SECIDX_SEED` takes precedence when set.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Emit JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,
    /// Append wall-clock time to the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact index by exhaustive search (needs a realization).
    IndexExact {
        model: PathBuf,
        #[arg(long)]
        actuator: Option<String>,
        /// Largest attack set to try.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Robust index from a minimum cut.
    IndexRobust {
        model: PathBuf,
        #[arg(long)]
        actuator: Option<String>,
        /// Also print each flow network as an edge list.
        #[arg(long)]
        dump_graph: bool,
    },
    /// Sensor placement from a request file.
    Place { model: PathBuf, request: PathBuf },
    /// Run an attack scenario.
    Simulate {
        scenario: PathBuf,
        /// Trace CSV path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// States where a new sensor raises the robust index.
    Xset {
        model: PathBuf,
        #[arg(long)]
        actuator: Option<String>,
    },
    /// Flow networks as `src dst capacity` edge lists.
    DumpGraph {
        model: PathBuf,
        #[arg(long)]
        actuator: Option<String>,
    },
}

fn seed(flag: u64) -> Result<u64, secidx::Error> {
    match std::env::var("SECIDX_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| secidx::Error::Parse(format!("SECIDX_SEED={v:?} is not an integer"))),
        Err(_) => Ok(flag),
    }
}

fn run(args: &Args) -> secidx::Result<RunReport> {
    match &args.command {
        Command::IndexExact {
            model,
            actuator,
            budget,
        } => cli::cmd_index_exact(model, actuator.as_deref(), *budget, seed(args.seed)?),
        Command::IndexRobust {
            model,
            actuator,
            dump_graph,
        } => cli::cmd_index_robust(model, actuator.as_deref(), *dump_graph),
        Command::Place { model, request } => cli::cmd_place(model, request),
        Command::Simulate { scenario, out } => cli::cmd_simulate(scenario, out.as_deref()),
        Command::Xset { model, actuator } => cli::cmd_xset(model, actuator.as_deref()),
        Command::DumpGraph { model, actuator } => cli::cmd_dump_graph(model, actuator.as_deref()),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(jobs) = args.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .expect("thread pool is configured once");
    }
    let start = Instant::now();
    match run(&args) {
        Ok(mut report) => {
            if args.timing {
                report.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            }
            if args.json {
                print!("{}", report.render_json());
            } else {
                print!("{}", report.render_text());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
