use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use assign3d::planar::Mode;
use assign3d_cli::{
    manifest_path, read_csv, run, summarize, write_csv, ExperimentConfig, Manifest, Solver, Task,
};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

const USAGE: u8 = 1;
const RUNTIME: u8 = 2;

#[derive(Parser)]
#[command(
    name = "assign3d",
    version,
    about = "Random three-dimensional assignment experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plane-by-plane greedy for the axial problem.
    SolveAxial(RunArgs),
    /// Alternating-path-tree heuristic for the planar problem.
    SolvePlanar(RunArgs),
    /// Alternating minimization over the two permutation factors.
    SolveBilinear(RunArgs),
    /// A heuristic next to the exact optimum (small n only).
    Oracle {
        #[arg(long, default_value = "planar")]
        solver: Solver,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Row-minimum lower bound for any dimension up to 5.
    Bounds(RunArgs),
    /// Replicates of one solver over a list of sizes.
    Sweep {
        solver: Solver,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Per-n statistics and log-log slope of a results CSV.
    Summarize {
        csv: PathBuf,
        /// Also write the summary as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-run the configuration stored in a manifest.
    Replay {
        manifest: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Side lengths; repeat the flag or give a comma list.
    #[arg(long = "n", value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    d: usize,
    /// Tree depth parameter of the planar heuristic.
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[arg(long, default_value_t = 1)]
    reps: u64,
    /// Replicate r uses seed + r.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `empirical` (cumulative thresholds) or `refresh` (redraw revealed entries).
    #[arg(long, default_value = "empirical")]
    mode: Mode,
    #[arg(long, default_value_t = 10)]
    max_escalations: u32,
    /// Extra random starts for the bilinear heuristic.
    #[arg(long, default_value_t = 0)]
    restarts: usize,
    /// Sweep cap for the bilinear heuristic.
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    /// CSV destination; a manifest is written next to it. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-run time cap in seconds.
    #[arg(long)]
    time_guard: Option<f64>,
}

impl RunArgs {
    fn into_config(self, task: Task) -> (ExperimentConfig, Option<PathBuf>) {
        let cfg = ExperimentConfig {
            task,
            n_list: self.n,
            d: self.d,
            k: self.k,
            reps: self.reps,
            base_seed: self.seed,
            mode: self.mode,
            max_escalations: self.max_escalations,
            restarts: self.restarts,
            max_iters: self.max_iters,
            time_guard_secs: self.time_guard,
        };
        (cfg, self.out)
    }
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: USAGE,
        message: message.into(),
    }
}

fn runtime(message: impl std::fmt::Display) -> Failure {
    Failure {
        code: RUNTIME,
        message: message.to_string(),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| runtime(format!("{}: {e}", path.display())))
}

fn execute(cfg: ExperimentConfig, out: Option<PathBuf>) -> Result<(), Failure> {
    cfg.validate().map_err(usage)?;
    let start = Instant::now();
    let rows = run(&cfg).map_err(runtime)?;
    let wall = start.elapsed();
    match out {
        Some(path) => {
            write_csv(create(&path)?, &rows).map_err(runtime)?;
            let manifest = Manifest::new(cfg, rows.len(), wall);
            let mpath = manifest_path(&path);
            let mut w = create(&mpath)?;
            serde_json::to_writer_pretty(&mut w, &manifest).map_err(runtime)?;
            writeln!(w).and_then(|_| w.flush()).map_err(runtime)?;
        }
        None => write_csv(io::stdout().lock(), &rows).map_err(runtime)?,
    }
    Ok(())
}

fn dispatch(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::SolveAxial(a) => {
            let (c, o) = a.into_config(Task::Solve(Solver::Axial));
            execute(c, o)
        }
        Command::SolvePlanar(a) => {
            let (c, o) = a.into_config(Task::Solve(Solver::Planar));
            execute(c, o)
        }
        Command::SolveBilinear(a) => {
            let (c, o) = a.into_config(Task::Solve(Solver::Bilinear));
            execute(c, o)
        }
        Command::Oracle { solver, run } => {
            let (c, o) = run.into_config(Task::Oracle(solver));
            execute(c, o)
        }
        Command::Bounds(a) => {
            let (c, o) = a.into_config(Task::Bounds);
            execute(c, o)
        }
        Command::Sweep { solver, run } => {
            let (c, o) = run.into_config(Task::Solve(solver));
            execute(c, o)
        }
        Command::Summarize { csv, out } => {
            let file = File::open(&csv).map_err(|e| runtime(format!("{}: {e}", csv.display())))?;
            let rows = read_csv(io::BufReader::new(file))
                .map_err(|e| runtime(format!("{}: {e}", csv.display())))?;
            let summary = summarize(&rows);
            print!("{}", summary.render());
            if let Some(path) = out {
                summary.write_csv(create(&path)?).map_err(runtime)?;
            }
            Ok(())
        }
        Command::Replay { manifest, out } => {
            let file = File::open(&manifest)
                .map_err(|e| runtime(format!("{}: {e}", manifest.display())))?;
            let m: Manifest = serde_json::from_reader(io::BufReader::new(file))
                .map_err(|e| runtime(format!("{}: {e}", manifest.display())))?;
            execute(m.config, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(USAGE),
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
