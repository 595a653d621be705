//! `chemoa` command-line front end: `run`, `oracle` and `report`.

use std::path::PathBuf;
use std::process::ExitCode;

use chemoa::evolve::{Algorithm, OperatorParams};
use chemoa::harness::{emit_report, oracle_vus, run_experiment, HarnessError, RunConfig};
use chemoa::par::Execution;
use chemoa::problems::Problem;
use clap::{Args, Parser, Subcommand};

/// Caps the number of worker threads.
const THREADS_VAR: &str = "CHEMOA_THREADS";

#[derive(Parser, Debug)]
#[command(name = "chemoa", version, about = "3-D ROC convex-hull evolutionary optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run repeated seeded experiments and write their artifacts.
    Run(RunArgs),
    /// Compare the VUS of a sampled true front with a Monte-Carlo estimate.
    Oracle(OracleArgs),
    /// Aggregate experiment directories into a mean/std table.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// zejd1..zejd3, zed1..zed3 or rules(n,seed)
    #[arg(long)]
    problem: String,
    /// 3dch, nsga2 or sms
    #[arg(long)]
    algo: Algorithm,
    #[arg(long)]
    pop: usize,
    #[arg(long)]
    evals: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    #[arg(long)]
    out: PathBuf,
    /// Write wall_ms = 0 so repeated executions give byte-identical files.
    #[arg(long)]
    no_timing: bool,
    /// Run repeats and ΔVUS loops on the calling thread only.
    #[arg(long)]
    sequential: bool,
    /// Crossover probability.
    #[arg(long)]
    pc: Option<f64>,
    /// Per-gene mutation probability (default 1/n).
    #[arg(long)]
    pm: Option<f64>,
    /// SBX distribution index.
    #[arg(long)]
    eta_c: Option<f64>,
    /// Polynomial mutation distribution index.
    #[arg(long)]
    eta_m: Option<f64>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long)]
    problem: String,
    #[arg(long)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Experiment directories, each holding a runs.csv.
    #[arg(required = true)]
    dirs: Vec<PathBuf>,
    /// Also write the table as CSV to this path.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn configure_threads() -> Result<(), HarnessError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| HarnessError::Config(format!("{THREADS_VAR} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| HarnessError::Config(format!("cannot size the thread pool: {e}")))
}

fn run(args: RunArgs) -> Result<(), HarnessError> {
    let mut config = RunConfig::new(
        args.problem,
        args.algo,
        args.pop,
        args.evals,
        args.seed,
        args.repeats,
        args.out,
    );
    config.record_timing = !args.no_timing;
    if args.sequential {
        config.execution = Execution::Sequential;
    }
    if args.pc.is_some() || args.pm.is_some() || args.eta_c.is_some() || args.eta_m.is_some() {
        let problem: Problem = config.problem.parse()?;
        let defaults = OperatorParams::for_genotype(&problem.genotype_kind());
        config.operators = Some(OperatorParams {
            crossover_probability: args.pc.unwrap_or(defaults.crossover_probability),
            mutation_probability: args.pm.unwrap_or(defaults.mutation_probability),
            eta_c: args.eta_c.unwrap_or(defaults.eta_c),
            eta_m: args.eta_m.unwrap_or(defaults.eta_m),
        });
    }

    let records = run_experiment(&config)?;
    for r in &records {
        let m = &r.result.metrics;
        println!(
            "run {} seed {}: vus {:.6e} gini {:.4e} hypervolume {:.6e} wall_ms {}",
            r.run_id, r.seed, m.vus, m.gini, m.hypervolume, m.wall_time_ms
        );
    }
    println!("wrote {}", config.out_dir.display());
    Ok(())
}

fn oracle(args: OracleArgs) -> Result<(), HarnessError> {
    let problem: Problem = args.problem.parse()?;
    let report = oracle_vus(&problem, args.samples, args.seed)?;
    println!("problem       {}", report.problem);
    println!("samples       {}", report.samples);
    println!("front_vus     {:.9e}", report.front_vus);
    println!("mc_volume     {:.9e}", report.mc_volume);
    println!("mc_std_error  {:.3e}  ({} samples)", report.mc_std_error, report.mc_samples);
    println!("gap           {:+.3e}", report.gap);
    Ok(())
}

fn report(args: ReportArgs) -> Result<(), HarnessError> {
    let table = emit_report(&args.dirs)?;
    print!("{}", table.to_text());
    if let Some(path) = args.csv {
        std::fs::write(&path, table.to_csv()).map_err(|source| HarnessError::Io { path, source })?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = configure_threads().and_then(|()| match cli.command {
        Command::Run(args) => run(args),
        Command::Oracle(args) => oracle(args),
        Command::Report(args) => report(args),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
