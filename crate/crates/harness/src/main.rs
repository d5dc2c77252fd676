//! Command-line driver: single-algorithm runs, grid sweeps from key=value
//! files, and verification suites. Exit code 0 iff everything requested
//! passed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qsearch_harness::record::emit_csv;
use qsearch_harness::sweep::{
    parse_backend, run_sweep, Algorithm, SweepOutcome, SweepSpec,
};
use qsearch_harness::verify::{run_suite, SUITES};

#[derive(Parser)]
#[command(name = "qsearch", about = "Query-exact simulator for search, counting and summing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Domain size(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Vec<u64>,
    /// Marked count(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    k: Vec<u64>,
    /// Failure budget(s).
    #[arg(long, value_delimiter = ',')]
    rho: Vec<f64>,
    /// Relative accuracy target(s).
    #[arg(long, value_delimiter = ',')]
    delta: Vec<f64>,
    /// Work-balance parameter(s); "auto" picks the optimum.
    #[arg(long, value_delimiter = ',')]
    lambda: Vec<String>,
    /// Head fraction(s); "auto" derives from (n, delta, rho).
    #[arg(long, value_delimiter = ',')]
    p: Vec<String>,
    /// Independent trials per grid cell.
    #[arg(long, default_value_t = 100)]
    trials: u64,
    /// Master seed; every trial seed derives from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Search engine: closed-form rotation or dense statevector.
    #[arg(long, default_value = "rotation")]
    backend: String,
    /// Fixed instance file replacing the random generator.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Find all marked elements of each instance.
    Multifind(RunArgs),
    /// Approximate the sum of each instance's entries.
    ApproxSum(RunArgs),
    /// Estimate the marked count within a factor [1/2, 3/2].
    Count(RunArgs),
    /// Run a grid sweep described by a key=value file.
    Sweep { spec_file: PathBuf },
    /// Run a verification suite.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn opt_f64_list(values: &[String]) -> Result<Vec<Option<f64>>, qsearch_core::Error> {
    values
        .iter()
        .map(|s| {
            if s == "auto" {
                Ok(None)
            } else {
                s.parse()
                    .map(Some)
                    .map_err(|_| qsearch_core::Error::Parse(format!("bad real {s:?}")))
            }
        })
        .collect()
}

fn spec_from_args(algorithm: Algorithm, args: &RunArgs) -> Result<SweepSpec, qsearch_core::Error> {
    let mut spec = SweepSpec { algorithm, ..SweepSpec::default() };
    if !args.n.is_empty() {
        spec.n = args.n.clone();
    }
    if !args.k.is_empty() {
        spec.k = args.k.clone();
    }
    if !args.rho.is_empty() {
        spec.rho = args.rho.clone();
    }
    if !args.delta.is_empty() {
        spec.delta = args.delta.clone();
    }
    if !args.lambda.is_empty() {
        spec.lambda = opt_f64_list(&args.lambda)?;
    }
    if !args.p.is_empty() {
        spec.p = opt_f64_list(&args.p)?;
    }
    spec.trials = args.trials;
    spec.seed = args.seed;
    spec.backend = parse_backend(&args.backend)?;
    spec.out = args.out.clone();
    spec.input = args.input.clone();
    Ok(spec)
}

fn emit(spec: &SweepSpec, outcome: &SweepOutcome) -> Result<(), qsearch_core::Error> {
    match &spec.out {
        Some(path) => {
            let file = std::fs::File::create(path)?;
            emit_csv(file, &outcome.records)?;
        }
        None => emit_csv(std::io::stdout().lock(), &outcome.records)?,
    }
    Ok(())
}

fn run_spec(spec: &SweepSpec) -> Result<bool, qsearch_core::Error> {
    let outcome = run_sweep(spec);
    emit(spec, &outcome)?;
    for e in &outcome.cell_errors {
        eprintln!("skipped: {e}");
    }
    let successes = outcome.records.iter().filter(|r| r.success).count();
    eprintln!(
        "{} records, {} successes, {} cells skipped",
        outcome.records.len(),
        successes,
        outcome.cell_errors.len()
    );
    Ok(outcome.cell_errors.is_empty())
}

fn run() -> Result<bool, qsearch_core::Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Multifind(args) => run_spec(&spec_from_args(Algorithm::MultiFind, &args)?),
        Command::ApproxSum(args) => run_spec(&spec_from_args(Algorithm::ApproxSum, &args)?),
        Command::Count(args) => run_spec(&spec_from_args(Algorithm::Count, &args)?),
        Command::Sweep { spec_file } => {
            let text = std::fs::read_to_string(&spec_file)?;
            run_spec(&SweepSpec::parse(&text)?)
        }
        Command::Verify { suite, seed } => {
            if !SUITES.contains(&suite.as_str()) {
                return Err(qsearch_core::Error::Parse(format!(
                    "unknown suite {suite:?}; known: {}",
                    SUITES.join(", ")
                )));
            }
            let checks = run_suite(&suite, seed)?;
            let mut all = true;
            for c in &checks {
                let verdict = if c.pass { "PASS" } else { "FAIL" };
                println!("{verdict} {}: {}", c.name, c.detail);
                all &= c.pass;
            }
            Ok(all)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
