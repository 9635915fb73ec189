use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use some_core::benchmarks::{manifest, suite_specs};
use some_core::iir::{DEFAULT_NOISE_SEED, IIR_LABEL, N_COEFFS};
use some_core::stats::{mean_std, DEFAULT_SIGNIFICANCE};
use some_core::Variant;
use some_cli::config::{self, Overrides, DEFAULT_OUTPUT, OUTPUT_ENV};
use some_cli::experiment::run_experiment;
use some_cli::report::{load_records, save_records, sci, write_reports};
use some_cli::CliError;

#[derive(Parser)]
#[command(name = "some", version, about = "Single-solution memetic optimizer: experiments and reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write result tables.
    Run(RunArgs),
    /// Print the benchmark manifest.
    List {
        /// Master seed used to generate shifts and rotations.
        #[arg(long, default_value_t = config::DEFAULT_SEED)]
        seed: u64,
    },
    /// Recompute reports from the run files of an earlier experiment.
    Stats {
        /// Experiment directory (defaults to $SOME_OUTPUT_DIR, then ./some-output).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Reference algorithm (default 3SOME if present).
        #[arg(long)]
        reference: Option<String>,
        #[arg(long, default_value_t = DEFAULT_SIGNIFICANCE)]
        significance: f64,
        /// CSV of published numbers (problem, algorithm, mean, std).
        #[arg(long)]
        paper_reported: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    /// TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Problems: all, cec2008, iir or a comma-separated list of ids.
    #[arg(long)]
    suite: Option<String>,
    /// Comma-separated algorithms (3SOME, 1SOME, 2SOME_LM, 2SOME_LS, 2SOME_MS).
    #[arg(long)]
    algo: Option<String>,
    #[arg(long)]
    reference: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    runs: Option<i64>,
    /// Evaluations per run are this times the dimension.
    #[arg(long, allow_hyphen_values = true)]
    budget_multiplier: Option<i64>,
    /// Flat evaluation budget per run, overriding the multiplier.
    #[arg(long, allow_hyphen_values = true)]
    budget: Option<i64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (defaults to $SOME_OUTPUT_DIR, then ./some-output).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    paper_reported: Option<PathBuf>,
    /// Suppress per-batch progress lines.
    #[arg(long)]
    quiet: bool,
}

fn env_output() -> Option<PathBuf> {
    std::env::var_os(OUTPUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?,
        None => String::new(),
    };
    let overrides = Overrides {
        suite: args.suite,
        algorithms: args.algo,
        reference: args.reference,
        runs: args.runs,
        budget_multiplier: args.budget_multiplier,
        budget: args.budget,
        seed: args.seed,
        output: args.out,
        paper_reported: args.paper_reported,
    };
    let cfg = config::resolve(&text, &overrides, env_output())?;
    let quiet = args.quiet;
    let records = run_experiment(&cfg, &mut |r| {
        if !quiet {
            let (mean, std) = mean_std(&r.final_fitness());
            eprintln!("{} {}: {} +- {} over {} runs", r.problem, r.algorithm, sci(mean), sci(std), r.runs.len());
        }
    })?;
    save_records(&records, &cfg.output)?;
    let written = write_reports(&records, cfg.reference, cfg.significance, &cfg.output, cfg.paper_reported.as_deref())?;
    if !quiet {
        eprintln!("wrote {} files to {}", written.len() + records.len(), cfg.output.display());
    }
    Ok(())
}

fn cmd_stats(
    out: Option<PathBuf>,
    reference: Option<String>,
    significance: f64,
    paper_reported: Option<PathBuf>,
) -> Result<(), CliError> {
    if !(significance > 0.0 && significance < 1.0) {
        return Err(CliError::Config(format!("significance must lie in (0, 1), got {significance}")));
    }
    let out = out.or_else(env_output).unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));
    let records = load_records(&out)?;
    let present: Vec<Variant> = records.iter().map(|r| r.algorithm).collect();
    let reference = match reference {
        Some(r) => {
            let v: Variant = r.parse().map_err(|_| CliError::Config(format!("unknown algorithm '{r}'")))?;
            if !present.contains(&v) {
                return Err(CliError::Config(format!("reference {v} has no run files")));
            }
            v
        }
        None if present.contains(&Variant::ThreeSome) => Variant::ThreeSome,
        None => present[0],
    };
    write_reports(&records, reference, significance, &out, paper_reported.as_deref())?;
    Ok(())
}

fn cmd_list(seed: u64) {
    // A closed pipe (e.g. `some list | head`) is not an error.
    let mut out = std::io::stdout().lock();
    let _ = write!(out, "{}", manifest(&suite_specs(seed)));
    let _ = writeln!(out, "{IIR_LABEL}\tiir_filter\t{N_COEFFS}\t0\t1\t{DEFAULT_NOISE_SEED}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(some_cli::EXIT_CONFIG as u8) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::List { seed } => {
            cmd_list(seed);
            Ok(())
        }
        Command::Stats { out, reference, significance, paper_reported } => {
            cmd_stats(out, reference, significance, paper_reported)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
