use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rrcma::benchmarks::{make_problem, CATALOG};
use rrcma::harness::analysis::{write_ecdf, write_rrf_report};
use rrcma::harness::{aggregate_rrf, compute_ecdf, run_experiment, verify_dir, ExperimentConfig};
use rrcma::{Error, HvConfig};

#[derive(Parser)]
#[command(name = "rrcma", version, about = "Restart CMA-ES experiments with repelling restarts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment grid and write its logs.
    Run(RunArgs),
    /// Compute per-run RRF and grouped summaries.
    Rrf(ReportArgs),
    /// Compute fixed-target ECDF curves.
    Ecdf(ReportArgs),
    /// List the benchmark catalog.
    ListProblems(ListArgs),
    /// Check the logged invariants of an experiment directory.
    Verify { dir: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    /// TOML file with the same keys as the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated problem names.
    #[arg(long)]
    problem: Option<String>,
    /// Comma-separated dimensions.
    #[arg(long)]
    dim: Option<String>,
    /// Instance list such as `0-9,12`.
    #[arg(long)]
    instances: Option<String>,
    /// Comma-separated restart strategies: restart, ipop, bipop.
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    repelling: Option<String>,
    /// Comma-separated coverage factors.
    #[arg(long = "coverage-c")]
    coverage_c: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    sigma0: Option<String>,
    /// Evaluations per run; defaults to 10000 times the dimension.
    #[arg(long)]
    budget: Option<String>,
    #[arg(long)]
    runs: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    out: Option<String>,
}

impl RunArgs {
    fn overrides(&self) -> Vec<(String, String)> {
        [
            ("problem", &self.problem),
            ("dim", &self.dim),
            ("instances", &self.instances),
            ("strategy", &self.strategy),
            ("repelling", &self.repelling),
            ("coverage-c", &self.coverage_c),
            ("gamma", &self.gamma),
            ("sigma0", &self.sigma0),
            ("budget", &self.budget),
            ("runs", &self.runs),
            ("seed", &self.seed),
            ("out", &self.out),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
        .collect()
    }
}

#[derive(Args)]
struct ReportArgs {
    /// Experiment directories to combine.
    #[arg(required = true)]
    dirs: Vec<PathBuf>,
    /// Where to write the CSV tables; defaults to the first directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ListArgs {
    /// Write `<name>_d<dim>_i<instance>.optima.csv` files here.
    #[arg(long)]
    export_optima: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    instance: u64,
}

fn exit_code(err: &Error) -> ExitCode {
    match err {
        Error::Config { .. } => ExitCode::from(2),
        _ => ExitCode::from(3),
    }
}

fn run(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Run(args) => {
            let file = match &args.config {
                Some(p) => Some(fs::read_to_string(p).map_err(|e| Error::config("config", format!("{}: {e}", p.display())))?),
                None => None,
            };
            let cfg = ExperimentConfig::resolve(file.as_deref(), &args.overrides())?;
            let manifest = run_experiment(&cfg)?;
            println!("{} runs written to {}", manifest.runs.len(), cfg.out.display());
        }
        Command::Rrf(args) => {
            let report = aggregate_rrf(&args.dirs, HvConfig::default())?;
            let out = args.out.unwrap_or_else(|| args.dirs[0].clone());
            write_rrf_report(&report, &out)?;
            println!("function,dimension,strategy,runs,mean,median,q1,q3");
            for s in &report.summary {
                println!(
                    "{},{},{},{},{:.4},{:.4},{:.4},{:.4}",
                    s.function, s.dimension, s.strategy, s.runs, s.mean, s.median, s.q1, s.q3
                );
            }
        }
        Command::Ecdf(args) => {
            let points = compute_ecdf(&args.dirs)?;
            let out = args.out.unwrap_or_else(|| args.dirs[0].clone());
            write_ecdf(&points, &out)?;
            println!("{} ECDF points written to {}", points.len(), out.join("ecdf.csv").display());
        }
        Command::ListProblems(args) => {
            for entry in CATALOG {
                println!("{:<24} d={:<6} {}", entry.name, entry.dims.to_string(), entry.summary);
            }
            if let Some(dir) = args.export_optima {
                fs::create_dir_all(&dir).map_err(|e| Error::Report(format!("{}: {e}", dir.display())))?;
                for entry in CATALOG.iter().filter(|e| e.dims.allows(args.dim)) {
                    let problem = make_problem(entry.name, args.dim, args.instance)?;
                    let path = dir.join(format!("{}_d{}_i{}.optima.csv", entry.name, args.dim, args.instance));
                    let file = fs::File::create(&path).map_err(|e| Error::Report(format!("{}: {e}", path.display())))?;
                    problem.write_optima_csv(file)?;
                }
            }
        }
        Command::Verify { dir } => {
            let report = verify_dir(&dir)?;
            for v in &report.violations {
                eprintln!("{v}");
            }
            println!(
                "{} runs, {} restarts, {} violation(s)",
                report.runs,
                report.restarts,
                report.violations.len()
            );
            if !report.is_clean() {
                return Err(Error::Report("log invariants violated".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
