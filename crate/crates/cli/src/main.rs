//! `cnls`: ground states, dynamics and potential-well experiments for
//! focusing coupled NLS systems.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Failure;
use config::RunConfig;

#[derive(Parser)]
#[command(name = "cnls", version, about = "Coupled NLS ground states, dynamics and potential-well experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the ground state and write the profile file.
    Ground(RunArgs),
    /// Evolve initial data and write the trace.
    Evolve(RunArgs),
    /// Classify a state relative to the potential well.
    Classify(RunArgs),
    /// Evolve dilations of the ground state.
    Instability(RunArgs),
    /// Scan the cross coupling and compare vector and semitrivial states.
    #[command(name = "sweep-mu")]
    SweepMu(RunArgs),
    /// Run the property suites.
    Check(CheckArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct CheckArgs {
    /// Optional config supplying the corpus seed.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
}

fn init_threads(jobs: Option<usize>) -> Result<(), Failure> {
    match jobs {
        None => Ok(()),
        Some(0) => Err(Failure::Config(config::ConfigError::Invalid("--jobs must be at least 1".into()))),
        Some(n) => {
            // A second initialization only happens in-process; keep the first pool.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            Ok(())
        }
    }
}

fn report(err: &Failure) {
    match err {
        Failure::Config(e) => eprintln!("error = ConfigError\nmessage = {e}"),
        Failure::MissingDependency(p) => eprintln!("error = MissingDependency\nmessage = {} not found", p.display()),
        Failure::Compute(e) => eprintln!("error = {}\nmessage = {e}", e.kind()),
        Failure::SuitesFailed(names) => eprintln!("error = SuitesFailed\nmessage = {}", names.join(", ")),
    }
}

fn run_experiment(name: &str, args: RunArgs, run: fn(&RunConfig) -> Result<(), Failure>) -> Result<(), Failure> {
    init_threads(args.jobs)?;
    let cfg = RunConfig::load(&args.config, args.out.as_deref())?;
    run(&cfg).inspect_err(|e| commands::write_failure(name, &cfg, e))
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Ground(a) => run_experiment("ground", a, commands::ground),
        Command::Evolve(a) => run_experiment("evolve", a, commands::evolve_cmd),
        Command::Classify(a) => run_experiment("classify", a, commands::classify_cmd),
        Command::Instability(a) => run_experiment("instability", a, commands::instability_cmd),
        Command::SweepMu(a) => run_experiment("sweep-mu", a, commands::sweep_mu_cmd),
        Command::Check(a) => {
            init_threads(a.jobs)?;
            let seed = match &a.config {
                Some(path) => RunConfig::load(path, a.out.as_deref())?.seed,
                None => 0,
            };
            commands::check(seed)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(&e);
            ExitCode::from(e.exit_code())
        }
    }
}
