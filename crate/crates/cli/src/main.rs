use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use regretls::estimators::estimate;
use regretls::experiment::{
    estimate_json, run_sweep, run_trials, write_sweep_csv, write_trials_csv, ExperimentConfig, ProblemJson,
};
use regretls::oracle::SampleMode;
use regretls::selftest::run_selftest;
use regretls::{Error, Method};

#[derive(Parser)]
#[command(name = "regretls", version, about = "Minimax-regret least squares estimators and experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem (JSON) and print the estimate as JSON.
    Solve {
        /// Problem JSON; stdin when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "c-ls")]
        method: String,
    },
    /// Run the trials of one experiment config and write the results CSV.
    Experiment(RunArgs),
    /// Run a config's rho sweep and write the sweep CSV.
    Sweep(RunArgs),
    /// Run the built-in invariant checks.
    Selftest,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = ["boundary", "uniform"])]
    sample_mode: Option<String>,
}

enum Failure {
    Config(String),
    Solver(String),
    Io(String),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidInput(_) | Error::InvalidParameter(_) => Failure::Config(e.to_string()),
            _ => Failure::Solver(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn load_config(args: &RunArgs) -> Result<ExperimentConfig, Failure> {
    let text = read_text(&args.config)?;
    let mut cfg = ExperimentConfig::from_json(&text)
        .map_err(|e| Failure::Config(format!("{}: {e}", args.config.display())))?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(mode) = &args.sample_mode {
        cfg.sample_mode = mode.parse::<SampleMode>()?;
    }
    Ok(cfg)
}

fn output(out: &Option<PathBuf>, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), Failure> {
    match out {
        Some(path) => {
            let mut f = io::BufWriter::new(fs::File::create(path)?);
            write(&mut f)?;
            f.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { config, out, method } => {
            let text = match &config {
                Some(p) => read_text(p)?,
                None => {
                    let mut s = String::new();
                    io::stdin().read_to_string(&mut s)?;
                    s
                }
            };
            let method: Method = method.parse()?;
            let (inst, mu) = ProblemJson::from_json(&text)?.to_instance()?;
            let est = estimate(method, &inst, mu)?;
            let json = serde_json::to_string_pretty(&estimate_json(&est)).expect("estimate serializes");
            output(&out, |w| writeln!(w, "{json}"))
        }
        Command::Experiment(args) => {
            let cfg = load_config(&args)?;
            let run = run_trials(&cfg)?;
            output(&args.out, |w| write_trials_csv(&run.rows, w))?;
            let summary = serde_json::to_string(&run.summary).expect("summary serializes");
            eprintln!("{summary}");
            if run.summary.estimator_errors.is_empty() {
                Ok(())
            } else {
                Err(Failure::Solver(format!("estimator failures: {:?}", run.summary.estimator_errors)))
            }
        }
        Command::Sweep(args) => {
            let cfg = load_config(&args)?;
            let rows = run_sweep(&cfg)?;
            output(&args.out, |w| write_sweep_csv(&rows, w))
        }
        Command::Selftest => {
            let checks = run_selftest();
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if checks.iter().all(|c| c.passed) {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Checks) => ExitCode::from(1),
    }
}
