use std::path::PathBuf;
use std::process::ExitCode;

use bv_noise_cli::config::{ConfigFile, Experiment, ExperimentConfig, Overrides};
use bv_noise_cli::{output, run, CliError, WORKERS_ENV};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bvlab", version, about = "Noisy Bernstein-Vazirani experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Q and C against the scaled disorder strength
    Sweep(Flags),
    /// Q against the squeezing ratio at fixed area
    Squeezed(Flags),
    /// Q - C against n at fixed strengths
    Advantage(Flags),
    /// Moments of ln P and the log-normal prediction
    Clt(Flags),
    /// Fit Q(sigma_bar) curves from a sweep CSV
    Fit(Flags),
}

#[derive(Args)]
struct Flags {
    /// JSON config; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Disorder family (uniform, gaussian, cauchy, discrete, squeezed); comma list for advantage
    #[arg(long)]
    family: Option<String>,
    /// Comma-separated string lengths
    #[arg(long)]
    n: Option<String>,
    /// Inclusive range of string lengths, e.g. 1..25
    #[arg(long = "n-range")]
    n_range: Option<String>,
    /// sigma_bar grid (sweep) or ratio grid (squeezed): "0,0.5,1" or "0:1:21"
    #[arg(long)]
    grid: Option<String>,
    /// Scaled strength(s) for advantage and clt
    #[arg(long = "sigma-bar")]
    sigma_bar: Option<String>,
    /// Cross-section area of the squeezed family
    #[arg(long = "D")]
    area: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Per-estimate Monte Carlo budget
    #[arg(long = "max-samples")]
    max_samples: Option<u64>,
    /// Samples per n for clt
    #[arg(long)]
    samples: Option<u64>,
    /// Fit form: auto, gauss, gauss-quad, gauss-pure
    #[arg(long)]
    model: Option<String>,
    /// Sweep CSV to fit
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output CSV path (stdout if absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn configure_workers() -> Result<(), CliError> {
    let Ok(text) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let workers: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&w| w > 0)
        .ok_or_else(|| CliError::Config(format!("{WORKERS_ENV} must be a positive integer, got {text:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot start {workers} workers: {e}")))
}

fn execute(cli: Cli) -> Result<(), CliError> {
    configure_workers()?;
    let (experiment, flags) = match cli.command {
        Command::Sweep(f) => (Experiment::Sweep, f),
        Command::Squeezed(f) => (Experiment::SqueezedSweep, f),
        Command::Advantage(f) => (Experiment::Advantage, f),
        Command::Clt(f) => (Experiment::Clt, f),
        Command::Fit(f) => (Experiment::Fit, f),
    };
    let file = match &flags.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let overrides = Overrides {
        family: flags.family,
        n: flags.n,
        n_range: flags.n_range,
        grid: flags.grid,
        sigma_bar: flags.sigma_bar,
        area: flags.area,
        seed: flags.seed,
        max_samples: flags.max_samples,
        samples: flags.samples,
        model: flags.model,
        input: flags.input,
        out: flags.out,
    };
    let cfg = ExperimentConfig::resolve(experiment, file, overrides)?;
    let (table, report) = run(&cfg)?;
    let text = table.render();
    match &cfg.output_path {
        Some(path) => output::write_file(path, &text)?,
        None => print!("{text}"),
    }
    if let Some(r) = report {
        eprint!("{r}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bvlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
