use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use contact_flux::{QuadratureGrid, DEFAULT_GRID};
use contact_flux_cli::commands::{
    cmd_cycles, cmd_flow, cmd_flux, cmd_rank, cmd_verify, CliError, FlowArgs, Outcome, Settings,
};
use contact_flux_cli::config::Config;
use contact_flux_cli::report::to_json;

/// Thread count for concurrent suite items.
const THREADS_ENV: &str = "CONTACT_FLUX_THREADS";

#[derive(Parser)]
#[command(name = "contact-flux", version, about = "Flux of strictly contact and symplectic isotopies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Flux of the isotopy generated by a basic Hamiltonian, along both paths.
    Flux {
        #[arg(long)]
        manifold: String,
        #[arg(long = "H", short = 'H')]
        h: String,
        #[arg(long, default_value_t = contact_flux::flux::FLUX_TOL)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Run a verification suite (prop3, reeb, dual-basis, lemma-torus3, mass-flow, symplectic, dynamics, all).
    Verify {
        suite: String,
        #[command(flatten)]
        common: Common,
    },
    /// Rank of the flux image of a family of basic functions.
    Rank {
        #[arg(long)]
        manifold: Option<String>,
        /// Function of the family; repeatable.
        #[arg(long = "H", short = 'H')]
        h: Vec<String>,
        /// Named family from the config file.
        #[arg(long)]
        family: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Integrate the contact vector field of H from a point.
    Flow {
        #[arg(long)]
        manifold: String,
        #[arg(long = "H", short = 'H')]
        h: String,
        /// Comma-separated global coordinates, e.g. "0,0,pi/2".
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value = "1")]
        time: String,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// Number of trajectory points reported.
        #[arg(long, default_value_t = 11)]
        samples: usize,
        /// Allow non-basic H (integrates its general contact vector field).
        #[arg(long)]
        general: bool,
        #[command(flatten)]
        common: Common,
    },
    /// List the homology cycles of a manifold with their volumes.
    Cycles {
        #[arg(long)]
        manifold: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct Common {
    /// Quadrature nodes per torus angle and per sphere direction (adapted upward to the integrand).
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report to a file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// TOML file with custom manifolds, cycles and function families.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Include wall-clock times (reports are otherwise byte-identical across runs).
    #[arg(long)]
    timing: bool,
}

impl Common {
    fn settings(&self) -> Result<Settings, CliError> {
        let grid = match self.resolution {
            Some(0) => return Err(CliError::Usage("--resolution must be positive".into())),
            Some(n) => QuadratureGrid::new(n, n),
            None => DEFAULT_GRID,
        };
        let config = self.config.as_deref().map(Config::load).transpose().map_err(CliError::Usage)?;
        Ok(Settings { grid, timing: self.timing, config })
    }
}

fn emit(outcome: &Outcome, common: &Common) -> Result<(), CliError> {
    let body = match common.format {
        Format::Json => to_json(&outcome.report),
        Format::Text => outcome.text.clone(),
    };
    match &common.output {
        Some(path) => std::fs::write(path, body).map_err(|e| CliError::Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let start = std::time::Instant::now();
    let (mut outcome, common) = match &cli.command {
        Command::Flux { manifold, h, tol, common } => (cmd_flux(manifold, h, *tol, &common.settings()?)?, common),
        Command::Verify { suite, common } => (cmd_verify(suite, &common.settings()?)?, common),
        Command::Rank { manifold, h, family, common } => {
            (cmd_rank(manifold.as_deref(), h, family.as_deref(), &common.settings()?)?, common)
        }
        Command::Flow { manifold, h, point, time, step, samples, general, common } => {
            let args = FlowArgs { manifold, h, point, time, step: *step, samples: *samples, general: *general };
            (cmd_flow(&args, &common.settings()?)?, common)
        }
        Command::Cycles { manifold, common } => (cmd_cycles(manifold, &common.settings()?)?, common),
    };
    if common.timing && outcome.report.get("wall_time_s").is_none() {
        outcome.report["wall_time_s"] = contact_flux_cli::report::num(start.elapsed().as_secs_f64());
    }
    emit(&outcome, common)?;
    Ok(outcome.passed)
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.parse().map_err(|_| CliError::Usage(format!("{THREADS_ENV}={v} is not a thread count")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Failure(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match configure_threads().and_then(|_| run(cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
