use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod error;
mod gridfile;
mod image;
mod phantom;

use error::CliError;

/// X-ray transform on the Poincaré disk: phantoms, forward and back
/// projection, SVD reconstruction, range tests and the acceptance self-test.
#[derive(Debug, Parser)]
#[command(name = "hyperxray", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Weight exponent, gamma > -1 (selftest: restrict the suite to this weight).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Band limit N.
    #[arg(long, global = true, default_value_t = 8)]
    pub band: usize,
    /// Grid size `AxB` (data: N_beta x N_alpha, disk: N_angle x N_radial).
    #[arg(long, global = true, value_parser = parse_grid)]
    pub grid: Option<(usize, usize)>,
    /// Quadrature level: line-rule step 2^-level and 2^(level+1) fiber nodes.
    #[arg(long, global = true, default_value_t = 6)]
    pub quad: u32,
    /// Tolerance for the checks a command performs.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol: f64,
    /// Seed for random phantoms and the self-test probes.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Tikhonov parameter for reconstruction; 0 truncates.
    #[arg(long, global = true, default_value_t = 0.0)]
    pub filter: f64,
    #[arg(long = "in", global = true)]
    pub input: Option<PathBuf>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Comma-separated check groups for selftest.
    #[arg(long, global = true)]
    pub only: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// How gridded data is evaluated off the nodes.
    #[arg(long, global = true, value_enum, default_value_t = Interp::Class)]
    pub interp: Interp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Pgm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Interp {
    Raw,
    Class,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a phantom on a disk grid (or a data grid for data-* descriptors).
    Phantom { descriptor: String },
    /// Forward transform of a phantom descriptor or of a disk grid (--in).
    Forward { descriptor: Option<String> },
    /// Backprojection of a data grid (--in) or a data-* descriptor.
    Backproject { descriptor: Option<String> },
    /// SVD reconstruction of a data grid.
    Reconstruct {
        /// Ground-truth disk grid for error reporting.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Moment, decay and boundary-operator range tests on a data grid.
    RangeCheck {
        /// Sobolev order of the decay diagnostic.
        #[arg(long, default_value_t = 1.0)]
        s: f64,
    },
    /// Singular-basis coefficients of a grid.
    Spectrum,
    /// Run the acceptance matrix.
    Selftest,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("grid '{s}' must look like 64x10"))?;
    let a = a.trim().parse().map_err(|_| format!("bad grid size '{a}'"))?;
    let b = b.trim().parse().map_err(|_| format!("bad grid size '{b}'"))?;
    Ok((a, b))
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("XRAY_NUM_THREADS") {
        let n: usize = v.parse().map_err(|_| CliError::Input(format!("XRAY_NUM_THREADS='{v}' is not a count")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Input(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    let g = &cli.global;
    match cli.command {
        Command::Phantom { descriptor } => commands::phantom(g, &descriptor),
        Command::Forward { descriptor } => commands::forward(g, descriptor.as_deref()),
        Command::Backproject { descriptor } => commands::backproject(g, descriptor.as_deref()),
        Command::Reconstruct { truth } => commands::reconstruct(g, truth.as_deref()),
        Command::RangeCheck { s } => commands::range_check(g, s),
        Command::Spectrum => commands::spectrum(g),
        Command::Selftest => commands::selftest(g),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hyperxray: {e}");
            e.exit_code()
        }
    }
}
