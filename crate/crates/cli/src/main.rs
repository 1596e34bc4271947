//! `hydromag`: energies, wavefunctions and checks for the planar
//! hydrogen-like atom in a perpendicular magnetic field.

mod commands;
mod config;
mod output;
mod record;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit status with a message for standard error.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub msg: String,
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Failure { code: 1, msg: msg.into() }
    }
    pub fn no_solution(msg: impl Into<String>) -> Self {
        Failure { code: 2, msg: msg.into() }
    }
    pub fn numeric(msg: impl Into<String>) -> Self {
        Failure { code: 3, msg: msg.into() }
    }
}

impl From<hydromag::Error> for Failure {
    fn from(e: hydromag::Error) -> Self {
        use hydromag::Error::*;
        match e {
            Domain(_) | Config { .. } => Failure::usage(e.to_string()),
            Numeric(_) | Truncation { .. } | Integrability { .. } => Failure::numeric(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "hydromag", version, about = "Bound states of the planar hydrogen-like atom in a magnetic field")]
pub struct Cli {
    /// Key-value file with physical constants and tolerance defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

/// Either the dimensionless coupling or the physical triple.
#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Dimensionless Coulomb coupling in Landau units.
    #[arg(long, conflicts_with_all = ["z", "b", "mu"])]
    pub a: Option<f64>,
    /// Nuclear charge number.
    #[arg(long, requires_all = ["b", "mu"])]
    pub z: Option<u32>,
    /// Magnetic field in tesla.
    #[arg(long, requires = "z")]
    pub b: Option<f64>,
    /// Reduced mass in kilograms.
    #[arg(long, requires = "z")]
    pub mu: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct TolArgs {
    /// Series truncation tolerance.
    #[arg(long)]
    pub tol_trunc: Option<f64>,
    /// Right end of the evaluation window.
    #[arg(long)]
    pub xmax: Option<f64>,
    /// Points in the ODE residual check.
    #[arg(long)]
    pub residual_points: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Print the case of an (m, energy) pair.
    Classify {
        #[arg(long, allow_negative_numbers = true)]
        m: i32,
        /// Energy in Landau units.
        #[arg(long, allow_negative_numbers = true)]
        energy: f64,
    },
    /// Solve one level and report every admissible root.
    Solve {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, allow_negative_numbers = true)]
        m: i32,
        /// Level index; not used for cases 2 and 5.
        #[arg(long)]
        k: Option<usize>,
        /// Case number 1-6; both series families when omitted.
        #[arg(long)]
        case: Option<u8>,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Sweep a block of (m, k) cells.
    Spectrum {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, allow_negative_numbers = true)]
        m_min: i32,
        #[arg(long, allow_negative_numbers = true)]
        m_max: i32,
        #[arg(long, default_value_t = 1)]
        k_min: usize,
        #[arg(long)]
        k_max: usize,
        /// Series family by case number (1 or 4, 3 or 6); both when omitted.
        #[arg(long)]
        case: Option<u8>,
        /// One row per admissible root instead of one per cell.
        #[arg(long)]
        all_branches: bool,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Sample a radial wavefunction.
    Wavefunction {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, allow_negative_numbers = true, required_unless_present = "from_record")]
        m: Option<i32>,
        #[arg(long, required_unless_present = "from_record")]
        case: Option<u8>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        branch: usize,
        /// JSON record (or array of records) written by `solve` or `spectrum`.
        #[arg(long, conflicts_with_all = ["a", "z", "m", "case", "k"])]
        from_record: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        record_index: usize,
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// Divide by the square root of the norm when it exists.
        #[arg(long)]
        normalize: bool,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Check solved levels against the finite-difference spectrum.
    Verify {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, allow_negative_numbers = true)]
        m: i32,
        #[arg(long, default_value_t = 5)]
        k_max: usize,
        /// Finite-difference domain length.
        #[arg(long)]
        fd_l: Option<f64>,
        /// Finite-difference intervals on the coarse grid.
        #[arg(long)]
        fd_n_grid: Option<usize>,
        #[command(flatten)]
        tol: TolArgs,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("hydromag: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
