//! `casq`: CASCI, spin-orbit g-tensors and absorption spectra from the command line.

mod commands;
mod inputs;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use casq_core::CasqError;
use clap::{Args, Parser, Subcommand, ValueEnum};

use manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(
    name = "casq",
    version,
    about = "Determinant CASCI with spin-orbit QDPT, g-tensors and spectra"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for reports and the run manifest.
    #[arg(long, global = true, default_value = "casq-out")]
    out: PathBuf,
    /// Worker threads for the sigma kernel.
    #[arg(long, global = true, env = "CASQ_THREADS")]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Number of determinants in CAS(nelec, norb) at fixed 2M_S.
    Count(CountArgs),
    /// Solve the requested multiplets and print energies and decompositions.
    Casci(RunArgs),
    /// Spin-orbit QDPT and g-tensor (effective Hamiltonian and sum over states).
    Gtensor(RunArgs),
    /// Oscillator strengths and a Gaussian-broadened absorption spectrum.
    Spectrum(SpectrumArgs),
}

#[derive(Debug, Args)]
struct CountArgs {
    #[arg(long)]
    nelec: usize,
    #[arg(long)]
    norb: usize,
    #[arg(long, allow_hyphen_values = true)]
    ms2: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Oracle {
    Dense,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// key=value run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub fcidump: Option<PathBuf>,
    /// Angular-momentum, SOC and dipole matrices.
    #[arg(long)]
    pub prop: Option<PathBuf>,
    /// Built-in ligand-field model: d1-tetragonal (d1) or d9-planar (d9).
    #[arg(long)]
    pub lf: Option<String>,
    /// Override the ligand-field spin-orbit constant (cm⁻¹).
    #[arg(long)]
    pub zeta: Option<f64>,
    /// Roots per multiplicity as 2S+1=count; repeatable.
    #[arg(long = "roots-mult", value_name = "N=K")]
    pub roots_mult: Vec<String>,
    /// Comma-separated 2M_S blocks to cross-check.
    #[arg(long, allow_hyphen_values = true)]
    pub ms2: Option<String>,
    /// Compare against dense diagonalization.
    #[arg(long, value_enum)]
    pub oracle: Option<Oracle>,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Line list (`energy_eV f [label]` per line) used instead of computed dipoles.
    #[arg(long)]
    lines: Option<PathBuf>,
}

/// Failure with its exit code: 1 input, 2 non-convergence, 3 internal invariant.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Core(CasqError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Core(e) => match e {
                CasqError::NotConverged { .. } => 2,
                CasqError::Annihilated(_)
                | CasqError::Multiplet(_)
                | CasqError::Kramers(_)
                | CasqError::DegenerateGround(_)
                | CasqError::Invariant(_) => 3,
                CasqError::Symmetry { what, .. } if what.contains("spin-orbit") => 3,
                _ => 1,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<CasqError> for CliError {
    fn from(e: CasqError) -> Self {
        CliError::Core(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match cli.threads {
        Some(0) => {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(1);
        }
        Some(n) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
            {
                eprintln!("error: cannot start {n} worker threads: {e}");
                return ExitCode::from(1);
            }
            n
        }
        None => rayon::current_num_threads(),
    };
    let name = match &cli.command {
        Command::Count(_) => "count",
        Command::Casci(_) => "casci",
        Command::Gtensor(_) => "gtensor",
        Command::Spectrum(_) => "spectrum",
    };
    let mut manifest = RunManifest::new(name, threads);
    let result = match &cli.command {
        Command::Count(a) => commands::count(a.nelec, a.norb, a.ms2, &mut manifest),
        Command::Casci(a) => commands::casci(a, &cli.out, &mut manifest),
        Command::Gtensor(a) => commands::gtensor(a, &cli.out, &mut manifest),
        Command::Spectrum(a) => {
            commands::spectrum(&a.run, a.lines.as_deref(), &cli.out, &mut manifest)
        }
    };
    let code = match &result {
        Ok(()) => 0,
        Err(e) => e.exit_code(),
    };
    manifest.exit_code = code as i32;
    match &result {
        Ok(()) => manifest.status = "ok".into(),
        Err(e) => {
            manifest.status = "error".into();
            manifest.error = Some(e.to_string());
            eprintln!("error: {e}");
        }
    }
    if let Err(e) = manifest.write(&cli.out) {
        eprintln!("error: cannot write manifest to {}: {e}", cli.out.display());
        return ExitCode::from(if code == 0 { 1 } else { code });
    }
    ExitCode::from(code)
}
