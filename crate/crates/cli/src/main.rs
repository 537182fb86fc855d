//! `kinkstab`: spectral and dynamical stability computations for NLS kinks.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Settings;

/// Invalid input detected before any numerical work (exit code 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// A computation finished but a check on its result failed (exit code 3).
#[derive(Debug)]
pub struct CheckFailed(pub String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailed {}

#[derive(Parser, Debug)]
#[command(name = "kinkstab", version = output::VERSION, about = "Stability of kinks in NLS equations with competing power nonlinearities")]
struct Cli {
    /// JSON object of flag values; explicit flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Worker threads for parallel scans [default: available parallelism].
    #[arg(long, global = true, env = "KINKSTAB_THREADS")]
    threads: Option<usize>,

    /// CSV destination; a `<output>.json` run record is written beside it. Defaults to stdout.
    #[arg(long, short, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample the kink profile: x,phi,phi_prime,one_minus_phi_sq.
    Profile(ProfileArgs),
    /// Lowest eigenvalues of the split operator L_R on the z grid.
    Spectrum(SpectrumArgs),
    /// lambda_1, F_R(0) and their product over a ladder of R values.
    CriterionScan(ScanArgs),
    /// Lowest eigenvalue of L_R on the complement of phi'.
    ConstrainedEigenvalue(ConstrainedArgs),
    /// Eigenvalues of the linearization about the kink: re,im.
    BlockSpectrum(BlockArgs),
    /// Evolve a perturbed kink and log its distance from the orbit.
    Evolve(EvolveArgs),
    /// Check the energy decomposition on random smooth perturbations.
    DecomposeCheck(DecomposeArgs),
    /// Fast end-to-end sanity checks.
    Selftest,
}

#[derive(Args, Debug)]
pub struct Powers {
    /// Focusing power p [default: 2].
    #[arg(long)]
    pub p: Option<f64>,
    /// Defocusing power q [default: 4].
    #[arg(long)]
    pub q: Option<f64>,
}

#[derive(Args, Debug)]
pub struct XGrid {
    /// Left end of the x grid.
    #[arg(long, allow_negative_numbers = true)]
    pub x_min: Option<f64>,
    /// Right end of the x grid.
    #[arg(long, allow_negative_numbers = true)]
    pub x_max: Option<f64>,
    /// Number of grid intervals.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ZGrid {
    /// Left end of the z grid; the right end is 0 [default: -10].
    #[arg(long, allow_negative_numbers = true)]
    pub z_min: Option<f64>,
    /// Number of grid intervals [default: 20000].
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub powers: Powers,
    /// Sampling grid [default: -20, 20 with 400 intervals].
    #[command(flatten)]
    pub grid: XGrid,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    /// Junction point R [default: 0.2].
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// Number of eigenpairs [default: 3].
    #[arg(long)]
    pub k: Option<usize>,
    #[command(flatten)]
    pub grid: ZGrid,
    /// Also write the eigenfunctions as z,x,v1,...
    #[arg(long, value_name = "PATH")]
    pub eigenfunctions: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    /// [default: -6]
    #[arg(long, allow_negative_numbers = true)]
    pub r_min: Option<f64>,
    /// [default: 6]
    #[arg(long, allow_negative_numbers = true)]
    pub r_max: Option<f64>,
    /// [default: 0.25]
    #[arg(long)]
    pub r_step: Option<f64>,
    #[command(flatten)]
    pub grid: ZGrid,
}

#[derive(Args, Debug)]
pub struct ConstrainedArgs {
    /// Junction point R [default: 0.2].
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    #[command(flatten)]
    pub grid: ZGrid,
}

#[derive(Args, Debug)]
pub struct BlockArgs {
    #[command(flatten)]
    pub powers: Powers,
    /// Truncated x grid [default: -20, 20 with 2000 intervals].
    #[command(flatten)]
    pub grid: XGrid,
}

#[derive(Args, Debug)]
pub struct EvolveArgs {
    /// Target initial distance: rho_R(psi_0, phi) = delta^2 [default: 0.01].
    #[arg(long)]
    pub delta: Option<f64>,
    /// [default: 50]
    #[arg(long)]
    pub t_final: Option<f64>,
    /// [default: 0.005]
    #[arg(long)]
    pub dt: Option<f64>,
    /// gaussian-re, gaussian-im or gaussian-mix [default: gaussian-re].
    #[arg(long)]
    pub shape: Option<String>,
    /// Junction point of the distance [default: 1].
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// Interval between logged rows [default: 0.5].
    #[arg(long)]
    pub log_every: Option<f64>,
    #[command(flatten)]
    pub powers: Powers,
    /// Evolution grid [default: -40, 40 with 4096 intervals].
    #[command(flatten)]
    pub grid: XGrid,
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    /// [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// First seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of consecutive seeds [default: 20].
    #[arg(long)]
    pub count: Option<u64>,
    /// [default: 0.05]
    #[arg(long)]
    pub amplitude: Option<f64>,
    #[command(flatten)]
    pub powers: Powers,
    /// Perturbation grid [default: -20, 20 with 20000 intervals].
    #[command(flatten)]
    pub grid: XGrid,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<kink_core::Error>() {
            return if e.is_validation() { 2 } else { 3 };
        }
    }
    3
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let settings = match &cli.config {
        Some(path) => Settings::load(path)?,
        None => Settings::empty(),
    };
    let threads = cli.threads.or(settings.global("threads")?);
    if let Some(n) = threads {
        if n == 0 {
            return Err(UsageError("--threads must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let output: Option<PathBuf> = cli.output.clone().or(settings.global("output")?);
    let out = output.as_deref();
    match cli.command {
        Command::Profile(a) => commands::profile(&settings, a, out),
        Command::Spectrum(a) => commands::spectrum(&settings, a, out),
        Command::CriterionScan(a) => commands::criterion_scan(&settings, a, out),
        Command::ConstrainedEigenvalue(a) => commands::constrained(&settings, a, out),
        Command::BlockSpectrum(a) => commands::block_spectrum(&settings, a, out),
        Command::Evolve(a) => commands::evolve(&settings, a, out),
        Command::DecomposeCheck(a) => commands::decompose(&settings, a, out),
        Command::Selftest => commands::selftest(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kinkstab: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
