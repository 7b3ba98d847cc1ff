//! `tau-spectra`: command-line access to the spectral, Markov and diffusion
//! analyses. Exit status is 0 on success, 1 on domain errors and 2 on usage
//! or input-schema errors.

mod commands;
mod output;
mod spec_file;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tau_spectra::markov::SpectrumKind;
use tau_spectra::wealth::SweepTarget;

use crate::output::{render_json, Report};

pub const PRECISION_VAR: &str = "TAU_SPECTRA_PRECISION";

/// How a command failed, which decides the exit status.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Domain(String),
}

impl From<tau_spectra::Error> for Failure {
    fn from(e: tau_spectra::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<spec_file::SchemaError> for Failure {
    fn from(e: spec_file::SchemaError) -> Self {
        Failure::Usage(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Parser)]
#[command(name = "tau-spectra", version, about = "Spectra of corner-perturbed tridiagonal matrices and the processes built on them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Full eigendecomposition of T(n, eps, phi).
    Eig {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
        #[arg(long, allow_negative_numbers = true)]
        phi: f64,
    },
    /// Outliers against their large-n predictions for a range of sizes.
    Tables {
        /// Corner preset: 1 (eps=3, phi=1/2), 2 (eps=4, phi=-2) or 3 (eps=phi=8/5).
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3), conflicts_with_all = ["eps", "phi"])]
        which: Option<u8>,
        #[arg(long, allow_negative_numbers = true, requires = "phi")]
        eps: Option<f64>,
        #[arg(long, allow_negative_numbers = true, requires = "eps")]
        phi: Option<f64>,
        /// Matrix sizes, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "8,16,32,64,128")]
        n: Vec<usize>,
    },
    /// Birth-death queue with arrival rate `lambda` and service rate `mu`.
    Queue {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
    },
    /// Lazy random walk stepping up with probability `p` and down with `q`.
    Walk {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
    },
    /// Tensor product of independent axes.
    Kron {
        /// One axis as n:a:b (queue rates for generators, step probabilities for chains). Repeat per axis.
        #[arg(long = "axis", required = true)]
        axes: Vec<String>,
        #[arg(long, value_enum, default_value_t = KindArg::Generator)]
        kind: KindArg,
        /// Times (generator) or step counts (chain) at which to report the transient law.
        #[arg(long, value_delimiter = ',')]
        times: Vec<f64>,
        /// Initial distribution (JSON array or {dims, values}); defaults to all mass on the first state.
        #[arg(long)]
        p0: Option<PathBuf>,
    },
    /// Discretized reflected diffusion described by a JSON spec file.
    Diffusion {
        #[command(subcommand)]
        action: DiffusionAction,
    },
    /// Stationary mean and variance of the payoff in a spec file.
    Moments {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Derivatives of the stationary moments with respect to every drift and variance.
    Sens {
        #[arg(long)]
        spec: PathBuf,
        /// Include the derivative tensors of the stationary law (JSON only).
        #[arg(long)]
        tensors: bool,
    },
    /// Moments and sensitivities along a grid of one parameter.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum)]
        param: ParamArg,
        /// One-based axis index.
        #[arg(long, default_value_t = 1)]
        axis: usize,
        /// Grid values as a,b,c or start:stop:count.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
    },
}

#[derive(Subcommand)]
enum DiffusionAction {
    /// Stationary distribution.
    Steady {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Spectral gap, overall and per axis.
    Gap {
        #[arg(long)]
        spec: PathBuf,
    },
    /// All eigenvalues, indexed by mode.
    Spectrum {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Transient distribution at the given times.
    Evolve {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_delimiter = ',')]
        times: Vec<f64>,
        #[arg(long)]
        p0: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Generator,
    Chain,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ParamArg {
    Mu,
    Sigma2,
}

fn check_precision() -> Result<(), Failure> {
    match std::env::var(PRECISION_VAR) {
        Err(std::env::VarError::NotPresent) => Ok(()),
        Ok(v) if matches!(v.as_str(), "binary64" | "f64" | "double") => Ok(()),
        Ok(v) => Err(Failure::Usage(format!(
            "{PRECISION_VAR}={v:?} is not available; this build supports only binary64"
        ))),
        Err(e) => Err(Failure::Usage(format!("{PRECISION_VAR}: {e}"))),
    }
}

fn dispatch(command: Command) -> Result<Report, Failure> {
    match command {
        Command::Eig { n, eps, phi } => commands::eig(n, eps, phi),
        Command::Tables { which, eps, phi, n } => {
            let (eps, phi) = match (which, eps, phi) {
                (Some(w), _, _) => commands::preset(w).expect("clap restricts the preset range"),
                (None, Some(e), Some(p)) => (e, p),
                _ => return Err(Failure::Usage("tables needs --which or both --eps and --phi".into())),
            };
            commands::tables(eps, phi, &n)
        }
        Command::Queue { n, lambda, mu } => commands::queue(n, lambda, mu),
        Command::Walk { n, p, q } => commands::walk(n, p, q),
        Command::Kron { axes, kind, times, p0 } => {
            let kind = match kind {
                KindArg::Generator => SpectrumKind::Generator,
                KindArg::Chain => SpectrumKind::Chain,
            };
            commands::kron(&axes, kind, &times, p0.as_deref())
        }
        Command::Diffusion { action } => match action {
            DiffusionAction::Steady { spec } => commands::diffusion_steady(&spec),
            DiffusionAction::Gap { spec } => commands::diffusion_gap_report(&spec),
            DiffusionAction::Spectrum { spec } => commands::diffusion_spectrum_report(&spec),
            DiffusionAction::Evolve { spec, times, p0 } => commands::diffusion_evolve(&spec, &times, p0.as_deref()),
        },
        Command::Moments { spec } => commands::moments(&spec),
        Command::Sens { spec, tensors } => commands::sens(&spec, tensors),
        Command::Sweep { spec, param, axis, grid } => {
            if axis == 0 {
                return Err(Failure::Usage("--axis is one-based".into()));
            }
            let target = match param {
                ParamArg::Mu => SweepTarget::Mu(axis - 1),
                ParamArg::Sigma2 => SweepTarget::Sigma2(axis - 1),
            };
            commands::sweep(&spec, target, &commands::parse_grid(&grid)?)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    check_precision()?;
    let report = dispatch(cli.command)?;
    let text = match cli.format {
        Format::Csv => report.table.render(),
        Format::Json => render_json(&report.json),
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("--out {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            // A closed pipe is not worth a panic.
            let _ = stdout.write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
