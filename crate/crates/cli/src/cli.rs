use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{ExecArg, InitArg, ShapeArg, StencilArg};

/// Spectral and dynamical stability experiments for b-Novikov peakons.
///
/// Settings come from `--config <file.toml>`, overridden by flags. Results
/// go to `--out` (or stdout) as JSON or CSV; every output embeds the fully
/// resolved configuration. Exit status: 0 success, 1 invalid input,
/// 2 numerical failure.
#[derive(Debug, Parser)]
#[command(name = "peakon-spectra", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Dense spectrum of the discretized L with its band report.
    Spectrum,
    /// Predicted against computed band edges over a sweep of b.
    BandMap,
    /// Closed-form ODE residuals and local exponent fits at the crest.
    EigfunCheck,
    /// Hilbert-Schmidt norms of the two nonlocal kernels.
    KernelCheck,
    /// Operator identities on φ, φ' and the convolution identities.
    Identities,
    /// Growth of the (α, β) subspace component.
    AlphaBeta,
    /// Linearized evolution from an eigenfunction or a bump.
    EvolveLinear,
    /// Nonlinear transport of a peakon.
    EvolveNonlinear,
    /// Weak-form residual of the exact peakon.
    PeakonResidual,
    /// Perturbed-peakon experiment.
    Perturb,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::BandMap => "band-map",
            Command::EigfunCheck => "eigfun-check",
            Command::KernelCheck => "kernel-check",
            Command::Identities => "identities",
            Command::AlphaBeta => "alpha-beta",
            Command::EvolveLinear => "evolve-linear",
            Command::EvolveNonlinear => "evolve-nonlinear",
            Command::PeakonResidual => "peakon-residual",
            Command::Perturb => "perturb",
        }
    }
}

#[derive(Debug, Default, Args)]
pub struct Opts {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write the JSON report.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Write the CSV table.
    #[arg(long, global = true)]
    pub csv: bool,

    /// One value or a comma-separated list.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub b: Option<Vec<f64>>,
    /// Half-width of the domain [-L, L].
    #[arg(long = "L", global = true, allow_hyphen_values = true)]
    pub half_width: Option<f64>,
    /// Number of grid points.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Final time.
    #[arg(long = "T", global = true, allow_hyphen_values = true)]
    pub t_final: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub dt: Option<f64>,
    #[arg(long, global = true)]
    pub output_stride: Option<usize>,
    /// Overrides the command's main pass/fail tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub exec: Option<ExecArg>,

    #[arg(long, global = true, value_enum)]
    pub stencil: Option<StencilArg>,
    /// Largest n accepted for a dense eigensolve.
    #[arg(long, global = true)]
    pub max_points: Option<usize>,
    /// Random (λ, b, ξ) samples per closed-form profile.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Real part of λ.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Imaginary part of λ.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda_im: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha0: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta0: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub init: Option<InitArg>,
    /// Center of the Gaussian test function.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub center: Option<f64>,
    #[arg(long, global = true)]
    pub fit_start: Option<f64>,
    #[arg(long, global = true)]
    pub fit_end: Option<f64>,
    /// Peakon amplitude √c.
    #[arg(long, global = true)]
    pub amplitude: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub frame_speed: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub shape: Option<ShapeArg>,
}
