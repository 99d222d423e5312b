//! Experiment configuration: TOML file, then command-line flags, then
//! per-command defaults. Flags win over the file.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use peakon_core::evolution::PerturbationShape;
use peakon_core::operators::Stencil;
use peakon_core::Exec;

use crate::cli::{Command, Opts};
use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum StencilArg {
    Upwind,
    SkewCentered,
}

impl From<StencilArg> for Stencil {
    fn from(s: StencilArg) -> Self {
        match s {
            StencilArg::Upwind => Stencil::Upwind,
            StencilArg::SkewCentered => Stencil::SkewCentered,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeArg {
    PeakonSquared,
    Gaussian,
}

impl From<ShapeArg> for PerturbationShape {
    fn from(s: ShapeArg) -> Self {
        match s {
            ShapeArg::PeakonSquared => PerturbationShape::PeakonSquared,
            ShapeArg::Gaussian => PerturbationShape::Gaussian,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExecArg {
    Sequential,
    Parallel,
}

impl From<ExecArg> for Exec {
    fn from(e: ExecArg) -> Self {
        match e {
            ExecArg::Sequential => Exec::Sequential,
            ExecArg::Parallel => Exec::Parallel,
        }
    }
}

/// Initial data for `evolve-linear`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum InitArg {
    /// Reconstructed eigenfunction for λ, normalized in L².
    Eigenfunction,
    /// e^{-(ξ - center)²}
    Gaussian,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<f64> {
        match self {
            OneOrMany::One(b) => vec![b],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    #[serde(rename = "L")]
    pub half_width: Option<f64>,
    pub n: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeFile {
    #[serde(rename = "T")]
    pub t_final: Option<f64>,
    pub dt: Option<f64>,
    pub output_stride: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesFile {
    pub kernel: Option<f64>,
    pub quadrature: Option<f64>,
    pub operator: Option<f64>,
    pub convolution: Option<f64>,
    pub ode: Option<f64>,
    pub exponent: Option<f64>,
    pub band: Option<f64>,
    pub rate: Option<f64>,
    pub growth: Option<f64>,
    pub speed: Option<f64>,
    pub shape: Option<f64>,
    pub peakon: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    pub stencil: Option<StencilArg>,
    pub max_points: Option<usize>,
    pub samples: Option<usize>,
    pub lambda: Option<f64>,
    pub lambda_im: Option<f64>,
    pub alpha0: Option<f64>,
    pub beta0: Option<f64>,
    pub init: Option<InitArg>,
    pub center: Option<f64>,
    pub fit_start: Option<f64>,
    pub fit_end: Option<f64>,
    pub amplitude: Option<f64>,
    pub frame_speed: Option<f64>,
    pub epsilon: Option<f64>,
    pub shape: Option<ShapeArg>,
}

/// The on-disk document. Every key is optional; unknown keys are rejected.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub b: Option<OneOrMany>,
    pub seed: Option<u64>,
    pub output_path: Option<PathBuf>,
    pub format: Option<Format>,
    pub exec: Option<ExecArg>,
    #[serde(default)]
    pub grid: GridFile,
    #[serde(default)]
    pub time: TimeFile,
    #[serde(default)]
    pub tolerances: TolerancesFile,
    #[serde(default)]
    pub experiment: ExperimentFile,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    #[serde(rename = "L")]
    pub half_width: f64,
    pub n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TimeSpec {
    #[serde(rename = "T")]
    pub t_final: f64,
    /// `None` lets each command choose a stable step from the grid.
    pub dt: Option<f64>,
    pub output_stride: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// |‖K‖²_HS - exact|
    pub kernel: f64,
    /// Requested accuracy of adaptive quadrature.
    pub quadrature: f64,
    /// Relative L² residual of the operator identities on φ, φ'.
    pub operator: f64,
    /// Sup residual of the convolution identities.
    pub convolution: f64,
    /// Closed-form ODE residual.
    pub ode: f64,
    /// |fitted - predicted| local exponent.
    pub exponent: f64,
    /// Slack δ outside the predicted band.
    pub band: f64,
    /// Relative error of the α/β growth rate.
    pub rate: f64,
    /// Relative error of the eigenfunction-seeded growth rate.
    pub growth: f64,
    /// |peak speed - amplitude²|
    pub speed: f64,
    /// Sup-norm shape error of the transported peakon.
    pub shape: f64,
    /// Weak-form residual of the exact peakon.
    pub peakon: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            kernel: 1e-6,
            quadrature: 1e-8,
            operator: 1e-2,
            convolution: 1e-3,
            ode: 1e-8,
            exponent: 0.05,
            band: 0.3,
            rate: 0.01,
            growth: 0.1,
            speed: 0.02,
            shape: 5e-2,
            peakon: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LambdaPair {
    pub b: f64,
    pub re: f64,
    pub im: f64,
}

/// Resolved payload of each subcommand.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    Spectrum {
        stencil: Stencil,
        max_points: usize,
    },
    BandMap {
        stencil: Stencil,
        max_points: usize,
    },
    EigfunCheck {
        samples: usize,
        fits: Vec<LambdaPair>,
    },
    KernelCheck,
    Identities {
        center: f64,
    },
    AlphaBeta {
        alpha0: f64,
        beta0: f64,
        fit_window: (f64, f64),
    },
    EvolveLinear {
        init: InitArg,
        lambda_re: f64,
        lambda_im: f64,
        center: f64,
        alpha0: f64,
        beta0: f64,
        stencil: Stencil,
        fit_window: (f64, f64),
    },
    EvolveNonlinear {
        amplitude: f64,
        frame_speed: Option<f64>,
    },
    PeakonResidual,
    Perturb {
        epsilon: f64,
        shape: PerturbationShape,
        frame_speed: Option<f64>,
    },
}

/// Fully resolved configuration, echoed into every output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub b: Vec<f64>,
    pub grid: GridSpec,
    pub time: TimeSpec,
    pub tolerances: Tolerances,
    pub experiment: Experiment,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub exec: Exec,
}

fn default_bs(cmd: Command) -> Vec<f64> {
    match cmd {
        Command::Spectrum => vec![3.0],
        Command::BandMap => vec![0.0, 2.0, 3.0, 5.0, 6.0],
        Command::EigfunCheck => vec![2.0, 3.0],
        Command::KernelCheck => vec![],
        Command::AlphaBeta => vec![2.0, 3.0, 5.0, 6.0],
        Command::EvolveLinear => vec![2.0],
        Command::EvolveNonlinear => vec![3.0],
        Command::Identities | Command::PeakonResidual => vec![0.0, 2.0, 3.0, 4.0, 5.0, 6.0],
        Command::Perturb => vec![0.0],
    }
}

fn default_n(cmd: Command) -> usize {
    match cmd {
        Command::Spectrum | Command::AlphaBeta => 1024,
        Command::BandMap => 256,
        Command::EvolveLinear => 2048,
        _ => 4096,
    }
}

fn default_stride(cmd: Command) -> usize {
    match cmd {
        Command::EvolveNonlinear | Command::Perturb => 50,
        _ => 10,
    }
}

/// The tolerance `--tol` stands for.
fn primary_tolerance(cmd: Command, t: &mut Tolerances) -> Option<&mut f64> {
    Some(match cmd {
        Command::Spectrum | Command::BandMap => &mut t.band,
        Command::EigfunCheck => &mut t.ode,
        Command::KernelCheck => &mut t.kernel,
        Command::Identities => &mut t.operator,
        Command::AlphaBeta => &mut t.rate,
        Command::EvolveLinear => &mut t.growth,
        Command::EvolveNonlinear => &mut t.speed,
        Command::PeakonResidual => &mut t.peakon,
        Command::Perturb => return None,
    })
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn resolve(cmd: Command, file: FileConfig, opts: &Opts) -> Result<Self, CliError> {
        let x = &file.experiment;
        let pick =
            |flag: Option<f64>, file: Option<f64>, default: f64| flag.or(file).unwrap_or(default);

        let b_given = opts.b.is_some() || file.b.is_some();
        let b = match (&opts.b, file.b.clone()) {
            (Some(v), _) => v.clone(),
            (None, Some(v)) => v.into_vec(),
            (None, None) => default_bs(cmd),
        };

        let grid = GridSpec {
            half_width: pick(opts.half_width, file.grid.half_width, 30.0),
            n: opts.n.or(file.grid.n).unwrap_or_else(|| default_n(cmd)),
        };
        let time = TimeSpec {
            t_final: pick(opts.t_final, file.time.t_final, 5.0),
            dt: opts.dt.or(file.time.dt),
            output_stride: opts
                .output_stride
                .or(file.time.output_stride)
                .unwrap_or_else(|| default_stride(cmd)),
        };

        let mut tolerances = Tolerances::default();
        let t = &file.tolerances;
        for (slot, v) in [
            (&mut tolerances.kernel, t.kernel),
            (&mut tolerances.quadrature, t.quadrature),
            (&mut tolerances.operator, t.operator),
            (&mut tolerances.convolution, t.convolution),
            (&mut tolerances.ode, t.ode),
            (&mut tolerances.exponent, t.exponent),
            (&mut tolerances.band, t.band),
            (&mut tolerances.rate, t.rate),
            (&mut tolerances.growth, t.growth),
            (&mut tolerances.speed, t.speed),
            (&mut tolerances.shape, t.shape),
            (&mut tolerances.peakon, t.peakon),
        ] {
            if let Some(v) = v {
                *slot = v;
            }
        }
        if let Some(tol) = opts.tol {
            match primary_tolerance(cmd, &mut tolerances) {
                Some(slot) => *slot = tol,
                None => return Err(invalid(format!("{} has no tolerance", cmd.name()))),
            }
        }

        let stencil = |default: StencilArg| -> Stencil {
            opts.stencil.or(x.stencil).unwrap_or(default).into()
        };
        let max_points = opts.max_points.or(x.max_points).unwrap_or(4096);
        let lambda_re = opts.lambda.or(x.lambda);
        let lambda_im = pick(opts.lambda_im, x.lambda_im, 0.0);
        let fit_window = (
            pick(opts.fit_start, x.fit_start, 1.0),
            pick(opts.fit_end, x.fit_end, time.t_final),
        );
        let frame_speed = opts.frame_speed.or(x.frame_speed);

        let experiment = match cmd {
            Command::Spectrum => Experiment::Spectrum {
                stencil: stencil(StencilArg::SkewCentered),
                max_points,
            },
            Command::BandMap => Experiment::BandMap {
                stencil: stencil(StencilArg::SkewCentered),
                max_points,
            },
            Command::EigfunCheck => {
                let fits = match (b_given, lambda_re) {
                    // the two canonical cases: exponents 1/2 and -1/4
                    (false, None) => vec![
                        LambdaPair {
                            b: 2.0,
                            re: 1.0,
                            im: 0.0,
                        },
                        LambdaPair {
                            b: 3.0,
                            re: 1.5,
                            im: 0.0,
                        },
                    ],
                    (_, re) => b
                        .iter()
                        .map(|&b| LambdaPair {
                            b,
                            re: re.unwrap_or(1.0),
                            im: lambda_im,
                        })
                        .collect(),
                };
                Experiment::EigfunCheck {
                    samples: opts.samples.or(x.samples).unwrap_or(100),
                    fits,
                }
            }
            Command::KernelCheck => Experiment::KernelCheck,
            Command::Identities => Experiment::Identities {
                center: pick(opts.center, x.center, 0.0),
            },
            Command::AlphaBeta => Experiment::AlphaBeta {
                alpha0: pick(opts.alpha0, x.alpha0, 1.0),
                beta0: pick(opts.beta0, x.beta0, 0.0),
                fit_window,
            },
            Command::EvolveLinear => Experiment::EvolveLinear {
                init: opts.init.or(x.init).unwrap_or(InitArg::Eigenfunction),
                lambda_re: lambda_re.unwrap_or(1.0),
                lambda_im,
                center: pick(opts.center, x.center, 5.0),
                alpha0: pick(opts.alpha0, x.alpha0, 0.0),
                beta0: pick(opts.beta0, x.beta0, 0.0),
                stencil: stencil(StencilArg::Upwind),
                fit_window,
            },
            Command::EvolveNonlinear => Experiment::EvolveNonlinear {
                amplitude: pick(opts.amplitude, x.amplitude, 1.0),
                frame_speed,
            },
            Command::PeakonResidual => Experiment::PeakonResidual,
            Command::Perturb => Experiment::Perturb {
                epsilon: pick(opts.epsilon, x.epsilon, 1e-3),
                shape: opts
                    .shape
                    .or(x.shape)
                    .unwrap_or(ShapeArg::PeakonSquared)
                    .into(),
                frame_speed,
            },
        };

        let format = if opts.csv {
            Format::Csv
        } else if opts.json {
            Format::Json
        } else if let Some(f) = file.format {
            f
        } else {
            let out = opts.out.as_ref().or(file.output_path.as_ref());
            match out.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
                Some("csv") => Format::Csv,
                _ => Format::Json,
            }
        };

        let config = ExperimentConfig {
            b,
            grid,
            time,
            tolerances,
            experiment,
            output_path: opts.out.clone().or(file.output_path),
            format,
            seed: opts.seed.or(file.seed).unwrap_or(7),
            exec: opts
                .exec
                .or(file.exec)
                .map_or_else(Exec::default, Exec::from),
        };
        config.validate(cmd)?;
        Ok(config)
    }

    pub fn validate(&self, cmd: Command) -> Result<(), CliError> {
        let GridSpec { half_width, n } = self.grid;
        if !(half_width.is_finite() && half_width >= 5.0) {
            return Err(invalid(format!("L must be at least 5, got {half_width}")));
        }
        if n < 64 || n % 2 != 0 {
            return Err(invalid(format!("n must be even and at least 64, got {n}")));
        }
        positive("T", self.time.t_final)?;
        if let Some(dt) = self.time.dt {
            positive("dt", dt)?;
        }
        if self.time.output_stride == 0 {
            return Err(invalid("output_stride must be at least 1"));
        }
        if cmd != Command::KernelCheck && self.b.is_empty() {
            return Err(invalid("b must not be empty"));
        }
        for &b in &self.b {
            finite("b", b)?;
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("kernel", t.kernel),
            ("quadrature", t.quadrature),
            ("operator", t.operator),
            ("convolution", t.convolution),
            ("ode", t.ode),
            ("exponent", t.exponent),
            ("band", t.band),
            ("rate", t.rate),
            ("growth", t.growth),
            ("speed", t.speed),
            ("shape", t.shape),
            ("peakon", t.peakon),
        ] {
            positive(&format!("tolerances.{name}"), v)?;
        }
        match &self.experiment {
            Experiment::EigfunCheck { samples, fits } => {
                if *samples == 0 {
                    return Err(invalid("samples must be at least 1"));
                }
                for f in fits {
                    finite("lambda", f.re)?;
                    finite("lambda_im", f.im)?;
                }
            }
            Experiment::AlphaBeta {
                alpha0,
                beta0,
                fit_window,
            }
            | Experiment::EvolveLinear {
                alpha0,
                beta0,
                fit_window,
                ..
            } => {
                finite("alpha0", *alpha0)?;
                finite("beta0", *beta0)?;
                let (lo, hi) = *fit_window;
                if !(lo >= 0.0 && lo < hi && hi <= self.time.t_final) {
                    return Err(invalid(format!(
                        "fit window [{lo}, {hi}] must lie inside [0, T]"
                    )));
                }
            }
            Experiment::EvolveNonlinear {
                amplitude,
                frame_speed,
            } => {
                positive("amplitude", *amplitude)?;
                if let Some(c) = frame_speed {
                    finite("frame_speed", *c)?;
                }
            }
            Experiment::Perturb {
                epsilon,
                frame_speed,
                ..
            } => {
                finite("epsilon", *epsilon)?;
                if let Some(c) = frame_speed {
                    finite("frame_speed", *c)?;
                }
            }
            _ => {}
        }
        Ok(())
    }
}
