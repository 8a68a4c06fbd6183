use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use levsplit::harness::{
    ModelSpec, RunConfig, DEFAULT_A, DEFAULT_C, DEFAULT_SPIN, DEFAULT_TILT, EQUILIBRIUM_HEIGHT,
};
use levsplit::integrators::{InitStrategy, IterationConfig, NewtonOptions, VerletForm};
use levsplit::{PhaseState, StepperOptions};

#[derive(Debug, Parser)]
#[command(
    name = "levsplit",
    version,
    about = "Integrator benchmarks for the Levitron top"
)]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one trajectory and write it as CSV.
    Run(RunArgs),
    /// Compare a trajectory CSV against a reference CSV.
    Compare(CompareArgs),
    /// Estimate the convergence order of an integrator.
    Order(OrderArgs),
    /// Scan the initial spin for the stable window.
    Scan(ScanArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Levitron,
    Oscillator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelForm {
    Vv,
    Pv,
}

fn parse_init(s: &str) -> Result<InitStrategy, String> {
    InitStrategy::parse(s)
        .ok_or_else(|| format!("unknown init `{s}` (previous-step, explicit-euler, rk4)"))
}

fn parse_six(s: &str) -> Result<[f64; 6], String> {
    let vals = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    vals.try_into()
        .map_err(|v: Vec<f64>| format!("expected 6 comma-separated values, got {}", v.len()))
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value = "levitron")]
    pub model: ModelKind,
    /// Transverse inertia of the top.
    #[arg(long, default_value_t = DEFAULT_A)]
    pub a: f64,
    /// Axial inertia of the top.
    #[arg(long, default_value_t = DEFAULT_C)]
    pub c: f64,
    /// Magnetic strength; calibrated to the initial height when omitted.
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 1.0)]
    pub stiffness: f64,
    /// Initial height of the top.
    #[arg(long, default_value_t = EQUILIBRIUM_HEIGHT)]
    pub z0: f64,
    /// Initial tilt of the spin axis.
    #[arg(long, default_value_t = DEFAULT_TILT)]
    pub tilt: f64,
    /// Initial spin; p5 is set to p6·cos(tilt).
    #[arg(long, default_value_t = DEFAULT_SPIN)]
    pub p6: f64,
    /// Explicit initial coordinates `q1,...,q6` (overrides z0/tilt).
    #[arg(long, value_parser = parse_six)]
    pub q: Option<[f64; 6]>,
    /// Explicit initial momenta `p1,...,p6` (overrides p6).
    #[arg(long, value_parser = parse_six)]
    pub p: Option<[f64; 6]>,
}

impl ModelArgs {
    pub fn spec(&self) -> ModelSpec {
        match self.model {
            ModelKind::Levitron => ModelSpec::Levitron {
                a: self.a,
                c: self.c,
                m: self.m,
            },
            ModelKind::Oscillator => ModelSpec::Oscillator {
                mass: self.mass,
                stiffness: self.stiffness,
            },
        }
    }

    pub fn initial_state(&self) -> PhaseState {
        let base = match self.model {
            ModelKind::Levitron => {
                levsplit::harness::levitron_initial_state(self.z0, self.tilt, self.p6)
            }
            ModelKind::Oscillator => PhaseState::new([1.0, 0.0, 0.0, 0.0, 0.0, 0.0], [0.0; 6], 0.0),
        };
        PhaseState::new(
            self.q.unwrap_or_else(|| base.q.into()),
            self.p.unwrap_or_else(|| base.p.into()),
            0.0,
        )
    }
}

#[derive(Debug, Clone, Args)]
pub struct IntegratorArgs {
    /// euler, rk4, verlet (= verlet-vv), verlet-vv, verlet-pv, verlet-separable,
    /// newton, richardson3, mpe, iterative-mpe.
    #[arg(long, default_value = "verlet-vv")]
    pub integrator: String,
    /// Order of the extrapolation integrators (even).
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    /// Maximum fixed-point sweeps per step.
    #[arg(long, default_value_t = 4)]
    pub iters: usize,
    #[arg(long, value_parser = parse_init, default_value = "previous-step")]
    pub init: InitStrategy,
    /// Fixed-point and Newton stopping tolerance.
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    /// Verlet form used as extrapolation kernel.
    #[arg(long, value_enum, default_value = "vv")]
    pub kernel: KernelForm,
    /// Subdivisions of the richardson3 integrator.
    #[arg(long, default_value_t = 2)]
    pub richardson_k: u32,
}

impl IntegratorArgs {
    pub fn name(&self) -> String {
        match self.integrator.as_str() {
            "verlet" => "verlet-vv".to_string(),
            other => other.to_string(),
        }
    }

    pub fn options(&self) -> StepperOptions {
        StepperOptions {
            order: self.order,
            iteration: IterationConfig {
                max_iters: self.iters,
                tol: self.tol,
                init: self.init,
                ..IterationConfig::default()
            },
            newton: NewtonOptions {
                tol: self.tol,
                ..NewtonOptions::default()
            },
            kernel_form: match self.kernel {
                KernelForm::Vv => VerletForm::Velocity,
                KernelForm::Pv => VerletForm::Position,
            },
            richardson_k: self.richardson_k,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    /// Trajectory CSV to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Reference trajectory CSV to compare against after the run.
    #[arg(long = "ref")]
    pub reference: Option<PathBuf>,
    /// Error CSV written when a reference is given.
    #[arg(long)]
    pub err_out: Option<PathBuf>,
    /// Largest |q3 − q3(0)| of a stable run.
    #[arg(long, default_value_t = 0.5)]
    pub bound: f64,
    /// Distance from the start at which a run is declared divergent.
    #[arg(long, default_value_t = 5.0)]
    pub escape_radius: f64,
}

impl RunArgs {
    pub fn config(&self) -> RunConfig {
        RunConfig {
            model: self.model.spec(),
            integrator: self.integrator.name(),
            options: self.integrator.options(),
            h: self.dt,
            steps: self.steps,
            stride: self.stride,
            initial_state: self.model.initial_state(),
            output: self.out.clone(),
            reference: self.reference.clone(),
            stability_bound: self.bound,
            escape_radius: self.escape_radius,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Trajectory to assess.
    #[arg(long)]
    pub run: PathBuf,
    #[arg(long = "ref")]
    pub reference: PathBuf,
    /// Error CSV to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    pub bound: f64,
}

#[derive(Debug, Clone, Args)]
pub struct OrderArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
    /// Largest step size.
    #[arg(long, default_value_t = 0.1)]
    pub dt: f64,
    /// Number of step sizes, each `ratio` times smaller than the previous.
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    #[arg(long, default_value_t = 2.0)]
    pub ratio: f64,
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 20_000)]
    pub steps: usize,
    #[arg(long, default_value_t = 0.0)]
    pub p6_min: f64,
    #[arg(long, default_value_t = 2.0)]
    pub p6_max: f64,
    #[arg(long, default_value_t = 21)]
    pub samples: usize,
    #[arg(long, default_value_t = 0.5)]
    pub bound: f64,
    /// Scan table CSV to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Turns `key = value` lines (with `#` comments) into `--key value` arguments.
pub fn config_file_args(text: &str) -> anyhow::Result<Vec<OsString>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {}: expected `key = value`, got `{raw}`", n + 1);
        };
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() || key == "config" {
            bail!("config line {}: invalid key", n + 1);
        }
        out.push(format!("--{key}").into());
        out.push(value.trim().into());
    }
    Ok(out)
}

/// Splices a `--config FILE` into the argument list ahead of the flags given
/// on the command line, so explicit flags win.
pub fn expand_config(args: Vec<OsString>) -> anyhow::Result<Vec<OsString>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut file = None;
    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            file = Some(it.next().context("--config needs a file path")?);
        } else if let Some(path) = s.strip_prefix("--config=") {
            file = Some(path.into());
        } else {
            rest.push(arg);
        }
    }
    let Some(file) = file else {
        return Ok(rest);
    };
    let text =
        fs::read_to_string(&file).with_context(|| format!("reading {}", file.to_string_lossy()))?;
    let from_file = config_file_args(&text)?;
    // Program name and subcommand stay in front.
    let split = rest.len().min(2);
    let mut merged: Vec<OsString> = rest[..split].to_vec();
    merged.extend(from_file);
    merged.extend_from_slice(&rest[split..]);
    Ok(merged)
}
