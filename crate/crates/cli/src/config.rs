//! Run configuration. Every subcommand's arguments double as the serialised
//! config stored in `run.json`, so a manifest can be replayed exactly.

use clap::{Args, Subcommand};
use meanfield_core::{Kernel, Mode};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    /// Ground-state energy, G(0) and consistency residual of a kernel.
    Constants(ConstantsArgs),
    /// Order-parameter curve as CSV.
    Curve(CurveArgs),
    /// Finite-penalty matching: q, F, h and the cost sweep.
    FiniteLambda(FiniteLambdaArgs),
    /// Deterministic grid recursion with its gap trace.
    Iterate(IterateArgs),
    /// Population dynamics on the tree recursion.
    Popdyn(PopdynArgs),
    /// Exact-solver ensemble of random complete graphs.
    Simulate(SimulateArgs),
    /// C(λ) for the diluted TSP with a cost cross-check.
    TspC(TspCArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ConstantsArgs {
    #[arg(long, default_value = "matching")]
    pub kernel: Kernel,
    /// Half width of the curve used for the consistency check.
    #[arg(long, default_value_t = 50.0)]
    pub x_limit: f64,
    /// Points per half curve.
    #[arg(long, default_value_t = 4000)]
    pub grid: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CurveArgs {
    #[arg(long, default_value = "matching")]
    pub kernel: Kernel,
    /// Finite penalty; omitted for the full problem.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 10.0)]
    pub x_limit: f64,
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct FiniteLambdaArgs {
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub lambda: f64,
    /// Cells of the F and h tables.
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    /// Sweep rows at λ·i/sweep for i = 1..=sweep.
    #[arg(long, default_value_t = 30)]
    pub sweep: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct IterateArgs {
    #[arg(long, default_value = "min")]
    pub mode: Mode,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub lambda: f64,
    #[arg(long, default_value_t = 2000)]
    pub grid: usize,
    /// Maximum depth.
    #[arg(long, default_value_t = 10_000)]
    pub k: usize,
    /// Stop once the sup gap between the two sides falls below this.
    #[arg(long, default_value_t = 1e-6)]
    pub stop_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PopdynArgs {
    #[arg(long, default_value = "min")]
    pub mode: Mode,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub lambda: f64,
    #[arg(long, default_value_t = 100_000)]
    pub pop: usize,
    /// Generations.
    #[arg(long, default_value_t = 100)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Cells of the reference distribution.
    #[arg(long, default_value_t = 2000)]
    pub grid: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub lambda: f64,
    #[arg(long, default_value_t = 200)]
    pub replicas: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct TspCArgs {
    /// Comma-separated penalties.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "1,2,4,8",
        allow_negative_numbers = true
    )]
    pub lambda: Vec<f64>,
    #[arg(long, default_value_t = 2000)]
    pub grid: usize,
    #[arg(long, default_value_t = 10_000)]
    pub k: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub stop_gap: f64,
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::Domain(format!(
            "--{name} must be positive and finite, got {v}"
        )))
    }
}

fn at_least(name: &str, v: usize, min: usize) -> Result<(), CliError> {
    if v >= min {
        Ok(())
    } else {
        Err(CliError::Domain(format!("--{name} must be at least {min}, got {v}")))
    }
}

impl RunConfig {
    pub fn seed(&self) -> Option<u64> {
        match self {
            RunConfig::Popdyn(a) => Some(a.seed),
            RunConfig::Simulate(a) => Some(a.seed),
            _ => None,
        }
    }

    /// Preconditions checked before any solver runs.
    pub fn validate(&self) -> Result<(), CliError> {
        match self {
            RunConfig::Constants(a) => {
                positive("x-limit", a.x_limit)?;
                at_least("grid", a.grid, 2)
            }
            RunConfig::Curve(a) => {
                if let Some(l) = a.lambda {
                    positive("lambda", l)?;
                }
                positive("x-limit", a.x_limit)?;
                at_least("grid", a.grid, 2)
            }
            RunConfig::FiniteLambda(a) => {
                positive("lambda", a.lambda)?;
                at_least("grid", a.grid, 1)?;
                at_least("sweep", a.sweep, 1)
            }
            RunConfig::Iterate(a) => {
                positive("lambda", a.lambda)?;
                positive("stop-gap", a.stop_gap)?;
                at_least("grid", a.grid, 16)
            }
            RunConfig::Popdyn(a) => {
                positive("lambda", a.lambda)?;
                at_least("pop", a.pop, 1)?;
                at_least("grid", a.grid, 16)
            }
            RunConfig::Simulate(a) => {
                positive("lambda", a.lambda)?;
                at_least("n", a.n, 2)?;
                at_least("replicas", a.replicas, 1)
            }
            RunConfig::TspC(a) => {
                if a.lambda.is_empty() {
                    return Err(CliError::Domain("--lambda needs at least one value".into()));
                }
                for &l in &a.lambda {
                    positive("lambda", l)?;
                }
                positive("stop-gap", a.stop_gap)?;
                at_least("grid", a.grid, 16)
            }
        }
    }
}
