// Copyright 2026 The mcoupler Authors
// SPDX-License-Identifier: Apache-2.0

//! `mcoupler` command-line front end.
//!
//! Exit codes: 0 success, 2 input or configuration error, 3 numeric failure
//! (no sign change, resonance, singular matrix), 4 non-convergence.

mod commands;
mod config;

use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mcoupler::capnet::Design;
use mcoupler::error::ErrorClass;

pub const TOOL: &str = "mcoupler";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "mcoupler", version, about = "Multi-chip floating tunable coupler toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every verb.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Device configuration (JSON, `"schema": "mcoupler.device/1"`).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for every random draw.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Net coupling over a flux range; writes a `phi,g_hz` table.
    Sweep(SweepArgs),
    /// Flux of zero net coupling inside a bracket.
    FindZero(FindZeroArgs),
    /// Couplings of a network design versus bump height; writes a table.
    Sensitivity(SensitivityArgs),
    /// Fit the coupler model to a measured `phi,g_hz[,sigma_hz]` curve.
    FitG(FitGArgs),
    /// Fit the readout coupling to Purcell-limited coupler lifetimes.
    FitPurcell(FitPurcellArgs),
    /// Coherence-limited CZ fidelity.
    Fidelity(FidelityArgs),
    /// Interleaved randomized benchmarking from CSV runs or simulation.
    Rb(RbArgs),
    /// Residual ZZ from exact diagonalisation at selected fluxes.
    Zz(ZzArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_negative_numbers = true)]
    pub phi_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub phi_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Also write a JSON report (inputs, tool version, summary) here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FindZeroArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_negative_numbers = true)]
    pub lo: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub hi: Option<f64>,
    /// Stop when |g| falls below this (Hz).
    #[arg(long)]
    pub tol_hz: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SensitivityArgs {
    #[command(flatten)]
    pub common: Common,
    /// Network file; overrides `sensitivity.network`.
    #[arg(long)]
    pub network: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub design: Option<DesignArg>,
    /// Comma-separated bump heights in metres.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub heights: Option<Vec<f64>>,
    /// Also write a JSON report (inputs, tool version, rows) here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum DesignArg {
    PaddlePaddle,
    BumpPaddle,
    BumpBump,
    AsDeclared,
}

impl From<DesignArg> for Design {
    fn from(d: DesignArg) -> Self {
        match d {
            DesignArg::PaddlePaddle => Design::PaddlePaddle,
            DesignArg::BumpPaddle => Design::BumpPaddle,
            DesignArg::BumpBump => Design::BumpBump,
            DesignArg::AsDeclared => Design::AsDeclared,
        }
    }
}

#[derive(Debug, Args)]
pub struct FitGArgs {
    #[command(flatten)]
    pub common: Common,
    /// `phi,g_hz[,sigma_hz]` CSV; overrides `fit_g.data`.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Report the junction asymmetry as `r >= 1`.
    #[arg(long)]
    pub r_at_least_one: bool,
}

#[derive(Debug, Args)]
pub struct FitPurcellArgs {
    #[command(flatten)]
    pub common: Common,
    /// `omega_c_hz,t1_s` CSV.
    #[arg(long)]
    pub data: PathBuf,
}

#[derive(Debug, Args)]
pub struct FidelityArgs {
    #[command(flatten)]
    pub common: Common,
    /// Use the modulated qubit-2 coherence times for the unmeasured static
    /// ones. This is an assumption and is recorded in the report.
    #[arg(long)]
    pub assume_static_equals_modulated: bool,
}

#[derive(Debug, Args)]
pub struct RbArgs {
    #[command(flatten)]
    pub common: Common,
    /// Reference run `m,survival_mean[,survival_sem]`; overrides `rb.reference`.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Interleaved run; overrides `rb.interleaved`.
    #[arg(long)]
    pub interleaved: Option<PathBuf>,
    /// Simulate runs with this planted gate fidelity instead of reading CSVs.
    #[arg(long)]
    pub simulate_fidelity: Option<f64>,
    /// Number of simulated reruns for stability statistics.
    #[arg(long)]
    pub reruns: Option<usize>,
    /// Gate Hilbert-space dimension (4 for two qubits).
    #[arg(long)]
    pub dimension: Option<u32>,
}

#[derive(Debug, Args)]
pub struct ZzArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated fluxes; defaults to the zero-coupling and the
    /// maximum-coupling flux in [0, 0.5].
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub phi: Option<Vec<f64>>,
    /// Levels kept per mode.
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sweep(_) => "sweep",
            Command::FindZero(_) => "find-zero",
            Command::Sensitivity(_) => "sensitivity",
            Command::FitG(_) => "fit-g",
            Command::FitPurcell(_) => "fit-purcell",
            Command::Fidelity(_) => "fidelity",
            Command::Rb(_) => "rb",
            Command::Zz(_) => "zz",
        }
    }
}

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Input => 2,
        ErrorClass::Numeric => 3,
        ErrorClass::NonConvergence => 4,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let verb = cli.command.name();
    panic::set_hook(Box::new(|_| {}));
    match panic::catch_unwind(AssertUnwindSafe(|| commands::run(cli.command))) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("mcoupler {verb}: error: {e}");
            ExitCode::from(exit_code(e.class()))
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .map(String::as_str)
                .or_else(|| payload.downcast_ref::<&str>().copied())
                .unwrap_or("unknown failure");
            eprintln!("mcoupler {verb}: internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
