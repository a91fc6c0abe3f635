//! `tvar-rd`: rate-distortion curves for Gaussian TVAR sources from the command line.
//!
//! Every command writes its outputs atomically and records a run manifest
//! (command, model hash, settings, tool version, timestamp) beside or inside
//! them. Set `SOURCE_DATE_EPOCH` to pin the timestamp; with it, reruns give
//! byte-identical files.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 bad input, 3 model rejected by
//! the `g` floor, 4 quadrature or eigenvalue convergence failure, 5 a
//! verification threshold was exceeded.
//!
//! Simulated innovations come from ChaCha8 seeded with `--seed`, one stream
//! per path index, transformed to Gaussians by `rand_distr::StandardNormal`
//! (ziggurat).

mod commands;
mod error;
mod manifest;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tvar_rd::QuadConfig;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "tvar-rd", version, about = "Rate-distortion curves for Gaussian TVAR sources")]
pub struct Cli {
    /// Model description (JSON).
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,

    /// Output file; manifests go beside it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Rate units for summaries and plots. Curve files always carry both.
    #[arg(long, global = true, value_enum, default_value_t = Units::Nats)]
    pub units: Units,

    /// Seed for simulated innovations.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Suppress the summary on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Nats,
    Bits,
}

impl Units {
    pub fn convert(self, nats: f64) -> f64 {
        match self {
            Units::Nats => nats,
            Units::Bits => nats / std::f64::consts::LN_2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a rate-distortion curve.
    Curve(CurveArgs),
    /// Compare eigenvalue moments of the inverse covariance with their limits.
    Verify(VerifyArgs),
    /// Draw sample paths.
    Simulate(SimulateArgs),
    /// Tabulate the inverse spectrum g(r, w).
    Spectrum(SpectrumArgs),
    /// Draw curve files as one SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Finite,
    Asymptotic,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct QuadArgs {
    #[arg(long, default_value_t = QuadConfig::default().r_panels)]
    pub r_panels: usize,
    #[arg(long, default_value_t = QuadConfig::default().omega_panels)]
    pub omega_panels: usize,
    #[arg(long, default_value_t = QuadConfig::default().nodes_per_panel)]
    pub nodes_per_panel: usize,
    #[arg(long, default_value_t = QuadConfig::default().refine_tol)]
    pub refine_tol: f64,
    #[arg(long, default_value_t = QuadConfig::default().max_refinements)]
    pub max_refinements: usize,
}

impl QuadArgs {
    pub fn config(&self) -> QuadConfig {
        QuadConfig {
            r_panels: self.r_panels,
            omega_panels: self.omega_panels,
            nodes_per_panel: self.nodes_per_panel,
            refine_tol: self.refine_tol,
            max_refinements: self.max_refinements,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CurveArgs {
    #[arg(long, value_enum, default_value_t = Method::Asymptotic)]
    pub method: Method,
    /// Dimension for the finite method.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 64)]
    pub points: usize,
    #[arg(long, default_value_t = tvar_rd::model::DEFAULT_G_FLOOR)]
    pub g_floor: f64,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    /// Comma-separated dimensions.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Comma-separated moment orders.
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    pub k: Vec<u32>,
    #[arg(long, default_value_t = 1e-2)]
    pub max_rel_err: f64,
    /// Also run a Monte-Carlo covariance check with this many paths.
    #[arg(long, default_value_t = 0)]
    pub mc_paths: usize,
    /// Dimension for the Monte-Carlo check.
    #[arg(long, default_value_t = 8)]
    pub mc_n: usize,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub paths: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumArgs {
    #[arg(long, default_value_t = tvar_rd::model::DEFAULT_GRID_R)]
    pub nr: usize,
    #[arg(long, default_value_t = tvar_rd::model::DEFAULT_GRID_OMEGA)]
    pub nw: usize,
    #[arg(long, default_value_t = tvar_rd::model::DEFAULT_G_FLOOR)]
    pub g_floor: f64,
    /// Also export the inverse covariance (band text) and covariance (dense CSV) at this dimension.
    #[arg(long)]
    pub export_n: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PlotArgs {
    /// Curve CSV files.
    #[arg(required = true)]
    pub curves: Vec<PathBuf>,
    #[arg(long)]
    pub title: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError { code, message }) => {
            eprintln!("tvar-rd: {message}");
            ExitCode::from(code)
        }
    }
}
