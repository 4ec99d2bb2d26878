#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use qes_core::MapConvention;

mod commands;
mod config;
mod output;

use config::{ConfigLayer, Format, RunConfig};

/// Quasi-exact levels of the rotating induced-dipole sextic oscillator.
#[derive(Debug, Parser)]
#[command(name = "qes", version)]
struct Cli {
    #[command(flatten)]
    opts: Opts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Opts {
    /// Flat `key = value` config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Effective mass m.
    #[arg(long, global = true)]
    m: Option<f64>,

    /// Bare mass; m = mbar + alpha·b0².
    #[arg(long, global = true)]
    mbar: Option<f64>,

    /// Reference field for the effective mass (with --mbar).
    #[arg(long, global = true)]
    b0: Option<f64>,

    #[arg(long, global = true)]
    alpha: Option<f64>,

    #[arg(long, global = true)]
    mu: Option<f64>,

    /// Rotation rate Ω of the frame.
    #[arg(long = "omega-rot", global = true)]
    omega_rot: Option<f64>,

    /// Axial wavenumbers (comma separated).
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    k: Option<Vec<f64>>,

    /// Radial modes (comma separated).
    #[arg(long, global = true, value_delimiter = ',')]
    n: Option<Vec<u32>>,

    /// Angular momenta (comma separated).
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    l: Option<Vec<i64>>,

    /// Radial cutoff for the oracle and wavefunction sampling.
    #[arg(long, global = true)]
    rmax: Option<f64>,

    /// Oracle grid points.
    #[arg(long, global = true)]
    npts: Option<usize>,

    /// Richardson-extrapolate oracle eigenvalues.
    #[arg(long, global = true, overrides_with = "no_refine")]
    refine: bool,

    #[arg(long = "no-refine", global = true, overrides_with = "refine")]
    no_refine: bool,

    /// csv or json.
    #[arg(long, global = true)]
    format: Option<Format>,

    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Dimensionless map: nominal or consistent.
    #[arg(long, global = true)]
    convention: Option<MapConvention>,

    /// Admit the constant (n = 0) solution.
    #[arg(long = "allow-n0", global = true)]
    allow_n0: bool,

    /// Write the effective configuration to this file.
    #[arg(long = "save-config", global = true)]
    save_config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Quantized frequencies, fields, β roots and energies.
    Spectrum,
    /// Discrete magnetic-field values.
    Bfield,
    /// Sampled radial function R(r) of one level.
    Wavefunction {
        /// Root index in ascending β order.
        #[arg(long, default_value_t = 0)]
        root: usize,
        #[arg(long, default_value_t = 201)]
        samples: usize,
    },
    /// Cross-check the analytic levels against the finite-difference oracle.
    Validate {
        /// Subset of check ids (comma separated); all by default.
        #[arg(long, value_delimiter = ',')]
        checks: Vec<u32>,
    },
}

impl Opts {
    fn layer(&self) -> ConfigLayer {
        ConfigLayer {
            m: self.m,
            mbar: self.mbar,
            b0: self.b0,
            alpha: self.alpha,
            mu: self.mu,
            omega_rot: self.omega_rot,
            k: self.k.clone(),
            n: self.n.clone(),
            l: self.l.clone(),
            r_max: self.rmax,
            n_pts: self.npts,
            refine: if self.refine {
                Some(true)
            } else if self.no_refine {
                Some(false)
            } else {
                None
            },
            format: self.format,
            out: self.out.clone(),
            convention: self.convention,
            allow_n0: self.allow_n0.then_some(true),
        }
    }

    fn resolve(&self) -> Result<RunConfig> {
        let base = match &self.config {
            Some(path) => ConfigLayer::load(path)?,
            None => ConfigLayer::default(),
        };
        base.overlay(self.layer()).resolve()
    }
}

fn emit(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = cli.opts.resolve()?;
    if let Some(path) = &cli.opts.save_config {
        std::fs::write(path, cfg.to_text()).with_context(|| format!("writing {}", path.display()))?;
    }
    let code = match cli.command {
        Command::Spectrum => {
            emit(&cfg, &commands::spectrum(&cfg)?.render(cfg.format))?;
            ExitCode::SUCCESS
        }
        Command::Bfield => {
            emit(&cfg, &commands::bfield(&cfg)?.render(cfg.format))?;
            ExitCode::SUCCESS
        }
        Command::Wavefunction { root, samples } => {
            emit(&cfg, &commands::wavefunction(&cfg, root, samples)?.render(cfg.format))?;
            ExitCode::SUCCESS
        }
        Command::Validate { checks } => {
            let (table, ok) = commands::validate(&cfg, &checks)?;
            emit(&cfg, &table.render(cfg.format))?;
            if ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("validation failed");
                ExitCode::from(1)
            }
        }
    };
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
