//! Command-line front end: `generate` builds a surface and writes meshes
//! plus a JSON report; `verify <check>` runs one numerical check.
//!
//! Exit codes: 0 success, 1 a check failed its threshold, 2 bad input or
//! I/O, 3 a numerical stage failed.

pub mod commands;
pub mod config;
pub mod export;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::Check;
use config::{parse_pair, MeshFormat, Overrides, RunConfig, Start};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    BadInput(String),
    #[error("check failed")]
    VerifyFailed,
    #[error("{stage} failed: {msg}")]
    Numerical { stage: String, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed => 1,
            CliError::BadInput(_) | CliError::Io(_) => 2,
            CliError::Numerical { .. } => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "dpw-cmc", version, about = "CMC cylinders from the Bessel equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the surface, export meshes and write a report.
    Generate,
    /// Run one numerical check.
    Verify {
        #[arg(value_enum)]
        check: Check,
    },
}

#[derive(Debug, Default, clap::Args)]
pub struct Opts {
    /// Cylinder parameter, r < 1 and r != 0.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub r: Option<f64>,
    /// Truncation degree N of the plus-loop.
    #[arg(long, global = true)]
    pub degree: Option<usize>,
    /// Number m of λ samples on the unit circle.
    #[arg(long, global = true)]
    pub lambda_samples: Option<usize>,
    /// ODE relative/absolute tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Annulus radii as `rho_min:rho_max`.
    #[arg(long, global = true, value_parser = parse_pair::<f64>)]
    pub annulus: Option<(f64, f64)>,
    /// Grid size as `radial:angular`.
    #[arg(long, global = true, value_parser = parse_pair::<usize>)]
    pub grid: Option<(usize, usize)>,
    /// Mesh output path; reports go next to it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub format: Option<MeshFormat>,
    /// `key = value` config file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (also `DPW_CMC_THREADS`).
    #[arg(long, global = true, env = "DPW_CMC_THREADS")]
    pub threads: Option<usize>,
    /// Initial frame for the monodromy check: identity or unitarized.
    #[arg(long, global = true)]
    pub start: Option<Start>,
    /// Shift of the Bessel order in `verify gauge`.
    #[arg(long, global = true, hide = true, allow_hyphen_values = true)]
    pub alpha_offset: Option<f64>,
}

impl Opts {
    fn overrides(&self) -> Overrides {
        Overrides {
            r: self.r,
            degree: self.degree,
            lambda_samples: self.lambda_samples,
            ode_tol: self.tol,
            annulus: self.annulus,
            grid: self.grid,
            out: self.out.clone(),
            format: self.format,
            start: self.start,
            alpha_offset: self.alpha_offset,
        }
    }

    /// Defaults, then the config file, then flags.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply(&config::read_config_file(path)?);
        }
        cfg.apply(&self.overrides());
        // the output extension follows the format unless a path was given
        if self.out.is_none() && cfg.out == RunConfig::default().out {
            cfg.out.set_extension(cfg.format.extension());
        }
        Ok(cfg)
    }
}

fn init_threads(n: Option<usize>) -> Result<(), CliError> {
    let Some(n) = n else { return Ok(()) };
    if n == 0 {
        return Err(CliError::BadInput("thread count must be positive".into()));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::BadInput(e.to_string()))?;
    Ok(())
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    init_threads(cli.opts.threads)?;
    let cfg = cli.opts.resolve()?;
    let report = match cli.command {
        Command::Generate => commands::generate(&cfg)?,
        Command::Verify { check } => {
            let r = commands::verify(&cfg, check)?;
            r.write(&cfg.sibling(&format!("_{}", check.name()), "json"))?;
            r
        }
    };
    print!("{}", report.summary());
    println!("{}: {}", report.check, if report.pass { "PASS" } else { "FAIL" });
    if report.pass {
        Ok(())
    } else {
        Err(CliError::VerifyFailed)
    }
}
