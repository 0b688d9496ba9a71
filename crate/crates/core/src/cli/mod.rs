//! Command-line driver: `chiralchain <kind> --config <path> [--set k=v]...`.
//!
//! Exit codes: 0 on success, 2 for configuration and parameter errors,
//! 3 for numerical failures, 1 for I/O errors. Failures print one JSON
//! object on stderr.

pub mod config;
pub mod csv;
pub mod jobs;
pub mod plot;

use std::path::PathBuf;

use clap::Parser;

use crate::error::{Error, Result};
use config::{parse_config_with, JobConfig, JobKind};

#[derive(Debug, Parser)]
#[command(name = "chiralchain", version, about = "Free-fermion solver for the long-range chiral XY chain")]
pub struct Args {
    /// Job kind: phase-diagram, correlations, entropy, quench or scaling.
    pub kind: String,
    /// TOML job configuration.
    #[arg(long, short)]
    pub config: PathBuf,
    /// Override a configuration entry, e.g. `--set model.h=0.5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Worker threads (0 uses every core); overrides `job.workers`.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also draw SVG charts from the CSV output.
    #[arg(long)]
    pub plot: bool,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::InvalidParameter { .. } | Error::OutOfRange { .. } => 2,
        Error::Io(_) => 1,
        Error::Dimension(_) | Error::NotAntisymmetric(_) | Error::Domain(_) | Error::Consistency(_) => 3,
    }
}

fn error_kind(err: &Error) -> &'static str {
    match exit_code(err) {
        2 => "config",
        3 => "numerical",
        _ => "io",
    }
}

/// One-line JSON error record.
pub fn error_json(err: &Error) -> String {
    serde_json::json!({
        "error": error_kind(err),
        "exit_code": exit_code(err),
        "message": err.to_string(),
    })
    .to_string()
}

/// Resolves the configuration named by `args`.
pub fn load(args: &Args) -> Result<JobConfig> {
    let kind: JobKind = args.kind.parse()?;
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::Config(format!("{}: {e}", args.config.display())))?;
    let mut cfg = parse_config_with(&text, &args.overrides)?;
    if cfg.job.kind != kind {
        return Err(Error::Config(format!(
            "command asks for `{kind}` but the configuration describes a `{}` job",
            cfg.job.kind
        )));
    }
    if let Some(w) = args.workers {
        cfg.job.workers = w;
    }
    if let Some(dir) = &args.out {
        cfg.output.dir = dir.clone();
    }
    cfg.output.plot |= args.plot;
    Ok(cfg)
}

/// Runs a job on a pool of `cfg.job.workers` threads.
pub fn execute(cfg: &JobConfig) -> Result<Vec<PathBuf>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.job.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", cfg.job.workers)))?;
    pool.install(|| jobs::run_job(cfg))
}

/// Parses `argv`, runs the job and returns the process exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match load(&args).and_then(|cfg| execute(&cfg)) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("{}", error_json(&e));
            exit_code(&e)
        }
    }
}
