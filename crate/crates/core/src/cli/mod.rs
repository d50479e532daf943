//! Command-line front end: configuration, commands and result files.

pub mod commands;
mod config;
pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use config::{
    AtomSection, BathSection, DynamicsSection, FlagsSection, Format, MethodName, OutputSection, RunConfig,
    SpectraSection, StateLabel, SweepSection, VerifySection,
};

use crate::error::{Error, Result};

/// A loaded configuration with the paths it resolves against.
pub struct Context {
    pub config: RunConfig,
    /// Relative paths in the configuration are resolved against this.
    pub base_dir: PathBuf,
    pub out_dir: PathBuf,
    pub hash: String,
    pub seed: Option<u64>,
}

impl Context {
    pub fn new(config: RunConfig, base_dir: PathBuf, out_dir: Option<PathBuf>) -> Self {
        let out_dir = out_dir.unwrap_or_else(|| base_dir.join(&config.output.directory));
        Self {
            hash: config.hash(),
            config,
            base_dir,
            out_dir,
            seed: None,
        }
    }

    pub fn load(path: Option<&Path>, out_dir: Option<PathBuf>) -> Result<Self> {
        match path {
            Some(p) => {
                let config = RunConfig::load(p)?;
                let base = p.parent().map(Path::to_path_buf).unwrap_or_default();
                Ok(Self::new(config, base, out_dir))
            }
            None => Ok(Self::new(RunConfig::default(), PathBuf::from("."), out_dir)),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "vacmix", version, about = "Vacuum-induced state mixing in hydrogen")]
pub struct Cli {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, overriding [output].directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for parallel maps.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed of the randomized property suite.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate J, γ and λ over a frequency grid.
    Spectra,
    /// Eigenstates of one block along a list of spectral files.
    Sweep,
    /// Propagate the configured generator variants.
    Propagate,
    /// Run the acceptance suite.
    Verify,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Io { .. } | Error::Parse { .. } => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("--threads: {e}")))?;
    }
    let mut ctx = Context::load(cli.config.as_deref(), cli.out.clone())?;
    ctx.seed = cli.seed;
    match cli.command {
        Command::Spectra => {
            for p in commands::spectra(&ctx)? {
                println!("{}", p.display());
            }
        }
        Command::Sweep => {
            let t = commands::sweep(&ctx)?;
            println!(
                "{} points, {} states per point, {} tracking ambiguities; written to {}",
                t.full.len(),
                t.labels.len(),
                t.ambiguities.len(),
                ctx.out_dir.display()
            );
        }
        Command::Propagate => {
            let (_, report) = commands::propagate(&ctx)?;
            for c in &report.comparisons {
                println!("{} vs {}: max deviation {:.3e}", c.run_a, c.run_b, c.max_abs);
            }
        }
        Command::Verify => {
            let results = commands::verify(&ctx)?;
            for c in &results {
                println!("{}", c.line());
            }
            if !results.iter().all(|c| c.passed()) {
                return Ok(EXIT_FAILURE);
            }
        }
    }
    Ok(EXIT_OK)
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
