//! Command-line front end. Errors go to stderr as one JSON object and set
//! the exit status; warnings never do.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Analysis, AnalysisConfig};
use crate::error::{FrameError, Result};
use crate::report::{run, Command, RunOutput};

#[derive(Debug, Parser)]
#[command(name = "nsframes", version, about = "Frame bounds and duals of nonstationary systems of translates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Analyze a translate family.
    Analyze(CommonArgs),
    /// Analyze a Gabor system from Weyl–Heisenberg parameters.
    Gabor(CommonArgs),
    /// Wavelet diagnostics from extended-affine parameters.
    Wavelet(CommonArgs),
    /// Canonical dual bounds and commutation residuals.
    Dual(CommonArgs),
    /// Finite-section inverse-norm and coefficient sweep.
    FiniteSection(CommonArgs),
    /// Rank, biorthogonality and shift-operator checks.
    Independence(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML config file.
    #[arg(long)]
    pub config: PathBuf,
    /// Directory for report.json and CSV files.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Oracle grid size; also enables the oracle analysis.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Print the report to stdout.
    #[arg(long)]
    pub json: bool,
    /// Write CSV curves next to the report.
    #[arg(long)]
    pub csv: bool,
}

impl Sub {
    fn split(&self) -> (Command, &CommonArgs) {
        match self {
            Sub::Analyze(a) => (Command::Analyze, a),
            Sub::Gabor(a) => (Command::Gabor, a),
            Sub::Wavelet(a) => (Command::Wavelet, a),
            Sub::Dual(a) => (Command::Dual, a),
            Sub::FiniteSection(a) => (Command::FiniteSection, a),
            Sub::Independence(a) => (Command::Independence, a),
        }
    }
}

pub fn execute(cmd: Command, args: &CommonArgs) -> Result<RunOutput> {
    let mut cfg = AnalysisConfig::load(&args.config)?;
    if let Some(n) = args.grid {
        cfg.oracle.n = n;
        let mut list = cfg.analyses.take().unwrap_or_else(|| vec![Analysis::Bounds]);
        list.push(Analysis::Oracle);
        cfg.analyses = Some(list);
        cfg.validate()?;
    }
    let out = run(&cfg, cmd)?;
    let dir = args.out.clone().or_else(|| cfg.output.dir.clone());
    match &dir {
        Some(d) => out.write_to(d, args.csv)?,
        None if args.csv => return Err(FrameError::Config("--csv needs --out or output.dir".into())),
        None => {}
    }
    Ok(out)
}

/// Parses `argv`, runs, and returns the process exit status.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (cmd, args) = cli.command.split();
    match execute(cmd, args) {
        Ok(out) => {
            for w in &out.report.warnings {
                eprintln!("warning: {w}");
            }
            if args.json || (args.out.is_none() && !args.csv) {
                let mut stdout = std::io::stdout().lock();
                let _ = writeln!(stdout, "{}", out.report.to_json());
            }
            0
        }
        Err(e) => {
            let body = serde_json::json!({ "error": { "code": e.code(), "message": e.to_string() } });
            eprintln!("{body}");
            e.exit_status()
        }
    }
}
