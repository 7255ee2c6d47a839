//! `muprod`: runs the ensemble experiments and writes CSV or JSON.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage error, 3 numeric failure.

mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use config::{resolve, CommonArgs, Defaults, Format};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
}

impl From<muprod::Error> for CliError {
    fn from(err: muprod::Error) -> Self {
        match err {
            muprod::Error::Convergence { .. } | muprod::Error::Numeric(_) => CliError::Numeric(err.to_string()),
            _ => CliError::Usage(err.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "muprod", version, about = "Singular values of products of coupled Gaussian matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Correlation kernel K_N(x, y) on a grid
    Kernel(CommonArgs),
    /// Histogram of sampled squared singular values against K_N(x, x)
    Density(CommonArgs),
    /// Distance of the rescaled kernel from its hard-edge limit along an N ladder
    Hardedge(HardedgeArgs),
    /// Variance of a linear statistic against the limiting formula
    Clt(CltArgs),
    /// Exact and floating-point identity suite
    Verify(CommonArgs),
}

#[derive(Args)]
struct HardedgeArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    nu: Option<usize>,
    /// Comma-separated matrix sizes, e.g. 20,40,80
    #[arg(long = "Ns", value_delimiter = ',')]
    ns: Option<Vec<usize>>,
}

#[derive(Args)]
struct CltArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Test polynomial, e.g. "x" or "x^2-3x" or "0,1"
    #[arg(long)]
    f: Option<String>,
}

fn defaults(n: usize, trials: usize, format: Format) -> Defaults {
    Defaults { n, trials, format }
}

fn run(cli: Cli) -> Result<(commands::Outcome, Option<std::path::PathBuf>), CliError> {
    let (cfg, cmd): (_, fn(&config::RunConfig) -> Result<commands::Outcome, CliError>) = match cli.command {
        Command::Kernel(a) => (resolve("kernel", a, defaults(4, 0, Format::Csv))?, commands::kernel_cmd),
        Command::Density(a) => (resolve("density", a, defaults(4, 2000, Format::Csv))?, commands::density_cmd),
        Command::Hardedge(h) => {
            let mut a = h.common;
            a.nu = h.nu.or(a.nu);
            a.ns = h.ns.or(a.ns);
            (resolve("hardedge", a, defaults(20, 0, Format::Csv))?, commands::hardedge_cmd)
        }
        Command::Clt(c) => {
            let mut a = c.common;
            a.f = c.f.or(a.f);
            (resolve("clt", a, defaults(100, 5000, Format::Json))?, commands::clt_cmd)
        }
        Command::Verify(a) => (resolve("verify", a, defaults(1, 0, Format::Json))?, commands::verify_cmd),
    };
    Ok((cmd(&cfg)?, cfg.out.clone()))
}

#[derive(Serialize)]
struct FailureReport<'a> {
    error: &'a str,
    message: &'a str,
}

fn report(kind: &str, message: &str, code: u8) -> ExitCode {
    let body = serde_json::to_string(&FailureReport { error: kind, message }).expect("serialisable");
    eprintln!("{body}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(err) => {
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let (outcome, out) = match run(cli) {
        Ok(v) => v,
        Err(CliError::Usage(m)) => return report("usage", &m, 2),
        Err(CliError::Numeric(m)) => return report("numeric", &m, 3),
    };
    let written = match &out {
        Some(path) => std::fs::write(path, &outcome.text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout().write_all(outcome.text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(m) = written {
        return report("usage", &m, 2);
    }
    match outcome.failure {
        Some(m) => report("verification", &m, 1),
        None => ExitCode::SUCCESS,
    }
}
