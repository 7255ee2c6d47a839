use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use muprod::ensemble::KernelMethod;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Direct,
    Double,
    Cd,
    Contour,
    All,
}

impl MethodArg {
    pub fn methods(self) -> Vec<KernelMethod> {
        match self {
            MethodArg::Direct => vec![KernelMethod::DirectSum],
            MethodArg::Double => vec![KernelMethod::DoubleSum],
            MethodArg::Cd => vec![KernelMethod::ChristoffelDarboux],
            MethodArg::Contour => vec![KernelMethod::DoubleContour],
            MethodArg::All => KernelMethod::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every subcommand. Every field is optional so that a
/// config file can fill what the command line leaves out; the same shape
/// is read from the JSON file.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommonArgs {
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub m: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub bins: Option<usize>,
    /// "x0:x1:steps,y0:y1:steps"
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Exit with status 1 when the run's check exceeds this tolerance.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// JSON file with any of the flags above; flags win.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(skip)]
    pub nu: Option<usize>,
    #[arg(skip)]
    #[serde(rename = "Ns")]
    pub ns: Option<Vec<usize>>,
    #[arg(skip)]
    pub f: Option<String>,
}

impl CommonArgs {
    fn or(self, file: CommonArgs) -> CommonArgs {
        CommonArgs {
            mu: self.mu.or(file.mu),
            n: self.n.or(file.n),
            m: self.m.or(file.m),
            seed: self.seed.or(file.seed),
            trials: self.trials.or(file.trials),
            bins: self.bins.or(file.bins),
            grid: self.grid.or(file.grid),
            method: self.method.or(file.method),
            out: self.out.or(file.out),
            format: self.format.or(file.format),
            tolerance: self.tolerance.or(file.tolerance),
            config: self.config,
            nu: self.nu.or(file.nu),
            ns: self.ns.or(file.ns),
            f: self.f.or(file.f),
        }
    }
}

fn read_config(path: &Path) -> Result<CommonArgs, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|err| CliError::Usage(format!("cannot read config {}: {err}", path.display())))?;
    serde_json::from_str(&text).map_err(|err| CliError::Usage(format!("bad config {}: {err}", path.display())))
}

/// Everything a subcommand runs with, after defaults. Echoed into every
/// output header.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub subcommand: &'static str,
    pub mu: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub seed: u64,
    pub trials: usize,
    pub bins: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    pub method: MethodArg,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<usize>,
    #[serde(rename = "Ns", skip_serializing_if = "Option::is_none")]
    pub ns: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

pub struct Defaults {
    pub n: usize,
    pub trials: usize,
    pub format: Format,
}

pub fn resolve(subcommand: &'static str, args: CommonArgs, d: Defaults) -> Result<RunConfig, CliError> {
    let args = match &args.config {
        Some(p) => {
            let file = read_config(p)?;
            args.or(file)
        }
        None => args,
    };
    let n = args.n.unwrap_or(d.n);
    let cfg = RunConfig {
        subcommand,
        mu: args.mu.unwrap_or(0.5),
        n,
        m: args.m.unwrap_or(n + args.nu.unwrap_or(0)),
        seed: args.seed.unwrap_or(1),
        trials: args.trials.unwrap_or(d.trials),
        bins: args.bins.unwrap_or(40),
        grid: args.grid,
        method: args.method.unwrap_or(MethodArg::Direct),
        format: args.format.unwrap_or(d.format),
        tolerance: args.tolerance,
        nu: args.nu,
        ns: args.ns,
        f: args.f,
        out: args.out,
    };
    if !(0.0..=1.0).contains(&cfg.mu) || cfg.mu == 0.0 {
        return Err(CliError::Usage(format!("--mu must lie in (0, 1], got {}", cfg.mu)));
    }
    if cfg.n == 0 || cfg.m < cfg.n {
        return Err(CliError::Usage(format!("need 1 <= N <= M, got N={} M={}", cfg.n, cfg.m)));
    }
    if let Some(t) = cfg.tolerance {
        if !(t > 0.0) {
            return Err(CliError::Usage(format!("--tolerance must be positive, got {t}")));
        }
    }
    Ok(cfg)
}

/// Evenly spaced points on one axis of "x0:x1:steps"; one step gives x0.
fn parse_axis(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("bad grid axis {s:?}, expected x0:x1:steps"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let x0: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let x1: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let steps: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if steps == 0 || !x0.is_finite() || !x1.is_finite() {
        return Err(bad());
    }
    if steps == 1 {
        return Ok(vec![x0]);
    }
    Ok((0..steps).map(|i| x0 + (x1 - x0) * i as f64 / (steps - 1) as f64).collect())
}

pub fn parse_grid(s: &str) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let axes: Vec<&str> = s.split(',').collect();
    match axes.as_slice() {
        [x] => {
            let xs = parse_axis(x)?;
            Ok((xs.clone(), xs))
        }
        [x, y] => Ok((parse_axis(x)?, parse_axis(y)?)),
        _ => Err(CliError::Usage(format!("bad grid {s:?}, expected x0:x1:steps,y0:y1:steps"))),
    }
}

/// Ascending coefficients of a polynomial written like "x", "3x^2-x+1",
/// "0.5*x^3", or as a plain list "0,1".
pub fn parse_polynomial(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Usage(format!("bad polynomial {s:?}: {why}"));
    let s = s.replace(' ', "");
    if s.is_empty() {
        return Err(bad("empty"));
    }
    if s.contains(',') || !s.contains('x') {
        return s.split(',').map(|c| c.parse::<f64>().map_err(|_| bad("not a number"))).collect();
    }
    let mut coeffs = Vec::new();
    let mut term = String::new();
    let mut terms = Vec::new();
    for (i, ch) in s.chars().enumerate() {
        let after_exp = term.ends_with('e') || term.ends_with('E');
        if (ch == '+' || ch == '-') && i > 0 && !after_exp && !term.ends_with('^') {
            terms.push(std::mem::take(&mut term));
        }
        term.push(ch);
    }
    terms.push(term);
    for t in terms {
        let (c, k) = match t.split_once('x') {
            None => (t.parse::<f64>().map_err(|_| bad("not a number"))?, 0usize),
            Some((c, p)) => {
                let c = c.strip_suffix('*').unwrap_or(c);
                let c = match c {
                    "" | "+" => 1.0,
                    "-" => -1.0,
                    _ => c.parse::<f64>().map_err(|_| bad("bad coefficient"))?,
                };
                let k = match p {
                    "" => 1,
                    _ => p
                        .strip_prefix('^')
                        .and_then(|e| e.parse::<usize>().ok())
                        .ok_or_else(|| bad("bad exponent"))?,
                };
                (c, k)
            }
        };
        if coeffs.len() <= k {
            coeffs.resize(k + 1, 0.0);
        }
        coeffs[k] += c;
    }
    Ok(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials() {
        assert_eq!(parse_polynomial("x").unwrap(), vec![0.0, 1.0]);
        assert_eq!(parse_polynomial("3x^2 - x + 1").unwrap(), vec![1.0, -1.0, 3.0]);
        assert_eq!(parse_polynomial("-0.5*x^3").unwrap(), vec![0.0, 0.0, 0.0, -0.5]);
        assert_eq!(parse_polynomial("0,1").unwrap(), vec![0.0, 1.0]);
        assert_eq!(parse_polynomial("1e-1x").unwrap(), vec![0.0, 0.1]);
        assert!(parse_polynomial("x^").is_err());
        assert!(parse_polynomial("y").is_err());
    }

    #[test]
    fn grids() {
        let (x, y) = parse_grid("1:1:1,0.5:2.5:3").unwrap();
        assert_eq!(x, vec![1.0]);
        assert_eq!(y, vec![0.5, 1.5, 2.5]);
        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("1:2:0,1:2:2").is_err());
        assert!(parse_grid("a:2:2").is_err());
    }
}
