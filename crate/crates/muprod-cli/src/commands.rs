use std::fmt::Write as _;

use muprod::clt::{clt_experiment, CltReport};
use muprod::ensemble::{kernel, kernel_direct, make_parameters, BiorthogonalSystem};
use muprod::hardedge::{convergence_ladder, LadderRung, LADDER_POINTS};
use muprod::identities::{run_identity_suite, FamilyVerdict};
use muprod::par::Execution;
use muprod::quadrature::integrate_finite;
use muprod::sampler::{empirical_density, sample_batch};
use muprod::Error;
use serde::Serialize;

use crate::config::{parse_grid, parse_polynomial, Format, MethodArg, RunConfig};
use crate::CliError;

/// Bumped whenever a column changes meaning.
pub const CSV_VERSION: u32 = 1;

pub struct Outcome {
    pub text: String,
    /// Set when a check failed; the text is still written.
    pub failure: Option<String>,
}

fn csv_header(cfg: &RunConfig, columns: &[&str]) -> String {
    let mut s = format!("# muprod {} csv v{CSV_VERSION}\n", cfg.subcommand);
    if let Ok(serde_json::Value::Object(map)) = serde_json::to_value(cfg) {
        for (k, v) in map {
            let _ = writeln!(s, "# {k} = {v}");
        }
    }
    s.push_str(&columns.join(","));
    s.push('\n');
    s
}

/// Shortest round-trip text, in exponent form away from order one.
fn num(v: f64) -> String {
    if v == 0.0 || !v.is_finite() || (1e-4..1e15).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    config: &'a RunConfig,
    #[serde(flatten)]
    body: T,
}

fn check_tolerance(cfg: &RunConfig, value: f64, what: &str) -> Option<String> {
    let tol = cfg.tolerance?;
    (!(value <= tol)).then(|| format!("{what} {value:e} exceeds tolerance {tol:e}"))
}

fn system(cfg: &RunConfig) -> Result<BiorthogonalSystem, CliError> {
    Ok(BiorthogonalSystem::new(make_parameters(cfg.mu, cfg.n, cfg.m)?))
}

#[derive(Serialize)]
struct MethodValue {
    method: &'static str,
    value: f64,
}

#[derive(Serialize)]
struct KernelRow {
    x: f64,
    y: f64,
    values: Vec<MethodValue>,
    #[serde(rename = "max-rel-deviation", skip_serializing_if = "Option::is_none")]
    max_rel_deviation: Option<f64>,
}

pub fn kernel_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let grid = cfg.grid.as_deref().ok_or_else(|| CliError::Usage("kernel needs --grid".into()))?;
    let (xs, ys) = parse_grid(grid)?;
    if xs.iter().chain(&ys).any(|&v| !(v > 0.0)) {
        return Err(CliError::Usage("grid points must be positive".into()));
    }
    let sys = system(cfg)?;
    let methods = cfg.method.methods();
    let all = cfg.method == MethodArg::All;
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for &x in &xs {
        for &y in &ys {
            let mut values = Vec::new();
            for &m in &methods {
                let v = match kernel(x, y, &sys, m) {
                    Ok(k) => k.value,
                    // the Christoffel-Darboux form is undefined on the diagonal
                    Err(Error::Proximity { .. }) if all => f64::NAN,
                    Err(err) => return Err(err.into()),
                };
                values.push(MethodValue { method: m.name(), value: v });
            }
            let max_rel_deviation = all.then(|| {
                let finite: Vec<f64> = values.iter().map(|v| v.value).filter(|v| v.is_finite()).collect();
                let scale = finite.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
                let hi = finite.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let lo = finite.iter().cloned().fold(f64::INFINITY, f64::min);
                (hi - lo) / scale
            });
            worst = worst.max(max_rel_deviation.unwrap_or(0.0));
            rows.push(KernelRow { x, y, values, max_rel_deviation });
        }
    }
    let text = match cfg.format {
        Format::Csv => {
            let mut cols = vec!["x", "y"];
            if all {
                cols.extend(methods.iter().map(|m| m.name()));
                cols.push("max-rel-deviation");
            } else {
                cols.extend(["K", "method"]);
            }
            let mut s = csv_header(cfg, &cols);
            for r in &rows {
                let _ = write!(s, "{},{}", num(r.x), num(r.y));
                if all {
                    for v in &r.values {
                        let _ = write!(s, ",{}", num(v.value));
                    }
                    let _ = writeln!(s, ",{}", num(r.max_rel_deviation.unwrap_or(0.0)));
                } else {
                    let _ = writeln!(s, ",{},{}", num(r.values[0].value), r.values[0].method);
                }
            }
            s
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                rows: &'a [KernelRow],
            }
            to_json(&Document { config: cfg, body: Body { rows: &rows } })
        }
    };
    Ok(Outcome {
        text,
        failure: check_tolerance(cfg, worst, "max relative deviation between methods"),
    })
}

#[derive(Serialize)]
struct DensityBin {
    center: f64,
    density: f64,
    std_error: f64,
    analytic: f64,
}

pub fn density_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    if cfg.trials < 100 {
        return Err(CliError::Usage(format!("density needs at least 100 trials, got {}", cfg.trials)));
    }
    if cfg.bins == 0 {
        return Err(CliError::Usage("--bins must be positive".into()));
    }
    let sys = system(cfg)?;
    let batch = sample_batch(&sys.params, cfg.trials, cfg.seed, false, Execution::default())?;
    let range = match &cfg.grid {
        Some(g) => {
            let (xs, _) = parse_grid(g)?;
            let (lo, hi) = (xs[0], *xs.last().unwrap());
            if !(lo >= 0.0 && hi > lo) {
                return Err(CliError::Usage("density range needs 0 <= x0 < x1".into()));
            }
            (lo, hi)
        }
        None => {
            let mut all: Vec<f64> = batch.spectra.iter().flatten().copied().collect();
            if all.is_empty() {
                return Err(CliError::Numeric("every trial failed".into()));
            }
            all.sort_by(|a, b| a.total_cmp(b));
            (0.0, all[((all.len() - 1) as f64 * 0.995) as usize])
        }
    };
    let hist = empirical_density(&batch, cfg.bins, range)?;
    let diag = |x: f64| if x == 0.0 { 0.0 } else { kernel_direct(x, x, &sys).unwrap_or(f64::NAN) };
    let mut bins = Vec::with_capacity(cfg.bins);
    let mut outside_3sigma = 0;
    for (i, w) in hist.edges.windows(2).enumerate() {
        let mass = integrate_finite(diag, w[0], w[1], 1e-10)?.value;
        let analytic = mass / (w[1] - w[0]);
        if !analytic.is_finite() {
            return Err(CliError::Numeric(format!("kernel diagonal not finite on [{}, {}]", w[0], w[1])));
        }
        if (hist.density[i] - analytic).abs() > 3.0 * hist.std_error[i] {
            outside_3sigma += 1;
        }
        bins.push(DensityBin {
            center: 0.5 * (w[0] + w[1]),
            density: hist.density[i],
            std_error: hist.std_error[i],
            analytic,
        });
    }
    let mass = hist.total_mass();
    let text = match cfg.format {
        Format::Csv => {
            let mut s = csv_header(cfg, &["center", "density", "std-error", "analytic"]);
            for b in &bins {
                let _ = writeln!(s, "{},{},{},{}", num(b.center), num(b.density), num(b.std_error), num(b.analytic));
            }
            let _ = writeln!(s, "# failed-trials = {}", batch.failed);
            let _ = writeln!(s, "# outside-range-per-trial = {}", hist.outside);
            let _ = writeln!(s, "# bins-outside-3-sigma = {outside_3sigma}");
            let _ = writeln!(s, "# mass = {mass} expected {}", cfg.n);
            s
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                bins: &'a [DensityBin],
                failed_trials: usize,
                outside_range_per_trial: f64,
                bins_outside_3_sigma: usize,
                mass: f64,
            }
            to_json(&Document {
                config: cfg,
                body: Body {
                    bins: &bins,
                    failed_trials: batch.failed,
                    outside_range_per_trial: hist.outside,
                    bins_outside_3_sigma: outside_3sigma,
                    mass,
                },
            })
        }
    };
    let frac = outside_3sigma as f64 / cfg.bins as f64;
    Ok(Outcome {
        text,
        failure: check_tolerance(cfg, frac, "fraction of bins outside 3σ"),
    })
}

pub fn hardedge_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let nu = cfg.nu.unwrap_or(0);
    let ns = cfg.ns.clone().unwrap_or_else(|| vec![20, 40, 80]);
    if ns.is_empty() || ns.contains(&0) {
        return Err(CliError::Usage("--Ns needs positive sizes".into()));
    }
    let points = match &cfg.grid {
        Some(g) => parse_grid(g)?.0,
        None => LADDER_POINTS.to_vec(),
    };
    if points.iter().any(|&p| !(p > 0.0)) {
        return Err(CliError::Usage("hard-edge points must be positive".into()));
    }
    let rungs = convergence_ladder(cfg.mu, nu, &ns, &points)?;
    let monotone = rungs.windows(2).all(|w| w[1].deviation < w[0].deviation);
    let text = match cfg.format {
        Format::Csv => {
            let mut s = csv_header(cfg, &["N", "deviation", "worst-x", "worst-y"]);
            for r in &rungs {
                let _ = writeln!(s, "{},{},{},{}", r.n_small, num(r.deviation), num(r.worst_x), num(r.worst_y));
            }
            let _ = writeln!(s, "# monotone = {monotone}");
            s
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                rungs: &'a [LadderRung],
                monotone: bool,
            }
            to_json(&Document { config: cfg, body: Body { rungs: &rungs, monotone } })
        }
    };
    let last = rungs.last().map(|r| r.deviation).unwrap_or(0.0);
    Ok(Outcome {
        text,
        failure: check_tolerance(cfg, last, "deviation at the largest N"),
    })
}

pub fn clt_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let poly = parse_polynomial(cfg.f.as_deref().unwrap_or("x"))?;
    let report = clt_experiment(cfg.mu, cfg.n, cfg.m, &poly, cfg.trials, cfg.seed, Execution::default())?;
    let text = match cfg.format {
        Format::Json => to_json(&Document { config: cfg, body: &report }),
        Format::Csv => {
            let mut s = csv_header(cfg, &["key", "value"]);
            if let Ok(serde_json::Value::Object(map)) = serde_json::to_value(&report) {
                for (k, v) in map {
                    let v = match v {
                        serde_json::Value::Array(a) => {
                            a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
                        }
                        other => other.to_string(),
                    };
                    let _ = writeln!(s, "{k},{v}");
                }
            }
            s
        }
    };
    let CltReport { ratio, .. } = report;
    Ok(Outcome {
        text,
        failure: check_tolerance(cfg, (ratio - 1.0).abs(), "|sample/analytic variance - 1|"),
    })
}

pub fn verify_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let families = run_identity_suite(Execution::default());
    let failures: usize = families.iter().map(|f| f.failures).sum();
    let ok = families.iter().all(FamilyVerdict::ok);
    let text = match cfg.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                ok: bool,
                passes: usize,
                failures: usize,
                skips: usize,
                families: &'a [FamilyVerdict],
            }
            to_json(&Document {
                config: cfg,
                body: Body {
                    ok,
                    passes: families.iter().map(|f| f.passes).sum(),
                    failures,
                    skips: families.iter().map(|f| f.skips).sum(),
                    families: &families,
                },
            })
        }
        Format::Csv => {
            let mut s = csv_header(cfg, &["family", "grid-size", "passes", "failures", "skips"]);
            for f in &families {
                let _ = writeln!(s, "{},{},{},{},{}", f.family, f.grid_size, f.passes, f.failures, f.skips);
            }
            s
        }
    };
    let failure = (!ok).then(|| {
        let bad: Vec<&str> = families.iter().filter(|f| !f.ok()).map(|f| f.family.as_str()).collect();
        format!("{failures} identity failures in {}", bad.join(", "))
    });
    Ok(Outcome { text, failure })
}
