//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::time::Instant;

use muprod::clt::{clt_experiment, fourier_coefficient_trapezoid, fourier_coefficients, limiting_variance};
use muprod::ensemble::*;
use muprod::hardedge::*;
use muprod::identities::run_identity_suite;
use muprod::par::Execution;
use muprod::quadrature::{gauss_legendre_nodes, integrate_finite, integrate_semi_infinite};
use muprod::sampler::{empirical_density, sample_batch};

type Outcome = Result<String, String>;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn biorthogonality() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for &mu in &[0.2, 0.5, 0.8] {
        for &nu in &[0usize, 1, 3] {
            let sys = BiorthogonalSystem::new(make_parameters(mu, 13, 13 + nu).map_err(e)?);
            worst = worst.max(biorthogonality_matrix(&sys, 12).map_err(e)?.max_deviation());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(worst < 1e-8 && secs < 120.0, format!("max deviation {worst:.2e} in {secs:.1}s"))
}

fn recurrences() -> Outcome {
    let mut worst: f64 = 0.0;
    for &mu in &[0.2, 0.5, 0.8] {
        for &nu in &[0usize, 2] {
            let p = make_parameters(mu, 11, 11 + nu).map_err(e)?;
            let sys = BiorthogonalSystem::new(p);
            for &x in &[0.1, 1.0, 5.0] {
                let pv = sys.eval_p_all(12, x).map_err(e)?;
                let qv = sys.eval_q_all(12, x).map_err(e)?;
                for n in 0..=10 {
                    let (a, b) = (recurrence_a(n, &p), recurrence_b(n, &p));
                    let (mut rp, mut sp, mut rq, mut sq) = (0.0, 0.0f64, 0.0, 0.0f64);
                    for j in 0..5 {
                        if n + j >= 2 {
                            rp += a[j] * pv[n + j - 2];
                            sp = sp.max((a[j] * pv[n + j - 2]).abs());
                            rq += b[j] * qv[n + j - 2];
                            sq = sq.max((b[j] * qv[n + j - 2]).abs());
                        }
                    }
                    worst = worst.max((rp - x * pv[n]).abs() / sp).max((rq - x * qv[n]).abs() / sq);
                }
            }
        }
    }
    let dual = [0.2, 0.5, 0.8].iter().all(|&mu| {
        [0usize, 1, 3].iter().all(|&nu| {
            make_parameters(mu, 1, 1 + nu)
                .map(|p| muprod::identities::check_recurrence_duality(20, &p))
                .unwrap_or(false)
        })
    });
    check(worst < 1e-9 && dual, format!("scaled residual {worst:.2e}, duality {}", if dual { "holds" } else { "broken" }))
}

fn kernel_agreement() -> Outcome {
    let (mut ds, mut cd, mut dc) = (0.0f64, 0.0f64, 0.0f64);
    for &n in &[2usize, 5, 10] {
        for &(mu, nu) in &[(0.5, 1usize), (0.3, 0), (0.8, 2)] {
            let sys = BiorthogonalSystem::new(make_parameters(mu, n, n + nu).map_err(e)?);
            for &(x, y) in &[(0.8, 1.3), (0.2, 3.0)] {
                let d = kernel(x, y, &sys, KernelMethod::DirectSum).map_err(e)?.value;
                let v = |m| kernel(x, y, &sys, m).map(|k| rel(k.value, d)).map_err(e);
                ds = ds.max(v(KernelMethod::DoubleSum)?);
                cd = cd.max(v(KernelMethod::ChristoffelDarboux)?);
                dc = dc.max(v(KernelMethod::DoubleContour)?);
            }
        }
    }
    check(
        ds < 1e-10 && cd < 1e-8 && dc < 1e-5,
        format!("double-sum {ds:.1e}, christoffel-darboux {cd:.1e}, double-contour {dc:.1e}"),
    )
}

fn normalisation() -> Outcome {
    let p1 = make_parameters(0.5, 1, 1).map_err(e)?;
    let analytic = moment_matrix_entry(0, 0, &p1) / ln_partition_function(&p1).exp();
    let p2 = make_parameters(0.5, 2, 3).map_err(e)?;
    let inner = |y1: f64| {
        integrate_semi_infinite(|y2| if y2 == 0.0 { 0.0 } else { jpdf(&[y1, y2], &p2).unwrap_or(f64::NAN) }, 1e-10)
            .map(|r| r.value)
            .unwrap_or(f64::NAN)
    };
    let two = integrate_semi_infinite(|y1| if y1 == 0.0 { 0.0 } else { inner(y1) }, 1e-9).map_err(e)?.value;
    // pseudo-random point sets from a fixed LCG
    let mut state = 12345u64;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64 * 6.0 + 0.01
    };
    let p3 = make_parameters(0.4, 3, 4).map_err(e)?;
    let sys = BiorthogonalSystem::new(p3);
    let mut det_worst: f64 = 0.0;
    for _ in 0..10 {
        let pts = [next(), next(), next()];
        let m: Vec<Vec<f64>> = pts
            .iter()
            .map(|&x| pts.iter().map(|&y| kernel_direct(x, y, &sys).unwrap_or(f64::NAN)).collect())
            .collect();
        det_worst = det_worst.max(rel(lu_determinant(m) / 6.0, jpdf(&pts, &p3).map_err(e)?));
    }
    check(
        (analytic - 1.0).abs() < 1e-14 && (two - 1.0).abs() < 1e-6 && det_worst < 1e-8,
        format!("N=1 {analytic}, N=2 mass {two:.10}, determinant identity {det_worst:.1e}"),
    )
}

fn trace_identities() -> Outcome {
    let (mut count_err, mut mean_err) = (0.0f64, 0.0f64);
    for &(mu, n, nu) in &[(0.5, 5usize, 1usize), (0.3, 4, 0), (0.7, 3, 2)] {
        let p = make_parameters(mu, n, n + nu).map_err(e)?;
        let sys = BiorthogonalSystem::new(p);
        let diag = |x: f64| if x == 0.0 { 0.0 } else { kernel_direct(x, x, &sys).unwrap_or(f64::NAN) };
        let count = integrate_semi_infinite(diag, 1e-12).map_err(e)?.value;
        let mean = integrate_semi_infinite(|x| x * diag(x), 1e-12).map_err(e)?.value;
        let want: f64 = (0..n).map(|k| recurrence_a(k, &p)[2]).sum();
        count_err = count_err.max((count - n as f64).abs());
        mean_err = mean_err.max((mean - want).abs());
    }
    check(count_err < 1e-8 && mean_err < 1e-7, format!("count error {count_err:.1e}, mean error {mean_err:.1e}"))
}

/// ∫_a^b K(x,x) dx on one histogram bin.
fn bin_mass(sys: &BiorthogonalSystem, a: f64, b: f64) -> Result<f64, String> {
    let f = |x: f64| if x == 0.0 { 0.0 } else { kernel_direct(x, x, sys).unwrap_or(f64::NAN) };
    integrate_finite(f, a, b, 1e-10).map(|r| r.value).map_err(e)
}

fn monte_carlo_density() -> Outcome {
    let p = make_parameters(0.5, 8, 8).map_err(e)?;
    let sys = BiorthogonalSystem::new(p);
    let batch = sample_batch(&p, 20_000, 2024, false, Execution::default()).map_err(e)?;
    let hist = empirical_density(&batch, 40, (0.0, 250.0)).map_err(e)?;
    let mut inside = 0;
    for i in 0..40 {
        let (a, b) = (hist.edges[i], hist.edges[i + 1]);
        let want = bin_mass(&sys, a, b)? / (b - a);
        if (hist.density[i] - want).abs() <= 3.0 * hist.std_error[i].max(1e-300) {
            inside += 1;
        }
    }
    // one point: Kolmogorov-Smirnov against the integrated density
    let p1 = make_parameters(0.5, 1, 1).map_err(e)?;
    let b1 = sample_batch(&p1, 10_000, 77, false, Execution::default()).map_err(e)?;
    let mut ys: Vec<f64> = b1.spectra.iter().map(|s| s[0]).collect();
    ys.sort_by(|a, b| a.total_cmp(b));
    let dens = |y: f64| if y == 0.0 { 0.0 } else { jpdf(&[y], &p1).unwrap_or(f64::NAN) };
    let gl = gauss_legendre_nodes(16).map_err(e)?;
    let mut cdf = integrate_finite(dens, 0.0, ys[0], 1e-12).map_err(e)?.value;
    let n = ys.len() as f64;
    let mut d: f64 = 0.0;
    for (i, w) in ys.windows(2).enumerate() {
        d = d.max((cdf - i as f64 / n).abs()).max(((i + 1) as f64 / n - cdf).abs());
        cdf += gl.iter().map(|&(t, wt)| wt * dens(w[0] + (w[1] - w[0]) * t)).sum::<f64>() * (w[1] - w[0]);
    }
    d = d.max((cdf - (n - 1.0) / n).abs()).max((1.0 - cdf).abs());
    let critical = 1.628 / n.sqrt();
    check(
        inside >= 38 && d < critical,
        format!("{inside}/40 bins within 3σ, N=1 KS statistic {d:.4} vs {critical:.4}"),
    )
}

fn sampled_mean() -> Outcome {
    let p = make_parameters(0.5, 6, 6).map_err(e)?;
    let batch = sample_batch(&p, 20_000, 606, false, Execution::default()).map_err(e)?;
    let sums: Vec<f64> = batch.spectra.iter().map(|s| s.iter().sum()).collect();
    let t = sums.len() as f64;
    let mean = sums.iter().sum::<f64>() / t;
    let se = (sums.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (t - 1.0) / t).sqrt();
    let want: f64 = (0..6).map(|k| recurrence_a(k, &p)[2]).sum();
    let z = (mean - want) / se;
    check(z.abs() < 3.0, format!("mean {mean:.3} vs {want:.3} ({z:+.2} standard errors)"))
}

fn hard_edge() -> Outcome {
    let ns = [20usize, 40, 80];
    let mut lines = Vec::new();
    let mut ok = true;
    for nu in [0usize, 2] {
        let ctx = HardEdgeContext::new(nu).map_err(e)?;
        let limit = limiting_grid(&ctx, &LADDER_POINTS).map_err(e)?;
        let mut at80 = Vec::new();
        for mu in [0.3, 0.7] {
            let rungs: Vec<f64> = ns
                .iter()
                .map(|&n| grid_deviation(mu, n, nu, &LADDER_POINTS, &limit).map(|r| r.deviation))
                .collect::<Result<_, _>>()
                .map_err(e)?;
            ok &= rungs.windows(2).all(|w| w[1] < w[0]) && rungs[2] < 5e-2;
            lines.push(format!("μ={mu} ν={nu} {:.4}/{:.4}/{:.4}", rungs[0], rungs[1], rungs[2]));
            at80.push((rescaled_grid(mu, 80, nu, &LADDER_POINTS).map_err(e)?, rungs[2]));
        }
        let spread = at80[0]
            .0
            .iter()
            .flatten()
            .zip(at80[1].0.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        ok &= spread <= 2.0 * at80[0].1.max(at80[1].1);
        let mut form: f64 = 0.0;
        for &x in &LADDER_POINTS {
            for &y in &LADDER_POINTS {
                if x != y {
                    let a = limiting_kernel(x, y, &ctx).map_err(e)?;
                    let b = limiting_kernel_derivative_form(x, y, &ctx).map_err(e)?;
                    form = form.max((a - b).abs());
                }
            }
        }
        ok &= form < 1e-5;
        lines.push(format!("ν={nu} μ-spread {spread:.4}, forms {form:.1e}"));
    }
    check(ok, lines.join("; "))
}

fn clt() -> Outcome {
    let v1 = limiting_variance(&[0.0, 1.0], 1.0).map_err(e)?;
    let v0 = limiting_variance(&[0.0, 1.0], 0.0).map_err(e)?;
    let r = clt_experiment(0.5, 100, 100, &[0.0, 1.0], 5000, 31, Execution::default()).map_err(e)?;
    let mut real = true;
    for poly in [vec![0.0, 1.0], vec![1.0, -0.5, 0.25]] {
        for (&k, &c) in &fourier_coefficients(&poly, 0.37).map_err(e)? {
            let t = fourier_coefficient_trapezoid(&poly, 0.37, k, 64).map_err(e)?;
            real &= t.im.abs() < 1e-12 && (t.re - c).abs() < 1e-10 * c.abs().max(1.0);
        }
    }
    check(
        v1 == 3.0 && v0 == 9.0 / 8.0 && (r.ratio - 1.0).abs() < 0.1 && real,
        format!(
            "variance {v1} at μ=1, {v0} at μ=0; sample/analytic {:.3} ({:.4}/{:.4})",
            r.ratio, r.sample_variance, r.analytic_variance
        ),
    )
}

fn identity_suite() -> Outcome {
    let v = run_identity_suite(Execution::default());
    let failures: usize = v.iter().map(|f| f.failures).sum();
    let passes: usize = v.iter().map(|f| f.passes).sum();
    let skips: usize = v.iter().map(|f| f.skips).sum();
    check(
        failures == 0 && v.iter().all(|f| f.ok()),
        format!("{} families, {passes} passes, {failures} failures, {skips} skips", v.len()),
    )
}

fn endpoints() -> Outcome {
    let pts = [0.4, 1.9];
    let (mut one, mut zero) = (0.0f64, 0.0f64);
    for nu in [0usize, 2] {
        let p1 = make_parameters(1.0 - 1e-6, 2, 2 + nu).map_err(e)?;
        one = one.max(rel(jpdf(&pts, &p1).map_err(e)?, mu_one_limit_density(&pts, nu).map_err(e)?));
        let p0 = make_parameters(1e-4, 2, 2 + nu).map_err(e)?;
        zero = zero.max(rel(jpdf(&pts, &p0).map_err(e)?, mu_zero_limit_density(&pts, nu).map_err(e)?));
    }
    let mut shape: f64 = 0.0;
    for nu in [0usize, 1, 3] {
        for pts in [[0.2, 1.5], [0.9, 3.3]] {
            let v: Vec<f64> = pts.iter().map(|y: &f64| 2.0 * y.sqrt()).collect();
            let jac: f64 = v.iter().map(|v| v / 2.0).product();
            let got = mu_zero_limit_density(&pts, nu).map_err(e)? * jac;
            shape = shape.max(rel(got, laguerre_ensemble_density(&v, nu).map_err(e)?));
        }
    }
    check(
        one < 1e-3 && zero < 1e-2 && shape < 1e-12,
        format!("μ→1 {one:.1e}, μ→0 {zero:.1e}, Laguerre substitution {shape:.1e}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("biorthogonality", biorthogonality),
        ("recurrence residuals and duality", recurrences),
        ("kernel cross-agreement", kernel_agreement),
        ("joint density normalisation", normalisation),
        ("trace identities", trace_identities),
        ("Monte Carlo density", monte_carlo_density),
        ("sampled mean", sampled_mean),
        ("hard-edge convergence", hard_edge),
        ("linear-statistic CLT", clt),
        ("exact identity suite", identity_suite),
        ("limit endpoints", endpoints),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag} {name}: {detail} [{:.1}s]", i + 1, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
