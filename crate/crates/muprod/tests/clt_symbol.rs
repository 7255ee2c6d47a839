use muprod::clt::*;
use muprod::ensemble::make_parameters;
use muprod::par::Execution;
use muprod::sampler::{linear_statistic, sample_batch};
use num_complex::Complex64;
use proptest::prelude::*;

/// The primed coefficients as printed for the rescaled ensemble, with
/// 1/(α²-δ²) = μ and δ²/(α²-δ²)² = (1-μ)²/4.
fn printed_primed(n: f64, nb: f64, nu: f64, mu: f64) -> [f64; 5] {
    let (u, q) = (mu, (1.0 - mu).powi(2) / 4.0);
    let n2 = nb * nb;
    [
        (u + q) * n * (n - 1.0) / n2,
        (u * n * (3.0 * n + nu) + q * 2.0 * n * (nu + 2.0 * n)) / n2,
        (u * (3.0 * n * n + 2.0 * nu * n + 3.0 * n + nu + 1.0)
            + q * (6.0 * n * n + 6.0 * n * nu + nu * nu + 6.0 * n + 3.0 * nu + 2.0))
            / n2,
        (u * (n + 1.0) * (n + nu + 1.0) + q * 2.0 * (2.0 * n + nu + 2.0) * (n + nu + 1.0)) / n2,
        q * (n + nu + 1.0) * (n + nu + 2.0) / n2,
    ]
}

#[test]
fn primed_coefficients_match_printed_forms() {
    for &mu in &[0.2, 0.5, 0.85] {
        for nu in [0usize, 2, 5] {
            for nb in [7usize, 50] {
                for n in 0..=60 {
                    let got = rescaled_recurrence(n, nb, nu, mu);
                    let want = printed_primed(n as f64, nb as f64, nu as f64, mu);
                    for j in 0..5 {
                        assert!(
                            (got[j] - want[j]).abs() <= 1e-12 * want[j].abs().max(1e-300),
                            "mu {mu} nu {nu} N {nb} n {n} j {j}: {} {}",
                            got[j],
                            want[j]
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn primed_coefficients_drift_like_one_over_n() {
    let mu = 0.4;
    let alphas = limiting_recurrence_alphas(mu).unwrap();
    let err = |nb: usize| -> f64 {
        let a = rescaled_recurrence(nb, nb, 1, mu);
        // FiveTerm runs j = -2..=2, the alphas j = 2..=-2
        (0..5).map(|j| (a[j] - alphas[4 - j]).abs()).fold(0.0, f64::max)
    };
    let (e2, e3, e4) = (err(100), err(1000), err(10_000));
    assert!(e4 < 1e-3);
    assert!((e2 / e3 - 10.0).abs() < 0.5 && (e3 / e4 - 10.0).abs() < 0.5, "{e2} {e3} {e4}");
}

#[test]
fn symbol_coefficients_are_the_alphas() {
    for &mu in &[0.0, 0.25, 0.5, 0.9, 1.0] {
        let s = symbol_s(mu).unwrap().to_f64_map();
        let a = limiting_recurrence_alphas(mu).unwrap();
        for (i, j) in (-2..=2).rev().enumerate() {
            assert!((s.get(&j).copied().unwrap_or(0.0) - a[i]).abs() < 1e-15, "{mu} {j}");
        }
        let total: f64 = s.values().sum();
        assert!((total - 4.0 * (1.0 + mu * mu)).abs() < 1e-14);
    }
    assert_eq!(limiting_recurrence_alphas(1.0).unwrap(), [0.0, 1.0, 3.0, 3.0, 1.0]);
    assert!(symbol_s(-0.1).is_err());
}

#[test]
fn identity_function_coefficients() {
    let mu = 0.3;
    let f = fourier_coefficients(&[0.0, 1.0], mu).unwrap();
    let a = limiting_recurrence_alphas(mu).unwrap();
    for (i, j) in (-2..=2).rev().enumerate() {
        // f̂_k = α_{-k}
        assert!((f[&-j] - a[i]).abs() < 1e-15);
    }
}

#[test]
fn trapezoid_cross_check_for_square() {
    let mu = 0.5;
    let exact = fourier_coefficients(&[0.0, 0.0, 1.0], mu).unwrap();
    for k in -5..=5 {
        let t = fourier_coefficient_trapezoid(&[0.0, 0.0, 1.0], mu, k, 256).unwrap();
        let want = exact.get(&k).copied().unwrap_or(0.0);
        assert!((t.re - want).abs() < 1e-12 && t.im.abs() < 1e-12, "{k}: {t} {want}");
    }
}

#[test]
fn variance_closed_form_at_half() {
    let mu: f64 = 0.5;
    let q = (1.0 - mu).powi(2);
    let want = (3.0 * mu + q) * (mu + q) + 2.0 * (mu + q / 4.0) * (q / 4.0);
    assert_eq!(want, 1.3828125);
    assert!((limiting_variance(&[0.0, 1.0], mu).unwrap() - want).abs() < 1e-15);
    assert!(limiting_variance(&[0.0, 1.0], 0.9).unwrap() > limiting_variance(&[0.0, 1.0], 0.1).unwrap());
}

#[test]
fn symbol_evaluation_matches_closed_form() {
    let mu = 0.37;
    let s = symbol_s(mu).unwrap();
    let w = Complex64::from_polar(0.8, 1.1);
    let want = (w + 1.0).powi(3) * (w * (1.0 - mu) * (1.0 - mu) + (1.0 + mu) * (1.0 + mu)) / (4.0 * w * w);
    assert!((s.eval(w) - want).norm() < 1e-14);
}

#[test]
fn rescaled_mean_is_the_primed_trace() {
    // E Σ y_i = Σ_{n<N} a'_{0,n}, which is N α_0 / 3 to leading order
    let (mu, nb) = (0.5, 40);
    let want: f64 = (0..nb).map(|n| rescaled_recurrence(n, nb, 0, mu)[2]).sum();
    let a0 = limiting_recurrence_alphas(mu).unwrap()[2];
    assert!((want / (nb as f64 * a0 / 3.0) - 1.0).abs() < 0.05);
    let p = make_parameters(mu, nb, nb).unwrap();
    let b = sample_batch(&p, 2000, 21, true, Execution::default()).unwrap();
    let ys = linear_statistic(&b, &[0.0, 1.0]).unwrap();
    let t = ys.len() as f64;
    let mean = ys.iter().sum::<f64>() / t;
    let se = (ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (t - 1.0) / t).sqrt();
    assert!((mean - want).abs() < 3.0 * se, "{mean} {want} {se}");
}

#[test]
fn constant_statistic_has_zero_variance() {
    let r = clt_experiment(0.5, 6, 6, &[2.0], 1000, 3, Execution::default()).unwrap();
    assert_eq!(r.sample_variance, 0.0);
    assert_eq!(r.analytic_variance, 0.0);
    assert!(clt_experiment(0.5, 6, 6, &[2.0], 999, 3, Execution::default()).is_err());
    let json: serde_json::Value = serde_json::to_value(&r).unwrap();
    for key in ["mu", "N", "M", "f-coefficients", "trials", "sample_variance", "analytic_variance", "ratio", "skewness", "kurtosis", "seed"] {
        assert!(json.get(key).is_some(), "{key}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn variance_is_non_negative(coeffs in prop::collection::vec(-3.0f64..3.0, 1..=6), mu in 0.0f64..=1.0) {
        let v = limiting_variance(&coeffs, mu).unwrap();
        prop_assert!(v >= 0.0);
        let f = fourier_coefficients(&coeffs, mu).unwrap();
        for (k, c) in &f {
            let t = fourier_coefficient_trapezoid(&coeffs, mu, *k, 128).unwrap();
            prop_assert!(t.im.abs() < 1e-9 * (1.0 + c.abs()));
        }
    }
}
