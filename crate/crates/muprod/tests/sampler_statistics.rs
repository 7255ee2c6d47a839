use muprod::ensemble::{kernel_direct, make_parameters, BiorthogonalSystem};
use muprod::par::Execution;
use muprod::quadrature::gauss_legendre_nodes;
use muprod::sampler::*;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn entry_moments() {
    let mu = 0.35;
    let p = make_parameters(mu, 2, 5).unwrap();
    let (mut cross, mut cross_sq, mut abs2, mut abs2_sq, mut n) = (c(0.0, 0.0), 0.0, 0.0, 0.0, 0.0);
    for t in 0..10_000u64 {
        let mut s = trial_stream(11, t);
        let (x1, x2) = sample_coupled_pair(&p, &mut s, false);
        for i in 0..2 {
            for j in 0..5 {
                let z = x1[(i, j)] * x2[(j, i)];
                cross += z;
                cross_sq += z.re * z.re;
                let a = x1[(i, j)].norm_sqr();
                abs2 += a;
                abs2_sq += a * a;
                n += 1.0;
            }
        }
    }
    let m = cross / n;
    let se = ((cross_sq / n - m.re * m.re) / n).sqrt();
    assert!((m.re - (1.0 - mu) / 2.0).abs() < 3.0 * se, "{m} {se}");
    assert!(m.im.abs() < 5.0 * se);
    let a = abs2 / n;
    let se = ((abs2_sq / n - a * a) / n).sqrt();
    assert!((a - (1.0 + mu) / 2.0).abs() < 3.0 * se, "{a} {se}");
}

#[test]
fn trivial_spectra() {
    assert_eq!(squared_singular_values(&ComplexMatrix::identity(3)).unwrap(), vec![1.0, 1.0, 1.0]);
    let d = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(0.0, 2.0)]);
    let v = squared_singular_values(&d).unwrap();
    assert!((v[0] - 1.0).abs() < 1e-15 && (v[1] - 4.0).abs() < 1e-14);
    assert!(squared_singular_values(&ComplexMatrix::zeros(2, 3)).is_err());
}

/// Number of eigenvalues of the Hermitian h below λ, from the signs of the
/// LDL* pivots of h - λI.
fn count_below(h: &ComplexMatrix, lambda: f64) -> usize {
    let n = h.rows;
    let mut a: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| h[(i, j)] - if i == j { lambda } else { 0.0 }).collect())
        .collect();
    let mut neg = 0;
    for k in 0..n {
        let mut d = a[k][k].re;
        if d == 0.0 {
            d = -1e-300;
        }
        if d < 0.0 {
            neg += 1;
        }
        for i in k + 1..n {
            let l = a[i][k] / d;
            for j in k + 1..n {
                let akj = a[k][j];
                a[i][j] -= l * akj;
            }
        }
    }
    neg
}

#[test]
fn eigenvalues_against_inertia_bisection() {
    let mut s = trial_stream(5, 0);
    for n in [5usize, 12, 40] {
        let y = ComplexMatrix::from_fn(n, n, |_, _| s.next_complex());
        let h = y.gram();
        let got = squared_singular_values(&y).unwrap();
        let top = h.frobenius_norm();
        for (k, &v) in got.iter().enumerate() {
            let (mut lo, mut hi) = (-1e-9, top + 1.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if count_below(&h, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            assert!((v - 0.5 * (lo + hi)).abs() < 1e-8 * top.max(1.0), "n {n} k {k}");
        }
    }
}

#[test]
fn trace_identity_and_ordering() {
    for &(n, m) in &[(3usize, 3usize), (6, 9), (40, 41)] {
        let p = make_parameters(0.6, n, m).unwrap();
        for t in 0..5 {
            let mut s = trial_stream(3, t);
            let (x1, x2) = sample_coupled_pair(&p, &mut s, false);
            let y = x1.matmul(&x2).unwrap();
            let v = squared_singular_values(&y).unwrap();
            let tr = y.gram().trace().re;
            assert!((v.iter().sum::<f64>() - tr).abs() < 1e-10 * tr);
            assert!(v.windows(2).all(|w| w[0] <= w[1]) && v[0] >= 0.0);
        }
    }
}

#[test]
fn batches_replay_and_ignore_execution_mode() {
    let p = make_parameters(0.5, 4, 6).unwrap();
    let a = sample_batch(&p, 50, 99, false, Execution::Parallel).unwrap();
    let b = sample_batch(&p, 50, 99, false, Execution::Sequential).unwrap();
    assert_eq!(a, b);
    let c = sample_batch(&p, 50, 100, false, Execution::Parallel).unwrap();
    assert_ne!(a.spectra, c.spectra);
    let lin = linear_statistic(&a, &[0.0, 1.0]).unwrap();
    for (s, l) in a.spectra.iter().zip(&lin) {
        assert_eq!(s.iter().sum::<f64>(), *l);
    }
    assert!(linear_statistic(&a, &[1.0]).unwrap().iter().all(|&v| v == 4.0));
}

#[test]
fn serialisation_layout() {
    let p = make_parameters(0.5, 2, 3).unwrap();
    let b = sample_batch(&p, 3, 1, true, Execution::Sequential).unwrap();
    let csv = b.to_csv();
    let head: Vec<&str> = csv.lines().take_while(|l| l.starts_with('#')).collect();
    assert!(head.iter().any(|l| l.contains("mu")) && head.iter().any(|l| l.contains("rescaled")));
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 4);
    let json: serde_json::Value = serde_json::from_str(&b.to_json()).unwrap();
    assert_eq!(json["spectra"].as_array().unwrap().len(), 3);
}

#[test]
fn histogram_mass_and_errors() {
    let p = make_parameters(0.5, 3, 3).unwrap();
    let b = sample_batch(&p, 500, 4, false, Execution::default()).unwrap();
    let h = empirical_density(&b, 20, (0.0, 10.0)).unwrap();
    assert!((h.total_mass() - 3.0).abs() < 1e-12);
    assert!(h.std_error.iter().all(|&e| e >= 0.0));
    assert!(empirical_density(&b, 5, (0.0, 1.0)).is_err());
}

#[test]
fn counting_variance_matches_kernel() {
    // Var #J = ∫_J K(x,x) - ∫_J∫_J K(x,y)K(y,x) for a determinantal process
    let (lo, hi) = (0.5, 2.5);
    let p = make_parameters(0.5, 4, 4).unwrap();
    let sys = BiorthogonalSystem::new(p);
    let gl: Vec<(f64, f64)> = gauss_legendre_nodes(40)
        .unwrap()
        .iter()
        .map(|&(t, w)| (lo + (hi - lo) * t, (hi - lo) * w))
        .collect();
    let mut one = 0.0;
    let mut two = 0.0;
    for &(x, wx) in &gl {
        one += wx * kernel_direct(x, x, &sys).unwrap();
        for &(y, wy) in &gl {
            two += wx * wy * kernel_direct(x, y, &sys).unwrap() * kernel_direct(y, x, &sys).unwrap();
        }
    }
    let want_mean = one;
    let want_var = one - two;
    let b = sample_batch(&p, 20_000, 8, false, Execution::default()).unwrap();
    let counts: Vec<f64> = b
        .spectra
        .iter()
        .map(|s| s.iter().filter(|&&y| (lo..hi).contains(&y)).count() as f64)
        .collect();
    let t = counts.len() as f64;
    let mean = counts.iter().sum::<f64>() / t;
    let m2 = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / t;
    let m4 = counts.iter().map(|c| (c - mean).powi(4)).sum::<f64>() / t;
    let var = m2 * t / (t - 1.0);
    let se_var = ((m4 - m2 * m2) / t).sqrt();
    let se_mean = (m2 / t).sqrt();
    println!("mean {mean} vs {want_mean}, var {var} vs {want_var} (se {se_var})");
    assert!((mean - want_mean).abs() < 3.0 * se_mean);
    assert!((var - want_var).abs() < 3.0 * se_var);
}
