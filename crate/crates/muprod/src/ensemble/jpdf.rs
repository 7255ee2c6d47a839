use super::CouplingParameters;
use crate::error::{domain, Result};
use crate::specfun::{bessel_i_reduced_scaled, bessel_k_power_seq_scaled, ln_factorial};

/// (sign, ln|det A|) by LU with partial pivoting. sign is 0 for a
/// singular matrix.
pub fn lu_log_determinant(mut a: Vec<Vec<f64>>) -> (f64, f64) {
    let n = a.len();
    let mut sign = 1.0;
    let mut ln = 0.0;
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .expect("non-empty");
        if a[piv][c] == 0.0 {
            return (0.0, f64::NEG_INFINITY);
        }
        if piv != c {
            a.swap(piv, c);
            sign = -sign;
        }
        let d = a[c][c];
        if d < 0.0 {
            sign = -sign;
        }
        ln += d.abs().ln();
        for r in c + 1..n {
            let f = a[r][c] / d;
            if f != 0.0 {
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
    }
    (sign, ln)
}

pub fn lu_determinant(a: Vec<Vec<f64>>) -> f64 {
    let (s, ln) = lu_log_determinant(a);
    if s == 0.0 {
        0.0
    } else {
        s * ln.exp()
    }
}

/// ln Z_N with
///
///   Z_N = N! α^{Nν+N(N-1)/2} δ^{N(N-1)/2} / (2^N (α²-δ²)^{Nν+N²})
///         · Π_{j=1}^N Γ(j) Γ(j+ν).
pub fn ln_partition_function(params: &CouplingParameters) -> f64 {
    let n = params.n_small as f64;
    let nu = params.nu as f64;
    let pairs = n * (n - 1.0) / 2.0;
    ln_factorial(params.n_small as u32) + (n * nu + pairs) * params.alpha.ln() + pairs * params.delta.ln()
        - n * std::f64::consts::LN_2
        + (n * nu + n * n) * params.mu.ln()
        + ln_gamma_products(params)
}

fn ln_gamma_products(params: &CouplingParameters) -> f64 {
    (1..=params.n_small)
        .map(|j| ln_factorial(j as u32 - 1) + ln_factorial((j + params.nu) as u32 - 1))
        .sum()
}

/// Joint density of the squared singular values,
/// det[ψ_{j-1}(y_i)] det[φ_{j-1}(y_i)] / Z_N.
///
/// The entries are rewritten as δ^j y^j R_j(2δ√y) and
/// (2α)^{-(j+ν)} (2α√y)^{j+ν} K_{j+ν}(2α√y), so the δ and α powers cancel
/// against Z_N analytically and the exponentials combine to e^{-2Σ√y_i}.
/// This keeps the evaluation finite from μ = 1e-4 up to μ = 1 - 1e-6.
pub fn jpdf(points: &[f64], params: &CouplingParameters) -> Result<f64> {
    let n = params.n_small;
    if points.len() != n {
        return domain(format!("jpdf needs {n} points, got {}", points.len()));
    }
    if let Some(y) = points.iter().find(|y| !(**y > 0.0)) {
        return domain(format!("jpdf needs positive points, got {y}"));
    }
    for i in 0..n {
        for j in 0..i {
            if points[i] == points[j] {
                return Ok(0.0);
            }
        }
    }
    let nu = params.nu;
    let mut m1 = vec![vec![0.0; n]; n];
    let mut m2 = vec![vec![0.0; n]; n];
    for (i, &y) in points.iter().enumerate() {
        let zp = 2.0 * params.delta * y.sqrt();
        let zq = 2.0 * params.alpha * y.sqrt();
        let t = bessel_k_power_seq_scaled((n - 1 + nu) as u32, zq)?;
        for j in 0..n {
            m1[i][j] = y.powi(j as i32) * bessel_i_reduced_scaled(j as u32, zp)?;
            m2[i][j] = t[j + nu];
        }
    }
    let (s1, l1) = lu_log_determinant(m1);
    let (s2, l2) = lu_log_determinant(m2);
    if s1 * s2 == 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let e = nf * nu as f64 + nf * (nf - 1.0) / 2.0;
    let ln_pref = -ln_factorial(n as u32) + nf * std::f64::consts::LN_2 - (nf * nu as f64 + nf * nf) * params.mu.ln()
        - ln_gamma_products(params)
        - e * std::f64::consts::LN_2
        - 2.0 * e * params.alpha.ln();
    let expo: f64 = points.iter().map(|y| -2.0 * y.sqrt()).sum();
    Ok(s1 * s2 * (l1 + l2 + ln_pref + expo).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::make_parameters;
    use crate::specfun::{bessel_i, bessel_k};

    #[test]
    fn equal_points_vanish() {
        let p = make_parameters(0.5, 2, 3).unwrap();
        assert_eq!(jpdf(&[0.4, 0.4], &p).unwrap(), 0.0);
        assert!(jpdf(&[0.4], &p).is_err());
    }

    #[test]
    fn single_point_formula() {
        let p = make_parameters(0.3, 1, 1).unwrap();
        for &y in &[0.1, 1.0, 3.0] {
            let z = f64::sqrt(y);
            let want = 2.0 / p.mu * bessel_i(0, 2.0 * p.delta * z).unwrap() * bessel_k(0, 2.0 * p.alpha * z).unwrap();
            let got = jpdf(&[y], &p).unwrap();
            assert!((got - want).abs() < 1e-12 * want, "{got} {want}");
        }
    }

    #[test]
    fn lu_small() {
        let d = lu_determinant(vec![vec![0.0, 2.0], vec![3.0, 1.0]]);
        assert_eq!(d, -6.0);
    }
}
