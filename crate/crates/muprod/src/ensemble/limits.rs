//! Closed forms of the joint density at the two ends of the μ range.

use super::lu_determinant;
use crate::error::{domain, Result};
use crate::specfun::{bessel_k_power_seq, ln_factorial};

fn check(points: &[f64]) -> Result<()> {
    if points.is_empty() {
        return domain("need at least one point");
    }
    if let Some(y) = points.iter().find(|y| !(**y > 0.0)) {
        return domain(format!("points must be positive, got {y}"));
    }
    Ok(())
}

/// μ -> 1, independent factors:
///
///   det[y_i^{j-1}] det[2 y_i^{l/2} K_l(2√y_i)]_{l=j+ν-1}
///   / (N! Π_j Γ(j)² Γ(j+ν)).
pub fn mu_one_limit_density(points: &[f64], nu: usize) -> Result<f64> {
    check(points)?;
    let n = points.len();
    let mut v = vec![vec![0.0; n]; n];
    let mut w = vec![vec![0.0; n]; n];
    for (i, &y) in points.iter().enumerate() {
        // 2 y^{l/2} K_l(2√y) = 2^{1-l} (2√y)^l K_l(2√y)
        let t = bessel_k_power_seq((n - 1 + nu) as u32, 2.0 * y.sqrt())?;
        for j in 0..n {
            v[i][j] = y.powi(j as i32);
            let l = j + nu;
            w[i][j] = 2f64.powi(1 - l as i32) * t[l];
        }
    }
    let ln_z: f64 = ln_factorial(n as u32)
        + (1..=n)
            .map(|j| 2.0 * ln_factorial(j as u32 - 1) + ln_factorial((j + nu) as u32 - 1))
            .sum::<f64>();
    Ok(lu_determinant(v) * lu_determinant(w) * (-ln_z).exp())
}

/// μ -> 0:
///
///   2^{N(M-1)} (det[y_i^{(j-1)/2}])² Π_i y_i^{(ν-1)/2} e^{-2√y_i}
///   / (N! Π_j Γ(j) Γ(j+ν)).
pub fn mu_zero_limit_density(points: &[f64], nu: usize) -> Result<f64> {
    check(points)?;
    let n = points.len();
    let m = n + nu;
    let mut v = vec![vec![0.0; n]; n];
    for (i, &y) in points.iter().enumerate() {
        for j in 0..n {
            v[i][j] = y.sqrt().powi(j as i32);
        }
    }
    let d = lu_determinant(v);
    let ln_w: f64 = points
        .iter()
        .map(|y| 0.5 * (nu as f64 - 1.0) * y.ln() - 2.0 * y.sqrt())
        .sum();
    let ln_c = (n * (m - 1)) as f64 * std::f64::consts::LN_2
        - ln_factorial(n as u32)
        - (1..=n)
            .map(|j| ln_factorial(j as u32 - 1) + ln_factorial((j + nu) as u32 - 1))
            .sum::<f64>();
    Ok(d * d * (ln_w + ln_c).exp())
}

/// Classical Laguerre density Δ(v)² Π v_i^ν e^{-v_i} / (N! Π_{j<N} j!(j+ν)!).
pub fn laguerre_ensemble_density(points: &[f64], nu: usize) -> Result<f64> {
    check(points)?;
    let n = points.len();
    let mut v = vec![vec![0.0; n]; n];
    for (i, &x) in points.iter().enumerate() {
        for j in 0..n {
            v[i][j] = x.powi(j as i32);
        }
    }
    let d = lu_determinant(v);
    let ln_w: f64 = points.iter().map(|x| nu as f64 * x.ln() - x).sum();
    let ln_z = ln_factorial(n as u32)
        + (0..n)
            .map(|j| ln_factorial(j as u32) + ln_factorial((j + nu) as u32))
            .sum::<f64>();
    Ok(d * d * (ln_w - ln_z).exp())
}
