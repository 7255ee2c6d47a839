//! Contour-integral representations of P_n, Q_n and the kernel.
//!
//! Closed contours around 0..n are replaced by their residue sums; the
//! vertical lines go through `ContourSpec`.

use num_complex::Complex64;
use serde::Serialize;

use super::{mellin_barnes_line, ContourSpec, QuadratureResult};
use crate::ensemble::BiorthogonalSystem;
use crate::error::{domain, Error, Result};
use crate::specfun::{gamma_complex, hyp0f1, hyp2f1_terminating_complex, ln_factorial, CompensatedSum};

/// P_n(x) = (ν+n)! (n!)² √g Σ_{j=0}^{n} Res_{t=j} Γ(t-n) ·
///          g^j x^j / ((j!)² (j+ν)!) · ₀F₁(; j+1; δ² x),
/// with Res_{t=j} Γ(t-n) = (-1)^{n-j}/(n-j)!.
pub fn eval_p_contour(n: usize, x: f64, sys: &BiorthogonalSystem) -> Result<f64> {
    if !(x >= 0.0) {
        return domain(format!("P_n needs x >= 0, got {x}"));
    }
    let p = &sys.params;
    let nu = p.nu;
    let (g, d2) = (p.gap(), p.delta * p.delta);
    let mut s = CompensatedSum::new();
    for j in 0..=n {
        let sign = if (n - j) % 2 == 0 { 1.0 } else { -1.0 };
        let ln_c = ln_factorial((nu + n) as u32) + 2.0 * ln_factorial(n as u32)
            - ln_factorial((n - j) as u32)
            - 2.0 * ln_factorial(j as u32)
            - ln_factorial((j + nu) as u32);
        let pw = if j == 0 { 1.0 } else { (g * x).powi(j as i32) };
        s.add(sign * ln_c.exp() * pw * hyp0f1(j as f64 + 1.0, d2 * x)?);
    }
    Ok(g.sqrt() * s.value())
}

fn check_y(y: f64) -> Result<()> {
    if !(y > 0.0) {
        return domain(format!("Q_n needs y > 0, got {y}"));
    }
    Ok(())
}

/// Q_n(y) = (1-δ²/α²)^ν √g / ((n!)² (n+ν)!) · (1/2πi) ∫_{c-i∞}^{c+i∞}
///   Γ(s)² Γ(s+ν)/Γ(s-n) ₂F₁(-n, ν+s; s-n; δ²/α²) (α²y)^{-s} ds.
///
/// Γ(s)/Γ(s-n) is expanded as Π_{i=1}^n (s-i)/i, absorbing one n! so the
/// integrand stays O(1). Fails with a convergence error if the estimated
/// error exceeds 1e-8 of the value.
pub fn eval_q_contour(n: usize, y: f64, sys: &BiorthogonalSystem, spec: &ContourSpec) -> Result<QuadratureResult> {
    check_y(y)?;
    let p = &sys.params;
    let nu = p.nu;
    let r = p.ratio_sq();
    let ln_a2y = (p.alpha * p.alpha * y).ln();
    let f = |s: Complex64| -> Result<Complex64> {
        let mut poly = Complex64::new(1.0, 0.0);
        for i in 1..=n {
            poly *= (s - i as f64) / i as f64;
        }
        let h = hyp2f1_terminating_complex(n as u32, s + nu as f64, s - n as f64, r)?;
        Ok(gamma_complex(s)? * gamma_complex(s + nu as f64)? * poly * h * (-s * ln_a2y).exp())
    };
    let line = mellin_barnes_line(f, spec)?;
    let pref = (nu as f64 * (1.0 - r).ln() - ln_factorial(n as u32) - ln_factorial((n + nu) as u32)).exp()
        * p.gap().sqrt();
    let out = QuadratureResult {
        value: pref * line.value,
        error_estimate: pref * line.error_estimate,
        evaluations: line.evaluations,
    };
    if out.error_estimate > 1e-8 * out.value.abs() + f64::MIN_POSITIVE {
        return Err(Error::Convergence {
            what: "Q_n line integral",
            estimate: out.value,
            error: out.error_estimate,
        });
    }
    Ok(out)
}

/// Q_0..=Q_nmax(y) from one pass over the line. This form has no
/// cancellation between large terms, so it is the route used for
/// n beyond the range where the Bessel sum stays accurate.
pub fn eval_q_contour_all(nmax: usize, y: f64, sys: &BiorthogonalSystem, spec: &ContourSpec) -> Result<Vec<f64>> {
    check_y(y)?;
    spec.validate()?;
    let p = &sys.params;
    let nu = p.nu as f64;
    let r = p.ratio_sq();
    let ln_a2y = (p.alpha * p.alpha * y).ln();
    let mut acc = vec![0.0; nmax + 1];
    let mut coef = vec![Complex64::new(0.0, 0.0); nmax + 1];
    for (s, w) in spec.half_line() {
        let base = gamma_complex(s)? * gamma_complex(s + nu)? * (-s * ln_a2y).exp();
        if base.norm() == 0.0 {
            continue;
        }
        let mut poly = Complex64::new(1.0, 0.0);
        for n in 0..=nmax {
            if n > 0 {
                poly *= (s - n as f64) / n as f64;
            }
            // ₂F₁(-n, ν+s; s-n; r), ascending terms
            let mut term = Complex64::new(1.0, 0.0);
            let mut h = term;
            for l in 0..n {
                let lf = l as f64;
                term *= (lf - n as f64) * (s + nu + lf) / ((s - n as f64 + lf) * (lf + 1.0)) * r;
                h += term;
            }
            coef[n] = base * poly * h;
        }
        for (a, c) in acc.iter_mut().zip(&coef) {
            *a += w * c.re;
        }
    }
    let out: Vec<f64> = acc
        .iter()
        .enumerate()
        .map(|(n, a)| {
            let ln = nu * (1.0 - r).ln() - ln_factorial(n as u32) - ln_factorial((n + p.nu) as u32);
            a * ln.exp() * p.gap().sqrt()
        })
        .collect();
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("Q_n line integral overflowed".into()));
    }
    Ok(out)
}

/// The k-resolved pieces of the double-contour kernel.
#[derive(Debug, Clone, Serialize)]
pub struct DoubleContourTerms {
    /// (δ/α)^{2k} (1-δ²/α²)^ν K^{(k)}(x, y) for k = 0..N-1.
    pub terms: Vec<f64>,
    pub value: f64,
}

/// K_N(x, y) = (1-δ²/α²)^ν Σ_{k<N} (δ/α)^{2k} K^{(k)}(x, y), with
///
///   K^{(k)} = Σ_{m≤k} (-1)^m C(N,m) Σ_{j<N} Res_{t=j}[...] ·
///     (1/2πi) ∫ Γ(s)² Γ(s+ν+k) Γ(s-j+m-1) / (Γ(s-N+m) Γ(s-j+k)) (α²y)^{-s} ds,
///
/// where the t-residue at j is (-1)^{N-1-j}/(N-1-j)! · g^{j+1} x^j
/// ₀F₁(; j+1; δ²x) / ((j!)² (j+ν)!).
///
/// The Gamma ratios are rational in s and are expanded as products, so
/// the only Gamma evaluations per node are Γ(s) and Γ(s+ν).
pub fn double_contour_terms(x: f64, y: f64, sys: &BiorthogonalSystem, spec: &ContourSpec) -> Result<DoubleContourTerms> {
    if !(x > 0.0) {
        return domain(format!("kernel needs x > 0, got {x}"));
    }
    check_y(y)?;
    spec.validate()?;
    let p = &sys.params;
    let (n, nu) = (p.n_small, p.nu);
    let g = p.gap();
    let r = p.ratio_sq();
    let d2x = p.delta * p.delta * x;
    let ln_a2y = (p.alpha * p.alpha * y).ln();

    let mut tpart = Vec::with_capacity(n);
    for j in 0..n {
        let sign = if (n - 1 - j) % 2 == 0 { 1.0 } else { -1.0 };
        let ln = (j + 1) as f64 * g.ln() + j as f64 * x.ln()
            - ln_factorial((n - 1 - j) as u32)
            - 2.0 * ln_factorial(j as u32)
            - ln_factorial((j + nu) as u32);
        tpart.push(sign * ln.exp() * hyp0f1(j as f64 + 1.0, d2x)?);
    }
    let binom: Vec<f64> = (0..=n)
        .map(|m| (ln_factorial(n as u32) - ln_factorial(m as u32) - ln_factorial((n - m) as u32)).exp().round())
        .collect();

    let mut acc = vec![0.0; n];
    let mut gk = vec![Complex64::new(0.0, 0.0); n];
    for (s, w) in spec.half_line() {
        let base = gamma_complex(s)? * (-s * ln_a2y).exp();
        // Γ(s+ν+k) for k = 0..N-1
        gk[0] = gamma_complex(s + nu as f64)?;
        for k in 1..n {
            gk[k] = gk[k - 1] * (s + (nu + k - 1) as f64);
        }
        // Γ(s)/Γ(s-N+m) = Π_{i=1}^{N-m} (s-i), indexed by m
        let mut falling = vec![Complex64::new(1.0, 0.0); n + 1];
        for m in (0..n).rev() {
            falling[m] = falling[m + 1] * (s - (n - m) as f64);
        }
        for k in 0..n {
            let mut inner = Complex64::new(0.0, 0.0);
            for m in 0..=k {
                let mut jsum = Complex64::new(0.0, 0.0);
                for (j, tp) in tpart.iter().enumerate() {
                    // Γ(s-j+m-1)/Γ(s-j+k) = 1/Π_{i=m-1}^{k-1} (s-j+i)
                    let mut den = Complex64::new(1.0, 0.0);
                    for i in m as i64 - 1..k as i64 {
                        den *= s + (i - j as i64) as f64;
                    }
                    jsum += tp / den;
                }
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                inner += sign * binom[m] * falling[m] * jsum;
            }
            acc[k] += w * (base * gk[k] * inner).re;
        }
    }
    let lead = (nu as f64 * (1.0 - r).ln()).exp();
    let terms: Vec<f64> = acc
        .iter()
        .enumerate()
        .map(|(k, a)| a * lead * r.powi(k as i32))
        .collect();
    let value = terms.iter().copied().collect::<CompensatedSum>().value();
    if !value.is_finite() {
        return Err(Error::Numeric("double-contour kernel overflowed".into()));
    }
    Ok(DoubleContourTerms { terms, value })
}

pub fn kernel_double_contour(x: f64, y: f64, sys: &BiorthogonalSystem, spec: &ContourSpec) -> Result<f64> {
    Ok(double_contour_terms(x, y, sys, spec)?.value)
}
