//! Central limit theorem for linear statistics of the rescaled ensemble:
//! the Laurent symbol s(w; μ), the Fourier data of f∘s, the limiting
//! variance, and the Monte Carlo comparison.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::ensemble::{make_parameters, recurrence_a_uvw, FiveTerm};
use crate::error::{domain, Error, Result};
use crate::exact::{rat, to_f64, ExactRational};
use crate::par::Execution;
use crate::sampler::{linear_statistic, sample_batch};

/// Finite Laurent polynomial Σ c_k w^k with exact coefficients; zero
/// coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LaurentPolynomial {
    coeffs: BTreeMap<i32, ExactRational>,
}

impl LaurentPolynomial {
    pub fn constant(c: ExactRational) -> Self {
        Self::from_terms([(0, c)])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i32, ExactRational)>) -> Self {
        let mut p = Self::default();
        for (k, c) in terms {
            p.add_term(k, c);
        }
        p
    }

    fn add_term(&mut self, k: i32, c: ExactRational) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(k).or_insert_with(ExactRational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    pub fn coefficient(&self, k: i32) -> ExactRational {
        self.coeffs.get(&k).cloned().unwrap_or_else(ExactRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &ExactRational)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// (lowest, highest) degree; None for the zero polynomial.
    pub fn degree_range(&self) -> Option<(i32, i32)> {
        Some((*self.coeffs.keys().next()?, *self.coeffs.keys().next_back()?))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.add_term(k, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &ExactRational) -> Self {
        Self::from_terms(self.terms().map(|(k, v)| (k, v * c)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (i, a) in self.terms() {
            for (j, b) in other.terms() {
                out.add_term(i + j, a * b);
            }
        }
        out
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        self.terms().map(|(k, c)| w.powi(k) * to_f64(c)).sum()
    }

    pub fn to_f64_map(&self) -> BTreeMap<i32, f64> {
        self.terms().map(|(k, c)| (k, to_f64(c))).collect()
    }
}

fn exact(x: f64) -> Result<ExactRational> {
    ExactRational::from_float(x).ok_or_else(|| Error::Domain(format!("{x} is not finite")))
}

fn check_mu(mu: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&mu) {
        return domain(format!("the symbol needs μ in [0, 1], got {mu}"));
    }
    Ok(())
}

/// s(w; μ) = (w+1)³ (w(1-μ)² + (1+μ)²) / (4w²), built exactly from the
/// binary value of μ.
pub fn symbol_s(mu: f64) -> Result<LaurentPolynomial> {
    check_mu(mu)?;
    let m = exact(mu)?;
    let one = ExactRational::one();
    let a = (&one - &m) * (&one - &m);
    let b = (&one + &m) * (&one + &m);
    let w_plus_1 = LaurentPolynomial::from_terms([(0, one.clone()), (1, one.clone())]);
    let cube = w_plus_1.mul(&w_plus_1).mul(&w_plus_1);
    let lin = LaurentPolynomial::from_terms([(1, a), (0, b)]);
    let quarter_w2 = LaurentPolynomial::from_terms([(-2, ExactRational::new(1.into(), 4.into()))]);
    Ok(cube.mul(&lin).mul(&quarter_w2))
}

/// (α_2, α_1, α_0, α_{-1}, α_{-2}), the limits of the rescaled recurrence
/// coefficients; α_j is the coefficient of w^j in s(w; μ).
pub fn limiting_recurrence_alphas(mu: f64) -> Result<[f64; 5]> {
    check_mu(mu)?;
    let q = (1.0 - mu) * (1.0 - mu);
    Ok([q / 4.0, mu + q, 3.0 * mu + 1.5 * q, 3.0 * mu + q, mu + q / 4.0])
}

/// a'_{j,n} for the orthonormalised functions P'_n = P_n/(n!(n+ν)!) of the
/// ensemble with α -> Nα, δ -> Nδ; indexed j + 2 like `FiveTerm`.
pub fn rescaled_recurrence(n: usize, n_big: usize, nu: usize, mu: f64) -> FiveTerm<f64> {
    let nb2 = (n_big as f64).powi(2);
    let u = mu / nb2;
    let v = (1.0 - mu).powi(2) / 4.0 / nb2;
    let w = (1.0 + mu).powi(2) / 4.0 / nb2;
    let a = recurrence_a_uvw(n as f64, nu as f64, u, v, w);
    let (nf, nn) = (n as f64, (n + nu) as f64);
    let down1 = if n >= 1 { a[1] / (nf * nn) } else { 0.0 };
    let down2 = if n >= 2 {
        a[0] / (nf * (nf - 1.0) * nn * (nn - 1.0))
    } else {
        0.0
    };
    [
        down2,
        down1,
        a[2],
        a[3] * (nf + 1.0) * (nn + 1.0),
        a[4] * (nf + 1.0) * (nf + 2.0) * (nn + 1.0) * (nn + 2.0),
    ]
}

/// Maximum polynomial degree accepted by the exact expansion.
pub const MAX_DEGREE: usize = 20;

fn compose(poly: &[f64], mu: f64) -> Result<LaurentPolynomial> {
    if poly.len() > MAX_DEGREE + 1 {
        return domain(format!("f has degree {} > {MAX_DEGREE}", poly.len() - 1));
    }
    let s = symbol_s(mu)?;
    // Horner in exact arithmetic
    let mut out = LaurentPolynomial::default();
    for c in poly.iter().rev() {
        out = out.mul(&s).add(&LaurentPolynomial::constant(exact(*c)?));
    }
    Ok(out)
}

/// f̂_k = (1/2πi)∮ f(s(w)) w^k dw/w, the coefficient of w^{-k} in f∘s,
/// for a polynomial f given by ascending coefficients.
pub fn fourier_coefficients(poly: &[f64], mu: f64) -> Result<BTreeMap<i32, f64>> {
    let c = compose(poly, mu)?;
    Ok(c.terms().map(|(k, v)| (-k, to_f64(v))).collect())
}

/// f̂_k by the trapezoid rule on |w| = 1.
pub fn fourier_coefficient_trapezoid(poly: &[f64], mu: f64, k: i32, nodes: usize) -> Result<Complex64> {
    check_mu(mu)?;
    let s = symbol_s(mu)?;
    let f = |x: Complex64| poly.iter().rev().fold(Complex64::zero(), |acc, c| acc * x + c);
    let mut acc = Complex64::zero();
    for j in 0..nodes {
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / nodes as f64);
        acc += f(s.eval(w)) * w.powi(k);
    }
    Ok(acc / nodes as f64)
}

/// Σ_{k≥1} k f̂_k f̂_{-k}, summed exactly.
pub fn limiting_variance(poly: &[f64], mu: f64) -> Result<f64> {
    let c = compose(poly, mu)?;
    let mut v = ExactRational::zero();
    if let Some((lo, hi)) = c.degree_range() {
        for k in 1..=hi.max(-lo) {
            v += rat(k as i64) * c.coefficient(-k) * c.coefficient(k);
        }
    }
    let out = to_f64(&v);
    if out < 0.0 {
        return Err(Error::Numeric(format!("negative limiting variance {out}")));
    }
    Ok(out)
}

/// Fewer trials leave the variance estimate too noisy to compare.
pub const MIN_CLT_TRIALS: usize = 1000;

#[derive(Debug, Clone, Serialize)]
pub struct CltReport {
    pub mu: f64,
    #[serde(rename = "N")]
    pub n_small: usize,
    #[serde(rename = "M")]
    pub m_large: usize,
    #[serde(rename = "f-coefficients")]
    pub f_coefficients: Vec<f64>,
    pub trials: usize,
    pub sample_variance: f64,
    pub analytic_variance: f64,
    pub ratio: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub seed: u64,
    pub sample_mean: f64,
    /// Standard error of the sample variance, from the fourth moment.
    pub variance_std_error: f64,
    pub z_score: f64,
    pub failed_trials: usize,
}

/// Samples the rescaled ensemble and compares Var Σ f(y_i) with the
/// limiting variance. The statistic is centred by its sample mean.
pub fn clt_experiment(
    mu: f64,
    n_small: usize,
    m_large: usize,
    poly: &[f64],
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<CltReport> {
    if trials < MIN_CLT_TRIALS {
        return domain(format!("the CLT experiment needs at least {MIN_CLT_TRIALS} trials, got {trials}"));
    }
    let params = make_parameters(mu, n_small, m_large)?;
    let analytic = limiting_variance(poly, mu)?;
    let batch = sample_batch(&params, trials, seed, true, exec)?;
    let ys = linear_statistic(&batch, poly)?;
    let t = ys.len() as f64;
    let mean = ys.iter().sum::<f64>() / t;
    let m = |p: i32| ys.iter().map(|y| (y - mean).powi(p)).sum::<f64>() / t;
    let (m2, m3, m4) = (m(2), m(3), m(4));
    let var = m2 * t / (t - 1.0);
    let (skewness, kurtosis) = if m2 > 0.0 {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    } else {
        (0.0, 0.0)
    };
    let se = ((m4 - m2 * m2).max(0.0) / t).sqrt();
    Ok(CltReport {
        mu,
        n_small,
        m_large,
        f_coefficients: poly.to_vec(),
        trials: ys.len(),
        sample_variance: var,
        analytic_variance: analytic,
        ratio: if analytic > 0.0 { var / analytic } else { f64::NAN },
        skewness,
        kurtosis,
        seed,
        sample_mean: mean,
        variance_std_error: se,
        z_score: if se > 0.0 { (var - analytic) / se } else { 0.0 },
        failed_trials: batch.failed,
    })
}
