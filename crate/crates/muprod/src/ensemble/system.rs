use std::sync::OnceLock;

use num_traits::Zero;

use super::{CouplingParameters, RecurrenceCoefficients};
use crate::error::{domain, Error, Result};
use crate::exact::{factorial, rat, sign, to_double_double, ExactRational};
use crate::specfun::{
    bessel_i, bessel_i_reduced_scaled, bessel_k, bessel_k_power_seq_scaled, CompensatedSum,
    DoubleDouble,
};

pub const DEFAULT_MAX_N: usize = 40;

/// Below this |sum| / max|term| the f64 sum is redone in double-double.
pub const RETENTION_FALLBACK: f64 = 1e-6;

/// P_n and Q_n for one parameter set.
///
/// With z = 2δ√x and R_k(z) = I_k(z)/(z/2)^k,
///
///   P_n(x) = √g Σ_k r^P_{n,k} (g x)^k R_k(z),
///
/// and with z = 2α√y, m = l + ν,
///
///   Q_n(y) = √g Σ_l r^Q_{n,l} (g/(2α²))^m z^m K_m(z),
///
/// where g = α² - δ². Both forms avoid dividing by δ^k, which matters as
/// μ -> 1.
#[derive(Debug, Clone)]
pub struct BiorthogonalSystem {
    pub params: CouplingParameters,
    pub max_n: usize,
    pub p_coeffs: Vec<Vec<ExactRational>>,
    pub q_coeffs: Vec<Vec<ExactRational>>,
    pub recurrence: RecurrenceCoefficients,
    pub(crate) p_dd: Vec<Vec<DoubleDouble>>,
    pub(crate) q_dd: Vec<Vec<DoubleDouble>>,
    pub(crate) double_sum: OnceLock<Vec<Vec<f64>>>,
}

/// Values stored as mantissa · e^{scale}; the exponential factors of the
/// Bessel functions are kept apart so large arguments don't overflow.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledValues {
    pub values: Vec<f64>,
    pub log_scale: f64,
}

impl ScaledValues {
    pub fn unscaled(&self) -> Vec<f64> {
        let e = self.log_scale.exp();
        self.values.iter().map(|v| v * e).collect()
    }
}

/// r^P_{n,k} = (-1)^{n+k} (ν+n)! n! · n!/(n-k)! / ((ν+k)! k!).
pub fn p_coefficient(n: usize, k: usize, nu: usize) -> ExactRational {
    if k > n {
        return ExactRational::zero();
    }
    let num = factorial((nu + n) as u64) * factorial(n as u64) * factorial(n as u64);
    let den = factorial((n - k) as u64) * factorial((nu + k) as u64) * factorial(k as u64);
    ExactRational::new(num, den) * rat(sign((n + k) as i64))
}

/// r^Q_{n,l} = (-1)^n 2/(n!)² · (-n)_l / ((ν+l)! l!).
pub fn q_coefficient(n: usize, l: usize, nu: usize) -> ExactRational {
    if l > n {
        return ExactRational::zero();
    }
    let den = factorial(n as u64)
        * factorial((n - l) as u64)
        * factorial((nu + l) as u64)
        * factorial(l as u64);
    ExactRational::new(2.into(), den) * rat(sign((n + l) as i64))
}

impl BiorthogonalSystem {
    /// Tables up to max(DEFAULT_MAX_N, N + 1), enough for the
    /// Christoffel–Darboux boundary terms.
    pub fn new(params: CouplingParameters) -> Self {
        Self::with_max_n(params, DEFAULT_MAX_N.max(params.n_small + 1))
    }

    pub fn with_max_n(params: CouplingParameters, max_n: usize) -> Self {
        let nu = params.nu;
        let table = |f: fn(usize, usize, usize) -> ExactRational| -> Vec<Vec<ExactRational>> {
            (0..=max_n)
                .map(|n| (0..=n).map(|k| f(n, k, nu)).collect())
                .collect()
        };
        let p_coeffs = table(p_coefficient);
        let q_coeffs = table(q_coefficient);
        let dd = |t: &Vec<Vec<ExactRational>>| -> Vec<Vec<DoubleDouble>> {
            t.iter()
                .map(|row| row.iter().map(to_double_double).collect())
                .collect()
        };
        Self {
            p_dd: dd(&p_coeffs),
            q_dd: dd(&q_coeffs),
            recurrence: RecurrenceCoefficients::new(&params, max_n),
            params,
            max_n,
            p_coeffs,
            q_coeffs,
            double_sum: OnceLock::new(),
        }
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if n > self.max_n {
            return Err(Error::Capacity {
                requested: n,
                max: self.max_n,
            });
        }
        Ok(())
    }

    /// (g x)^k e^{-z} R_k(z) for k = 0..=kmax, z = 2δ√x; log scale z.
    pub fn p_basis(&self, kmax: usize, x: f64) -> Result<ScaledValues> {
        if !(x >= 0.0) {
            return domain(format!("P_n needs x >= 0, got {x}"));
        }
        let z = 2.0 * self.params.delta * x.sqrt();
        let gx = self.params.gap() * x;
        let mut values = Vec::with_capacity(kmax + 1);
        let mut pw = 1.0;
        for k in 0..=kmax {
            values.push(pw * bessel_i_reduced_scaled(k as u32, z)?);
            pw *= gx;
        }
        Ok(ScaledValues {
            values,
            log_scale: z,
        })
    }

    /// (g/(2α²))^m e^{z} z^m K_m(z) for m = 0..=mmax, z = 2α√y; log scale -z.
    pub fn q_basis(&self, mmax: usize, y: f64) -> Result<ScaledValues> {
        if !(y > 0.0) {
            return domain(format!("Q_n needs y > 0, got {y}"));
        }
        let a = self.params.alpha;
        let z = 2.0 * a * y.sqrt();
        let ratio = self.params.gap() / (2.0 * a * a);
        let mut t = bessel_k_power_seq_scaled(mmax as u32, z)?;
        let mut pw = 1.0;
        for v in t.iter_mut() {
            *v *= pw;
            pw *= ratio;
        }
        Ok(ScaledValues {
            values: t,
            log_scale: -z,
        })
    }

    fn combine(&self, row_dd: &[DoubleDouble], basis: &[f64], offset: usize) -> f64 {
        let mut acc = CompensatedSum::new();
        for (k, c) in row_dd.iter().enumerate() {
            acc.add(c.hi * basis[k + offset]);
        }
        let out = if acc.retention() < RETENTION_FALLBACK && acc.max_term() > 0.0 {
            row_dd
                .iter()
                .enumerate()
                .fold(DoubleDouble::from_f64(0.0), |s, (k, c)| s.add(c.mul_f64(basis[k + offset])))
                .to_f64()
        } else {
            acc.value()
        };
        out * self.params.gap().sqrt()
    }

    /// P_0..=P_nmax at x, sharing one basis evaluation.
    pub fn eval_p_all_scaled(&self, nmax: usize, x: f64) -> Result<ScaledValues> {
        self.check_n(nmax)?;
        let b = self.p_basis(nmax, x)?;
        let values = (0..=nmax)
            .map(|n| self.combine(&self.p_dd[n], &b.values, 0))
            .collect();
        Ok(ScaledValues {
            values,
            log_scale: b.log_scale,
        })
    }

    /// Q_0..=Q_nmax at y.
    pub fn eval_q_all_scaled(&self, nmax: usize, y: f64) -> Result<ScaledValues> {
        self.check_n(nmax)?;
        let nu = self.params.nu;
        let b = self.q_basis(nmax + nu, y)?;
        let values = (0..=nmax)
            .map(|n| self.combine(&self.q_dd[n], &b.values, nu))
            .collect();
        Ok(ScaledValues {
            values,
            log_scale: b.log_scale,
        })
    }

    pub fn eval_p_all(&self, nmax: usize, x: f64) -> Result<Vec<f64>> {
        finite_all(self.eval_p_all_scaled(nmax, x)?.unscaled(), "P_n")
    }

    pub fn eval_q_all(&self, nmax: usize, y: f64) -> Result<Vec<f64>> {
        finite_all(self.eval_q_all_scaled(nmax, y)?.unscaled(), "Q_n")
    }

    pub fn eval_p(&self, n: usize, x: f64) -> Result<f64> {
        self.check_n(n)?;
        let b = self.p_basis(n, x)?;
        let v = self.combine(&self.p_dd[n], &b.values, 0) * b.log_scale.exp();
        finite(v, "P_n")
    }

    pub fn eval_q(&self, n: usize, y: f64) -> Result<f64> {
        self.check_n(n)?;
        let nu = self.params.nu;
        let b = self.q_basis(n + nu, y)?;
        let v = self.combine(&self.q_dd[n], &b.values, nu) * b.log_scale.exp();
        finite(v, "Q_n")
    }

    /// P_n(x) Q_m(x) with the exponentials combined first: e^{2δ√x - 2α√x}
    /// = e^{-2√x}, so this stays finite wherever the product does.
    pub fn product_pq(&self, n: usize, m: usize, x: f64) -> Result<f64> {
        let p = self.eval_p_all_scaled(n, x)?;
        let q = self.eval_q_all_scaled(m, x)?;
        let e = (p.log_scale + q.log_scale).exp();
        if e == 0.0 {
            return Ok(0.0);
        }
        Ok(p.values[n] * q.values[m] * e)
    }
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numeric(format!("{what} overflowed")))
    }
}

fn finite_all(v: Vec<f64>, what: &str) -> Result<Vec<f64>> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(v)
    } else {
        Err(Error::Numeric(format!("{what} overflowed")))
    }
}

/// ψ_j(x) = x^{j/2} I_j(2δ√x).
pub fn raw_psi(j: usize, x: f64, params: &CouplingParameters) -> Result<f64> {
    if !(x >= 0.0) {
        return domain(format!("ψ_j needs x >= 0, got {x}"));
    }
    if x == 0.0 {
        return Ok(if j == 0 { 1.0 } else { 0.0 });
    }
    Ok(x.powf(j as f64 / 2.0) * bessel_i(j as u32, 2.0 * params.delta * x.sqrt())?)
}

/// φ_j(x) = x^{(j+ν)/2} K_{j+ν}(2α√x).
pub fn raw_phi(j: usize, x: f64, params: &CouplingParameters) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("φ_j needs x > 0, got {x}"));
    }
    let m = j + params.nu;
    Ok(x.powf(m as f64 / 2.0) * bessel_k(m as u32, 2.0 * params.alpha * x.sqrt())?)
}
