use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::BiorthogonalSystem;
use crate::error::{domain, Error, Result};
use crate::exact::{factorial, rat, sign, to_f64, ExactRational};
use crate::quadrature::{kernel_double_contour, ContourSpec};
use crate::specfun::CompensatedSum;

/// |x - y| < CD_PROXIMITY · max(x, y) is refused by the Christoffel–Darboux
/// form.
pub const CD_PROXIMITY: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelMethod {
    DirectSum,
    DoubleSum,
    ChristoffelDarboux,
    DoubleContour,
}

impl KernelMethod {
    pub const ALL: [KernelMethod; 4] = [
        KernelMethod::DirectSum,
        KernelMethod::DoubleSum,
        KernelMethod::ChristoffelDarboux,
        KernelMethod::DoubleContour,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelMethod::DirectSum => "direct-sum",
            KernelMethod::DoubleSum => "double-sum",
            KernelMethod::ChristoffelDarboux => "christoffel-darboux",
            KernelMethod::DoubleContour => "double-contour",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelValue {
    pub x: f64,
    pub y: f64,
    pub value: f64,
    pub method: KernelMethod,
}

/// K_N(x, y) by the selected method. The double-contour form uses the
/// default `ContourSpec`.
pub fn kernel(x: f64, y: f64, sys: &BiorthogonalSystem, method: KernelMethod) -> Result<KernelValue> {
    if !(x > 0.0 && y > 0.0) {
        return domain(format!("kernel needs x, y > 0, got ({x}, {y})"));
    }
    let value = match method {
        KernelMethod::DirectSum => kernel_direct(x, y, sys)?,
        KernelMethod::DoubleSum => kernel_double_sum(x, y, sys)?,
        KernelMethod::ChristoffelDarboux => kernel_christoffel_darboux(x, y, sys)?,
        KernelMethod::DoubleContour => kernel_double_contour(x, y, sys, &ContourSpec::default())?,
    };
    if !value.is_finite() {
        return Err(Error::Numeric(format!("K_N({x}, {y}) is not finite")));
    }
    Ok(KernelValue { x, y, value, method })
}

/// Σ_{n<N} P_n(x) Q_n(y).
pub fn kernel_direct(x: f64, y: f64, sys: &BiorthogonalSystem) -> Result<f64> {
    let n = sys.params.n_small;
    let p = sys.eval_p_all_scaled(n - 1, x)?;
    let q = sys.eval_q_all_scaled(n - 1, y)?;
    let s: CompensatedSum = p.values.iter().zip(&q.values).map(|(a, b)| a * b).collect();
    Ok(s.value() * (p.log_scale + q.log_scale).exp())
}

/// C_{k,l} such that K_N(x,y) = g Σ_{k,l} C_{k,l} b_k(x) c_{l+ν}(y) in the
/// reduced bases of `BiorthogonalSystem`:
///
///   C_{k,l} = 2 Σ_{i≤l} (-1)^{i+k} (ν+N+i)! /
///             ((N-1-k)! (ν+k)! i! (l-i)! k! (ν+i)! (ν+k+i+1)).
pub fn double_sum_matrix(n_small: usize, nu: usize) -> Vec<Vec<ExactRational>> {
    let f = |n: usize| factorial(n as u64);
    (0..n_small)
        .map(|k| {
            (0..n_small)
                .map(|l| {
                    let mut acc = ExactRational::zero();
                    for i in 0..=l {
                        let den = f(n_small - 1 - k) * f(nu + k) * f(i) * f(l - i) * f(k) * f(nu + i)
                            * (nu + k + i + 1);
                        acc += ExactRational::new(f(nu + n_small + i) * sign((i + k) as i64), den);
                    }
                    acc * rat(2)
                })
                .collect()
        })
        .collect()
}

pub fn kernel_double_sum(x: f64, y: f64, sys: &BiorthogonalSystem) -> Result<f64> {
    let (n, nu) = (sys.params.n_small, sys.params.nu);
    let c = sys.double_sum.get_or_init(|| {
        double_sum_matrix(n, nu)
            .iter()
            .map(|row| row.iter().map(to_f64).collect())
            .collect()
    });
    let b = sys.p_basis(n - 1, x)?;
    let q = sys.q_basis(n - 1 + nu, y)?;
    let mut s = CompensatedSum::new();
    for (k, row) in c.iter().enumerate() {
        for (l, ckl) in row.iter().enumerate() {
            s.add(ckl * b.values[k] * q.values[l + nu]);
        }
    }
    Ok(sys.params.gap() * s.value() * (b.log_scale + q.log_scale).exp())
}

/// Boundary-term form from the five-term recurrences; x ≠ y, N ≥ 2.
pub fn kernel_christoffel_darboux(x: f64, y: f64, sys: &BiorthogonalSystem) -> Result<f64> {
    let n = sys.params.n_small;
    if n < 2 {
        return domain("the Christoffel-Darboux form needs N >= 2");
    }
    let gap = (x - y).abs();
    if gap < CD_PROXIMITY * x.max(y) {
        return Err(Error::Proximity { gap });
    }
    let p = sys.eval_p_all_scaled(n + 1, x)?;
    let q = sys.eval_q_all_scaled(n + 1, y)?;
    let (p, q) = (&p.values, &q.values);
    let r = &sys.recurrence;
    let mut s = CompensatedSum::new();
    s.add(-r.a(-2, n) * p[n - 2] * q[n]);
    s.add(-r.a(-2, n + 1) * p[n - 1] * q[n + 1]);
    s.add(-r.a(-1, n) * p[n - 1] * q[n]);
    s.add(r.a(1, n - 1) * p[n] * q[n - 1]);
    s.add(r.a(2, n - 2) * p[n] * q[n - 2]);
    s.add(r.a(2, n - 1) * p[n + 1] * q[n - 1]);
    let e = (2.0 * sys.params.delta * x.sqrt() - 2.0 * sys.params.alpha * y.sqrt()).exp();
    Ok(s.value() / (x - y) * e)
}
