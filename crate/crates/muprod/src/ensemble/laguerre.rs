use super::double_sum_matrix;
use crate::error::{domain, Result};
use crate::exact::to_f64;
use crate::specfun::CompensatedSum;

/// K^Lag_N(x, y) = e^{-√x-√y} (xy)^{-1/4}
///   Σ_{k,l<N} Σ_{i≤l} (-1)^{i+k} (ν+N+i)! 2^{k+l+ν} x^{k/2} y^{(l+ν)/2}
///   / ((N-1-k)! (ν+k)! i! (l-i)! k! (ν+i)! (ν+k+i+1)).
///
/// The inner i-sum is the same rational as in the double-sum kernel, halved.
pub fn laguerre_type_kernel(x: f64, y: f64, n_small: usize, nu: usize) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return domain(format!("K^Lag needs x, y > 0, got ({x}, {y})"));
    }
    if n_small == 0 {
        return domain("N must be at least 1");
    }
    let c = double_sum_matrix(n_small, nu);
    let (sx, sy) = (x.sqrt(), y.sqrt());
    let mut s = CompensatedSum::new();
    for (k, row) in c.iter().enumerate() {
        for (l, ckl) in row.iter().enumerate() {
            let pw = (2.0 * sx).powi(k as i32) * (2.0 * sy).powi((l + nu) as i32);
            s.add(0.5 * to_f64(ckl) * pw);
        }
    }
    Ok((-sx - sy).exp() / (x * y).powf(0.25) * s.value())
}
