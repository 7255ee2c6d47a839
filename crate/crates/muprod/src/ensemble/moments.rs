use num_traits::Zero;

use super::CouplingParameters;
use crate::exact::{factorial, pochhammer, ExactRational};
use crate::specfun::ln_factorial;

/// g_{k,l} = ∫_0^∞ ψ_l(x) φ_k(x) dx
///         = ½ α^{k+ν} δ^l (α²-δ²)^{-k-ν-l-1} (k+l+ν)!.
pub fn moment_matrix_entry(k: usize, l: usize, params: &CouplingParameters) -> f64 {
    let m = (k + params.nu) as f64;
    let ln = -std::f64::consts::LN_2
        + m * params.alpha.ln()
        + l as f64 * params.delta.ln()
        + (m + l as f64 + 1.0) * params.mu.ln()
        + ln_factorial((k + l + params.nu) as u32);
    ln.exp()
}

/// a_{k,l} = Σ_{p<N} (ν+p)! (-p)_k (-p)_l / (p! (ν+k)! k! (ν+l)! l!), the
/// entries of the inverse of the Hankel matrix h_{k+l} = (k+l+ν)! after
/// the change of basis used to build the kernel.
pub fn hankel_inverse_entry(k: usize, l: usize, nu: usize, n_small: usize) -> ExactRational {
    let den = factorial((nu + k) as u64)
        * factorial(k as u64)
        * factorial((nu + l) as u64)
        * factorial(l as u64);
    let mut acc = ExactRational::zero();
    for p in 0..n_small {
        let num = factorial((nu + p) as u64) * pochhammer(-(p as i64), k as u64) * pochhammer(-(p as i64), l as u64);
        acc += ExactRational::new(num, factorial(p as u64));
    }
    acc / ExactRational::from_integer(den)
}
