//! Modified Bessel functions I_k and K_k of integer order.
//!
//! Besides the plain values there are exponentially scaled variants and two
//! power-weighted forms that the biorthogonal functions need:
//!
//! * `bessel_i_reduced(k, z)`  = I_k(z) / (z/2)^k, finite as z -> 0;
//! * `bessel_k_power_seq(m, z)` = z^j K_j(z) for j = 0..=m, finite as z -> 0.

use std::f64::consts::PI;

use super::gamma::ln_factorial;
use super::sum::CompensatedSum;
use crate::error::{domain, Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_LIMIT: f64 = 30.0;
const TERM_TOL: f64 = 1e-17;

fn check_arg(z: f64, strictly_positive: bool) -> Result<()> {
    if !z.is_finite() || z < 0.0 || (strictly_positive && z == 0.0) {
        return domain(format!("Bessel argument out of range: {z}"));
    }
    Ok(())
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numeric(format!("{what} overflowed")))
    }
}

/// Ascending I_k series divided by its first term:
/// Σ_m (z²/4)^m k! / (m! (k+m)!).
fn i_series_ratio_sum(k: u32, z: f64) -> Result<f64> {
    let q = 0.25 * z * z;
    let kf = k as f64;
    let cap = 500 + z as usize;
    let mut s = CompensatedSum::new();
    let mut t = 1.0;
    s.add(t);
    for m in 1..=cap {
        let mf = m as f64;
        t *= q / (mf * (mf + kf));
        s.add(t);
        if t < TERM_TOL * s.value() && mf > 0.5 * z {
            return Ok(s.value());
        }
    }
    Err(Error::Convergence {
        what: "I_k ascending series",
        estimate: s.value(),
        error: t,
    })
}

/// e^{-z} I_k(z) from the large-argument expansion; None when the
/// expansion starts to diverge before reaching full precision.
fn i_asymptotic_scaled(k: u32, z: f64) -> Option<f64> {
    let mu = 4.0 * (k as f64).powi(2);
    let mut s = CompensatedSum::new();
    let mut t = 1.0;
    s.add(t);
    for j in 1..400 {
        let odd = (2 * j - 1) as f64;
        let next = -t * (mu - odd * odd) / (8.0 * j as f64 * z);
        if next.abs() > t.abs() && j as f64 > k as f64 {
            return None;
        }
        t = next;
        s.add(t);
        if t.abs() < TERM_TOL * s.value().abs() {
            return Some(s.value() / (2.0 * PI * z).sqrt());
        }
    }
    None
}

fn use_asymptotic(k: u32, z: f64) -> bool {
    z > SERIES_LIMIT && z >= (k as f64).powi(2)
}

/// e^{-z} I_k(z).
pub fn bessel_i_scaled(k: u32, z: f64) -> Result<f64> {
    check_arg(z, false)?;
    if z == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    if use_asymptotic(k, z) {
        if let Some(v) = i_asymptotic_scaled(k, z) {
            return Ok(v);
        }
    }
    let s = i_series_ratio_sum(k, z)?;
    let ln_t0 = k as f64 * (0.5 * z).ln() - ln_factorial(k) - z;
    Ok(ln_t0.exp() * s)
}

/// I_k(z).
pub fn bessel_i(k: u32, z: f64) -> Result<f64> {
    check_arg(z, false)?;
    if z == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    if use_asymptotic(k, z) {
        if let Some(v) = i_asymptotic_scaled(k, z) {
            return finite(v * z.exp(), "I_k");
        }
    }
    let s = i_series_ratio_sum(k, z)?;
    let ln_t0 = k as f64 * (0.5 * z).ln() - ln_factorial(k);
    finite(ln_t0.exp() * s, "I_k")
}

/// e^{-z} I_k(z) / (z/2)^k, the entire function behind x^{k/2} I_k(2δ√x).
pub fn bessel_i_reduced_scaled(k: u32, z: f64) -> Result<f64> {
    check_arg(z, false)?;
    if use_asymptotic(k, z) {
        if let Some(v) = i_asymptotic_scaled(k, z) {
            return Ok((v.ln() - k as f64 * (0.5 * z).ln()).exp());
        }
    }
    let s = i_series_ratio_sum(k, z)?;
    Ok((-ln_factorial(k) - z).exp() * s)
}

/// I_k(z) / (z/2)^k.
pub fn bessel_i_reduced(k: u32, z: f64) -> Result<f64> {
    let v = bessel_i_reduced_scaled(k, z)?;
    finite(v * z.exp(), "reduced I_k")
}

/// (e^z K_0(z), e^z K_1(z)).
fn k01_scaled(z: f64) -> Result<(f64, f64)> {
    if z <= 2.0 {
        let q = 0.25 * z * z;
        let mut i0 = CompensatedSum::new();
        let mut i1 = CompensatedSum::new();
        let mut tail = CompensatedSum::new();
        let mut t = 1.0;
        let mut h = 0.0;
        i0.add(1.0);
        i1.add(0.5 * z);
        for m in 1..200 {
            let mf = m as f64;
            t *= q / (mf * mf);
            h += 1.0 / mf;
            i0.add(t);
            i1.add(t * 0.5 * z / (mf + 1.0));
            tail.add(t * h);
            if t * h < TERM_TOL * tail.value() {
                break;
            }
        }
        let (i0, i1) = (i0.value(), i1.value());
        let k0 = -((0.5 * z).ln() + EULER_GAMMA) * i0 + tail.value();
        // Wronskian I_0 K_1 + I_1 K_0 = 1/z
        let k1 = (1.0 / z - i1 * k0) / i0;
        let e = z.exp();
        return Ok((k0 * e, k1 * e));
    }
    // Steed's algorithm for Temme's second continued fraction, order 0.
    let mut b = 2.0 * (1.0 + z);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    let mut converged = false;
    for i in 1..20_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < f64::EPSILON * 0.5 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence {
            what: "K_0 continued fraction",
            estimate: s,
            error: f64::NAN,
        });
    }
    let h = a1 * h;
    let k0 = (PI / (2.0 * z)).sqrt() / s;
    let k1 = k0 * (z + 0.5 - h) / z;
    Ok((k0, k1))
}

/// e^z K_j(z) for j = 0..=kmax by upward recurrence.
pub fn bessel_k_scaled_seq(kmax: u32, z: f64) -> Result<Vec<f64>> {
    check_arg(z, true)?;
    let (k0, k1) = k01_scaled(z)?;
    let mut out = Vec::with_capacity(kmax as usize + 1);
    out.push(k0);
    if kmax >= 1 {
        out.push(k1);
    }
    for m in 1..kmax as usize {
        let next = out[m - 1] + 2.0 * m as f64 / z * out[m];
        out.push(finite(next, "K_k")?);
    }
    Ok(out)
}

/// e^z K_k(z).
pub fn bessel_k_scaled(k: u32, z: f64) -> Result<f64> {
    Ok(bessel_k_scaled_seq(k, z)?[k as usize])
}

/// K_k(z), z > 0.
pub fn bessel_k(k: u32, z: f64) -> Result<f64> {
    let v = bessel_k_scaled(k, z)?;
    finite(v * (-z).exp(), "K_k")
}

/// K_ν for signed integer order; K_{-ν} = K_ν.
pub fn bessel_k_signed(order: i32, z: f64) -> Result<f64> {
    bessel_k(order.unsigned_abs(), z)
}

/// e^z z^j K_j(z) for j = 0..=kmax.
///
/// Uses t_{j+1} = z² t_{j-1} + 2j t_j, which never divides by z, so the
/// small-z limit t_j -> 2^{j-1} (j-1)! comes out without overflow.
pub fn bessel_k_power_seq_scaled(kmax: u32, z: f64) -> Result<Vec<f64>> {
    check_arg(z, true)?;
    let (k0, k1) = k01_scaled(z)?;
    let mut out = Vec::with_capacity(kmax as usize + 1);
    out.push(k0);
    if kmax >= 1 {
        out.push(z * k1);
    }
    let z2 = z * z;
    for m in 1..kmax as usize {
        let next = z2 * out[m - 1] + 2.0 * m as f64 * out[m];
        out.push(finite(next, "z^k K_k")?);
    }
    Ok(out)
}

/// z^j K_j(z) for j = 0..=kmax.
pub fn bessel_k_power_seq(kmax: u32, z: f64) -> Result<Vec<f64>> {
    let e = (-z).exp();
    bessel_k_power_seq_scaled(kmax, z).map(|v| v.into_iter().map(|t| t * e).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_values() {
        assert_eq!(bessel_i(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(3, 0.0).unwrap(), 0.0);
        assert!(bessel_k(0, 0.0).is_err());
        assert!(bessel_k(0, -1.0).is_err());
    }

    #[test]
    fn signed_order() {
        for &z in &[0.3, 2.5, 17.0] {
            assert_eq!(bessel_k_signed(-1, z).unwrap(), bessel_k_signed(1, z).unwrap());
            assert_eq!(bessel_k_signed(-4, z).unwrap(), bessel_k(4, z).unwrap());
        }
    }

    #[test]
    fn power_seq_small_z_limit() {
        // z^j K_j(z) -> 2^{j-1} (j-1)! as z -> 0
        let v = bessel_k_power_seq(6, 1e-9).unwrap();
        assert!((v[1] - 1.0).abs() < 1e-12);
        assert!((v[2] - 2.0).abs() < 1e-12);
        assert!((v[6] - 32.0 * 120.0).abs() < 1e-8);
    }
}
