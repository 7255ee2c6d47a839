//! Double-double arithmetic and the few functions the high-precision
//! biorthogonality quadrature needs (about 32 significant digits).

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use super::DoubleDouble as Dd;
use crate::error::{domain, Error, Result};

pub const DD_PI: Dd = Dd {
    hi: std::f64::consts::PI,
    lo: 1.224_646_799_147_353_2e-16,
};
pub const DD_LN2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};
pub const DD_EULER: Dd = Dd {
    hi: 0.577_215_664_901_532_9,
    lo: -4.942_915_152_430_645e-18,
};

const EPS: f64 = 1e-33;

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        Dd::add(self, o)
    }
}

impl Add<f64> for Dd {
    type Output = Dd;
    fn add(self, o: f64) -> Dd {
        self.add_f64(o)
    }
}

impl AddAssign for Dd {
    fn add_assign(&mut self, o: Dd) {
        *self = Dd::add(*self, o);
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        Dd::add(self, -o)
    }
}

impl Sub<f64> for Dd {
    type Output = Dd;
    fn sub(self, o: f64) -> Dd {
        self.add_f64(-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        Dd::mul(self, o)
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    fn mul(self, o: f64) -> Dd {
        self.mul_f64(o)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * q1;
        let q2 = r.hi / b.hi;
        let r = r - b * q2;
        let q3 = r.hi / b.hi;
        Dd::new(q1, q2).add_f64(q3)
    }
}

impl Div<f64> for Dd {
    type Output = Dd;
    fn div(self, b: f64) -> Dd {
        self / Dd::from_f64(b)
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Dd {
        Dd::from_f64(x)
    }
}

impl Dd {
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::from_f64(0.0);
        }
        let y = Dd::from_f64(self.hi.sqrt());
        y + (self - y * y) / (y * 2.0)
    }

    /// e^x; flushes to zero below -700.
    pub fn exp(self) -> Dd {
        if self.hi < -700.0 {
            return Dd::from_f64(0.0);
        }
        let k = (self.hi / DD_LN2.hi).round();
        let r = (self - DD_LN2 * k) * (1.0 / 32.0);
        // expm1(r) by Taylor, then (1+s)^32 through s <- 2s + s²
        let mut term = r;
        let mut s = r;
        for i in 2..=20 {
            term = term * r / i as f64;
            s += term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        for _ in 0..5 {
            s = s * 2.0 + s * s;
        }
        let scale = 2f64.powi(k as i32);
        let v = s + 1.0;
        Dd { hi: v.hi * scale, lo: v.lo * scale }
    }

    pub fn ln(self) -> Dd {
        let y = Dd::from_f64(self.hi.ln());
        y + self * (-y).exp() - 1.0
    }

    pub fn powi(self, n: u32) -> Dd {
        let mut out = Dd::from_f64(1.0);
        let mut base = self;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                out = out * base;
            }
            base = base * base;
            n >>= 1;
        }
        out
    }
}

/// Σ_m (z²/4)^m / (m! (m+k)!), i.e. I_k(z)/(z/2)^k, unscaled.
fn reduced_i_series(k: u32, z: Dd) -> Result<Dd> {
    let q = z * z * 0.25;
    let mut t = Dd::from_f64(1.0);
    for j in 1..=k {
        t = t / j as f64;
    }
    let mut s = t;
    for m in 0..100_000u32 {
        t = t * q / ((m + 1) as f64 * (m + k + 1) as f64);
        s += t;
        if t.hi < EPS * s.hi {
            return Ok(s);
        }
    }
    Err(Error::Convergence {
        what: "double-double I series",
        estimate: s.hi,
        error: t.hi,
    })
}

/// e^{-z} I_k(z)/(z/2)^k for k = 0..=kmax. Two series at the top, then
/// R_{k-1} = (z²/4) R_{k+1} + k R_k downwards, which only adds positive
/// terms.
pub fn bessel_i_reduced_scaled_seq_dd(kmax: u32, z: Dd) -> Result<Vec<Dd>> {
    if z.hi < 0.0 || z.hi > 700.0 {
        return domain(format!("double-double I needs 0 <= z <= 700, got {}", z.hi));
    }
    let n = kmax as usize;
    let mut r = vec![Dd::default(); n + 2];
    r[n + 1] = reduced_i_series(kmax + 1, z)?;
    r[n] = reduced_i_series(kmax, z)?;
    let q = z * z * 0.25;
    for k in (1..=n).rev() {
        r[k - 1] = q * r[k + 1] + r[k] * k as f64;
    }
    r.truncate(n + 1);
    let e = (-z).exp();
    Ok(r.into_iter().map(|v| v * e).collect())
}

/// (e^z K_0(z), e^z K_1(z)).
fn k01_scaled_dd(z: Dd) -> Result<(Dd, Dd)> {
    if z.hi <= 2.0 {
        let q = z * z * 0.25;
        let i0 = reduced_i_series(0, z)?;
        let i1 = reduced_i_series(1, z)? * z * 0.5;
        // K_0 = -(ln(z/2) + γ) I_0 + Σ_{k≥1} H_k q^k/(k!)²
        let mut t = Dd::from_f64(1.0);
        let mut h = Dd::from_f64(0.0);
        let mut s = Dd::from_f64(0.0);
        for k in 1..200u32 {
            t = t * q / ((k as f64) * (k as f64));
            h = h + Dd::from_f64(1.0) / k as f64;
            let term = t * h;
            s += term;
            if term.hi.abs() < EPS * s.hi.abs().max(1e-300) {
                break;
            }
        }
        let k0 = -((z * 0.5).ln() + DD_EULER) * i0 + s;
        // Wronskian I_0 K_1 + I_1 K_0 = 1/z
        let k1 = (Dd::from_f64(1.0) / z - i1 * k0) / i0;
        let e = z.exp();
        return Ok((k0 * e, k1 * e));
    }
    // e^z K_ν(z) = ∫_0^∞ e^{-2z sinh²(t/2)} cosh(νt) dt; the trapezoid
    // rule converges exponentially for this analytic integrand. The step
    // is a power of two so the nodes are exact, and shrinks like 1/√z to
    // follow the peak at t = 0.
    let h = 2f64.powi((0.5 / z.hi.sqrt()).min(0.125).log2().floor() as i32);
    let mut k0 = Dd::from_f64(0.5);
    let mut k1 = Dd::from_f64(0.5);
    for j in 1..10_000u32 {
        let t = Dd::from_f64(j as f64 * h);
        let eh = (t * 0.5).exp();
        let sh = (eh - one_over(eh)) * 0.5;
        let f = (-(z * sh * sh * 2.0)).exp();
        if f.hi < 1e-40 {
            let scale = Dd::from_f64(h);
            return Ok((k0 * scale, k1 * scale));
        }
        let et = eh * eh;
        k0 += f;
        k1 += f * (et + one_over(et)) * 0.5;
    }
    Err(Error::Convergence {
        what: "double-double K integral",
        estimate: k0.hi,
        error: f64::NAN,
    })
}

fn one_over(x: Dd) -> Dd {
    Dd::from_f64(1.0) / x
}

/// e^z z^m K_m(z) for m = 0..=mmax.
pub fn bessel_k_power_seq_scaled_dd(mmax: u32, z: Dd) -> Result<Vec<Dd>> {
    if !(z.hi > 0.0) {
        return domain(format!("double-double K needs z > 0, got {}", z.hi));
    }
    let (k0, k1) = k01_scaled_dd(z)?;
    let mut out = vec![k0];
    if mmax >= 1 {
        out.push(z * k1);
    }
    let z2 = z * z;
    for m in 1..mmax as usize {
        let next = z2 * out[m - 1] + out[m] * (2 * m) as f64;
        out.push(next);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{bessel_i_reduced_scaled, bessel_k_power_seq_scaled};

    fn dd(x: f64) -> Dd {
        Dd::from_f64(x)
    }

    #[test]
    fn arithmetic_round_trip() {
        let x = dd(3.0) / dd(7.0);
        let back = x * dd(7.0) - 3.0;
        assert!(back.to_f64().abs() < 1e-31);
        let r = dd(2.0).sqrt();
        assert!((r * r - 2.0).to_f64().abs() < 1e-31);
    }

    #[test]
    fn exp_ln() {
        for &v in &[-30.5, -1.0, 1e-3, 0.7, 12.25, 200.0] {
            let e = dd(v).exp();
            assert!(((e.ln() - v).to_f64()).abs() < 1e-29 * v.abs().max(1.0), "{v}");
            assert!((e.to_f64() / v.exp() - 1.0).abs() < 1e-14);
        }
        // e^1 to 32 digits: 2.71828182845904523536028747135266
        let e1 = dd(1.0).exp();
        assert_eq!(e1.hi, std::f64::consts::E);
        assert!((e1.lo - 1.445_646_891_729_250_2e-16).abs() < 1e-31);
    }

    #[test]
    fn bessel_agree_with_f64() {
        for &z in &[0.3, 1.9, 2.1, 8.0, 45.0, 300.0] {
            let i = bessel_i_reduced_scaled_seq_dd(6, dd(z)).unwrap();
            let k = bessel_k_power_seq_scaled_dd(6, dd(z)).unwrap();
            let kf = bessel_k_power_seq_scaled(6, z).unwrap();
            for j in 0..=6 {
                let want = bessel_i_reduced_scaled(j, z).unwrap();
                assert!((i[j as usize].to_f64() / want - 1.0).abs() < 1e-13, "I {j} {z}");
                assert!((k[j as usize].to_f64() / kf[j as usize] - 1.0).abs() < 1e-12, "K {j} {z}");
            }
        }
    }

    #[test]
    fn k_wronskian_in_dd() {
        // I_0 K_1 + I_1 K_0 = 1/z at 30 digits, across the series/CF2 switch
        for &z in &[0.5, 2.0, 2.5, 17.0] {
            let zd = dd(z);
            let i = bessel_i_reduced_scaled_seq_dd(1, zd).unwrap();
            let k = bessel_k_power_seq_scaled_dd(1, zd).unwrap();
            let (i0, i1) = (i[0], i[1] * zd * 0.5);
            let (k0, k1) = (k[0], k[1] / zd);
            let w = (i0 * k1 + i1 * k0) * zd - 1.0;
            assert!(w.to_f64().abs() < 1e-30, "{z}: {:e}", w.to_f64());
        }
    }
}
