//! Gamma function for real and complex arguments.
//!
//! Stirling's series after shifting the argument to |z| >= 10, with the
//! reflection formula for Re z < 1/2.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{domain, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// B_{2k} / (2k (2k-1)), k = 1..10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

const SHIFT_TO: f64 = 10.0;
const POLE_GAP: f64 = 1e-8;

/// Argument of the complex Gamma function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaArg(pub Complex64);

impl From<Complex64> for GammaArg {
    fn from(z: Complex64) -> Self {
        GammaArg(z)
    }
}

impl From<f64> for GammaArg {
    fn from(x: f64) -> Self {
        GammaArg(Complex64::new(x, 0.0))
    }
}

fn stirling_tail(z: Complex64) -> Complex64 {
    let w = z.inv();
    let w2 = w * w;
    let mut acc = Complex64::new(0.0, 0.0);
    for c in STIRLING.iter().rev() {
        acc = acc * w2 + c;
    }
    acc * w
}

fn stirling_real(x: f64) -> f64 {
    let w = 1.0 / x;
    let w2 = w * w;
    let mut acc = 0.0;
    for c in STIRLING.iter().rev() {
        acc = acc * w2 + c;
    }
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + acc * w
}

/// ln(n!) for n <= 170 from an exact-as-possible running product.
pub fn ln_factorial(n: u32) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= 170 {
        factorial(n).ln()
    } else {
        stirling_real(n as f64 + 1.0)
    }
}

/// n! as a double; overflows to infinity past 170.
pub fn factorial(n: u32) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn ln_gamma_pos(x: f64) -> f64 {
    if x.fract() == 0.0 && x <= 171.0 {
        return ln_factorial(x as u32 - 1);
    }
    let mut z = x;
    let mut prod = 1.0;
    while z < SHIFT_TO {
        prod *= z;
        z += 1.0;
    }
    stirling_real(z) - prod.ln()
}

/// ln Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("log_gamma needs a positive finite argument, got {x}"));
    }
    Ok(ln_gamma_pos(x))
}

fn near_pole(x: f64) -> bool {
    x <= 0.0 && (x - x.round()).abs() < POLE_GAP
}

/// (ln |Γ(x)|, sign Γ(x)) for real x off the poles.
pub fn ln_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() || near_pole(x) {
        return domain(format!("Γ has a pole at {x}"));
    }
    if x > 0.0 {
        return Ok((ln_gamma_pos(x), 1.0));
    }
    // Γ(x) = π / (sin(πx) Γ(1-x))
    let s = (PI * x).sin();
    let ln = PI.ln() - s.abs().ln() - ln_gamma_pos(1.0 - x);
    Ok((ln, s.signum()))
}

/// Γ(x) for real x off the poles.
pub fn gamma_real(x: f64) -> Result<f64> {
    let (ln, sign) = ln_gamma_signed(x)?;
    Ok(sign * ln.exp())
}

fn ln_gamma_right(z: Complex64) -> Complex64 {
    let mut w = z;
    let mut prod = Complex64::new(1.0, 0.0);
    while w.norm() < SHIFT_TO {
        prod *= w;
        w += 1.0;
    }
    (w - 0.5) * w.ln() - w + LN_SQRT_2PI + stirling_tail(w) - prod.ln()
}

/// A branch of ln Γ(z); exp of it is Γ(z). Imaginary part is not unwrapped.
pub fn ln_gamma_complex(z: impl Into<GammaArg>) -> Result<Complex64> {
    let z = z.into().0;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return domain("non-finite Gamma argument");
    }
    if z.im.abs() < POLE_GAP && near_pole(z.re) {
        return domain(format!("Γ has a pole near {z}"));
    }
    if z.re >= 0.5 {
        return Ok(ln_gamma_right(z));
    }
    Ok(Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma_right(1.0 - z))
}

/// ln sin(πz), stable for large |Im z| where sin itself overflows.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let w = z * PI;
    let i = Complex64::i();
    if w.im > 20.0 {
        -i * w + Complex64::new(-std::f64::consts::LN_2, PI / 2.0) + (1.0 - (2.0 * i * w).exp()).ln()
    } else if w.im < -20.0 {
        i * w + Complex64::new(-std::f64::consts::LN_2, -PI / 2.0) + (1.0 - (-2.0 * i * w).exp()).ln()
    } else {
        w.sin().ln()
    }
}

/// Γ(z) for complex z off the poles.
pub fn gamma_complex(z: impl Into<GammaArg>) -> Result<Complex64> {
    ln_gamma_complex(z).map(|l| l.exp())
}

/// Pochhammer (a)_k for real a.
pub fn pochhammer(a: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (a + i as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integers_are_exact() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert_eq!(log_gamma(2.0).unwrap(), 0.0);
        assert!((log_gamma(5.0).unwrap() - 24f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn half() {
        let v = log_gamma(0.5).unwrap();
        assert!((v - 0.5 * PI.ln()).abs() < 1e-14);
        let g = gamma_complex(0.5).unwrap();
        assert!((g.re - PI.sqrt()).abs() < 1e-14 && g.im.abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_args() {
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.0).is_err());
        assert!(gamma_complex(-3.0).is_err());
        assert!(gamma_real(-2.0 + 1e-10).is_err());
        assert!(gamma_real(-2.5).is_ok());
    }

    #[test]
    fn negative_half() {
        // Γ(-1/2) = -2√π
        let g = gamma_real(-0.5).unwrap();
        assert!((g + 2.0 * PI.sqrt()).abs() < 1e-14);
    }
}
