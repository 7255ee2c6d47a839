//! Confluent ₀F₁ and terminating ₂F₁ sums.

use num_complex::Complex64;

use super::sum::CompensatedSum;
use crate::error::{domain, Error, Result};

/// ₀F₁(; c; z) = Σ_m z^m / ((c)_m m!).
///
/// Terms are positive for z >= 0. For large negative z the alternating
/// series loses roughly |z|^{1/2}/ln 10 digits; the library only calls it
/// with z >= 0.
pub fn hyp0f1(c: f64, z: f64) -> Result<f64> {
    if !(c > 0.0) {
        return domain(format!("hyp0f1 needs c > 0, got {c}"));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let cap = 500 + 4 * z.abs().sqrt() as usize;
    let mut s = CompensatedSum::new();
    let mut t = 1.0;
    s.add(t);
    for m in 0..cap {
        let mf = m as f64;
        t *= z / ((c + mf) * (mf + 1.0));
        s.add(t);
        if t.abs() <= 1e-17 * s.value().abs() && (mf + 1.0) * (c + mf) > z.abs() {
            return Ok(s.value());
        }
    }
    Err(Error::Convergence {
        what: "0F1 series",
        estimate: s.value(),
        error: t.abs(),
    })
}

/// ₂F₁(-n, b; c; z) = Σ_{l=0}^{n} (-n)_l (b)_l / ((c)_l l!) z^l.
pub fn hyp2f1_terminating(n: u32, b: f64, c: f64, z: f64) -> Result<f64> {
    for l in 0..n {
        if c + l as f64 == 0.0 {
            return domain(format!("2F1 lower parameter {c} hits zero at term {l}"));
        }
    }
    let mut s = CompensatedSum::new();
    let mut t = 1.0;
    s.add(t);
    for l in 0..n {
        let lf = l as f64;
        t *= (lf - n as f64) * (b + lf) / ((c + lf) * (lf + 1.0)) * z;
        s.add(t);
    }
    Ok(s.value())
}

/// Complex-parameter version; the lower parameter sits on a vertical line
/// in the Mellin–Barnes integrands.
pub fn hyp2f1_terminating_complex(n: u32, b: Complex64, c: Complex64, z: f64) -> Result<Complex64> {
    for l in 0..n {
        if (c + l as f64).norm() == 0.0 {
            return domain(format!("2F1 lower parameter {c} hits zero at term {l}"));
        }
    }
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    let mut t = Complex64::new(1.0, 0.0);
    re.add(1.0);
    for l in 0..n {
        let lf = l as f64;
        t *= (b + lf) / (c + lf) * ((lf - n as f64) / (lf + 1.0) * z);
        re.add(t.re);
        im.add(t.im);
    }
    Ok(Complex64::new(re.value(), im.value()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial() {
        assert_eq!(hyp0f1(2.5, 0.0).unwrap(), 1.0);
        assert_eq!(hyp2f1_terminating(0, 3.0, 1.5, 0.7).unwrap(), 1.0);
        assert_eq!(hyp2f1_terminating(4, 3.0, 1.5, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn three_term_expansion() {
        // 1 + (-2)(1)/(3) z + (-2)(-1)(1)(2)/((3)(4) 2) z^2 at z = 1/2
        let exact = 1.0 - 2.0 / 3.0 * 0.5 + 1.0 / 6.0 * 0.25;
        assert!((hyp2f1_terminating(2, 1.0, 3.0, 0.5).unwrap() - exact).abs() < 1e-16);
    }

    #[test]
    fn forbidden_lower_parameter() {
        assert!(hyp2f1_terminating(3, 1.0, -1.0, 0.5).is_err());
        assert!(hyp2f1_terminating(3, 1.0, -3.0, 0.5).is_ok());
        assert!(hyp0f1(0.0, 1.0).is_err());
    }

    #[test]
    fn complex_matches_real_on_real_axis() {
        let r = hyp2f1_terminating(5, 2.5, -4.5, 0.3).unwrap();
        let c = hyp2f1_terminating_complex(5, Complex64::new(2.5, 0.0), Complex64::new(-4.5, 0.0), 0.3)
            .unwrap();
        assert!((r - c.re).abs() < 1e-15 * r.abs() && c.im == 0.0);
    }
}
