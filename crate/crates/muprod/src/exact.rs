//! Big-integer helpers shared by the coefficient tables and identity checks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::specfun::DoubleDouble;

/// Reduced fraction of arbitrary-precision integers.
pub type ExactRational = BigRational;

pub fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// 1/n! as a rational, zero for negative n (the convention that makes
/// unbounded sums over m terminate).
pub fn inv_factorial(n: i64) -> ExactRational {
    if n < 0 {
        ExactRational::zero()
    } else {
        ExactRational::new(BigInt::one(), factorial(n as u64))
    }
}

/// Rising factorial (a)_k for integer a.
pub fn pochhammer(a: i64, k: u64) -> BigInt {
    (0..k as i64).fold(BigInt::one(), |acc, i| acc * (a + i))
}

pub fn rat(n: i64) -> ExactRational {
    ExactRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> ExactRational {
    ExactRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

pub fn to_f64(r: &ExactRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Nearest double-double to an exact rational.
pub fn to_double_double(r: &ExactRational) -> DoubleDouble {
    let hi = to_f64(r);
    if !hi.is_finite() || hi == 0.0 {
        return DoubleDouble::from_f64(hi);
    }
    let rest = r - ExactRational::from_float(hi).expect("finite");
    DoubleDouble::new(hi, to_f64(&rest))
}

pub fn is_nonnegative(r: &ExactRational) -> bool {
    !r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_double_captures_tail() {
        let third = ratio(1, 3);
        let dd = to_double_double(&third);
        assert_eq!(dd.hi, 1.0 / 3.0);
        assert!(dd.lo != 0.0 && dd.lo.abs() < 1e-16);
    }

    #[test]
    fn pochhammer_negative() {
        // (-3)_2 = (-3)(-2) = 6, (-3)_4 = 0
        assert_eq!(pochhammer(-3, 2), BigInt::from(6));
        assert_eq!(pochhammer(-3, 4), BigInt::zero());
    }
}
