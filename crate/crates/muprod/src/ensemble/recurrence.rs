//! Five-term recurrence coefficients
//!
//!   x P_n(x) = Σ_{j=-2}^{2} a_{j,n} P_{n+j}(x),
//!   y Q_n(y) = Σ_{j=-2}^{2} b_{j,n} Q_{n+j}(y).
//!
//! The closed forms are rational in α², δ² (with g = α² - δ²), so they are
//! written once over a generic field and instantiated for f64 and for
//! exact rationals.

use num_traits::{FromPrimitive, Num, Zero};
use serde::Serialize;

use super::CouplingParameters;

/// Coefficients for j = -2..=2, stored at index j + 2.
pub type FiveTerm<T> = [T; 5];

fn c<T: FromPrimitive>(v: i64) -> T {
    T::from_i64(v).expect("small integer")
}

/// (a_{-2,n}, a_{-1,n}, a_{0,n}, a_{1,n}, a_{2,n}).
pub fn recurrence_a_generic<T>(n: usize, nu: usize, alpha_sq: &T, delta_sq: &T) -> FiveTerm<T>
where
    T: Num + FromPrimitive + Clone,
{
    let g = alpha_sq.clone() - delta_sq.clone();
    let u = T::one() / g.clone();
    let v = delta_sq.clone() / (g.clone() * g.clone());
    let w = alpha_sq.clone() / (g.clone() * g);
    let (n, nu) = (n as i64, nu as i64);

    let a2 = v.clone() / c::<T>((n + 2) * (n + 1));
    let a1 = u.clone() + c::<T>(2 * (2 * n + nu + 2)) * v.clone() / c::<T>(n + 1);
    let a0 = c::<T>(3 * n * n + 2 * nu * n + 3 * n + nu + 1) * u.clone()
        + c::<T>(6 * n * n + 6 * n * nu + nu * nu + 6 * n + 3 * nu + 2) * v.clone();
    let am1 = c::<T>(n * n * (n + nu) * (3 * n + nu)) * u
        + c::<T>(2 * n * n * (nu + n) * (2 * n + nu)) * v;
    let am2 = c::<T>((nu + n) * (nu + n - 1) * n * n * (n - 1) * (n - 1)) * w;
    [am2, am1, a0, a1, a2]
}

/// (b_{-2,n}, b_{-1,n}, b_{0,n}, b_{1,n}, b_{2,n}). b_{-1,0}, b_{-2,0} and
/// b_{-2,1} multiply Q with negative index and are stored as zero.
pub fn recurrence_b_generic<T>(n: usize, nu: usize, alpha_sq: &T, delta_sq: &T) -> FiveTerm<T>
where
    T: Num + FromPrimitive + Clone,
{
    let g = alpha_sq.clone() - delta_sq.clone();
    let u = T::one() / g.clone();
    let v = delta_sq.clone() / (g.clone() * g.clone());
    let w = alpha_sq.clone() / (g.clone() * g);
    let (n, nu) = (n as i64, nu as i64);

    let b2 = c::<T>((nu + n + 2) * (nu + n + 1) * (n + 2) * (n + 2) * (n + 1) * (n + 1)) * w.clone();
    let b1 = c::<T>(-(n + 1) * (n + 1) * (n + nu + 1) * (n + nu + 1)) * u.clone()
        + c::<T>(2 * (2 * n + nu + 2) * (n + nu + 1) * (n + 1) * (n + 1)) * w.clone();
    let b0 = c::<T>(-((n + nu) * (n + nu) + 2 * (n + 1) * (n + nu) + n + 1)) * u.clone()
        + c::<T>((n + nu) * (5 * n + nu + 3) + n * (n + 3) + 2) * w.clone();
    let bm1 = if n >= 1 {
        (c::<T>(-(3 * n + 2 * nu)) * u + c::<T>(2 * (2 * n + nu)) * w) / c::<T>(n)
    } else {
        T::zero()
    };
    let bm2 = if n >= 2 { v / c::<T>(n * (n - 1)) } else { T::zero() };
    [bm2, bm1, b0, b1, b2]
}

/// a_{j,n} in f64, with u = 1/g = μ, v = δ²μ², w = α²μ² so that g never
/// comes from the α² - δ² subtraction (which loses digits for small μ).
pub fn recurrence_a(n: usize, p: &CouplingParameters) -> FiveTerm<f64> {
    let (u, v, w) = uvw(p);
    recurrence_a_uvw(n as f64, p.nu as f64, u, v, w)
}

/// a_{j,n} from u = 1/g, v = δ²/g², w = α²/g² directly.
pub fn recurrence_a_uvw(n: f64, nu: f64, u: f64, v: f64, w: f64) -> FiveTerm<f64> {
    [
        (nu + n) * (nu + n - 1.0) * n * n * (n - 1.0) * (n - 1.0) * w,
        n * n * (n + nu) * (3.0 * n + nu) * u + 2.0 * n * n * (nu + n) * (2.0 * n + nu) * v,
        (3.0 * n * n + 2.0 * nu * n + 3.0 * n + nu + 1.0) * u
            + (6.0 * n * n + 6.0 * n * nu + nu * nu + 6.0 * n + 3.0 * nu + 2.0) * v,
        u + 2.0 * (2.0 * n + nu + 2.0) / (n + 1.0) * v,
        v / ((n + 2.0) * (n + 1.0)),
    ]
}

/// b_{j,n} in f64, same conventions as `recurrence_a`.
pub fn recurrence_b(n: usize, p: &CouplingParameters) -> FiveTerm<f64> {
    let (u, v, w) = uvw(p);
    let (n, nu) = (n as f64, p.nu as f64);
    let bm1 = if n >= 1.0 {
        (-(3.0 * n + 2.0 * nu) * u + 2.0 * (2.0 * n + nu) * w) / n
    } else {
        0.0
    };
    let bm2 = if n >= 2.0 { v / (n * (n - 1.0)) } else { 0.0 };
    [
        bm2,
        bm1,
        -((n + nu) * (n + nu) + 2.0 * (n + 1.0) * (n + nu) + n + 1.0) * u
            + ((n + nu) * (5.0 * n + nu + 3.0) + n * (n + 3.0) + 2.0) * w,
        -(n + 1.0) * (n + 1.0) * (n + nu + 1.0) * (n + nu + 1.0) * u
            + 2.0 * (2.0 * n + nu + 2.0) * (n + nu + 1.0) * (n + 1.0) * (n + 1.0) * w,
        (nu + n + 2.0) * (nu + n + 1.0) * (n + 2.0) * (n + 2.0) * (n + 1.0) * (n + 1.0) * w,
    ]
}

fn uvw(p: &CouplingParameters) -> (f64, f64, f64) {
    (p.mu, (p.delta * p.mu).powi(2), (p.alpha * p.mu).powi(2))
}

/// Tables of a_{j,n}, b_{j,n} for n = 0..=max_n.
#[derive(Debug, Clone, Serialize)]
pub struct RecurrenceCoefficients {
    pub a: Vec<FiveTerm<f64>>,
    pub b: Vec<FiveTerm<f64>>,
}

impl RecurrenceCoefficients {
    pub fn new(params: &CouplingParameters, max_n: usize) -> Self {
        Self {
            a: (0..=max_n).map(|n| recurrence_a(n, params)).collect(),
            b: (0..=max_n).map(|n| recurrence_b(n, params)).collect(),
        }
    }

    /// a_{j,n}, j in -2..=2.
    pub fn a(&self, j: i32, n: usize) -> f64 {
        self.a[n][(j + 2) as usize]
    }

    pub fn b(&self, j: i32, n: usize) -> f64 {
        self.b[n][(j + 2) as usize]
    }
}

/// Is a five-term array all zeros (used by tests on the boundary rows).
pub fn is_zero_row<T: Zero>(row: &FiveTerm<T>) -> bool {
    row.iter().all(Zero::is_zero)
}
