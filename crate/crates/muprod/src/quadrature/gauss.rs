use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{domain, Result};
use crate::specfun::DoubleDouble;

const MAX_NODES: usize = 512;

static CACHE: [OnceLock<Vec<(f64, f64)>>; MAX_NODES + 1] = [const { OnceLock::new() }; MAX_NODES + 1];

fn build(n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map [-1, 1] -> [0, 1]
        out[i] = (0.5 * (1.0 - x), 0.5 * w);
        out[n - 1 - i] = (0.5 * (1.0 + x), 0.5 * w);
    }
    out
}

/// Gauss–Legendre nodes and weights on [0, 1], ascending, cached.
pub fn gauss_legendre_nodes(n: usize) -> Result<&'static [(f64, f64)]> {
    if !(2..=MAX_NODES).contains(&n) {
        return domain(format!("Gauss–Legendre order must be in 2..=512, got {n}"));
    }
    Ok(CACHE[n].get_or_init(|| build(n)).as_slice())
}

/// ∫_a^b f with an n-point Gauss–Legendre rule.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> Result<f64> {
    let nodes = gauss_legendre_nodes(n)?;
    let h = b - a;
    Ok(nodes.iter().map(|&(u, w)| w * f(a + h * u)).sum::<f64>() * h)
}

/// Gauss–Legendre nodes and weights on [0, 1] in double-double, polished
/// from the f64 rule by Newton steps on P_n.
pub fn gauss_legendre_nodes_dd(n: usize) -> Result<Vec<(DoubleDouble, DoubleDouble)>> {
    let one = DoubleDouble::from_f64(1.0);
    gauss_legendre_nodes(n)?
        .iter()
        .map(|&(u, _)| {
            let mut x = DoubleDouble::from_f64(2.0 * u - 1.0);
            let mut dp = one;
            for _ in 0..3 {
                let (mut p0, mut p1) = (one, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = (x * p1 * (2.0 * kf - 1.0) - p0 * (kf - 1.0)) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = (x * p1 - p0) * n as f64 / (x * x - 1.0);
                x = x - p1 / dp;
            }
            let w = DoubleDouble::from_f64(2.0) / ((one - x * x) * dp * dp);
            Ok(((x + 1.0) * 0.5, w * 0.5))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_rule() {
        let g = gauss_legendre_nodes(2).unwrap();
        let s3 = 3f64.sqrt();
        assert!((g[0].0 - (3.0 - s3) / 6.0).abs() < 1e-15);
        assert!((g[1].0 - (3.0 + s3) / 6.0).abs() < 1e-15);
        assert!((g[0].1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn weights_sum_to_one() {
        for n in [2, 3, 17, 64, 200, 512] {
            let s: f64 = gauss_legendre_nodes(n).unwrap().iter().map(|p| p.1).sum();
            assert!((s - 1.0).abs() < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn polynomial_exactness() {
        let v = gauss_legendre(|u| u * u * u, 0.0, 1.0, 2).unwrap();
        assert!((v - 0.25).abs() < 1e-16);
    }

    #[test]
    fn exponential() {
        let v = gauss_legendre(f64::exp, 0.0, 1.0, 32).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn order_bounds() {
        assert!(gauss_legendre_nodes(1).is_err());
        assert!(gauss_legendre_nodes(513).is_err());
    }
}
