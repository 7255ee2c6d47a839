use serde::Serialize;

use super::BiorthogonalSystem;
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre_nodes_dd;
use crate::specfun::{bessel_i_reduced_scaled_seq_dd, bessel_k_power_seq_scaled_dd, DoubleDouble as Dd};

const NEAR_ZERO_PANELS: i32 = 64;
const NEAR_ZERO_ORDER: usize = 20;
const UNIT_ORDER: usize = 32;
/// Panels stop once one contributes less than this fraction of the
/// accumulated absolute mass.
const TAIL_FRACTION: f64 = 1e-34;

/// ∫_0^∞ P_n(x) Q_m(x) dx for n, m <= nmax.
#[derive(Debug, Clone, Serialize)]
pub struct BiorthogonalityMatrix {
    pub nmax: usize,
    pub entries: Vec<Vec<f64>>,
    /// ∫ |P_n Q_m| dx, the scale any f64 evaluation would lose digits
    /// against.
    pub absolute_mass: Vec<Vec<f64>>,
    pub nodes: usize,
}

impl BiorthogonalityMatrix {
    /// max |entry - [n = m]|.
    pub fn max_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for (n, row) in self.entries.iter().enumerate() {
            for (m, v) in row.iter().enumerate() {
                let want = if n == m { 1.0 } else { 0.0 };
                worst = worst.max((v - want).abs());
            }
        }
        worst
    }
}

/// Integrates in u = √x, where the integrand is 2u P_n(u²) Q_m(u²) and
/// the exponentials merge to e^{-2u}. Everything runs in double-double:
/// ∫|P_n Q_m| reaches 1e19 around n = 12, so f64 cancellation would
/// swamp an absolute target of 1e-8. Geometric panels resolve the
/// logarithm at the origin when ν = 0.
pub fn biorthogonality_matrix(sys: &BiorthogonalSystem, nmax: usize) -> Result<BiorthogonalityMatrix> {
    if nmax > sys.max_n {
        return Err(Error::Capacity {
            requested: nmax,
            max: sys.max_n,
        });
    }
    let p = &sys.params;
    let nu = p.nu;
    let mu = Dd::from_f64(p.mu);
    let one = Dd::from_f64(1.0);
    let g = one / mu;
    let alpha = (one + mu) / (mu * 2.0);
    let delta = alpha - 1.0;
    let q_ratio = g / (alpha * alpha * 2.0);
    let sqrt_g_sq = g;

    let dim = nmax + 1;
    let mut acc = vec![vec![Dd::default(); dim]; dim];
    let mut mass = vec![vec![0.0f64; dim]; dim];
    let mut nodes = 0usize;

    let mut eval_panel = |a: Dd, b: Dd, order: usize, acc: &mut Vec<Vec<Dd>>, mass: &mut Vec<Vec<f64>>| -> Result<f64> {
        let h = b - a;
        let mut panel_abs = 0.0f64;
        for (t, w) in gauss_legendre_nodes_dd(order)? {
            let u = a + h * t;
            let x = u * u;
            let zp = delta * u * 2.0;
            let zq = alpha * u * 2.0;
            let r = bessel_i_reduced_scaled_seq_dd(nmax as u32, zp)?;
            let tq = bessel_k_power_seq_scaled_dd((nmax + nu) as u32, zq)?;
            let gx = g * x;
            let mut pw = one;
            let mut pb = Vec::with_capacity(dim);
            for rk in &r {
                pb.push(pw * *rk);
                pw = pw * gx;
            }
            let mut pw = one;
            let mut qb = Vec::with_capacity(dim + nu);
            for tm in &tq {
                qb.push(pw * *tm);
                pw = pw * q_ratio;
            }
            let pv: Vec<Dd> = (0..dim)
                .map(|n| {
                    sys.p_dd[n]
                        .iter()
                        .zip(&pb)
                        .fold(Dd::default(), |s, (c, v)| s + *c * *v)
                })
                .collect();
            let qv: Vec<Dd> = (0..dim)
                .map(|n| {
                    sys.q_dd[n]
                        .iter()
                        .zip(&qb[nu..])
                        .fold(Dd::default(), |s, (c, v)| s + *c * *v)
                })
                .collect();
            let weight = w * h * u * 2.0 * sqrt_g_sq * (u * -2.0).exp();
            for n in 0..dim {
                let wp = weight * pv[n];
                for m in 0..dim {
                    let c = wp * qv[m];
                    acc[n][m] += c;
                    let ca = c.hi.abs();
                    mass[n][m] += ca;
                    panel_abs = panel_abs.max(ca);
                }
            }
            nodes += 1;
        }
        Ok(panel_abs)
    };

    for k in (0..NEAR_ZERO_PANELS).rev() {
        let b = Dd::from_f64(2f64.powi(-k));
        eval_panel(b * 0.5, b, NEAR_ZERO_ORDER, &mut acc, &mut mass)?;
    }
    // keep 2δu inside the range of the scaled Bessel evaluations
    let u_cap = 690.0 / (2.0 * p.delta).max(1.0);
    let mut a = 1.0f64;
    loop {
        let b = a + 1.0;
        if b > u_cap {
            return Err(Error::Convergence {
                what: "biorthogonality tail",
                estimate: a,
                error: f64::NAN,
            });
        }
        let panel = eval_panel(Dd::from_f64(a), Dd::from_f64(b), UNIT_ORDER, &mut acc, &mut mass)?;
        let total = mass.iter().flatten().fold(0.0f64, |s, v| s.max(*v));
        a = b;
        if a >= 8.0 && panel < TAIL_FRACTION * total {
            break;
        }
    }

    let entries = acc.iter().map(|row| row.iter().map(|v| v.to_f64()).collect()).collect();
    Ok(BiorthogonalityMatrix {
        nmax,
        entries,
        absolute_mass: mass,
        nodes,
    })
}
