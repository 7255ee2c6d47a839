//! The hard-edge scaling limit: the Meijer G-kernel K_ν(x, y) and the
//! rescaled finite-N kernel (μ/N) K_N(xμ/N, yμ/N) that converges to it.
//!
//!   f(x) = G^{1,0}_{0,3}(−; 0, −ν, 0 | x) = Σ_k (-1)^k x^k / ((k!)² (k+ν)!)
//!   g(y) = G^{2,0}_{0,3}(−; ν, 0, 0 | y)
//!        = (1/2πi) ∫_{c-i∞}^{c+i∞} Γ(s)Γ(s+ν)/Γ(1-s) y^{-s} ds
//!   K_ν(x, y) = ∫_0^1 f(ux) g(uy) du

use num_complex::Complex64;
use serde::Serialize;

use crate::ensemble::{make_parameters, BiorthogonalSystem};
use crate::error::{domain, Error, Result};
use crate::par::{map_indexed, Execution};
use crate::quadrature::{eval_q_contour_all, gauss_legendre_nodes, ContourSpec};
use crate::specfun::{ln_gamma_complex, CompensatedSum, DoubleDouble as Dd};

/// Geometric panels [2^{-k-1}, 2^{-k}] covering (0, 1] in the product
/// integral; the remainder [0, 2^{-PANELS}] is dropped.
const PRODUCT_PANELS: i32 = 44;
const PRODUCT_ORDER: usize = 12;

/// Line used for g unless the caller supplies one. Γ(s)Γ(s+ν)/Γ(1-s)
/// decays like e^{-π|τ|/2}, so |τ| ≤ 48 is far past double precision for
/// moderate ν; the step 0.04 puts the trapezoid error near e^{-2π c/h}.
pub fn default_g_contour() -> ContourSpec {
    ContourSpec {
        abscissa_c: 0.5,
        height_t: 48.0,
        nodes: 2400,
    }
}

/// Line nodes with the ν-dependent part of the g integrand already
/// evaluated, so each g(y) costs one exponential per node.
#[derive(Debug, Clone)]
pub struct HardEdgeContext {
    pub nu: usize,
    pub contour: ContourSpec,
    /// (s, w · Γ(s)Γ(s+ν)/Γ(1-s)) on the upper half line.
    line: Vec<(Complex64, Complex64)>,
    /// (u, weight) for ∫_0^1 du.
    product_nodes: Vec<(f64, f64)>,
}

impl HardEdgeContext {
    pub fn new(nu: usize) -> Result<Self> {
        Self::with_contour(nu, default_g_contour())
    }

    pub fn with_contour(nu: usize, contour: ContourSpec) -> Result<Self> {
        contour.validate()?;
        let mut line = Vec::new();
        for (s, w) in contour.half_line() {
            let l = ln_gamma_complex(s)? + ln_gamma_complex(s + nu as f64)? - ln_gamma_complex(1.0 - s)?;
            line.push((s, w * l.exp()));
        }
        let gl = gauss_legendre_nodes(PRODUCT_ORDER)?;
        let mut product_nodes = Vec::new();
        for k in 0..PRODUCT_PANELS {
            let b = 2f64.powi(-k);
            let a = 0.5 * b;
            for &(t, w) in gl {
                product_nodes.push((a + (b - a) * t, (b - a) * w));
            }
        }
        Ok(Self {
            nu,
            contour,
            line,
            product_nodes,
        })
    }

    /// (g, y g', (y d/dy)² g) at y > 0.
    pub fn g_with_derivatives(&self, y: f64) -> Result<[f64; 3]> {
        if !(y > 0.0 && y.is_finite()) {
            return domain(format!("g needs y > 0, got {y}"));
        }
        let ly = y.ln();
        let mut acc = [CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new()];
        for &(s, fw) in &self.line {
            let v = fw * (-s * ly).exp();
            acc[0].add(v.re);
            // y d/dy y^{-s} = -s y^{-s}
            acc[1].add((-s * v).re);
            acc[2].add((s * s * v).re);
        }
        let out = acc.map(|a| a.value());
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("g({y}) is not finite")));
        }
        Ok(out)
    }

    pub fn g(&self, y: f64) -> Result<f64> {
        if !(y > 0.0 && y.is_finite()) {
            return domain(format!("g needs y > 0, got {y}"));
        }
        let ly = y.ln();
        let s: CompensatedSum = self.line.iter().map(|&(s, fw)| (fw * (-s * ly).exp()).re).collect();
        Ok(s.value())
    }
}

/// Σ_k (-1)^k x^k/((k!)² (k+ν)!) with the k-weighted sums for x f' and
/// (x d/dx)² f, in double-double so the alternating series keeps its
/// digits for x up to a few hundred.
pub fn meijer_f_with_derivatives(x: f64, nu: usize) -> Result<[f64; 3]> {
    if !(x >= 0.0 && x.is_finite()) {
        return domain(format!("f needs x >= 0, got {x}"));
    }
    let mut t = Dd::from_f64(1.0);
    for j in 1..=nu {
        t = t / j as f64;
    }
    let mut s = [t, Dd::default(), Dd::default()];
    let mut biggest = t.hi.abs();
    for k in 1..10_000usize {
        let kf = k as f64;
        t = t * (-x) / (kf * kf * (kf + nu as f64));
        s[0] += t;
        s[1] += t * kf;
        s[2] += t * (kf * kf);
        biggest = biggest.max((t.hi * kf * kf).abs());
        if (t.hi * kf * kf).abs() < 1e-32 * biggest && x / (kf * kf) < 0.5 {
            return Ok(s.map(|v| v.to_f64()));
        }
    }
    Err(Error::Convergence {
        what: "Meijer f series",
        estimate: s[0].to_f64(),
        error: f64::NAN,
    })
}

pub fn meijer_f(x: f64, nu: usize) -> Result<f64> {
    Ok(meijer_f_with_derivatives(x, nu)?[0])
}

/// g(y) on the given line; builds a one-off context.
pub fn meijer_g(y: f64, nu: usize, contour: &ContourSpec) -> Result<f64> {
    HardEdgeContext::with_contour(nu, *contour)?.g(y)
}

/// K_ν(x, y) = ∫_0^1 f(ux) g(uy) du on geometric panels towards u = 0,
/// where g has a logarithmic singularity when ν = 0.
pub fn limiting_kernel(x: f64, y: f64, ctx: &HardEdgeContext) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return domain(format!("limiting kernel needs x, y > 0, got ({x}, {y})"));
    }
    let mut s = CompensatedSum::new();
    for &(u, w) in &ctx.product_nodes {
        s.add(w * meijer_f(u * x, ctx.nu)? * ctx.g(u * y)?);
    }
    Ok(s.value())
}

/// The same kernel from f, g and their Euler derivatives:
///
///   [f (ν Yg - Y²g) + Xf (-ν g + Yg) - X²f g] / (x - y),
///
/// with X = x d/dx, Y = y d/dy. Only for x ≠ y.
pub fn limiting_kernel_derivative_form(x: f64, y: f64, ctx: &HardEdgeContext) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return domain(format!("limiting kernel needs x, y > 0, got ({x}, {y})"));
    }
    let gap = (x - y).abs();
    if gap < 1e-6 * x.max(y) {
        return Err(Error::Proximity { gap });
    }
    let nu = ctx.nu as f64;
    let [f, xf, x2f] = meijer_f_with_derivatives(x, ctx.nu)?;
    let [g, yg, y2g] = ctx.g_with_derivatives(y)?;
    Ok((f * (nu * yg - y2g) + xf * (-nu * g + yg) - x2f * g) / (x - y))
}

/// Above this N the finite kernel takes Q_n from the line integral, which
/// has no cancellation; the Bessel sum loses digits at the small
/// arguments the rescaling produces.
pub const CONTOUR_Q_FROM: usize = 24;

fn rescaled_p(x: f64, sys: &BiorthogonalSystem) -> Result<Vec<f64>> {
    let p = &sys.params;
    sys.eval_p_all(p.n_small - 1, x * p.mu / p.n_small as f64)
}

fn rescaled_q(y: f64, sys: &BiorthogonalSystem) -> Result<Vec<f64>> {
    let p = &sys.params;
    let (n, ys) = (p.n_small, y * p.mu / p.n_small as f64);
    if n > CONTOUR_Q_FROM {
        eval_q_contour_all(n - 1, ys, sys, &ContourSpec::default())
    } else {
        sys.eval_q_all(n - 1, ys)
    }
}

fn rescaled_pair(pv: &[f64], qv: &[f64], sys: &BiorthogonalSystem) -> Result<f64> {
    let s: CompensatedSum = pv.iter().zip(qv).map(|(a, b)| a * b).collect();
    let out = sys.params.mu / sys.params.n_small as f64 * s.value();
    if !out.is_finite() {
        return Err(Error::Numeric("rescaled kernel is not finite".into()));
    }
    Ok(out)
}

/// (μ/N) K_N(xμ/N, yμ/N), the finite kernel in hard-edge coordinates
/// (α² - δ² = 1/μ), from the direct sum.
pub fn rescaled_finite_kernel(x: f64, y: f64, sys: &BiorthogonalSystem) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return domain(format!("rescaled kernel needs x, y > 0, got ({x}, {y})"));
    }
    rescaled_pair(&rescaled_p(x, sys)?, &rescaled_q(y, sys)?, sys)
}

/// The 5×5 grid on which convergence is measured.
pub const LADDER_POINTS: [f64; 5] = [0.2, 0.9, 1.6, 2.3, 3.0];

#[derive(Debug, Clone, Serialize)]
pub struct LadderRung {
    pub mu: f64,
    pub nu: usize,
    #[serde(rename = "N")]
    pub n_small: usize,
    /// max over the grid of |rescaled - limit|.
    pub deviation: f64,
    pub worst_x: f64,
    pub worst_y: f64,
}

/// Limit values on the grid, row x, column y.
pub fn limiting_grid(ctx: &HardEdgeContext, points: &[f64]) -> Result<Vec<Vec<f64>>> {
    let m = points.len();
    let flat = map_indexed(m * m, Execution::default(), |k| limiting_kernel(points[k / m], points[k % m], ctx))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(flat.chunks(m).map(|r| r.to_vec()).collect())
}

pub fn rescaled_grid(mu: f64, n_small: usize, nu: usize, points: &[f64]) -> Result<Vec<Vec<f64>>> {
    if points.iter().any(|&v| !(v > 0.0)) {
        return domain("rescaled kernel grid needs positive points");
    }
    let sys = BiorthogonalSystem::new(make_parameters(mu, n_small, n_small + nu)?);
    let exec = Execution::default();
    let ps = map_indexed(points.len(), exec, |i| rescaled_p(points[i], &sys))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let qs = map_indexed(points.len(), exec, |i| rescaled_q(points[i], &sys))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    ps.iter()
        .map(|pv| qs.iter().map(|qv| rescaled_pair(pv, qv, &sys)).collect())
        .collect()
}

pub fn grid_deviation(mu: f64, n_small: usize, nu: usize, points: &[f64], limit: &[Vec<f64>]) -> Result<LadderRung> {
    let finite = rescaled_grid(mu, n_small, nu, points)?;
    let mut rung = LadderRung {
        mu,
        nu,
        n_small,
        deviation: 0.0,
        worst_x: points[0],
        worst_y: points[0],
    };
    for (i, row) in finite.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let d = (v - limit[i][j]).abs();
            if d > rung.deviation {
                rung.deviation = d;
                rung.worst_x = points[i];
                rung.worst_y = points[j];
            }
        }
    }
    Ok(rung)
}

/// Deviation from the limit along an N-ladder at fixed (μ, ν).
pub fn convergence_ladder(mu: f64, nu: usize, ns: &[usize], points: &[f64]) -> Result<Vec<LadderRung>> {
    let ctx = HardEdgeContext::new(nu)?;
    let limit = limiting_grid(&ctx, points)?;
    ns.iter().map(|&n| grid_deviation(mu, n, nu, points, &limit)).collect()
}

#[derive(Debug, Clone, Copy)]
struct ComplexDd {
    re: Dd,
    im: Dd,
}

impl ComplexDd {
    fn new(z: Complex64) -> Self {
        Self {
            re: Dd::from_f64(z.re),
            im: Dd::from_f64(z.im),
        }
    }

    fn real(x: Dd) -> Self {
        Self { re: x, im: Dd::default() }
    }

    fn add(self, o: Self) -> Self {
        Self {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }

    fn sub(self, o: Self) -> Self {
        Self {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }

    fn mul(self, o: Self) -> Self {
        Self {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }

    fn div(self, o: Self) -> Self {
        let d = o.re * o.re + o.im * o.im;
        Self {
            re: (self.re * o.re + self.im * o.im) / d,
            im: (self.im * o.re - self.re * o.im) / d,
        }
    }

    fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

/// The two rational functions in the large-N expansion of the rescaled
/// contour kernel:
///
///   A = N²(N+ν)/(s-N) - (t-N)(s+t+N+ν)
///   B = N(N+1)(N+ν)(N+ν+1)/((t-N-1)(s-N)) + N(N-1)(N+ν)(N+ν-1)/((s-N+1)(s-N))
///       + 2N(N+ν)(2N+ν)/(s-N) - (t-N)(t+s+2N+2ν)
///
/// The terms are O(N³) and cancel to O(1), so they are combined in
/// double-double.
pub fn scaling_limit_ab(s: Complex64, t: Complex64, n: u64, nu: usize) -> Result<(Complex64, Complex64)> {
    let nf = n as f64;
    for (z, p, what) in [(s, nf, "s = N"), (s, nf - 1.0, "s = N-1"), (t, nf + 1.0, "t = N+1")] {
        if (z - p).norm() < 1e-9 * nf.max(1.0) {
            return domain(format!("A, B have a pole at {what}; got s = {s}, t = {t}"));
        }
    }
    let c = |x: f64| ComplexDd::real(Dd::from_f64(x));
    let (sd, td) = (ComplexDd::new(s), ComplexDd::new(t));
    let big = c(nf);
    let nun = Dd::from_f64(nf) + nu as f64;
    let s_n = sd.sub(big);
    let t_n = td.sub(big);
    let n2 = Dd::from_f64(nf) * nf;
    let a = ComplexDd::real(n2 * nun)
        .div(s_n)
        .sub(t_n.mul(sd.add(td).add(ComplexDd::real(nun))));

    let prod = |a: f64, b: f64, c_: f64, d: f64| Dd::from_f64(a) * b * c_ * d;
    let nuf = nu as f64;
    let b1 = ComplexDd::real(prod(nf, nf + 1.0, nf + nuf, nf + nuf + 1.0)).div(td.sub(c(nf + 1.0)).mul(s_n));
    let b2 = ComplexDd::real(prod(nf, nf - 1.0, nf + nuf, nf + nuf - 1.0)).div(sd.sub(c(nf - 1.0)).mul(s_n));
    let b3 = ComplexDd::real(prod(2.0, nf, nf + nuf, 2.0 * nf + nuf)).div(s_n);
    let b4 = t_n.mul(td.add(sd).add(c(2.0 * nf + 2.0 * nuf)));
    let b = b1.add(b2).add(b3).sub(b4);
    Ok((a.to_c64(), b.to_c64()))
}

/// -s(s+ν) - t(t+ν) - st.
pub fn limit_a(s: Complex64, t: Complex64, nu: usize) -> Complex64 {
    let nu = nu as f64;
    -s * (s + nu) - t * (t + nu) - s * t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_at_origin() {
        assert_eq!(meijer_f(0.0, 0).unwrap(), 1.0);
        assert!((meijer_f(0.0, 3).unwrap() - 1.0 / 6.0).abs() < 1e-16);
    }

    #[test]
    fn a_limit_at_zero() {
        let (a, _) = scaling_limit_ab(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 1_000_000, 0).unwrap();
        assert!(a.norm() < 1e-5, "{a}");
        assert!(scaling_limit_ab(Complex64::new(10.0, 0.0), Complex64::new(1.0, 0.0), 10, 0).is_err());
    }
}
