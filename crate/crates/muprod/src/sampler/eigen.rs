use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{domain, Error, Result};

/// Hermitian matrices up to this size go through Jacobi, larger ones
/// through Householder + QL.
pub const JACOBI_MAX_DIM: usize = 32;
const JACOBI_SWEEPS: usize = 100;
const QL_ITERATIONS: usize = 60;

fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    if !h.is_square() {
        return domain(format!("expected a square matrix, got {}x{}", h.rows, h.cols));
    }
    if !h.all_finite() {
        return Err(Error::Numeric("matrix has non-finite entries".into()));
    }
    Ok(())
}

/// Cyclic Jacobi for a Hermitian matrix. Returns the eigenvalues ascending
/// and the matching unit eigenvectors as columns.
///
/// Each rotation first turns a_pq real with a phase on column q, then
/// applies the real symmetric rotation.
pub fn jacobi_eigen(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    check_hermitian(h)?;
    let n = h.rows;
    let mut a = h.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Ok((vec![0.0; n], v));
    }
    let mut converged = false;
    for _ in 0..JACOBI_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-15 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // U = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on (p, q)
                let u_qp = -s * phase.conj();
                let u_qq = c * phase.conj();
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * c + akq * u_qp;
                    a[(k, q)] = akp * s + akq * u_qq;
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * c + vkq * u_qp;
                    v[(k, q)] = vkp * s + vkq * u_qq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = apk * c + aqk * u_qp.conj();
                    a[(q, k)] = apk * s + aqk * u_qq.conj();
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
            }
        }
    }
    if !converged {
        return Err(Error::Numeric("Jacobi sweeps did not converge".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}

/// Householder reduction of a Hermitian matrix to a real symmetric
/// tridiagonal (diagonal, off-diagonal moduli).
pub fn tridiagonalize(h: &ComplexMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    check_hermitian(h)?;
    let n = h.rows;
    let mut a = h.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n.saturating_sub(1)];
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    let mut p = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n.saturating_sub(1) {
        d[k] = a[(k, k)].re;
        let m = n - k - 1;
        let sigma = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        e[k] = sigma;
        if sigma == 0.0 || m == 1 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * sigma;
        for i in 0..m {
            v[i] = a[(k + 1 + i, k)];
        }
        v[0] -= alpha;
        let vn = v[..m].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v[..m] {
            *z /= vn;
        }
        // B <- B - 2 v q† - 2 q v†,  p = B v,  q = p - (v†p) v
        let off = k + 1;
        for i in 0..m {
            let row = &a.entries[(off + i) * n + off..(off + i) * n + n];
            p[i] = row.iter().zip(&v[..m]).map(|(x, y)| x * y).sum();
        }
        let kk: f64 = (0..m).map(|i| (v[i].conj() * p[i]).re).sum();
        for i in 0..m {
            p[i] -= v[i] * kk;
        }
        for i in 0..m {
            let (vi, pi) = (v[i] * 2.0, p[i] * 2.0);
            let row = &mut a.entries[(off + i) * n + off..(off + i) * n + n];
            for ((x, vj), pj) in row.iter_mut().zip(&v[..m]).zip(&p[..m]) {
                *x -= vi * pj.conj() + pi * vj.conj();
            }
        }
    }
    if n > 0 {
        d[n - 1] = a[(n - 1, n - 1)].re;
    }
    Ok((d, e))
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL.
pub fn tridiagonal_eigenvalues(mut d: Vec<f64>, off: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    let mut e = off.to_vec();
    e.resize(n, 0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_ITERATIONS {
                return Err(Error::Numeric("tridiagonal QL did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    if h.rows <= JACOBI_MAX_DIM {
        return Ok(jacobi_eigen(h)?.0);
    }
    let (d, e) = tridiagonalize(h)?;
    tridiagonal_eigenvalues(d, &e)
}

/// Eigenvalues of Y Y†, ascending and clamped at 0.
pub fn squared_singular_values(y: &ComplexMatrix) -> Result<Vec<f64>> {
    if !y.is_square() {
        return domain(format!("expected a square matrix, got {}x{}", y.rows, y.cols));
    }
    let mut v = hermitian_eigenvalues(&y.gram())?;
    for x in &mut v {
        *x = x.max(0.0);
    }
    Ok(v)
}
