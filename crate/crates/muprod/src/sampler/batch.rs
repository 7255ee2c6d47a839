use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{squared_singular_values, ComplexMatrix};
use crate::ensemble::CouplingParameters;
use crate::error::{domain, Error, Result};
use crate::par::{map_indexed, Execution};

/// Standard complex Gaussians, E|z|² = 1 (real and imaginary parts each
/// N(0, 1/2)), by Box–Muller on a ChaCha8 stream.
pub struct GaussianStream {
    rng: ChaCha8Rng,
}

/// Stream `trial` of `seed`. Streams are independent of each other and
/// of the order in which they are consumed.
pub fn trial_stream(seed: u64, trial: u64) -> GaussianStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    GaussianStream { rng }
}

impl GaussianStream {
    fn uniform_open(&mut self) -> f64 {
        // (0, 1]
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_complex(&mut self) -> Complex64 {
        let r = (-self.uniform_open().ln()).sqrt();
        let t = 2.0 * PI * self.uniform_open();
        Complex64::new(r * t.cos(), r * t.sin())
    }
}

/// X₁ = (A - i√μ B)/√2 (N×M) and X₂ = (A* - i√μ B*)/√2 (M×N), with A, B
/// independent standard complex Gaussian N×M matrices; * is the conjugate
/// transpose. `rescaled` divides A and B by √N.
pub fn sample_coupled_pair(
    params: &CouplingParameters,
    stream: &mut GaussianStream,
    rescaled: bool,
) -> (ComplexMatrix, ComplexMatrix) {
    let (n, m) = (params.n_small, params.m_large);
    let mut scale = std::f64::consts::FRAC_1_SQRT_2;
    if rescaled {
        scale /= (n as f64).sqrt();
    }
    let a = ComplexMatrix::from_fn(n, m, |_, _| stream.next_complex());
    let b = ComplexMatrix::from_fn(n, m, |_, _| stream.next_complex());
    let i_sqrt_mu = Complex64::new(0.0, params.mu.sqrt());
    let x1 = ComplexMatrix::from_fn(n, m, |i, j| (a[(i, j)] - i_sqrt_mu * b[(i, j)]) * scale);
    let x2 = ComplexMatrix::from_fn(m, n, |i, j| (a[(j, i)].conj() - i_sqrt_mu * b[(j, i)].conj()) * scale);
    (x1, x2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub params: CouplingParameters,
    pub seed: u64,
    pub rescaled: bool,
    /// Sorted squared singular values, one vector per successful trial.
    pub spectra: Vec<Vec<f64>>,
    /// Trials dropped after a numeric failure.
    pub failed: usize,
}

/// `count` trials; trial t draws from `trial_stream(seed, t)`, so the
/// batch does not depend on the execution mode.
pub fn sample_batch(
    params: &CouplingParameters,
    count: usize,
    seed: u64,
    rescaled: bool,
    exec: Execution,
) -> Result<SampleBatch> {
    if count == 0 {
        return domain("a batch needs at least one trial");
    }
    let results = map_indexed(count, exec, |t| {
        let mut s = trial_stream(seed, t as u64);
        let (x1, x2) = sample_coupled_pair(params, &mut s, rescaled);
        squared_singular_values(&x1.matmul(&x2)?)
    });
    let mut spectra = Vec::with_capacity(count);
    let mut failed = 0;
    for r in results {
        match r {
            Ok(v) => spectra.push(v),
            Err(Error::Numeric(_)) => failed += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(SampleBatch {
        params: *params,
        seed,
        rescaled,
        spectra,
        failed,
    })
}

impl SampleBatch {
    pub fn trials(&self) -> usize {
        self.spectra.len()
    }

    /// '#' header lines, then `trial,y1,...,yN`.
    pub fn to_csv(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        let _ = writeln!(out, "# muprod sample batch v1");
        let _ = writeln!(
            out,
            "# mu={},N={},M={},seed={},rescaled={},failed={}",
            p.mu, p.n_small, p.m_large, self.seed, self.rescaled, self.failed
        );
        out.push_str("trial");
        for i in 1..=p.n_small {
            let _ = write!(out, ",y{i}");
        }
        out.push('\n');
        for (t, s) in self.spectra.iter().enumerate() {
            let _ = write!(out, "{t}");
            for y in s {
                let _ = write!(out, ",{y:e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("batch serializes")
    }
}

/// One-point density estimate: mean count per trial in each bin divided
/// by the bin width, so the bars integrate to N over the whole axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub density: Vec<f64>,
    /// Standard errors from the per-trial spread of the bin counts.
    pub std_error: Vec<f64>,
    pub trials: usize,
    /// Points that fell outside the range, per trial.
    pub outside: f64,
}

impl Histogram {
    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Σ density · width + outside, which is N.
    pub fn total_mass(&self) -> f64 {
        let inside: f64 = self
            .edges
            .windows(2)
            .zip(&self.density)
            .map(|(w, d)| d * (w[1] - w[0]))
            .sum();
        inside + self.outside
    }
}

pub fn empirical_density(batch: &SampleBatch, bins: usize, range: (f64, f64)) -> Result<Histogram> {
    if batch.spectra.is_empty() {
        return domain("empty batch");
    }
    if bins < 10 {
        return domain(format!("need at least 10 bins, got {bins}"));
    }
    let (lo, hi) = range;
    if !(hi > lo) {
        return domain(format!("empty range [{lo}, {hi}]"));
    }
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| lo + width * i as f64).collect();
    let mut sum = vec![0.0; bins];
    let mut sum_sq = vec![0.0; bins];
    let mut outside = 0usize;
    let mut counts = vec![0usize; bins];
    for s in &batch.spectra {
        counts.iter_mut().for_each(|c| *c = 0);
        for &y in s {
            if y < lo || y >= hi {
                outside += 1;
                continue;
            }
            let b = (((y - lo) / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
        for (i, &c) in counts.iter().enumerate() {
            sum[i] += c as f64;
            sum_sq[i] += (c * c) as f64;
        }
    }
    let t = batch.spectra.len() as f64;
    let mut density = Vec::with_capacity(bins);
    let mut std_error = Vec::with_capacity(bins);
    for i in 0..bins {
        let mean = sum[i] / t;
        let var = if t > 1.0 { (sum_sq[i] - t * mean * mean) / (t - 1.0) } else { 0.0 };
        density.push(mean / width);
        std_error.push((var.max(0.0) / t).sqrt() / width);
    }
    Ok(Histogram {
        edges,
        density,
        std_error,
        trials: batch.spectra.len(),
        outside: outside as f64 / t,
    })
}

/// Σ_i f(y_i) per trial, with f given by its coefficients in ascending
/// powers.
pub fn linear_statistic(batch: &SampleBatch, poly: &[f64]) -> Result<Vec<f64>> {
    if batch.spectra.is_empty() {
        return domain("empty batch");
    }
    let f = |y: f64| poly.iter().rev().fold(0.0, |acc, c| acc * y + c);
    Ok(batch.spectra.iter().map(|s| s.iter().map(|&y| f(y)).sum()).collect())
}
