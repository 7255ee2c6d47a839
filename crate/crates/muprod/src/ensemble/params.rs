use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// μ, the matrix shape and the derived weight parameters.
///
/// α = (1+μ)/(2μ) and δ = (1-μ)/(2μ), so α - δ = 1 and α² - δ² = 1/μ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingParameters {
    pub mu: f64,
    pub n_small: usize,
    pub m_large: usize,
    pub nu: usize,
    pub alpha: f64,
    pub delta: f64,
}

pub fn make_parameters(mu: f64, n_small: usize, m_large: usize) -> Result<CouplingParameters> {
    CouplingParameters::new(mu, n_small, m_large)
}

impl CouplingParameters {
    pub fn new(mu: f64, n_small: usize, m_large: usize) -> Result<Self> {
        if !(mu > 0.0 && mu < 1.0) {
            return domain(format!("μ must lie in (0, 1), got {mu}"));
        }
        if n_small == 0 {
            return domain("N must be at least 1");
        }
        if m_large < n_small {
            return domain(format!("M = {m_large} is smaller than N = {n_small}"));
        }
        Ok(Self {
            mu,
            n_small,
            m_large,
            nu: m_large - n_small,
            alpha: (1.0 + mu) / (2.0 * mu),
            delta: (1.0 - mu) / (2.0 * mu),
        })
    }

    /// α² - δ², taken as 1/μ rather than by subtraction.
    pub fn gap(&self) -> f64 {
        1.0 / self.mu
    }

    /// δ²/α² = ((1-μ)/(1+μ))².
    pub fn ratio_sq(&self) -> f64 {
        let r = (1.0 - self.mu) / (1.0 + self.mu);
        r * r
    }

    /// Same μ and ν with a different N.
    pub fn with_n(&self, n_small: usize) -> Result<Self> {
        Self::new(self.mu, n_small, n_small + self.nu)
    }
}
