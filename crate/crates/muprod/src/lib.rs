//! Singular values of the product of two μ-coupled complex Gaussian
//! matrices: finite-N kernels, the hard-edge limit, Monte Carlo sampling
//! and the central limit theorem for linear statistics.

pub mod clt;
pub mod ensemble;
pub mod error;
pub mod exact;
pub mod hardedge;
pub mod identities;
pub mod par;
pub mod quadrature;
pub mod sampler;
pub mod specfun;

pub use error::{Error, Result};
