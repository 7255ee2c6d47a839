//! Monte Carlo sampling of the coupled pair (X₁, X₂) and the squared
//! singular values of Y = X₁X₂.

mod batch;
mod eigen;
mod matrix;

pub use batch::{
    empirical_density, linear_statistic, sample_batch, sample_coupled_pair, trial_stream, GaussianStream,
    Histogram, SampleBatch,
};
pub use eigen::{
    hermitian_eigenvalues, jacobi_eigen, squared_singular_values, tridiagonal_eigenvalues, tridiagonalize,
    JACOBI_MAX_DIM,
};
pub use matrix::ComplexMatrix;
