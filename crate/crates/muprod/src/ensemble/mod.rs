//! Finite-N ensemble: parameters, biorthogonal functions, recurrences,
//! the correlation kernel and the joint density.

mod biorthogonality;
mod jpdf;
mod kernel;
mod laguerre;
mod limits;
mod moments;
mod params;
mod recurrence;
mod system;

pub use biorthogonality::{biorthogonality_matrix, BiorthogonalityMatrix};
pub use jpdf::{jpdf, ln_partition_function, lu_determinant, lu_log_determinant};
pub use kernel::{
    kernel, kernel_christoffel_darboux, kernel_direct, kernel_double_sum, double_sum_matrix,
    KernelMethod, KernelValue, CD_PROXIMITY,
};
pub use laguerre::laguerre_type_kernel;
pub use limits::{laguerre_ensemble_density, mu_one_limit_density, mu_zero_limit_density};
pub use moments::{hankel_inverse_entry, moment_matrix_entry};
pub use params::{make_parameters, CouplingParameters};
pub use recurrence::{
    is_zero_row, recurrence_a, recurrence_a_generic, recurrence_a_uvw, recurrence_b, recurrence_b_generic, FiveTerm,
    RecurrenceCoefficients,
};
pub use system::{
    p_coefficient, q_coefficient, raw_phi, raw_psi, BiorthogonalSystem, ScaledValues, DEFAULT_MAX_N,
    RETENTION_FALLBACK,
};
