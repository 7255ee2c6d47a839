//! Special functions: Gamma, integer-order modified Bessel, ₀F₁ and
//! terminating ₂F₁, plus compensated accumulation.

mod bessel;
mod dd;
mod gamma;
mod hyper;
mod sum;

pub use bessel::{
    bessel_i, bessel_i_reduced, bessel_i_reduced_scaled, bessel_i_scaled, bessel_k,
    bessel_k_power_seq, bessel_k_power_seq_scaled, bessel_k_scaled, bessel_k_scaled_seq,
    bessel_k_signed,
};
pub use dd::{bessel_i_reduced_scaled_seq_dd, bessel_k_power_seq_scaled_dd, DD_EULER, DD_LN2, DD_PI};
pub use gamma::{
    factorial, gamma_complex, gamma_real, ln_factorial, ln_gamma_complex, ln_gamma_signed,
    log_gamma, pochhammer, GammaArg,
};
pub use hyper::{hyp0f1, hyp2f1_terminating, hyp2f1_terminating_complex};
pub use sum::{compensated_sum, CompensatedSum, DoubleDouble};
