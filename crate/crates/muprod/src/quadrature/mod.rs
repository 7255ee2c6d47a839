//! Gauss–Legendre, adaptive Gauss–Kronrod and vertical-line Mellin–Barnes
//! quadrature, plus the contour representations built on them.

mod adaptive;
mod contour;
mod gauss;
mod mellin;

pub use adaptive::{integrate_finite, integrate_semi_infinite, QuadratureResult, SUBDIVISION_CAP};
pub use contour::{
    double_contour_terms, eval_p_contour, eval_q_contour, eval_q_contour_all, kernel_double_contour,
    DoubleContourTerms,
};
pub use gauss::{gauss_legendre, gauss_legendre_nodes, gauss_legendre_nodes_dd};
pub use mellin::{mellin_barnes_line, ContourSpec};
