//! Extended-precision arithmetic, special functions and quadrature.

mod bessel;
mod complex;
mod context;
mod gamma;
mod quadrature;

pub use bessel::{bessel_i, bessel_i_f64};
pub use complex::MpComplex;
pub use context::{precision_for_radius, PrecisionContext};
pub use gamma::{log_gamma, stirling_threshold};
pub use quadrature::{
    circle_quadrature, circle_quadrature_adaptive, circle_quadrature_until, default_rule_size, gauss_legendre,
    segment_quadrature, segment_quadrature_with_tol, try_circle_quadrature, CircleEstimate, GaussLegendre,
    MAX_CIRCLE_NODES, MIN_CIRCLE_NODES, START_CIRCLE_NODES,
};
