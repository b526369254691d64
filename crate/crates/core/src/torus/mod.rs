//! Trigonometric polynomials on `Q_d = (-π, π)^d` and the weighted torus inequalities.
//!
//! Forms with a non-negative power of `ω(x) = Σ_j sin²(x_j/2)` are exact in coefficient
//! space. Negative powers go through the heat-kernel integrator by default, or through a
//! shifted midpoint grid with extrapolation.

mod density;
mod fft;
mod grid;
mod heat;
mod poly;
mod verify;

pub use density::Density;
pub use grid::{grid_integrate, omega_at, GridEstimate, QuadratureSpec, DEFAULT_GRID_BUDGET};
pub use heat::{singular_integral, SingularIntegral};
pub use poly::{random_trig_poly, weighted_form, Deriv, TrigPoly};
pub use verify::{
    quadrature_form, random_square_params, verify_batch, verify_higher_order, verify_square_expansion,
    verify_weighted_hardy, verify_weighted_hardy_rellich, verify_weighted_rellich,
    weighted_integral, BatchReport, BatchSpec, Factor, HigherOrder, InequalityReport, Integral,
    Integrator, SquareExpansionReport, Theorem, VerifyConfig,
};
