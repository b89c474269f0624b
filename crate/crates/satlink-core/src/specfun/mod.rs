//! Special functions and quadrature rules consumed by the analytic formulas.
//!
//! Everything here is pure and stateless: safe to call from any number of
//! threads. Accuracy targets are absolute 1e-10 for the Marcum Q series and
//! relative 1e-10 for the gamma/Bessel evaluators, which leaves the formula
//! layer dominated by quadrature truncation rather than kernel error.

mod bessel;
mod gamma;
mod hyper;
mod marcum;
mod quad;

pub use bessel::{bessel_i0, ln_bessel_i0};
pub use gamma::{ln_gamma, regularized_gamma_p, regularized_gamma_q, upper_inc_gamma};
pub use hyper::kummer_1f1_integer;
pub use marcum::{marcum_q1, marcum_q1_approx, mu_shape, upsilon_scale};
pub use quad::{chebyshev_rule, integrate, ChebyshevRule};
