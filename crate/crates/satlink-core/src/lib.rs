//! Performance analysis of a cooperative satellite / aerial-relay / ground
//! downlink.
//!
//! The satellite S talks to a high-altitude relay R, which decodes and
//! forwards to ground receivers scattered as a Poisson point process. The
//! crate provides:
//!
//! * closed-form and quadrature evaluators for the coverage probability of
//!   the relay-to-ground hop (with and without co-channel interference),
//!   the outage probability of the satellite-to-relay hop, and the
//!   end-to-end outage of the decode-and-forward chain ([`analytic`]);
//! * the underlying fading models (Shadowed-Rician, Rician, Rayleigh) and
//!   position distributions, each with samplers ([`channels`], [`geometry`]);
//! * a reproducible Monte-Carlo engine that re-estimates every analytic
//!   quantity from raw draws, used as the validation oracle ([`montecarlo`]);
//! * a Lagrangian-dual solver for the energy-efficiency time/power
//!   allocation across the two hops ([`optimizer`]);
//! * the special functions the formulas need (Marcum Q, incomplete gamma,
//!   Chebyshev-Gauss and adaptive quadrature) ([`specfun`]).
//!
//! All internal math is in linear units and kilometers; decibel conversion
//! belongs at the configuration boundary.

pub mod analytic;
pub mod channels;
pub mod error;
pub mod geometry;
pub mod montecarlo;
pub mod optimizer;
pub mod specfun;

pub use analytic::{CoverageResult, Method, OutageResult, QuadratureOrders, RdScenario};
pub use channels::{InterferenceParams, RicianParams, ShadowedRicianParams};
pub use error::{Error, Result};
pub use geometry::{D0SquaredSupport, GeometryParams};
pub use montecarlo::{McConfig, McEstimate, McHistogram, McInputs, Scenario};
pub use optimizer::{Allocation, LinkBudget, OptimizeOptions};
