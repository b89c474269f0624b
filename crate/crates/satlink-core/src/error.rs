//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors produced by the analysis library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of the operation
    /// (negative where nonnegative is required, non-finite, and so on).
    #[error("domain error: {0}")]
    Domain(String),

    /// The inputs are individually valid but the combination is outside
    /// what the closed-form machinery supports.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// The time/power allocation problem admits no feasible split of the
    /// frame: even at full power both hops together need more time than
    /// the deadline allows.
    #[error(
        "infeasible allocation: minimum hop times {min_time_sr_s} s (S-R) + \
         {min_time_rd_s} s (R-D) exceed the frame of {t_total_s} s"
    )]
    Infeasible {
        /// Shortest possible first-hop time at the S-side power cap (s).
        min_time_sr_s: f64,
        /// Shortest possible second-hop time at the R-side power cap (s).
        min_time_rd_s: f64,
        /// The frame length that could not accommodate both (s).
        t_total_s: f64,
    },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
