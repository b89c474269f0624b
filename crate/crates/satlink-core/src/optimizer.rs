//! Energy-efficiency time and power allocation for the two-hop chain.
//!
//! The transmitter must push `d_sd_bits` through both hops inside
//! `t_total_s` seconds under per-hop power caps. Because the energy of a
//! hop is strictly convex and decreasing in its transmission time, the
//! deadline constraint is always tight at the optimum, and the problem
//! reduces to a one-dimensional dual search on the deadline multiplier.
//!
//! For a hop with bandwidth B, payload D, and normalized gain gamma, the
//! interior stationarity condition of time T at multiplier lambda reads
//!
//! ```text
//! (1 - x ln 2) 2^x = 1 - gamma lambda,   x = D / (B T)
//! ```
//!
//! The left side is strictly decreasing from 1 onto (-inf, 1), so the
//! equation has exactly one positive root for every positive
//! `gamma * lambda`.

use crate::error::{Error, Result};
use serde::Serialize;
use std::f64::consts::LN_2;

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// Payloads, bandwidths, deadline, caps, and realized channel gains of
/// the two hops. Gains are normalized by noise and path loss, in 1/W, so
/// `p * gamma` is a received SNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkBudget {
    /// Payload that must cross both hops.
    pub d_sd_bits: f64,
    /// Satellite-hop bandwidth.
    pub b_s_hz: f64,
    /// Relay-hop bandwidth.
    pub b_r_hz: f64,
    /// Deadline shared by the two hops.
    pub t_total_s: f64,
    /// Satellite power cap.
    pub p_s_max_w: f64,
    /// Relay power cap.
    pub p_r_max_w: f64,
    /// Normalized satellite-relay gain (1/W).
    pub gamma_sr: f64,
    /// Normalized relay-ground gain (1/W).
    pub gamma_rd: f64,
}

impl LinkBudget {
    /// Validated constructor; every field must be strictly positive and
    /// finite.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        d_sd_bits: f64,
        b_s_hz: f64,
        b_r_hz: f64,
        t_total_s: f64,
        p_s_max_w: f64,
        p_r_max_w: f64,
        gamma_sr: f64,
        gamma_rd: f64,
    ) -> Result<Self> {
        let budget = LinkBudget {
            d_sd_bits,
            b_s_hz,
            b_r_hz,
            t_total_s,
            p_s_max_w,
            p_r_max_w,
            gamma_sr,
            gamma_rd,
        };
        budget.validate()?;
        Ok(budget)
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("payload", self.d_sd_bits),
            ("satellite bandwidth", self.b_s_hz),
            ("relay bandwidth", self.b_r_hz),
            ("deadline", self.t_total_s),
            ("satellite power cap", self.p_s_max_w),
            ("relay power cap", self.p_r_max_w),
            ("satellite gain", self.gamma_sr),
            ("relay gain", self.gamma_rd),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!(
                    "link budget: {name} must be strictly positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Stop rules of the dual iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizeOptions {
    /// Hard cap on dual updates.
    pub max_iterations: usize,
    /// Relative multiplier movement below which the iteration counts as
    /// converged.
    pub lambda_tolerance: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            max_iterations: 10_000,
            lambda_tolerance: 1e-9,
        }
    }
}

impl OptimizeOptions {
    fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::Domain("need at least one dual iteration".into()));
        }
        if !(self.lambda_tolerance > 0.0) || !self.lambda_tolerance.is_finite() {
            return Err(Error::Domain(format!(
                "multiplier tolerance must be positive, got {}",
                self.lambda_tolerance
            )));
        }
        Ok(())
    }
}

/// An optimized schedule with its audit trail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Allocation {
    /// Satellite-hop transmission time.
    pub t_s_s: f64,
    /// Relay-hop transmission time.
    pub t_r_s: f64,
    /// Satellite transmit power.
    pub p_s_w: f64,
    /// Relay transmit power.
    pub p_r_w: f64,
    /// Achieved energy efficiency, payload over total energy.
    pub eta_bits_per_joule: f64,
    /// Dual-multiplier sequence, starting at 0.
    pub lambda_trace: Vec<f64>,
    /// Updates until the movement tolerance was met (or the cap).
    pub iterations: usize,
    /// Whether the movement tolerance was met within the cap.
    pub converged: bool,
}

// ---------------------------------------------------------------------------
// Hop primitives
// ---------------------------------------------------------------------------

/// SNR needed to sustain `rate_bps` over `bandwidth_hz`: 2^(r/B) - 1,
/// via exp_m1 so low spectral efficiencies keep full relative precision.
pub fn rate_gap(rate_bps: f64, bandwidth_hz: f64) -> f64 {
    (rate_bps / bandwidth_hz * LN_2).exp_m1()
}

/// Shortest time in which a hop can move `d_bits` at its power cap.
pub fn min_time(d_bits: f64, b_hz: f64, p_max_w: f64, gamma: f64) -> Result<f64> {
    if !(d_bits > 0.0) || !(b_hz > 0.0) || !d_bits.is_finite() || !b_hz.is_finite() {
        return Err(Error::Domain(format!(
            "min_time: payload and bandwidth must be positive, got {d_bits} bits over {b_hz} Hz"
        )));
    }
    let snr = p_max_w * gamma;
    if !(snr > 0.0) || !snr.is_finite() {
        return Err(Error::Domain(format!(
            "min_time: peak SNR must be positive and finite, got {snr}"
        )));
    }
    Ok(d_bits / (b_hz * snr.ln_1p() / LN_2))
}

/// The hop time characteristic (1 - x ln 2) 2^x; strictly decreasing on
/// x >= 0 from h(0) = 1.
fn time_characteristic(x: f64) -> f64 {
    (1.0 - x * LN_2) * x.exp2()
}

/// Solve (1 - x ln 2) 2^x = 1 - gamma_lambda for the unique positive
/// root. The product `gamma_lambda` must be strictly positive: at zero
/// the stationary time is unbounded (the characteristic only reaches 1
/// in the limit x -> 0).
pub fn solve_time_equation(gamma_lambda: f64) -> Result<f64> {
    if !(gamma_lambda > 0.0) {
        return Err(Error::Domain(format!(
            "solve_time_equation: gamma * lambda must be strictly positive \
             (the interior problem is unbounded at zero), got {gamma_lambda}"
        )));
    }
    if !gamma_lambda.is_finite() {
        return Err(Error::Domain(
            "solve_time_equation: gamma * lambda must be finite".into(),
        ));
    }
    let target = 1.0 - gamma_lambda;
    // Bracket the root: the characteristic is 1 at 0 and falls below any
    // target eventually.
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while time_characteristic(hi) > target {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if time_characteristic(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Hop time satisfying the dual stationarity condition at `lambda`,
/// floored at the power-cap minimum time.
pub fn kkt_time(d_bits: f64, b_hz: f64, p_max_w: f64, gamma: f64, lambda: f64) -> Result<f64> {
    let floor = min_time(d_bits, b_hz, p_max_w, gamma)?;
    let x = solve_time_equation(gamma * lambda)?;
    Ok((d_bits / (b_hz * x)).max(floor))
}

// ---------------------------------------------------------------------------
// The allocation solver
// ---------------------------------------------------------------------------

/// Maximize energy efficiency over (T_S, T_R, P_S, P_R).
///
/// The dual multiplier on the deadline starts at zero and then moves
/// against the residual deadline violation, with the step adapted by
/// halving the bracketing interval in log space; each candidate pins both
/// hop times through their stationarity conditions. A final primal pass
/// makes the deadline exactly tight and recovers the powers.
pub fn optimize(budget: &LinkBudget, options: &OptimizeOptions) -> Result<Allocation> {
    budget.validate()?;
    options.validate()?;
    let t_min_s = min_time(budget.d_sd_bits, budget.b_s_hz, budget.p_s_max_w, budget.gamma_sr)?;
    let t_min_r = min_time(budget.d_sd_bits, budget.b_r_hz, budget.p_r_max_w, budget.gamma_rd)?;
    if t_min_s + t_min_r > budget.t_total_s {
        return Err(Error::Infeasible {
            min_time_sr_s: t_min_s,
            min_time_rd_s: t_min_r,
            t_total_s: budget.t_total_s,
        });
    }

    // Residual deadline violation at a candidate multiplier; positive
    // means the stationary times still overrun the deadline and the
    // multiplier must grow.
    let violation = |lambda: f64| -> Result<f64> {
        let ts = kkt_time(
            budget.d_sd_bits,
            budget.b_s_hz,
            budget.p_s_max_w,
            budget.gamma_sr,
            lambda,
        )?;
        let tr = kkt_time(
            budget.d_sd_bits,
            budget.b_r_hz,
            budget.p_r_max_w,
            budget.gamma_rd,
            lambda,
        )?;
        Ok(ts + tr - budget.t_total_s)
    };

    // Bracket the tight-deadline multiplier. Above lambda_hi both hops sit
    // at their power-cap floors; below lambda_lo the slower hop alone
    // already wants more than the whole deadline.
    let hop_bounds = |b_hz: f64, p_max_w: f64, gamma: f64| -> (f64, f64) {
        let x_cap = (p_max_w * gamma).ln_1p() / LN_2;
        let x_cap = x_cap.min(1000.0);
        let x_deadline = budget.d_sd_bits / (b_hz * budget.t_total_s);
        (
            (1.0 - time_characteristic(x_deadline)) / gamma,
            (1.0 - time_characteristic(x_cap)) / gamma,
        )
    };
    let (s_deadline, s_cap) = hop_bounds(budget.b_s_hz, budget.p_s_max_w, budget.gamma_sr);
    let (r_deadline, r_cap) = hop_bounds(budget.b_r_hz, budget.p_r_max_w, budget.gamma_rd);
    let mut lam_lo = 0.5 * s_deadline.min(r_deadline);
    let mut lam_hi = 2.0 * s_cap.max(r_cap);

    let mut trace = vec![0.0f64];
    let mut lambda = lam_lo;
    let mut converged = false;
    let mut iterations = 0usize;
    for step in 0..options.max_iterations {
        let candidate = (0.5 * (lam_lo.ln() + lam_hi.ln())).exp();
        if !(candidate > lam_lo && candidate < lam_hi) {
            // The bracket has collapsed onto adjacent floats; the midpoint
            // rounds to an endpoint and no representable progress remains.
            break;
        }
        if violation(candidate)? > 0.0 {
            lam_lo = candidate;
        } else {
            lam_hi = candidate;
        }
        trace.push(candidate);
        let moved = (candidate - lambda).abs();
        lambda = candidate;
        if !converged && moved < options.lambda_tolerance * lambda.abs().max(1.0) {
            converged = true;
            iterations = step + 1;
        }
        // Keep halving to the floating-point floor even after the stated
        // tolerance is met; the extra steps are nearly free and tighten
        // the stationarity residual.
        if lam_hi - lam_lo <= f64::EPSILON * lam_hi {
            break;
        }
    }
    if !converged {
        iterations = options.max_iterations;
    }

    // Primal pass: respect the satellite hop's stationary time, hand the
    // remainder of the deadline to the relay hop, and fall back to the
    // relay floor if that remainder undershoots it.
    let mut t_s = kkt_time(
        budget.d_sd_bits,
        budget.b_s_hz,
        budget.p_s_max_w,
        budget.gamma_sr,
        lambda,
    )?;
    let mut t_r = budget.t_total_s - t_s;
    if t_r < t_min_r {
        t_r = t_min_r;
        t_s = budget.t_total_s - t_min_r;
    }

    let p_s = (rate_gap(budget.d_sd_bits / t_s, budget.b_s_hz) / budget.gamma_sr)
        .min(budget.p_s_max_w);
    let p_r = (rate_gap(budget.d_sd_bits / t_r, budget.b_r_hz) / budget.gamma_rd)
        .min(budget.p_r_max_w);
    let energy = p_s * t_s + p_r * t_r;
    Ok(Allocation {
        t_s_s: t_s,
        t_r_s: t_r,
        p_s_w: p_s,
        p_r_w: p_r,
        eta_bits_per_joule: budget.d_sd_bits / energy,
        lambda_trace: trace,
        iterations,
        converged,
    })
}

/// Worst scaled stationarity residual of an allocation: for every hop not
/// sitting on its power-cap floor,
///
/// ```text
/// | (1 - x ln 2) - (1 - gamma lambda) 2^(-x) |,   x = D / (B T)
/// ```
///
/// using the final multiplier of the trace. Floored hops satisfy the KKT
/// conditions through their inequality and contribute zero.
pub fn stationarity_residual(budget: &LinkBudget, alloc: &Allocation) -> f64 {
    let lambda = *alloc.lambda_trace.last().unwrap_or(&0.0);
    let mut worst = 0.0f64;
    for (b_hz, p_max, gamma, t) in [
        (budget.b_s_hz, budget.p_s_max_w, budget.gamma_sr, alloc.t_s_s),
        (budget.b_r_hz, budget.p_r_max_w, budget.gamma_rd, alloc.t_r_s),
    ] {
        let floor = match min_time(budget.d_sd_bits, b_hz, p_max, gamma) {
            Ok(f) => f,
            Err(_) => return f64::INFINITY,
        };
        if t <= floor * (1.0 + 1e-9) {
            continue;
        }
        let x = budget.d_sd_bits / (b_hz * t);
        let residual = ((1.0 - x * LN_2) - (1.0 - gamma * lambda) * (-x).exp2()).abs();
        worst = worst.max(residual);
    }
    worst
}
