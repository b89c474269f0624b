//! First-order Marcum Q function: exact series evaluation plus the
//! two-polynomial exponential fit used by the closed-form coverage result.

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Exact series
// ---------------------------------------------------------------------------

/// Q1(a, b), the first-order Marcum Q function, to absolute error 1e-10.
///
/// Uses the canonical Poisson-mixture series
///
/// ```text
/// Q1(a, b) = sum_{k>=0} P[N_a = k] * P[N_b <= k],
///   N_a ~ Poisson(a^2/2), N_b ~ Poisson(b^2/2)
/// ```
///
/// with all terms positive, truncated once the remaining Poisson(a^2/2)
/// mass (a rigorous bound on the tail of the sum) drops below 1e-14.
///
/// Arguments so large that e^(−a²/2) or e^(−b²/2) underflows are resolved
/// by tail separation when |a − b| >= 8 (the answer is 0 or 1 to well
/// below the accuracy target) and rejected otherwise.
pub fn marcum_q1(a: f64, b: f64) -> Result<f64> {
    if !a.is_finite() || !b.is_finite() || a < 0.0 || b < 0.0 {
        return Err(Error::Domain(format!(
            "marcum_q1: arguments must be finite and nonnegative, got a={a}, b={b}"
        )));
    }
    let x = 0.5 * a * a; // Poisson mean of the a-mixture
    let y = 0.5 * b * b; // Poisson mean of the b-tail
    if b == 0.0 {
        return Ok(1.0);
    }
    if a == 0.0 {
        return Ok((-y).exp());
    }
    if x > 700.0 || y > 700.0 {
        // The series start terms would underflow. For widely separated
        // arguments the value saturates far beyond our 1e-10 target:
        // |Q1 - {0,1}| < e^(-(b-a)^2/2) < 1e-13 once |a-b| >= 8.
        if b - a >= 8.0 {
            return Ok(0.0);
        }
        if a - b >= 8.0 {
            return Ok(1.0);
        }
        return Err(Error::Unsupported(format!(
            "marcum_q1: a={a}, b={b} needs the underflow-safe regime |a-b| >= 8"
        )));
    }

    let mut p = (-x).exp(); // Poisson(x) pmf at k
    let mut t = (-y).exp(); // Poisson(y) pmf at k
    let mut c = t; // Poisson(y) cdf up to k
    let mut q = p * c;
    let mut remaining = 1.0 - p; // Poisson(x) mass not yet consumed
    let mut k = 1.0;
    while k < 5000.0 {
        p *= x / k;
        t *= y / k;
        c += t;
        q += p * c;
        remaining -= p;
        // The unconsumed terms are each <= p_k * 1, so `remaining` bounds
        // the truncation error directly once past the Poisson mode.
        if remaining < 1e-14 && k > x {
            break;
        }
        k += 1.0;
    }
    Ok(q.clamp(0.0, 1.0))
}

// ---------------------------------------------------------------------------
// Exponential fit
// ---------------------------------------------------------------------------

/// Shape exponent of the exponential fit, a quartic in the noncentrality
/// argument a.
pub fn mu_shape(a: f64) -> f64 {
    2.174 + a * (-0.592 + a * (0.593 + a * (-0.092 + a * 0.005)))
}

/// Log-scale coefficient of the exponential fit, a quartic in a.
pub fn upsilon_scale(a: f64) -> f64 {
    -0.840 + a * (0.327 + a * (-0.740 + a * (0.083 + a * -0.004)))
}

/// Approximate Q1(a, b) ~= exp(−e^(υ(a)) b^(μ(a))).
///
/// The fit is designed for a between 1 and 5; inside a in [1, 4] it stays
/// within 0.03 of the exact value everywhere on b in [0, 10], degrading to
/// just under 0.09 by a = 5. Always in (0, 1].
pub fn marcum_q1_approx(a: f64, b: f64) -> Result<f64> {
    if !a.is_finite() || !b.is_finite() || a < 0.0 || b < 0.0 {
        return Err(Error::Domain(format!(
            "marcum_q1_approx: arguments must be finite and nonnegative, got a={a}, b={b}"
        )));
    }
    Ok((-(upsilon_scale(a).exp()) * b.powf(mu_shape(a))).exp())
}
