//! Confluent hypergeometric function 1F1(m; 1; x) for positive integer m.

use crate::error::{Error, Result};

/// 1F1(m; 1; x) for integer m >= 1.
///
/// For integer first parameter the series collapses to a finite Laguerre
/// form, 1F1(m; 1; x) = e^x * sum_{k=0}^{m-1} C(m-1, k) x^k / k!, which is
/// exact and free of the cancellation the alternating series suffers for
/// negative x. The fading model that consumes this only ever has small
/// integer m; anything else is rejected rather than approximated.
pub fn kummer_1f1_integer(m: u32, x: f64) -> Result<f64> {
    if m < 1 {
        return Err(Error::Domain(format!(
            "kummer_1f1_integer: first parameter must be a positive integer, got {m}"
        )));
    }
    if !x.is_finite() {
        return Err(Error::Domain(format!(
            "kummer_1f1_integer: argument must be finite, got {x}"
        )));
    }
    let mut sum = 1.0;
    let mut term = 1.0;
    // term_k = C(m-1, k) x^k / k!, built by the ratio
    // term_{k+1}/term_k = (m-1-k) x / (k+1)^2.
    for k in 0..(m - 1) as u64 {
        term *= (m as f64 - 1.0 - k as f64) * x / ((k + 1) as f64 * (k + 1) as f64);
        sum += term;
    }
    Ok(x.exp() * sum)
}
