//! Fading models of the three link types and their samplers.
//!
//! * Satellite-to-relay: Shadowed-Rician, where the line-of-sight power is
//!   gamma-shadowed with integer severity m.
//! * Relay-to-ground: Rician with Rice factor K.
//! * Interferer-to-ground: Rayleigh, i.e. exponential power.
//!
//! Distributions are expressed for the transmit-SNR-scaled gains used by
//! the downstream formulas, so the S-R functions carry a `lambda_bar`
//! (transmit power over noise) scale inside.

use crate::error::{Error, Result};
use crate::specfun::marcum_q1;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::Serialize;

// ---------------------------------------------------------------------------
// Shadowed-Rician parameters
// ---------------------------------------------------------------------------

/// Shadowed-Rician fading constants for the satellite-relay hop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShadowedRicianParams {
    /// Half average power of the multipath (scatter) component.
    pub b: f64,
    /// Shadowing severity; the closed forms require a positive integer.
    pub m: u32,
    /// Average power of the line-of-sight component.
    pub omega: f64,
    /// Transmit SNR scale applied to the gain (P_S over noise power).
    pub lambda_bar: f64,
}

impl ShadowedRicianParams {
    /// Validate and build.
    pub fn new(b: f64, m: u32, omega: f64, lambda_bar: f64) -> Result<Self> {
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::Domain(format!(
                "shadowed-rician: scatter power b must be positive, got {b}"
            )));
        }
        if m < 1 {
            return Err(Error::Domain(
                "shadowed-rician: severity m must be a positive integer".into(),
            ));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::Domain(format!(
                "shadowed-rician: LOS power Omega must be positive, got {omega}"
            )));
        }
        if !(lambda_bar > 0.0) || !lambda_bar.is_finite() {
            return Err(Error::Domain(format!(
                "shadowed-rician: SNR scale must be positive, got {lambda_bar}"
            )));
        }
        Ok(ShadowedRicianParams {
            b,
            m,
            omega,
            lambda_bar,
        })
    }

    /// Leading constant alpha = ((2bm / (2bm + Omega))^m) / (2b).
    pub fn alpha(&self) -> f64 {
        let t = 2.0 * self.b * self.m as f64;
        (t / (t + self.omega)).powi(self.m as i32) / (2.0 * self.b)
    }

    /// Exponential rate beta = 1 / (2b).
    pub fn beta(&self) -> f64 {
        1.0 / (2.0 * self.b)
    }

    /// Series scale delta = Omega / (2b (2bm + Omega)).
    pub fn delta(&self) -> f64 {
        self.omega / (2.0 * self.b * (2.0 * self.b * self.m as f64 + self.omega))
    }

    /// beta - delta evaluated in its cancellation-free form m / (2bm + Omega).
    pub fn beta_minus_delta(&self) -> f64 {
        self.m as f64 / (2.0 * self.b * self.m as f64 + self.omega)
    }

    /// Series coefficients varsigma(k) = C(m-1, k) delta^k / k! for
    /// k = 0 .. m-1.
    fn varsigma(&self) -> Vec<f64> {
        let delta = self.delta();
        let m = self.m as f64;
        let mut out = Vec::with_capacity(self.m as usize);
        let mut v = 1.0;
        out.push(v);
        for k in 0..(self.m - 1) as u64 {
            let kf = k as f64;
            v *= delta * (m - 1.0 - kf) / ((kf + 1.0) * (kf + 1.0));
            out.push(v);
        }
        out
    }
}

/// Density of the SNR-scaled satellite gain lambda_S:
///
/// ```text
/// f(x) = alpha * sum_{k=0}^{m-1} varsigma(k) x^k / lambda_bar^(k+1)
///        * exp(-(beta - delta) x / lambda_bar)
/// ```
pub fn sr_pdf(x: f64, p: &ShadowedRicianParams) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let xl = x / p.lambda_bar;
    let mut sum = 0.0;
    let mut xpow = 1.0; // (x / lambda_bar)^k
    for v in p.varsigma() {
        sum += v * xpow;
        xpow *= xl;
    }
    p.alpha() / p.lambda_bar * sum * (-p.beta_minus_delta() * xl).exp()
}

/// Survival function 1 - F(x) of lambda_S, the term-by-term integral of
/// `sr_pdf` from x to infinity:
///
/// ```text
/// S(x) = alpha e^(-c x / lb) sum_k varsigma(k)
///        sum_{p=0}^{k} (k!/p!) (x/lb)^p c^(p-k-1),   c = beta - delta
/// ```
pub fn sr_survival(x: f64, p: &ShadowedRicianParams) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let c = p.beta_minus_delta();
    let xl = x / p.lambda_bar;
    let mut total = 0.0;
    for (k, v) in p.varsigma().into_iter().enumerate() {
        // Inner sum over p descending from p = k keeps the factorial ratio
        // k!/p! integral: start at p = k with k!/k! = 1.
        let mut inner = 0.0;
        let mut coef = 1.0; // (k!/p!) at the current p
        let mut xpow = xl.powi(k as i32); // (x/lb)^p
        let mut cpow = 1.0 / c; // c^(p-k-1)
        for pp in (0..=k).rev() {
            inner += coef * xpow * cpow;
            if pp > 0 {
                coef *= pp as f64; // k!/(p-1)! = (k!/p!) * p
                xpow /= xl;
                cpow /= c;
            }
        }
        total += v * inner;
    }
    (p.alpha() * (-c * xl).exp() * total).clamp(0.0, 1.0)
}

/// CDF of lambda_S; equals the integral of `sr_pdf` from 0 to x.
pub fn sr_cdf(x: f64, p: &ShadowedRicianParams) -> f64 {
    1.0 - sr_survival(x, p)
}

// ---------------------------------------------------------------------------
// Rician parameters
// ---------------------------------------------------------------------------

/// Rician fading constants for the relay-ground hop. `omega_r` is the mean
/// of the (SNR-scaled) power gain lambda_R.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RicianParams {
    /// Rice factor: LOS power over scattered power (linear).
    pub k_factor: f64,
    /// Mean power of lambda_R (linear).
    pub omega_r: f64,
}

impl RicianParams {
    /// Validate and build.
    pub fn new(k_factor: f64, omega_r: f64) -> Result<Self> {
        if !(k_factor >= 0.0) || !k_factor.is_finite() {
            return Err(Error::Domain(format!(
                "rician: Rice factor must be nonnegative, got {k_factor}"
            )));
        }
        if !(omega_r > 0.0) || !omega_r.is_finite() {
            return Err(Error::Domain(format!(
                "rician: mean power must be positive, got {omega_r}"
            )));
        }
        Ok(RicianParams { k_factor, omega_r })
    }
}

/// CDF of the Rician power gain:
/// F(x) = 1 - Q1(sqrt(2K), sqrt(2 (1+K) x / Omega_R)).
pub fn rician_cdf(x: f64, p: &RicianParams) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    let a = (2.0 * p.k_factor).sqrt();
    let b = (2.0 * (1.0 + p.k_factor) * x / p.omega_r).sqrt();
    Ok(1.0 - marcum_q1(a, b)?)
}

// ---------------------------------------------------------------------------
// Interference parameters
// ---------------------------------------------------------------------------

/// Constants of the fading ratio Z that drives the interference-scenario
/// coverage: numerator a Rician power with mean `omega_x`, denominator an
/// exponential of rate `lambda_i` scaled by the power ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterferenceParams {
    /// Rice factor of the serving-hop fading (linear).
    pub k_factor: f64,
    /// Mean power of the (noise-normalized) numerator gain,
    /// Omega_X = Omega_R sigma^2 / P_R.
    pub omega_x: f64,
    /// Rayleigh rate of the interferer power gain.
    pub lambda_i: f64,
    /// Relay transmit power (W).
    pub p_r_w: f64,
    /// Interferer transmit power (W).
    pub p_i_w: f64,
}

impl InterferenceParams {
    /// Build directly from the ratio constants.
    pub fn new(k_factor: f64, omega_x: f64, lambda_i: f64, p_r_w: f64, p_i_w: f64) -> Result<Self> {
        if !(k_factor >= 0.0) || !k_factor.is_finite() {
            return Err(Error::Domain(format!(
                "interference: Rice factor must be nonnegative, got {k_factor}"
            )));
        }
        for (name, v) in [
            ("omega_x", omega_x),
            ("lambda_i", lambda_i),
            ("p_r_w", p_r_w),
            ("p_i_w", p_i_w),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!(
                    "interference: {name} must be positive, got {v}"
                )));
            }
        }
        Ok(InterferenceParams {
            k_factor,
            omega_x,
            lambda_i,
            p_r_w,
            p_i_w,
        })
    }

    /// Build from the serving-hop Rician model plus link powers, deriving
    /// Omega_X = Omega_R sigma^2 / P_R.
    pub fn from_link(
        rician: &RicianParams,
        sigma2: f64,
        p_r_w: f64,
        p_i_w: f64,
        lambda_i: f64,
    ) -> Result<Self> {
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::Domain(format!(
                "interference: noise power must be positive, got {sigma2}"
            )));
        }
        Self::new(
            rician.k_factor,
            rician.omega_r * sigma2 / p_r_w,
            lambda_i,
            p_r_w,
            p_i_w,
        )
    }

    /// Gamma1 = (1+K) e^(-K) / Omega_X.
    pub fn gamma1(&self) -> f64 {
        self.gamma2() * (-self.k_factor).exp()
    }

    /// Gamma2 = (1+K) / Omega_X.
    pub fn gamma2(&self) -> f64 {
        (1.0 + self.k_factor) / self.omega_x
    }

    /// Gamma3 = lambda_I P_R / P_I.
    pub fn gamma3(&self) -> f64 {
        self.lambda_i * self.p_r_w / self.p_i_w
    }

    /// Gamma4 = K (1+K) / Omega_X.
    pub fn gamma4(&self) -> f64 {
        self.k_factor * (1.0 + self.k_factor) / self.omega_x
    }
}

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

/// Draw one Shadowed-Rician power gain |h|^2 (unscaled: multiply by
/// `lambda_bar` for lambda_S).
///
/// Composition: the LOS amplitude xi is Nakagami-m with E[xi^2] = Omega
/// (xi^2 gamma-distributed with shape m, scale Omega/m), added to an
/// independent complex scatter term of variance 2b. Draw order: gamma
/// variate, then the in-phase and quadrature scatter normals.
pub fn sample_shadowed_rician<R: Rng + ?Sized>(rng: &mut R, p: &ShadowedRicianParams) -> f64 {
    let gamma = Gamma::new(p.m as f64, p.omega / p.m as f64)
        .expect("validated parameters always form a proper gamma distribution");
    let xi = gamma.sample(rng).max(0.0).sqrt();
    let g1: f64 = StandardNormal.sample(rng);
    let g2: f64 = StandardNormal.sample(rng);
    let s = p.b.sqrt();
    (xi + s * g1).powi(2) + (s * g2).powi(2)
}

/// Draw one Rician power gain with mean `omega_r`. Draw order: in-phase
/// normal, then quadrature normal.
pub fn sample_rician_power<R: Rng + ?Sized>(rng: &mut R, p: &RicianParams) -> f64 {
    let nu = (p.k_factor * p.omega_r / (1.0 + p.k_factor)).sqrt();
    let s = (p.omega_r / (2.0 * (1.0 + p.k_factor))).sqrt();
    let g1: f64 = StandardNormal.sample(rng);
    let g2: f64 = StandardNormal.sample(rng);
    (nu + s * g1).powi(2) + (s * g2).powi(2)
}

/// Draw one Rayleigh power gain: exponential with rate `lambda_i`.
/// Consumes one uniform.
pub fn sample_rayleigh_power<R: Rng + ?Sized>(rng: &mut R, lambda_i: f64) -> f64 {
    -(1.0 - rng.gen::<f64>()).ln() / lambda_i
}
