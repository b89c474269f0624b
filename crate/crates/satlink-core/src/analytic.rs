//! Closed-form and quadrature evaluators for coverage, outage, and
//! end-to-end outage.
//!
//! Probabilities returned in result records are clamped to [0, 1] only at
//! the final step; the pre-clamp value is kept in `raw_value` so quadrature
//! excursions stay observable.

use crate::channels::{
    sr_cdf, sr_survival, InterferenceParams, RicianParams, ShadowedRicianParams,
};
use crate::error::{Error, Result};
use crate::geometry::{d0_squared_pdf, GeometryParams};
use crate::specfun::{
    chebyshev_rule, integrate, kummer_1f1_integer, ln_gamma, marcum_q1, mu_shape,
    regularized_gamma_p, upsilon_scale,
};
use serde::Serialize;

// ---------------------------------------------------------------------------
// Result records
// ---------------------------------------------------------------------------

/// How a probability was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Adaptive integration of the exact integrand.
    ExactIntegral,
    /// Closed form built on the exponential Marcum-Q fit.
    ClosedApprox,
    /// Fixed-order Chebyshev-Gauss sum.
    Quadrature,
}

/// Node counts of the Chebyshev-Gauss sums: G (angle), H (interferer
/// radius), J (receiver radius) for the interference CDF, Q for the
/// satellite-hop outage average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadratureOrders {
    /// Angle-axis node count of the interference triple sum.
    pub g: usize,
    /// Interferer-radius node count of the interference triple sum.
    pub h: usize,
    /// Receiver-radius node count of the interference triple sum.
    pub j: usize,
    /// Node count of the satellite-distance outage average.
    pub q: usize,
}

impl Default for QuadratureOrders {
    fn default() -> Self {
        QuadratureOrders {
            g: 50,
            h: 50,
            j: 50,
            q: 50,
        }
    }
}

impl QuadratureOrders {
    /// Same node count on every axis.
    pub fn uniform(n: usize) -> Self {
        QuadratureOrders {
            g: n,
            h: n,
            j: n,
            q: n,
        }
    }

    /// Rejects zero node counts; every axis needs at least one node.
    pub fn validate(&self) -> Result<()> {
        if self.g == 0 || self.h == 0 || self.j == 0 || self.q == 0 {
            return Err(Error::Domain(
                "quadrature orders must all be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// A coverage probability with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageResult {
    /// Final probability, clamped to [0, 1].
    pub value: f64,
    /// Pre-clamp value as the formula produced it.
    pub raw_value: f64,
    /// Evaluation route.
    pub method: Method,
    /// Node counts used, when the route is a fixed-order sum.
    pub orders: Option<QuadratureOrders>,
    /// Threshold the probability refers to (linear).
    pub threshold: f64,
}

/// An outage probability with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutageResult {
    /// Final probability, clamped to [0, 1].
    pub value: f64,
    /// Pre-clamp value as the formula produced it.
    pub raw_value: f64,
    /// Evaluation route.
    pub method: Method,
    /// Node counts used, when the route is a fixed-order sum.
    pub orders: Option<QuadratureOrders>,
    /// Threshold the probability refers to (linear).
    pub threshold: f64,
}

fn clamped(raw: f64) -> f64 {
    raw.clamp(0.0, 1.0)
}

fn check_threshold(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::Domain(format!(
            "{name} must be nonnegative and finite, got {v}"
        )));
    }
    Ok(())
}

fn check_n2(n2: f64) -> Result<()> {
    if !(n2 > 0.0) || !n2.is_finite() {
        return Err(Error::Domain(format!(
            "path-loss exponent must be positive, got {n2}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Coverage, no interference
// ---------------------------------------------------------------------------

/// Coverage probability of the relay-ground hop without interference,
/// averaging the exact Rician tail over the receiver position:
///
/// ```text
/// p_c = (2/L^2) int_{H1}^{sqrt(H1^2+L^2)} x Q1(sqrt(2K), sqrt(Th x^n2)) dx,
/// Th = 2 (1+K) gamma_th / Omega_R
/// ```
pub fn coverage_ni_exact(
    geom: &GeometryParams,
    rician: &RicianParams,
    gamma_th: f64,
    n2: f64,
) -> Result<CoverageResult> {
    check_threshold("coverage threshold", gamma_th)?;
    check_n2(n2)?;
    let a = (2.0 * rician.k_factor).sqrt();
    if a * a / 2.0 > 700.0 {
        return Err(Error::Unsupported(format!(
            "Rice factor {} too large for the exact Marcum series",
            rician.k_factor
        )));
    }
    let theta = 2.0 * (1.0 + rician.k_factor) * gamma_th / rician.omega_r;
    let lo = geom.h1_km;
    let hi = (geom.h1_km * geom.h1_km + geom.l_km * geom.l_km).sqrt();
    let l2 = geom.l_km * geom.l_km;
    let raw = 2.0 / l2
        * integrate(
            |x| {
                let b = (theta * x.powf(n2)).sqrt();
                x * marcum_q1(a, b).expect("argument regime prechecked")
            },
            lo,
            hi,
            1e-9 * l2 / 2.0,
        );
    Ok(CoverageResult {
        value: clamped(raw),
        raw_value: raw,
        method: Method::ExactIntegral,
        orders: None,
        threshold: gamma_th,
    })
}

/// Closed-form coverage probability of the relay-ground hop without
/// interference, exact for the exponential-fit Marcum kernel:
///
/// ```text
/// p_c ~= (4/(L^2 n2 mu)) e^(-4 ups/(n2 mu)) Th^(-2/n2)
///        [ Gamma(s, y_min) - Gamma(s, y_max) ],   s = 4/(n2 mu),
/// y(x) = e^ups Th^(mu/2) x^(n2 mu / 2)
/// ```
///
/// evaluated through regularized-gamma differences to avoid cancellation.
pub fn coverage_ni_approx(
    geom: &GeometryParams,
    rician: &RicianParams,
    gamma_th: f64,
    n2: f64,
) -> Result<CoverageResult> {
    check_threshold("coverage threshold", gamma_th)?;
    check_n2(n2)?;
    let a = (2.0 * rician.k_factor).sqrt();
    let mu = mu_shape(a);
    let ups = upsilon_scale(a);
    let theta = 2.0 * (1.0 + rician.k_factor) * gamma_th / rician.omega_r;
    let lo = geom.h1_km;
    let hi = (geom.h1_km * geom.h1_km + geom.l_km * geom.l_km).sqrt();
    let y = |x: f64| ups.exp() * theta.powf(mu / 2.0) * x.powf(n2 * mu / 2.0);
    let (y_min, y_max) = (y(lo), y(hi));
    if theta == 0.0 || y_max == 0.0 {
        // Zero threshold: the fitted kernel is 1 everywhere.
        return Ok(CoverageResult {
            value: 1.0,
            raw_value: 1.0,
            method: Method::ClosedApprox,
            orders: None,
            threshold: gamma_th,
        });
    }
    let s = 4.0 / (n2 * mu);
    let bracket =
        ln_gamma(s).exp() * (regularized_gamma_p(s, y_max)? - regularized_gamma_p(s, y_min)?);
    let raw = 4.0 / (geom.l_km * geom.l_km * n2 * mu)
        * (-4.0 * ups / (n2 * mu)).exp()
        * theta.powf(-2.0 / n2)
        * bracket;
    Ok(CoverageResult {
        value: clamped(raw),
        raw_value: raw,
        method: Method::ClosedApprox,
        orders: None,
        threshold: gamma_th,
    })
}

// ---------------------------------------------------------------------------
// Coverage under interference
// ---------------------------------------------------------------------------

/// CDF of the position-free fading ratio Z (serving Rician power over the
/// scaled interferer exponential):
///
/// ```text
/// F_Z(z) = Gamma1 (Gamma2 + Gamma3/z)^-1 1F1(1; 1; Gamma4 (Gamma2 + Gamma3/z)^-1)
/// ```
///
/// The confluent factor is evaluated through `kummer_1f1_integer`, where
/// 1F1(1; 1; x) = e^x.
pub fn cdf_z(z: f64, ip: &InterferenceParams) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!(
            "cdf_z: ratio argument must be positive and finite, got {z}"
        )));
    }
    let t = 1.0 / (ip.gamma2() + ip.gamma3() / z);
    let val = ip.gamma1() * t * kummer_1f1_integer(1, ip.gamma4() * t)?;
    Ok(val.clamp(0.0, 1.0))
}

/// CDF of the relay-ground SIR under one dominant interferer, averaging
/// F_Z over the receiver radius, interferer radius, and azimuth with the
/// triple Chebyshev-Gauss sum (orders J, H, G respectively):
///
/// ```text
/// F(x) = Gamma1/(4 pi) * sum_g sum_j sum_k w_G
///        * w_H sqrt(1-zeta_j^2) (1+zeta_j)
///        * w_J sqrt(1-kappa_k^2) (1+kappa_k)
///        * T_gjk(x) exp(Gamma4 T_gjk(x))
/// ```
///
/// with `T_gjk(x) = [Gamma2 + (Gamma3/x) u^2/d^2]^-1`, u and d the
/// interferer and relay distances at the substituted node positions. The
/// angle axis absorbs the arcsine density of the azimuth cosine, so it
/// carries no sqrt factor. Supported only for a squared-distance path loss.
///
/// The returned value is the raw sum; callers clamp. Expect excursions
/// below 1e-3 at the default orders.
pub fn cdf_gamma_rd_interference(
    x: f64,
    geom: &GeometryParams,
    ip: &InterferenceParams,
    n2: f64,
    orders: &QuadratureOrders,
) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "cdf_gamma_rd_interference: threshold must be positive and finite, got {x}"
        )));
    }
    if (n2 - 2.0).abs() > 1e-12 {
        return Err(Error::Unsupported(format!(
            "interference analysis requires path-loss exponent 2, got {n2}"
        )));
    }
    orders.validate()?;
    let rule_g = chebyshev_rule(orders.g)?;
    let rule_h = chebyshev_rule(orders.h)?;
    let rule_j = chebyshev_rule(orders.j)?;

    let eta1 = geom.t_i_km / 2.0; // interferer-radius half range
    let eta2 = geom.l_km / 2.0; // receiver-radius half range
    let h1sq = geom.h1_km * geom.h1_km;
    let (g2, g3, g4) = (ip.gamma2(), ip.gamma3(), ip.gamma4());

    // Per-axis factors: weight * sqrt(1 - node^2) * (1 + node), plus the
    // substituted radii.
    let jfac: Vec<(f64, f64, f64)> = rule_j
        .nodes
        .iter()
        .zip(&rule_j.weights)
        .map(|(&k, &w)| {
            let r_i = eta2 * (1.0 + k);
            (w * (1.0 - k * k).sqrt() * (1.0 + k), r_i, r_i * r_i + h1sq)
        })
        .collect();
    let hfac: Vec<(f64, f64)> = rule_h
        .nodes
        .iter()
        .zip(&rule_h.weights)
        .map(|(&z, &w)| (w * (1.0 - z * z).sqrt() * (1.0 + z), eta1 * (1.0 + z)))
        .collect();

    let mut total = 0.0;
    for (&c, &wg) in rule_g.nodes.iter().zip(&rule_g.weights) {
        for &(wh, r_int) in &hfac {
            for &(wj, r_i, dsq) in &jfac {
                let usq = (r_i * r_i + r_int * r_int - 2.0 * r_i * r_int * c).max(0.0);
                let t = 1.0 / (g2 + g3 / x * usq / dsq);
                total += wg * wh * wj * t * (g4 * t).exp();
            }
        }
    }
    Ok(ip.gamma1() / (4.0 * std::f64::consts::PI) * total)
}

/// Coverage probability of the relay-ground hop under interference:
/// 1 - F_gamma_RD(gamma_th).
pub fn coverage_interference(
    geom: &GeometryParams,
    ip: &InterferenceParams,
    gamma_th: f64,
    n2: f64,
    orders: &QuadratureOrders,
) -> Result<CoverageResult> {
    let raw = 1.0 - cdf_gamma_rd_interference(gamma_th, geom, ip, n2, orders)?;
    Ok(CoverageResult {
        value: clamped(raw),
        raw_value: raw,
        method: Method::Quadrature,
        orders: Some(*orders),
        threshold: gamma_th,
    })
}

// ---------------------------------------------------------------------------
// Satellite-hop outage
// ---------------------------------------------------------------------------

/// Outage probability of the satellite-relay hop at a known distance d0:
/// the gain CDF at gamma_out * d0^2 (squared-distance path loss).
pub fn outage_sr_conditional(
    d0_km: f64,
    sr: &ShadowedRicianParams,
    gamma_out: f64,
) -> Result<f64> {
    if !(d0_km > 0.0) || !d0_km.is_finite() {
        return Err(Error::Domain(format!(
            "outage_sr_conditional: distance must be positive, got {d0_km}"
        )));
    }
    check_threshold("outage threshold", gamma_out)?;
    Ok(sr_cdf(gamma_out * d0_km * d0_km, sr))
}

/// Outage probability of the satellite-relay hop averaged over the
/// satellite position: a Q-node Chebyshev-Gauss sum of the conditional
/// outage against the d0^2 density,
///
/// ```text
/// P = 1 - sum_q w sqrt(1-chi^2) b1 f(x_q) [1 - F(gamma_out x_q)],
/// x_q = b1 chi_q + b2
/// ```
///
/// with b1, b2 the half-width and midpoint of the d0^2 support.
pub fn outage_sr(
    geom: &GeometryParams,
    sr: &ShadowedRicianParams,
    gamma_out: f64,
    orders: &QuadratureOrders,
) -> Result<OutageResult> {
    check_threshold("outage threshold", gamma_out)?;
    orders.validate()?;
    let rule = chebyshev_rule(orders.q)?;
    let s = geom.d0_support();
    let b1 = 0.5 * (s.d0_max_sq_km2 - s.d0_min_sq_km2);
    let b2 = 0.5 * (s.d0_max_sq_km2 + s.d0_min_sq_km2);
    let mut survive = 0.0;
    for (&chi, &w) in rule.nodes.iter().zip(&rule.weights) {
        let x = b1 * chi + b2;
        survive += w
            * (1.0 - chi * chi).sqrt()
            * b1
            * d0_squared_pdf(x, geom)
            * sr_survival(gamma_out * x, sr);
    }
    let raw = 1.0 - survive;
    Ok(OutageResult {
        value: clamped(raw),
        raw_value: raw,
        method: Method::Quadrature,
        orders: Some(*orders),
        threshold: gamma_out,
    })
}

// ---------------------------------------------------------------------------
// End-to-end outage
// ---------------------------------------------------------------------------

/// Decode-and-forward composition: the chain fails iff either hop fails,
/// so P_e2e = 1 - p_c (1 - P_out_SR).
pub fn combine_outage(p_c: f64, p_out_sr: f64) -> f64 {
    1.0 - p_c * (1.0 - p_out_sr)
}

/// Which model drives the relay-ground hop of the end-to-end chain.
#[derive(Debug, Clone, Copy)]
pub enum RdScenario<'a> {
    /// Noise-limited hop with Rician fading; coverage by the closed form.
    NonInterference(&'a RicianParams),
    /// Interference-limited hop; coverage by the triple quadrature sum.
    Interference(&'a InterferenceParams),
}

/// End-to-end outage of the satellite-relay-receiver chain.
pub fn e2e_outage(
    geom: &GeometryParams,
    sr: &ShadowedRicianParams,
    rd: RdScenario<'_>,
    gamma_th: f64,
    gamma_out: f64,
    n2: f64,
    orders: &QuadratureOrders,
) -> Result<OutageResult> {
    let coverage = match rd {
        RdScenario::NonInterference(ric) => coverage_ni_approx(geom, ric, gamma_th, n2)?,
        RdScenario::Interference(ip) => coverage_interference(geom, ip, gamma_th, n2, orders)?,
    };
    let sat = outage_sr(geom, sr, gamma_out, orders)?;
    let raw = combine_outage(coverage.value, sat.value);
    Ok(OutageResult {
        value: clamped(raw),
        raw_value: raw,
        method: coverage.method,
        orders: Some(*orders),
        threshold: gamma_out,
    })
}
