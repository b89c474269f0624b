//! Scenario configuration: TOML schema, unit-tag parsing and resolution
//! into the parameter structs consumed by the library.
//!
//! Every power-like or threshold-like quantity in the file carries a
//! mandatory unit tag so the reader never has to guess the scale:
//!
//! * `"15 dB"` converts as `10^(15/10)`,
//! * `"50 W"` and `"0.1 linear"` are taken verbatim.
//!
//! A malformed tag is a configuration error that names the offending
//! field. Plain shape parameters (fading orders, path-loss exponents,
//! geometry lengths in km) are untagged numbers.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use satlink_core::{
    GeometryParams, InterferenceParams, QuadratureOrders, RicianParams, ShadowedRicianParams,
};

// ---- Error type ----

/// Configuration failure: unreadable file, malformed TOML, a bad unit
/// tag or a parameter rejected by the library constructors. The message
/// always names the field or file that caused it.
#[derive(Debug, Clone)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

// ---- Raw schema (as written in the file) ----

/// Top-level scenario file. Every section is optional and falls back to
/// the built-in reference scenario, so an empty file (or no file at all)
/// is a complete, runnable configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawConfig {
    pub geometry: RawGeometry,
    pub channel: RawChannel,
    pub power: RawPower,
    pub thresholds: RawThresholds,
    pub quadrature: RawQuadrature,
    pub mc: RawMc,
    pub optimizer: RawOptimizer,
}

impl Default for RawConfig {
    fn default() -> Self {
        Self {
            geometry: RawGeometry::default(),
            channel: RawChannel::default(),
            power: RawPower::default(),
            thresholds: RawThresholds::default(),
            quadrature: RawQuadrature::default(),
            mc: RawMc::default(),
            optimizer: RawOptimizer::default(),
        }
    }
}

/// Deployment geometry in kilometres and radians.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawGeometry {
    /// Relay altitude above the ground plane, km.
    pub h1_km: f64,
    /// Radius of the disc served by the relay, km.
    pub l_km: f64,
    /// Radius of the interferer disc around the receiver, km.
    pub t_i_km: f64,
    /// Planet radius, km.
    pub r_e_km: f64,
    /// Outer radius of the satellite shell, km (from the planet centre).
    pub u1_km: f64,
    /// Inner radius of the satellite shell, km (from the planet centre).
    pub u2_km: f64,
    /// Half-angle of the visible cone, rad.
    pub psi_rad: f64,
    /// Interferer density over the disc, 1/km^2.
    pub density_per_km2: f64,
}

impl Default for RawGeometry {
    fn default() -> Self {
        Self {
            h1_km: 5.0,
            l_km: 20.0,
            t_i_km: 30.0,
            r_e_km: 6371.0,
            u1_km: 8371.0,
            u2_km: 6531.0,
            psi_rad: std::f64::consts::FRAC_PI_3,
            density_per_km2: 0.01,
        }
    }
}

/// Fading and propagation parameters. `k_factor`, `omega_r` and
/// `sigma2` carry unit tags; the rest are plain linear shape values.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawChannel {
    /// Satellite-hop multipath power per component (linear).
    pub b: f64,
    /// Satellite-hop shadowing order (positive integer).
    pub m: u32,
    /// Satellite-hop line-of-sight power (linear).
    pub omega: f64,
    /// Ground-hop Rice factor, tagged `dB` or `linear`.
    pub k_factor: String,
    /// Ground-hop mean channel scale, tagged `dB` or `linear`.
    pub omega_r: String,
    /// Interference fading rate (linear, exponential power model).
    pub lambda_i: f64,
    /// Satellite-hop path-loss exponent.
    pub n1: f64,
    /// Ground-hop path-loss exponent.
    pub n2: f64,
    /// Receiver noise power, tagged `dB`, `W` or `linear`.
    pub sigma2: String,
}

impl Default for RawChannel {
    fn default() -> Self {
        Self {
            b: 10.0,
            m: 2,
            omega: 1.0,
            k_factor: "-10 dB".to_string(),
            omega_r: "15 dB".to_string(),
            lambda_i: 1.0,
            n1: 2.0,
            n2: 2.0,
            sigma2: "-27 dB".to_string(),
        }
    }
}

/// Transmit powers, tagged `dB`, `W` or `linear`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawPower {
    /// Satellite transmit power.
    pub p_s: String,
    /// Relay transmit power.
    pub p_r: String,
    /// Per-interferer transmit power.
    pub p_i: String,
}

impl Default for RawPower {
    fn default() -> Self {
        Self {
            p_s: "30 dB".to_string(),
            p_r: "1 dB".to_string(),
            p_i: "1 dB".to_string(),
        }
    }
}

/// Decision thresholds, tagged `dB` or `linear`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawThresholds {
    /// Ground-hop coverage threshold.
    pub gamma_th: String,
    /// Satellite-hop outage threshold.
    pub gamma_out: String,
    /// Evaluation point for the interference ratio distribution.
    pub z: String,
}

impl Default for RawThresholds {
    fn default() -> Self {
        Self {
            gamma_th: "0 dB".to_string(),
            gamma_out: "0 dB".to_string(),
            z: "0 dB".to_string(),
        }
    }
}

/// Quadrature orders for the four node families used by the analytic
/// layer (serving-distance, interferer-distance, angle, outage axes).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawQuadrature {
    pub g: usize,
    pub h: usize,
    pub j: usize,
    pub q: usize,
}

impl Default for RawQuadrature {
    fn default() -> Self {
        Self { g: 50, h: 50, j: 50, q: 50 }
    }
}

/// Monte-Carlo controls.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawMc {
    /// Number of independent trials.
    pub trials: u64,
    /// Base seed; each trial derives its own stream from it.
    pub seed: u64,
}

impl Default for RawMc {
    fn default() -> Self {
        Self { trials: 1_000_000, seed: 42 }
    }
}

/// Link-budget inputs for the time/power allocation solver. The two
/// channel gains are normalised by noise and path loss (units 1/W); when
/// either is omitted both are drawn once from the configured fading laws
/// using the Monte-Carlo seed, so a fixed seed pins the whole problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawOptimizer {
    /// Payload to deliver end to end, bits.
    pub d_sd_bits: f64,
    /// Satellite-hop bandwidth, Hz.
    pub b_s_hz: f64,
    /// Relay-hop bandwidth, Hz.
    pub b_r_hz: f64,
    /// Frame deadline, s.
    pub t_total_s: f64,
    /// Satellite power cap, tagged `dB`, `W` or `linear`.
    pub p_s_max: String,
    /// Relay power cap, tagged `dB`, `W` or `linear`.
    pub p_r_max: String,
    /// Satellite-to-relay distance used when drawing gains, km.
    pub d0_km: f64,
    /// Noise power behind the drawn gains, tagged `dB`, `W` or `linear`.
    /// Separate from `channel.sigma2` because the allocation reference
    /// scenario runs at a different noise scale than the coverage ones.
    pub sigma2: String,
    /// Satellite-hop gain, 1/W. Drawn from the fading law if omitted.
    pub gamma_sr: Option<f64>,
    /// Relay-hop gain, 1/W. Drawn from the fading law if omitted.
    pub gamma_rd: Option<f64>,
}

impl Default for RawOptimizer {
    fn default() -> Self {
        Self {
            d_sd_bits: 1.0e7,
            b_s_hz: 1.0e7,
            b_r_hz: 1.0e7,
            t_total_s: 10.0,
            p_s_max: "50 W".to_string(),
            p_r_max: "10 W".to_string(),
            d0_km: 1500.0,
            sigma2: "-64 dB".to_string(),
            gamma_sr: None,
            gamma_rd: None,
        }
    }
}

// ---- Loading ----

/// Reads a TOML scenario file, or returns the built-in defaults when no
/// path is given. TOML syntax and unknown-field errors surface with the
/// parser's own field-and-line diagnostics.
pub fn load(path: Option<&Path>) -> Result<RawConfig, ConfigError> {
    match path {
        None => Ok(RawConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| ConfigError(format!("{}: {e}", p.display())))?;
            toml::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", p.display())))
        }
    }
}

// ---- Unit tags ----

/// Parses a tagged quantity `"<number> <unit>"` where the unit is `dB`
/// (power decibels), `W` or `linear` (both verbatim). `field` is the
/// dotted config path reported on failure.
pub fn parse_tagged(field: &str, raw: &str) -> Result<f64, ConfigError> {
    let parts: Vec<&str> = raw.split_whitespace().collect();
    let bad = || {
        ConfigError(format!(
            "{field}: malformed unit tag {raw:?}; expected \"<number> dB\", \"<number> W\" or \"<number> linear\""
        ))
    };
    if parts.len() != 2 {
        return Err(bad());
    }
    let value: f64 = parts[0].parse().map_err(|_| bad())?;
    if parts[1].eq_ignore_ascii_case("dB") {
        Ok(10.0f64.powf(value / 10.0))
    } else if parts[1].eq_ignore_ascii_case("W") || parts[1].eq_ignore_ascii_case("linear") {
        Ok(value)
    } else {
        Err(bad())
    }
}

/// Replaces the numeric part of a tagged string, keeping its unit. Used
/// by parameter sweeps so the axis is interpreted in the unit the file
/// already declares.
pub fn retag(field: &str, current: &str, value: f64) -> Result<String, ConfigError> {
    let unit = current.split_whitespace().nth(1).ok_or_else(|| {
        ConfigError(format!("{field}: malformed unit tag {current:?}; cannot sweep it"))
    })?;
    Ok(format!("{value} {unit}"))
}

// ---- Sweep axes ----

/// Sets one numeric config field addressed by its dotted path. Tagged
/// fields keep their declared unit, so a sweep over `channel.omega_r`
/// written as `"15 dB"` runs in decibels. Unknown paths are rejected
/// with the list of sweepable axes.
pub fn apply_axis(raw: &mut RawConfig, axis: &str, value: f64) -> Result<(), ConfigError> {
    match axis {
        "geometry.h1_km" => raw.geometry.h1_km = value,
        "geometry.l_km" => raw.geometry.l_km = value,
        "geometry.t_i_km" => raw.geometry.t_i_km = value,
        "geometry.r_e_km" => raw.geometry.r_e_km = value,
        "geometry.u1_km" => raw.geometry.u1_km = value,
        "geometry.u2_km" => raw.geometry.u2_km = value,
        "geometry.psi_rad" => raw.geometry.psi_rad = value,
        "geometry.density_per_km2" => raw.geometry.density_per_km2 = value,
        "channel.b" => raw.channel.b = value,
        "channel.omega" => raw.channel.omega = value,
        "channel.lambda_i" => raw.channel.lambda_i = value,
        "channel.n1" => raw.channel.n1 = value,
        "channel.n2" => raw.channel.n2 = value,
        "channel.k_factor" => raw.channel.k_factor = retag(axis, &raw.channel.k_factor, value)?,
        "channel.omega_r" => raw.channel.omega_r = retag(axis, &raw.channel.omega_r, value)?,
        "channel.sigma2" => raw.channel.sigma2 = retag(axis, &raw.channel.sigma2, value)?,
        "power.p_s" => raw.power.p_s = retag(axis, &raw.power.p_s, value)?,
        "power.p_r" => raw.power.p_r = retag(axis, &raw.power.p_r, value)?,
        "power.p_i" => raw.power.p_i = retag(axis, &raw.power.p_i, value)?,
        "thresholds.gamma_th" => {
            raw.thresholds.gamma_th = retag(axis, &raw.thresholds.gamma_th, value)?
        }
        "thresholds.gamma_out" => {
            raw.thresholds.gamma_out = retag(axis, &raw.thresholds.gamma_out, value)?
        }
        "thresholds.z" => raw.thresholds.z = retag(axis, &raw.thresholds.z, value)?,
        "optimizer.d_sd_bits" => raw.optimizer.d_sd_bits = value,
        "optimizer.b_s_hz" => raw.optimizer.b_s_hz = value,
        "optimizer.b_r_hz" => raw.optimizer.b_r_hz = value,
        "optimizer.t_total_s" => raw.optimizer.t_total_s = value,
        "optimizer.d0_km" => raw.optimizer.d0_km = value,
        "optimizer.sigma2" => raw.optimizer.sigma2 = retag(axis, &raw.optimizer.sigma2, value)?,
        "optimizer.p_s_max" => raw.optimizer.p_s_max = retag(axis, &raw.optimizer.p_s_max, value)?,
        "optimizer.p_r_max" => raw.optimizer.p_r_max = retag(axis, &raw.optimizer.p_r_max, value)?,
        other => {
            return Err(ConfigError(format!(
                "sweep axis `{other}` is not a sweepable numeric config field; choose one of \
                 geometry.{{h1_km,l_km,t_i_km,r_e_km,u1_km,u2_km,psi_rad,density_per_km2}}, \
                 channel.{{b,omega,lambda_i,n1,n2,k_factor,omega_r,sigma2}}, \
                 power.{{p_s,p_r,p_i}}, thresholds.{{gamma_th,gamma_out,z}}, \
                 optimizer.{{d_sd_bits,b_s_hz,b_r_hz,t_total_s,d0_km,sigma2,p_s_max,p_r_max}}"
            )))
        }
    }
    Ok(())
}

// ---- Resolved scenario ----

/// Optimizer inputs after tag resolution (caps in watts).
#[derive(Debug, Clone)]
pub struct ResolvedOptimizer {
    pub d_sd_bits: f64,
    pub b_s_hz: f64,
    pub b_r_hz: f64,
    pub t_total_s: f64,
    pub p_s_max_w: f64,
    pub p_r_max_w: f64,
    pub d0_km: f64,
    pub sigma2_w: f64,
    pub gamma_sr: Option<f64>,
    pub gamma_rd: Option<f64>,
}

/// Fully resolved scenario: every tag converted to linear scale and all
/// library parameter structs constructed and validated.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub geom: GeometryParams,
    pub sr: ShadowedRicianParams,
    pub rician: RicianParams,
    pub interference: InterferenceParams,
    /// Ground-hop coverage threshold, linear.
    pub gamma_th: f64,
    /// Satellite-hop outage threshold, linear.
    pub gamma_out: f64,
    /// Interference-ratio evaluation point, linear.
    pub z: f64,
    pub n1: f64,
    pub n2: f64,
    pub orders: QuadratureOrders,
    pub trials: u64,
    pub seed: u64,
    pub optimizer: ResolvedOptimizer,
}

/// Converts a raw file into a validated scenario. All unit tags are
/// parsed here, and every library constructor error is re-reported with
/// the config section that produced it.
pub fn resolve(raw: &RawConfig) -> Result<Resolved, ConfigError> {
    let g = &raw.geometry;
    let geom = GeometryParams::new(
        g.h1_km,
        g.l_km,
        g.t_i_km,
        g.r_e_km,
        g.u1_km,
        g.u2_km,
        g.psi_rad,
        g.density_per_km2,
    )
    .map_err(|e| ConfigError(format!("geometry: {e}")))?;

    let sigma2_w = parse_tagged("channel.sigma2", &raw.channel.sigma2)?;
    if !(sigma2_w > 0.0) || !sigma2_w.is_finite() {
        return Err(ConfigError(format!(
            "channel.sigma2: noise power must be positive and finite, got {sigma2_w}"
        )));
    }
    let k_factor = parse_tagged("channel.k_factor", &raw.channel.k_factor)?;
    let omega_r = parse_tagged("channel.omega_r", &raw.channel.omega_r)?;
    let p_s_w = parse_tagged("power.p_s", &raw.power.p_s)?;
    let p_r_w = parse_tagged("power.p_r", &raw.power.p_r)?;
    let p_i_w = parse_tagged("power.p_i", &raw.power.p_i)?;

    let rician = RicianParams::new(k_factor, omega_r)
        .map_err(|e| ConfigError(format!("channel: {e}")))?;
    // The satellite-hop scale folds transmit power and noise together, so
    // the fading law is stated directly at the decision variable.
    let lambda_bar = p_s_w / sigma2_w;
    let sr = ShadowedRicianParams::new(raw.channel.b, raw.channel.m, raw.channel.omega, lambda_bar)
        .map_err(|e| ConfigError(format!("channel: {e}")))?;
    let interference = InterferenceParams::from_link(
        &rician,
        sigma2_w,
        p_r_w,
        p_i_w,
        raw.channel.lambda_i,
    )
    .map_err(|e| ConfigError(format!("channel/power: {e}")))?;

    let gamma_th = parse_tagged("thresholds.gamma_th", &raw.thresholds.gamma_th)?;
    let gamma_out = parse_tagged("thresholds.gamma_out", &raw.thresholds.gamma_out)?;
    let z = parse_tagged("thresholds.z", &raw.thresholds.z)?;

    let q = &raw.quadrature;
    let orders = QuadratureOrders { g: q.g, h: q.h, j: q.j, q: q.q };
    orders
        .validate()
        .map_err(|e| ConfigError(format!("quadrature: {e}")))?;

    if raw.mc.trials == 0 {
        return Err(ConfigError("mc.trials: must be at least 1".to_string()));
    }

    let o = &raw.optimizer;
    let p_s_max_w = parse_tagged("optimizer.p_s_max", &o.p_s_max)?;
    let p_r_max_w = parse_tagged("optimizer.p_r_max", &o.p_r_max)?;
    let opt_sigma2_w = parse_tagged("optimizer.sigma2", &o.sigma2)?;
    if !(opt_sigma2_w > 0.0) || !opt_sigma2_w.is_finite() {
        return Err(ConfigError(format!(
            "optimizer.sigma2: noise power must be positive and finite, got {opt_sigma2_w}"
        )));
    }
    if !(o.d0_km > 0.0) {
        return Err(ConfigError(format!(
            "optimizer.d0_km: distance must be positive, got {}",
            o.d0_km
        )));
    }
    for (name, v) in [("optimizer.gamma_sr", o.gamma_sr), ("optimizer.gamma_rd", o.gamma_rd)] {
        if let Some(v) = v {
            if !(v > 0.0) || !v.is_finite() {
                return Err(ConfigError(format!(
                    "{name}: gain must be positive and finite, got {v}"
                )));
            }
        }
    }

    Ok(Resolved {
        geom,
        sr,
        rician,
        interference,
        gamma_th,
        gamma_out,
        z,
        n1: raw.channel.n1,
        n2: raw.channel.n2,
        orders,
        trials: raw.mc.trials,
        seed: raw.mc.seed,
        optimizer: ResolvedOptimizer {
            d_sd_bits: o.d_sd_bits,
            b_s_hz: o.b_s_hz,
            b_r_hz: o.b_r_hz,
            t_total_s: o.t_total_s,
            p_s_max_w,
            p_r_max_w,
            d0_km: o.d0_km,
            sigma2_w: opt_sigma2_w,
            gamma_sr: o.gamma_sr,
            gamma_rd: o.gamma_rd,
        },
    })
}

// ---- Tests ----
