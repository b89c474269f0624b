//! Monte-Carlo oracle for every analytic quantity in the crate.
//!
//! Each trial owns a counter-based RNG stream derived from (seed, trial
//! index), so estimates are bit-identical for a fixed configuration no
//! matter how trials are partitioned across workers. The reduction is a
//! sum of Bernoulli counts, which is order-independent in exact integer
//! arithmetic.

use crate::analytic::cdf_z;
use crate::channels::{
    rician_cdf, sample_rayleigh_power, sample_rician_power, sample_shadowed_rician, sr_cdf,
    InterferenceParams, RicianParams, ShadowedRicianParams,
};
use crate::error::{Error, Result};
use crate::geometry::{
    d0_squared_pdf, interferer_distance, sample_interferer, sample_receiver, sample_satellite,
    GeometryParams,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Environment variable selecting the Monte-Carlo worker count.
pub const THREADS_ENV: &str = "SATLINK_THREADS";

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Which event a trial tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Relay-ground coverage, noise-limited: SNR >= gamma_th.
    CoverageNi,
    /// Relay-ground coverage with one dominant interferer: SIR >= gamma_th.
    CoverageIs,
    /// Satellite-relay outage: SNR < gamma_out.
    OutageSr,
    /// End-to-end outage, noise-limited second hop.
    E2eNi,
    /// End-to-end outage, interference-limited second hop.
    E2eIs,
    /// Position-free fading ratio: X/Y <= z.
    CdfZ,
}

impl Scenario {
    /// Stable kebab-case tag, matching the serialized form.
    pub fn tag(&self) -> &'static str {
        match self {
            Scenario::CoverageNi => "coverage-ni",
            Scenario::CoverageIs => "coverage-is",
            Scenario::OutageSr => "outage-sr",
            Scenario::E2eNi => "e2e-ni",
            Scenario::E2eIs => "e2e-is",
            Scenario::CdfZ => "cdf-z",
        }
    }
}

/// Continuous observable for histogram / KS validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    /// Squared satellite-relay distance.
    D0Sq,
    /// Satellite-hop SNR variable (scaled shadowed-Rician gain).
    LambdaS,
    /// Relay-ground Rician power gain.
    LambdaR,
    /// Fading ratio of serving power over scaled interference.
    Z,
}

impl Quantity {
    /// Parse a CLI/config tag.
    pub fn from_tag(tag: &str) -> Result<Quantity> {
        match tag.to_ascii_lowercase().as_str() {
            "d0-sq" | "d0_sq" => Ok(Quantity::D0Sq),
            "lambda-s" | "lambda_s" => Ok(Quantity::LambdaS),
            "lambda-r" | "lambda_r" => Ok(Quantity::LambdaR),
            "z" => Ok(Quantity::Z),
            other => Err(Error::Domain(format!(
                "unknown quantity tag `{other}`; expected d0-sq, lambda-s, lambda-r, or z"
            ))),
        }
    }
}

/// Trial count, seed, and scenario of a simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    /// Number of independent trials.
    pub trials: u64,
    /// Base seed; trial i uses stream i of this seed.
    pub seed: u64,
    /// Event under test.
    pub scenario: Scenario,
}

impl McConfig {
    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Domain("trial count must be at least 1".into()));
        }
        Ok(())
    }
}

/// Everything a trial may need. Scenario-irrelevant fields are ignored;
/// scenario-required ones are checked up front.
#[derive(Debug, Clone, Copy)]
pub struct McInputs<'a> {
    /// Node and satellite geometry.
    pub geom: &'a GeometryParams,
    /// Satellite-relay fading, for outage and end-to-end scenarios.
    pub sr: Option<&'a ShadowedRicianParams>,
    /// Relay-ground Rician fading, for noise-limited scenarios.
    pub rician: Option<&'a RicianParams>,
    /// Interference link budget, for SIR and ratio scenarios.
    pub interference: Option<&'a InterferenceParams>,
    /// Coverage threshold (linear).
    pub gamma_th: f64,
    /// Outage threshold (linear).
    pub gamma_out: f64,
    /// Relay-ground path-loss exponent.
    pub n2: f64,
    /// Ratio threshold for the cdf-z scenario.
    pub z_threshold: f64,
}

impl<'a> McInputs<'a> {
    /// Inputs with only geometry set; fill the rest per scenario.
    pub fn new(geom: &'a GeometryParams) -> Self {
        McInputs {
            geom,
            sr: None,
            rician: None,
            interference: None,
            gamma_th: 1.0,
            gamma_out: 1.0,
            n2: 2.0,
            z_threshold: 1.0,
        }
    }
}

/// A Bernoulli estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    /// Fraction of trials in which the scenario event occurred.
    pub mean: f64,
    /// sqrt(mean (1 - mean) / trials).
    pub std_error: f64,
    /// Trials actually run.
    pub trials: u64,
    /// Seed used.
    pub seed: u64,
}

/// A normalized histogram of a continuous observable plus its KS distance
/// from the analytic distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McHistogram {
    /// Observable that was sampled.
    pub quantity: Quantity,
    /// Bin edges, length bins + 1.
    pub edges: Vec<f64>,
    /// Normalized density per bin (integrates to 1).
    pub density: Vec<f64>,
    /// Exact Kolmogorov-Smirnov statistic against the analytic CDF.
    pub ks: f64,
    /// Trials run.
    pub trials: u64,
    /// Seed used.
    pub seed: u64,
}

// ---------------------------------------------------------------------------
// Worker pool
// ---------------------------------------------------------------------------

fn thread_pool(num_threads: Option<usize>) -> Result<Option<rayon::ThreadPool>> {
    let Some(n) = num_threads else {
        return Ok(None);
    };
    if n == 0 {
        return Err(Error::Domain(format!(
            "{THREADS_ENV} must be a positive integer"
        )));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map(Some)
        .map_err(|e| Error::Domain(format!("failed to build worker pool: {e}")))
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse::<usize>().map(Some).map_err(|_| {
            Error::Domain(format!(
                "{THREADS_ENV} must be a positive integer, got `{v}`"
            ))
        }),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Error::Domain(format!("{THREADS_ENV} is not readable: {e}"))),
    }
}

fn install<T: Send>(pool: &Option<rayon::ThreadPool>, f: impl FnOnce() -> T + Send) -> T {
    match pool {
        Some(p) => p.install(f),
        None => f(),
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

// ---------------------------------------------------------------------------
// Scenario validation
// ---------------------------------------------------------------------------

fn check_nonneg(scenario: Scenario, name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::Domain(format!(
            "scenario {}: {name} must be nonnegative and finite, got {v}",
            scenario.tag()
        )));
    }
    Ok(())
}

fn validate_inputs(scenario: Scenario, inp: &McInputs) -> Result<()> {
    let need = |present: bool, what: &str| -> Result<()> {
        if present {
            Ok(())
        } else {
            Err(Error::Unsupported(format!(
                "scenario {} requires {what}",
                scenario.tag()
            )))
        }
    };
    let need_n2 = |n2: f64| -> Result<()> {
        if n2.is_finite() && n2 > 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "scenario {}: path-loss exponent must be positive, got {n2}",
                scenario.tag()
            )))
        }
    };
    match scenario {
        Scenario::CoverageNi => {
            need(inp.rician.is_some(), "rician parameters")?;
            check_nonneg(scenario, "coverage threshold", inp.gamma_th)?;
            need_n2(inp.n2)
        }
        Scenario::CoverageIs => {
            need(inp.interference.is_some(), "interference parameters")?;
            check_nonneg(scenario, "coverage threshold", inp.gamma_th)?;
            need_n2(inp.n2)
        }
        Scenario::OutageSr => {
            need(inp.sr.is_some(), "shadowed-rician parameters")?;
            check_nonneg(scenario, "outage threshold", inp.gamma_out)
        }
        Scenario::E2eNi => {
            need(inp.sr.is_some(), "shadowed-rician parameters")?;
            need(inp.rician.is_some(), "rician parameters")?;
            check_nonneg(scenario, "coverage threshold", inp.gamma_th)?;
            check_nonneg(scenario, "outage threshold", inp.gamma_out)?;
            need_n2(inp.n2)
        }
        Scenario::E2eIs => {
            need(inp.sr.is_some(), "shadowed-rician parameters")?;
            need(inp.interference.is_some(), "interference parameters")?;
            check_nonneg(scenario, "coverage threshold", inp.gamma_th)?;
            check_nonneg(scenario, "outage threshold", inp.gamma_out)?;
            need_n2(inp.n2)
        }
        Scenario::CdfZ => {
            need(inp.interference.is_some(), "interference parameters")?;
            if !(inp.z_threshold > 0.0) || !inp.z_threshold.is_finite() {
                return Err(Error::Domain(format!(
                    "scenario cdf-z: ratio threshold must be positive, got {}",
                    inp.z_threshold
                )));
            }
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// Trials
// ---------------------------------------------------------------------------

// Draw orders are part of the determinism contract; changing them changes
// every estimate for a fixed seed.
//   coverage-ni: receiver, rician gain
//   coverage-is: receiver, interferer, serving gain, interference gain
//   outage-sr:   satellite, shadowed-rician gain
//   e2e-ni:      satellite, shadowed-rician gain, receiver, rician gain
//   e2e-is:      satellite, shadowed-rician gain, receiver, interferer,
//                serving gain, interference gain
//   cdf-z:       serving gain, interference gain
fn trial_hit(
    scenario: Scenario,
    seed: u64,
    trial: u64,
    inp: &McInputs,
    serving: &Option<RicianParams>,
) -> bool {
    let mut rng = trial_rng(seed, trial);
    match scenario {
        Scenario::CoverageNi => {
            let (_r, d) = sample_receiver(&mut rng, inp.geom);
            let lam = sample_rician_power(&mut rng, inp.rician.unwrap());
            lam >= inp.gamma_th * d.powf(inp.n2)
        }
        Scenario::CoverageIs => {
            let ip = inp.interference.unwrap();
            let (r_i, d) = sample_receiver(&mut rng, inp.geom);
            let (r_int, theta) = sample_interferer(&mut rng, inp.geom);
            let u = interferer_distance(r_i, r_int, theta);
            let x = sample_rician_power(&mut rng, serving.as_ref().unwrap());
            let y = sample_rayleigh_power(&mut rng, ip.gamma3());
            x / y * (u / d).powf(inp.n2) >= inp.gamma_th
        }
        Scenario::OutageSr => {
            let sr = inp.sr.unwrap();
            let (_rs, _th, d0) = sample_satellite(&mut rng, inp.geom);
            let lam = sr.lambda_bar * sample_shadowed_rician(&mut rng, sr);
            lam < inp.gamma_out * d0 * d0
        }
        Scenario::E2eNi => {
            let sr = inp.sr.unwrap();
            let (_rs, _th, d0) = sample_satellite(&mut rng, inp.geom);
            let lam_s = sr.lambda_bar * sample_shadowed_rician(&mut rng, sr);
            let (_r, d) = sample_receiver(&mut rng, inp.geom);
            let lam_r = sample_rician_power(&mut rng, inp.rician.unwrap());
            lam_s < inp.gamma_out * d0 * d0 || lam_r < inp.gamma_th * d.powf(inp.n2)
        }
        Scenario::E2eIs => {
            let sr = inp.sr.unwrap();
            let ip = inp.interference.unwrap();
            let (_rs, _th, d0) = sample_satellite(&mut rng, inp.geom);
            let lam_s = sr.lambda_bar * sample_shadowed_rician(&mut rng, sr);
            let (r_i, d) = sample_receiver(&mut rng, inp.geom);
            let (r_int, theta) = sample_interferer(&mut rng, inp.geom);
            let u = interferer_distance(r_i, r_int, theta);
            let x = sample_rician_power(&mut rng, serving.as_ref().unwrap());
            let y = sample_rayleigh_power(&mut rng, ip.gamma3());
            lam_s < inp.gamma_out * d0 * d0 || x / y * (u / d).powf(inp.n2) < inp.gamma_th
        }
        Scenario::CdfZ => {
            let ip = inp.interference.unwrap();
            let x = sample_rician_power(&mut rng, serving.as_ref().unwrap());
            let y = sample_rayleigh_power(&mut rng, ip.gamma3());
            x / y <= inp.z_threshold
        }
    }
}

fn serving_params(scenario: Scenario, inp: &McInputs) -> Result<Option<RicianParams>> {
    match scenario {
        Scenario::CoverageIs | Scenario::E2eIs | Scenario::CdfZ => {
            let ip = inp.interference.unwrap();
            Ok(Some(RicianParams::new(ip.k_factor, ip.omega_x)?))
        }
        _ => Ok(None),
    }
}

fn estimate_with_threads(
    config: &McConfig,
    inputs: &McInputs,
    num_threads: Option<usize>,
) -> Result<McEstimate> {
    config.validate()?;
    validate_inputs(config.scenario, inputs)?;
    let serving = serving_params(config.scenario, inputs)?;
    let pool = thread_pool(num_threads)?;
    let scenario = config.scenario;
    let seed = config.seed;
    let hits: u64 = install(&pool, || {
        (0..config.trials)
            .into_par_iter()
            .map(|i| trial_hit(scenario, seed, i, inputs, &serving) as u64)
            .sum()
    });
    let mean = hits as f64 / config.trials as f64;
    Ok(McEstimate {
        mean,
        std_error: (mean * (1.0 - mean) / config.trials as f64).sqrt(),
        trials: config.trials,
        seed,
    })
}

/// Estimate the probability of the configured scenario event.
///
/// Deterministic for a fixed (seed, trials) pair regardless of worker
/// count; set the `SATLINK_THREADS` environment variable to pin the pool
/// size, otherwise the process-global pool is used.
pub fn mc_estimate(config: &McConfig, inputs: &McInputs) -> Result<McEstimate> {
    estimate_with_threads(config, inputs, threads_from_env()?)
}

// ---------------------------------------------------------------------------
// Histograms and the KS statistic
// ---------------------------------------------------------------------------

/// Exact two-sided Kolmogorov-Smirnov statistic of `samples` against `cdf`.
/// Sorts the slice in place.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_unstable_by(|a, b| a.partial_cmp(b).expect("samples must not be NaN"));
    let n = samples.len() as f64;
    let mut worst = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        let below = (f - i as f64 / n).abs();
        let above = (f - (i + 1) as f64 / n).abs();
        worst = worst.max(below).max(above);
    }
    worst
}

/// Piecewise-linear CDF built by trapezoid accumulation of `pdf` over
/// [lo, hi], renormalized so the last knot is exactly 1.
fn grid_cdf(lo: f64, hi: f64, cells: usize, pdf: impl Fn(f64) -> f64) -> impl Fn(f64) -> f64 {
    let h = (hi - lo) / cells as f64;
    let mut cum = Vec::with_capacity(cells + 1);
    cum.push(0.0);
    let mut prev = pdf(lo);
    let mut acc = 0.0;
    for i in 1..=cells {
        let cur = pdf(lo + h * i as f64);
        acc += 0.5 * (prev + cur) * h;
        cum.push(acc);
        prev = cur;
    }
    let total = if acc > 0.0 { acc } else { 1.0 };
    move |x: f64| {
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        let pos = (x - lo) / h;
        let idx = (pos.floor() as usize).min(cells - 1);
        let frac = pos - idx as f64;
        ((cum[idx] + frac * (cum[idx + 1] - cum[idx])) / total).clamp(0.0, 1.0)
    }
}

fn draw_quantity(quantity: Quantity, seed: u64, trial: u64, inp: &McInputs,
                 serving: &Option<RicianParams>) -> f64 {
    let mut rng = trial_rng(seed, trial);
    match quantity {
        Quantity::D0Sq => {
            let (_rs, _th, d0) = sample_satellite(&mut rng, inp.geom);
            d0 * d0
        }
        Quantity::LambdaS => {
            let sr = inp.sr.unwrap();
            sr.lambda_bar * sample_shadowed_rician(&mut rng, sr)
        }
        Quantity::LambdaR => sample_rician_power(&mut rng, inp.rician.unwrap()),
        Quantity::Z => {
            let ip = inp.interference.unwrap();
            let x = sample_rician_power(&mut rng, serving.as_ref().unwrap());
            let y = sample_rayleigh_power(&mut rng, ip.gamma3());
            x / y
        }
    }
}

/// Sample a continuous observable, bin it, and measure the exact KS
/// distance from the analytic distribution.
///
/// Requires at least 10^4 trials; below that the KS noise floor makes the
/// comparison meaningless.
pub fn mc_histogram(
    config: &McConfig,
    quantity: Quantity,
    inputs: &McInputs,
    bins: usize,
) -> Result<McHistogram> {
    if config.trials < 10_000 {
        return Err(Error::Domain(format!(
            "histogram validation needs at least 10000 trials, got {}",
            config.trials
        )));
    }
    if bins == 0 {
        return Err(Error::Domain("histogram needs at least one bin".into()));
    }
    let need = |present: bool, what: &str| -> Result<()> {
        if present {
            Ok(())
        } else {
            Err(Error::Unsupported(format!(
                "quantity {quantity:?} requires {what}"
            )))
        }
    };
    let serving = match quantity {
        Quantity::D0Sq => None,
        Quantity::LambdaS => {
            need(inputs.sr.is_some(), "shadowed-rician parameters")?;
            None
        }
        Quantity::LambdaR => {
            need(inputs.rician.is_some(), "rician parameters")?;
            let k = inputs.rician.unwrap().k_factor;
            if 2.0 * k > 800.0 {
                return Err(Error::Unsupported(format!(
                    "Rice factor {k} too large for the reference CDF series"
                )));
            }
            None
        }
        Quantity::Z => {
            need(inputs.interference.is_some(), "interference parameters")?;
            let ip = inputs.interference.unwrap();
            Some(RicianParams::new(ip.k_factor, ip.omega_x)?)
        }
    };

    let pool = thread_pool(threads_from_env()?)?;
    let seed = config.seed;
    let mut samples: Vec<f64> = install(&pool, || {
        (0..config.trials)
            .into_par_iter()
            .map(|i| draw_quantity(quantity, seed, i, inputs, &serving))
            .collect()
    });

    let ks = match quantity {
        Quantity::D0Sq => {
            let geom = *inputs.geom;
            let s = geom.d0_support();
            let cdf = grid_cdf(s.d0_min_sq_km2, s.d0_max_sq_km2, 8192, move |x| {
                d0_squared_pdf(x, &geom)
            });
            ks_statistic(&mut samples, cdf)
        }
        Quantity::LambdaS => {
            let sr = *inputs.sr.unwrap();
            ks_statistic(&mut samples, move |x| sr_cdf(x, &sr))
        }
        Quantity::LambdaR => {
            let ric = *inputs.rician.unwrap();
            ks_statistic(&mut samples, move |x| {
                rician_cdf(x, &ric).expect("Rice factor prechecked")
            })
        }
        Quantity::Z => {
            let ip = *inputs.interference.unwrap();
            ks_statistic(&mut samples, move |x| {
                if !x.is_finite() {
                    1.0
                } else if x <= 0.0 {
                    0.0
                } else {
                    cdf_z(x, &ip).expect("positive finite ratio")
                }
            })
        }
    };

    // Bin the (now sorted) samples over their observed range.
    let lo = samples[0];
    let hi = {
        let raw = *samples.last().unwrap();
        if raw > lo {
            raw
        } else {
            lo + 1.0
        }
    };
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &x in &samples {
        let idx = (((x - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let n = config.trials as f64;
    let density = counts.iter().map(|&c| c as f64 / (n * width)).collect();
    let edges = (0..=bins).map(|i| lo + width * i as f64).collect();

    Ok(McHistogram {
        quantity,
        edges,
        density,
        ks,
        trials: config.trials,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::coverage_ni_exact;

    fn db(v: f64) -> f64 {
        10f64.powf(v / 10.0)
    }

    fn geom() -> GeometryParams {
        GeometryParams::new(
            5.0,
            20.0,
            30.0,
            6371.0,
            8371.0,
            6531.0,
            std::f64::consts::FRAC_PI_3,
            0.01,
        )
        .unwrap()
    }

    #[test]
    fn zero_threshold_coverage_is_certain() {
        let g = geom();
        let ric = RicianParams::new(0.1, db(15.0)).unwrap();
        let mut inputs = McInputs::new(&g);
        inputs.rician = Some(&ric);
        inputs.gamma_th = 0.0;
        let cfg = McConfig {
            trials: 10_000,
            seed: 1,
            scenario: Scenario::CoverageNi,
        };
        let est = mc_estimate(&cfg, &inputs).unwrap();
        assert_eq!(est.mean, 1.0, "positive gain always beats a zero threshold");
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn identical_seeds_are_bit_identical() {
        let g = geom();
        let ric = RicianParams::new(0.1, db(15.0)).unwrap();
        let mut inputs = McInputs::new(&g);
        inputs.rician = Some(&ric);
        inputs.gamma_th = 1.0;
        let cfg = McConfig {
            trials: 50_000,
            seed: 99,
            scenario: Scenario::CoverageNi,
        };
        let a = mc_estimate(&cfg, &inputs).unwrap();
        let b = mc_estimate(&cfg, &inputs).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits(), "same seed, same bits");
    }

    #[test]
    fn worker_count_does_not_change_the_estimate() {
        let g = geom();
        let ric = RicianParams::new(0.1, db(15.0)).unwrap();
        let ip = InterferenceParams::from_link(&ric, 1.0, db(1.0), db(1.0), 1.0).unwrap();
        let sr = ShadowedRicianParams::new(10.0, 2, 1.0, db(57.0)).unwrap();
        let mut inputs = McInputs::new(&g);
        inputs.rician = Some(&ric);
        inputs.interference = Some(&ip);
        inputs.sr = Some(&sr);
        for scenario in [
            Scenario::CoverageNi,
            Scenario::CoverageIs,
            Scenario::OutageSr,
            Scenario::E2eIs,
            Scenario::CdfZ,
        ] {
            let cfg = McConfig {
                trials: 30_000,
                seed: 7,
                scenario,
            };
            let one = estimate_with_threads(&cfg, &inputs, Some(1)).unwrap();
            let four = estimate_with_threads(&cfg, &inputs, Some(4)).unwrap();
            assert_eq!(
                one.mean.to_bits(),
                four.mean.to_bits(),
                "thread count changed the {} estimate",
                scenario.tag()
            );
        }
    }

    #[test]
    fn doubling_trials_shrinks_se_by_sqrt2() {
        let g = geom();
        let ric = RicianParams::new(0.1, db(15.0)).unwrap();
        let mut inputs = McInputs::new(&g);
        inputs.rician = Some(&ric);
        inputs.gamma_th = 1.0;
        let base = McConfig {
            trials: 40_000,
            seed: 5,
            scenario: Scenario::CoverageNi,
        };
        let double = McConfig {
            trials: 80_000,
            ..base
        };
        let a = mc_estimate(&base, &inputs).unwrap();
        let b = mc_estimate(&double, &inputs).unwrap();
        let ratio = b.std_error / a.std_error;
        let want = std::f64::consts::FRAC_1_SQRT_2;
        assert!(
            (ratio - want).abs() / want < 0.05,
            "SE ratio {ratio} should be 1/sqrt(2) within 5%"
        );
    }

    #[test]
    fn estimates_are_unbiased_across_seeds() {
        let g = geom();
        let ric = RicianParams::new(0.1, db(15.0)).unwrap();
        let truth = coverage_ni_exact(&g, &ric, 1.0, 2.0).unwrap().value;
        let mut inputs = McInputs::new(&g);
        inputs.rician = Some(&ric);
        inputs.gamma_th = 1.0;
        let mut in_band = 0;
        for seed in 0..20u64 {
            let cfg = McConfig {
                trials: 20_000,
                seed: 1000 + seed,
                scenario: Scenario::CoverageNi,
            };
            let est = mc_estimate(&cfg, &inputs).unwrap();
            if (est.mean - truth).abs() <= 3.0 * est.std_error {
                in_band += 1;
            }
        }
        assert!(
            in_band >= 18,
            "analytic value inside the 3-SE band in only {in_band}/20 runs"
        );
    }

    #[test]
    fn mismatched_parameters_are_rejected() {
        let g = geom();
        let inputs = McInputs::new(&g);
        let cfg = McConfig {
            trials: 100,
            seed: 0,
            scenario: Scenario::CoverageNi,
        };
        assert!(
            matches!(mc_estimate(&cfg, &inputs), Err(Error::Unsupported(_))),
            "coverage-ni without rician parameters must be rejected"
        );
        let cfg = McConfig {
            trials: 100,
            seed: 0,
            scenario: Scenario::CdfZ,
        };
        assert!(
            matches!(mc_estimate(&cfg, &inputs), Err(Error::Unsupported(_))),
            "cdf-z without interference parameters must be rejected"
        );
        let cfg = McConfig {
            trials: 0,
            seed: 0,
            scenario: Scenario::CoverageNi,
        };
        assert!(mc_estimate(&cfg, &inputs).is_err(), "zero trials rejected");
    }

    #[test]
    fn ks_statistic_known_values() {
        // Midpoint grid against the uniform CDF: every sample sits 1/(2n)
        // away from the empirical step on both sides.
        let n = 100usize;
        let mut samples: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let ks = ks_statistic(&mut samples, |x| x.clamp(0.0, 1.0));
        assert!(
            (ks - 0.5 / n as f64).abs() < 1e-12,
            "midpoint grid KS should be 1/(2n), got {ks}"
        );
        // Shifting every sample by 0.2 forces KS >= 0.2.
        let mut shifted: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64 + 0.2).collect();
        let ks = ks_statistic(&mut shifted, |x| x.clamp(0.0, 1.0));
        assert!(ks >= 0.2, "systematic shift must show up in KS, got {ks}");
    }

    #[test]
    fn histogram_d0_squared_matches_analytic_density() {
        let g = geom();
        let cfg = McConfig {
            trials: 40_000,
            seed: 11,
            scenario: Scenario::OutageSr,
        };
        let hist = mc_histogram(&cfg, Quantity::D0Sq, &McInputs::new(&g), 64).unwrap();
        assert!(
            hist.ks < 0.02,
            "d0^2 samples diverge from the analytic density: KS {}",
            hist.ks
        );
        let mass: f64 = hist
            .density
            .iter()
            .zip(hist.edges.windows(2))
            .map(|(d, e)| d * (e[1] - e[0]))
            .sum();
        assert!((mass - 1.0).abs() < 1e-9, "histogram mass {mass} should be 1");
    }

    #[test]
    fn histogram_lambda_s_matches_gain_cdf() {
        let g = geom();
        let sr = ShadowedRicianParams::new(0.5, 2, 1.0, 1.0).unwrap();
        let mut inputs = McInputs::new(&g);
        inputs.sr = Some(&sr);
        let cfg = McConfig {
            trials: 40_000,
            seed: 12,
            scenario: Scenario::OutageSr,
        };
        let hist = mc_histogram(&cfg, Quantity::LambdaS, &inputs, 64).unwrap();
        assert!(hist.ks < 0.02, "gain samples diverge: KS {}", hist.ks);
    }

    #[test]
    fn histogram_preconditions() {
        let g = geom();
        let cfg = McConfig {
            trials: 5_000,
            seed: 0,
            scenario: Scenario::OutageSr,
        };
        assert!(
            mc_histogram(&cfg, Quantity::D0Sq, &McInputs::new(&g), 32).is_err(),
            "too few trials for a meaningful KS comparison"
        );
        let cfg = McConfig {
            trials: 20_000,
            seed: 0,
            scenario: Scenario::OutageSr,
        };
        assert!(
            mc_histogram(&cfg, Quantity::LambdaS, &McInputs::new(&g), 32).is_err(),
            "lambda-s without fading parameters must be rejected"
        );
        assert!(
            mc_histogram(&cfg, Quantity::D0Sq, &McInputs::new(&g), 0).is_err(),
            "zero bins rejected"
        );
    }

    #[test]
    fn quantity_tags_round_trip() {
        assert_eq!(Quantity::from_tag("d0-sq").unwrap(), Quantity::D0Sq);
        assert_eq!(Quantity::from_tag("LAMBDA_S").unwrap(), Quantity::LambdaS);
        assert_eq!(Quantity::from_tag("z").unwrap(), Quantity::Z);
        assert!(Quantity::from_tag("bogus").is_err(), "unknown tag rejected");
    }
}
