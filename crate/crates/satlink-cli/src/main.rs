//! `satlink`: scenario-driven analysis of a satellite / aerial-relay /
//! ground downlink.
//!
//! Subcommands evaluate coverage, satellite-hop outage and end-to-end
//! outage, validate any of them against the built-in Monte-Carlo engine,
//! sweep a metric along one config axis, and solve the energy-efficiency
//! time/power allocation. Scenarios come from a TOML file (`--config`)
//! with built-in defaults; `--seed`, `--trials` and `--orders` override
//! file values, and `--print-config` dumps the effective configuration.
//!
//! Exit codes: 0 success, 2 configuration error, 3 infeasible
//! allocation, 4 validation failure (|z| > 3).

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use config::{ConfigError, RawConfig, Resolved};
use satlink_core::analytic::{self, Method, RdScenario};
use satlink_core::channels::{sample_rician_power, sample_shadowed_rician};
use satlink_core::montecarlo::{mc_estimate, McConfig, McInputs, Scenario};
use satlink_core::optimizer::{optimize, OptimizeOptions};
use satlink_core::{Error, LinkBudget, QuadratureOrders, RicianParams, ShadowedRicianParams};

// ---- Exit discipline ----

/// A failure with the process exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure { code: 2, message: e.to_string() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Infeasible { .. } => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

// ---- Command line ----

/// Output encoding of scalar reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Pretty-printed JSON object with stable key order.
    Json,
    /// One header row plus one data row, '.' decimal separator.
    Csv,
}

/// Relay-ground hop model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RdKind {
    /// Noise-limited hop with Rician fading.
    Ni,
    /// One dominant co-channel interferer; SIR statistics.
    Is,
}

/// Evaluation route for the noise-limited coverage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NiMethod {
    /// Adaptive integration of the exact Marcum-Q kernel.
    Exact,
    /// Closed form built on the exponential kernel fit.
    Approx,
}

/// Scenario tags accepted by `validate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ValidateTarget {
    CoverageNi,
    CoverageIs,
    OutageSr,
    E2eNi,
    E2eIs,
    CdfZ,
}

/// Metrics accepted by `sweep`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepMetric {
    CoverageNi,
    CoverageIs,
    OutageSr,
    E2eNi,
    E2eIs,
    /// Energy efficiency of the optimized allocation, bits per joule.
    Optimize,
}

fn metric_tag(metric: SweepMetric) -> &'static str {
    match metric {
        SweepMetric::CoverageNi => "coverage-ni",
        SweepMetric::CoverageIs => "coverage-is",
        SweepMetric::OutageSr => "outage-sr",
        SweepMetric::E2eNi => "e2e-ni",
        SweepMetric::E2eIs => "e2e-is",
        SweepMetric::Optimize => "eta-bits-per-joule",
    }
}

#[derive(Parser)]
#[command(
    name = "satlink",
    version,
    about = "Coverage, outage and allocation analysis of a satellite-relay-ground link"
)]
struct Cli {
    /// TOML scenario file; built-in defaults when omitted.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Print the fully resolved effective config (overrides applied) and exit.
    #[arg(long, global = true)]
    print_config: bool,

    /// Override mc.seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override mc.trials.
    #[arg(long, global = true)]
    trials: Option<u64>,

    /// Override every quadrature order with a single node count.
    #[arg(long, global = true)]
    orders: Option<usize>,

    /// Output format of scalar reports (sweep always prints CSV).
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Coverage probability of the relay-ground hop.
    Coverage {
        /// Hop model.
        #[arg(long, value_enum, default_value_t = RdKind::Ni)]
        scenario: RdKind,
        /// Route for the noise-limited hop (ignored for `is`).
        #[arg(long, value_enum, default_value_t = NiMethod::Approx)]
        method: NiMethod,
    },
    /// Outage probability of the satellite-relay hop.
    Outage,
    /// End-to-end outage of the decode-and-forward chain.
    E2e {
        /// Relay-ground hop model.
        #[arg(long, value_enum, default_value_t = RdKind::Ni)]
        scenario: RdKind,
    },
    /// Compare the analytic value against a Monte-Carlo estimate.
    ///
    /// Exits 4 when the z-score magnitude exceeds 3.
    Validate {
        /// Which quantity to validate.
        #[arg(long, value_enum)]
        scenario: ValidateTarget,
    },
    /// Evaluate a metric along one numeric config axis; prints CSV.
    Sweep {
        /// Dotted config path, e.g. channel.omega_r or geometry.h1_km.
        /// Tagged fields are swept in the unit their tag declares.
        #[arg(long)]
        axis: String,
        /// First axis value.
        #[arg(long)]
        start: f64,
        /// Last axis value.
        #[arg(long)]
        stop: f64,
        /// Number of grid points (endpoints included).
        #[arg(long)]
        points: usize,
        /// Metric evaluated at each grid point.
        #[arg(long, value_enum)]
        metric: SweepMetric,
        /// Route when the metric is coverage-ni or e2e-ni.
        #[arg(long, value_enum, default_value_t = NiMethod::Approx)]
        method: NiMethod,
    },
    /// Energy-efficiency time/power allocation of the two hops.
    ///
    /// Exits 3 when no feasible split of the frame exists, printing the
    /// minimum time of each hop.
    Optimize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    let mut raw = config::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        raw.mc.seed = seed;
    }
    if let Some(trials) = cli.trials {
        raw.mc.trials = trials;
    }
    if let Some(n) = cli.orders {
        raw.quadrature = config::RawQuadrature { g: n, h: n, j: n, q: n };
    }

    if cli.print_config {
        let text = toml::to_string_pretty(&raw)
            .map_err(|e| Failure::config(format!("config error: cannot render config: {e}")))?;
        print!("{text}");
        return Ok(ExitCode::SUCCESS);
    }
    let Some(command) = cli.command else {
        return Err(Failure::config(
            "config error: a subcommand is required (or --print-config); see --help",
        ));
    };

    match command {
        Command::Coverage { scenario, method } => {
            let res = config::resolve(&raw)?;
            cmd_coverage(&res, scenario, method, cli.format)
        }
        Command::Outage => {
            let res = config::resolve(&raw)?;
            cmd_outage(&res, cli.format)
        }
        Command::E2e { scenario } => {
            let res = config::resolve(&raw)?;
            cmd_e2e(&res, scenario, cli.format)
        }
        Command::Validate { scenario } => {
            let res = config::resolve(&raw)?;
            cmd_validate(&res, scenario, cli.format)
        }
        Command::Sweep { axis, start, stop, points, metric, method } => {
            cmd_sweep(&raw, &axis, start, stop, points, metric, method)
        }
        Command::Optimize => {
            let res = config::resolve(&raw)?;
            cmd_optimize(&res, cli.format)
        }
    }
}

// ---- Report records ----

/// Scalar probability report shared by coverage, outage and e2e.
#[derive(Serialize)]
struct ProbabilityReport {
    command: &'static str,
    scenario: &'static str,
    threshold_linear: f64,
    value: f64,
    raw_value: f64,
    method: Method,
    orders: Option<QuadratureOrders>,
}

/// Analytic-vs-MC comparison table.
#[derive(Serialize)]
struct ValidateReport {
    command: &'static str,
    scenario: &'static str,
    analytic: f64,
    mc_mean: f64,
    std_error: f64,
    z_score: f64,
    trials: u64,
    seed: u64,
    pass: bool,
}

/// Optimized allocation with its audit trail.
#[derive(Serialize)]
struct OptimizeReport {
    command: &'static str,
    gamma_sr_per_w: f64,
    gamma_rd_per_w: f64,
    gains_drawn: bool,
    t_s_s: f64,
    t_r_s: f64,
    p_s_w: f64,
    p_r_w: f64,
    eta_bits_per_joule: f64,
    iterations: usize,
    converged: bool,
    lambda_final: f64,
    lambda_trace: Vec<f64>,
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::config(format!("cannot serialize report: {e}")))?;
    println!("{text}");
    Ok(())
}

fn method_tag(m: Method) -> &'static str {
    match m {
        Method::ExactIntegral => "exact-integral",
        Method::ClosedApprox => "closed-approx",
        Method::Quadrature => "quadrature",
    }
}

fn orders_csv(o: Option<QuadratureOrders>) -> String {
    match o {
        Some(q) => format!("{},{},{},{}", q.g, q.h, q.j, q.q),
        None => ",,,".to_string(),
    }
}

fn emit_probability(format: Format, r: &ProbabilityReport) -> Result<(), Failure> {
    match format {
        Format::Json => print_json(r),
        Format::Csv => {
            println!("command,scenario,threshold_linear,value,raw_value,method,g,h,j,q");
            println!(
                "{},{},{},{},{},{},{}",
                r.command,
                r.scenario,
                r.threshold_linear,
                r.value,
                r.raw_value,
                method_tag(r.method),
                orders_csv(r.orders)
            );
            Ok(())
        }
    }
}

// ---- Subcommands ----

fn cmd_coverage(
    res: &Resolved,
    kind: RdKind,
    method: NiMethod,
    format: Format,
) -> Result<ExitCode, Failure> {
    let (scenario, r) = match kind {
        RdKind::Ni => match method {
            NiMethod::Exact => (
                "ni-exact",
                analytic::coverage_ni_exact(&res.geom, &res.rician, res.gamma_th, res.n2)?,
            ),
            NiMethod::Approx => (
                "ni-approx",
                analytic::coverage_ni_approx(&res.geom, &res.rician, res.gamma_th, res.n2)?,
            ),
        },
        RdKind::Is => (
            "is",
            analytic::coverage_interference(
                &res.geom,
                &res.interference,
                res.gamma_th,
                res.n2,
                &res.orders,
            )?,
        ),
    };
    let report = ProbabilityReport {
        command: "coverage",
        scenario,
        threshold_linear: r.threshold,
        value: r.value,
        raw_value: r.raw_value,
        method: r.method,
        orders: r.orders,
    };
    emit_probability(format, &report)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_outage(res: &Resolved, format: Format) -> Result<ExitCode, Failure> {
    let r = analytic::outage_sr(&res.geom, &res.sr, res.gamma_out, &res.orders)?;
    let report = ProbabilityReport {
        command: "outage",
        scenario: "sr",
        threshold_linear: r.threshold,
        value: r.value,
        raw_value: r.raw_value,
        method: r.method,
        orders: r.orders,
    };
    emit_probability(format, &report)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_e2e(res: &Resolved, kind: RdKind, format: Format) -> Result<ExitCode, Failure> {
    let (scenario, rd) = match kind {
        RdKind::Ni => ("ni", RdScenario::NonInterference(&res.rician)),
        RdKind::Is => ("is", RdScenario::Interference(&res.interference)),
    };
    let r = analytic::e2e_outage(
        &res.geom,
        &res.sr,
        rd,
        res.gamma_th,
        res.gamma_out,
        res.n2,
        &res.orders,
    )?;
    let report = ProbabilityReport {
        command: "e2e",
        scenario,
        threshold_linear: r.threshold,
        value: r.value,
        raw_value: r.raw_value,
        method: r.method,
        orders: r.orders,
    };
    emit_probability(format, &report)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(
    res: &Resolved,
    target: ValidateTarget,
    format: Format,
) -> Result<ExitCode, Failure> {
    let (scenario, analytic_value) = match target {
        ValidateTarget::CoverageNi => (
            Scenario::CoverageNi,
            analytic::coverage_ni_exact(&res.geom, &res.rician, res.gamma_th, res.n2)?.value,
        ),
        ValidateTarget::CoverageIs => (
            Scenario::CoverageIs,
            analytic::coverage_interference(
                &res.geom,
                &res.interference,
                res.gamma_th,
                res.n2,
                &res.orders,
            )?
            .value,
        ),
        ValidateTarget::OutageSr => (
            Scenario::OutageSr,
            analytic::outage_sr(&res.geom, &res.sr, res.gamma_out, &res.orders)?.value,
        ),
        ValidateTarget::E2eNi => (
            Scenario::E2eNi,
            analytic::e2e_outage(
                &res.geom,
                &res.sr,
                RdScenario::NonInterference(&res.rician),
                res.gamma_th,
                res.gamma_out,
                res.n2,
                &res.orders,
            )?
            .value,
        ),
        ValidateTarget::E2eIs => (
            Scenario::E2eIs,
            analytic::e2e_outage(
                &res.geom,
                &res.sr,
                RdScenario::Interference(&res.interference),
                res.gamma_th,
                res.gamma_out,
                res.n2,
                &res.orders,
            )?
            .value,
        ),
        ValidateTarget::CdfZ => (Scenario::CdfZ, analytic::cdf_z(res.z, &res.interference)?),
    };

    let mut inputs = McInputs::new(&res.geom);
    inputs.sr = Some(&res.sr);
    inputs.rician = Some(&res.rician);
    inputs.interference = Some(&res.interference);
    inputs.gamma_th = res.gamma_th;
    inputs.gamma_out = res.gamma_out;
    inputs.n2 = res.n2;
    inputs.z_threshold = res.z;
    let est = mc_estimate(
        &McConfig { trials: res.trials, seed: res.seed, scenario },
        &inputs,
    )?;

    let z_score = if est.std_error > 0.0 {
        (est.mean - analytic_value) / est.std_error
    } else if est.mean == analytic_value {
        0.0
    } else {
        f64::INFINITY
    };
    let pass = z_score.abs() <= 3.0;

    let report = ValidateReport {
        command: "validate",
        scenario: scenario.tag(),
        analytic: analytic_value,
        mc_mean: est.mean,
        std_error: est.std_error,
        z_score,
        trials: est.trials,
        seed: est.seed,
        pass,
    };
    match format {
        Format::Json => print_json(&report)?,
        Format::Csv => {
            println!("command,scenario,analytic,mc_mean,std_error,z_score,trials,seed,pass");
            println!(
                "{},{},{},{},{},{},{},{},{}",
                report.command,
                report.scenario,
                report.analytic,
                report.mc_mean,
                report.std_error,
                report.z_score,
                report.trials,
                report.seed,
                report.pass
            );
        }
    }
    if pass {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "validation failure: |z| = {:.3} > 3 (analytic {}, mc {})",
            z_score.abs(),
            analytic_value,
            est.mean
        );
        Ok(ExitCode::from(4))
    }
}

/// Channel gains for the allocation problem. When the config gives both
/// directly they are used as-is; otherwise one realization of each hop's
/// fading is drawn with the scenario seed and scaled by noise and
/// path loss, so a fixed seed pins the whole problem.
fn resolve_gains(res: &Resolved) -> (f64, f64, bool) {
    match (res.optimizer.gamma_sr, res.optimizer.gamma_rd) {
        (Some(sr), Some(rd)) => (sr, rd, false),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(res.seed);
            let unit_sr = ShadowedRicianParams::new(res.sr.b, res.sr.m, res.sr.omega, 1.0)
                .expect("fading shape already validated");
            let gain_sr = sample_shadowed_rician(&mut rng, &unit_sr);
            let unit_rd = RicianParams::new(res.rician.k_factor, 1.0)
                .expect("Rice factor already validated");
            let gain_rd = sample_rician_power(&mut rng, &unit_rd);
            let d_i_km = (res.geom.h1_km.powi(2) + res.geom.l_km.powi(2)).sqrt();
            let noise = res.optimizer.sigma2_w;
            let gamma_sr = gain_sr / (noise * res.optimizer.d0_km.powf(res.n1));
            let gamma_rd = gain_rd / (noise * d_i_km.powf(res.n2));
            (gamma_sr, gamma_rd, true)
        }
    }
}

fn cmd_optimize(res: &Resolved, format: Format) -> Result<ExitCode, Failure> {
    let (gamma_sr, gamma_rd, gains_drawn) = resolve_gains(res);
    let o = &res.optimizer;
    let budget = LinkBudget::new(
        o.d_sd_bits,
        o.b_s_hz,
        o.b_r_hz,
        o.t_total_s,
        o.p_s_max_w,
        o.p_r_max_w,
        gamma_sr,
        gamma_rd,
    )
    .map_err(|e| Failure::config(format!("optimizer: {e}")))?;
    let alloc = optimize(&budget, &OptimizeOptions::default())?;

    let report = OptimizeReport {
        command: "optimize",
        gamma_sr_per_w: gamma_sr,
        gamma_rd_per_w: gamma_rd,
        gains_drawn,
        t_s_s: alloc.t_s_s,
        t_r_s: alloc.t_r_s,
        p_s_w: alloc.p_s_w,
        p_r_w: alloc.p_r_w,
        eta_bits_per_joule: alloc.eta_bits_per_joule,
        iterations: alloc.iterations,
        converged: alloc.converged,
        lambda_final: *alloc.lambda_trace.last().unwrap_or(&0.0),
        lambda_trace: alloc.lambda_trace.clone(),
    };
    match format {
        Format::Json => print_json(&report)?,
        Format::Csv => {
            println!(
                "command,gamma_sr_per_w,gamma_rd_per_w,gains_drawn,t_s_s,t_r_s,p_s_w,p_r_w,\
                 eta_bits_per_joule,iterations,converged,lambda_final"
            );
            println!(
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                report.command,
                report.gamma_sr_per_w,
                report.gamma_rd_per_w,
                report.gains_drawn,
                report.t_s_s,
                report.t_r_s,
                report.p_s_w,
                report.p_r_w,
                report.eta_bits_per_joule,
                report.iterations,
                report.converged,
                report.lambda_final
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn eval_metric(res: &Resolved, metric: SweepMetric, method: NiMethod) -> Result<f64, Failure> {
    let v = match metric {
        SweepMetric::CoverageNi => match method {
            NiMethod::Exact => {
                analytic::coverage_ni_exact(&res.geom, &res.rician, res.gamma_th, res.n2)?.value
            }
            NiMethod::Approx => {
                analytic::coverage_ni_approx(&res.geom, &res.rician, res.gamma_th, res.n2)?.value
            }
        },
        SweepMetric::CoverageIs => {
            analytic::coverage_interference(
                &res.geom,
                &res.interference,
                res.gamma_th,
                res.n2,
                &res.orders,
            )?
            .value
        }
        SweepMetric::OutageSr => {
            analytic::outage_sr(&res.geom, &res.sr, res.gamma_out, &res.orders)?.value
        }
        SweepMetric::E2eNi => {
            analytic::e2e_outage(
                &res.geom,
                &res.sr,
                RdScenario::NonInterference(&res.rician),
                res.gamma_th,
                res.gamma_out,
                res.n2,
                &res.orders,
            )?
            .value
        }
        SweepMetric::E2eIs => {
            analytic::e2e_outage(
                &res.geom,
                &res.sr,
                RdScenario::Interference(&res.interference),
                res.gamma_th,
                res.gamma_out,
                res.n2,
                &res.orders,
            )?
            .value
        }
        SweepMetric::Optimize => {
            let (gamma_sr, gamma_rd, _) = resolve_gains(res);
            let o = &res.optimizer;
            let budget = LinkBudget::new(
                o.d_sd_bits,
                o.b_s_hz,
                o.b_r_hz,
                o.t_total_s,
                o.p_s_max_w,
                o.p_r_max_w,
                gamma_sr,
                gamma_rd,
            )
            .map_err(|e| Failure::config(format!("optimizer: {e}")))?;
            optimize(&budget, &OptimizeOptions::default())?.eta_bits_per_joule
        }
    };
    Ok(v)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    raw: &RawConfig,
    axis: &str,
    start: f64,
    stop: f64,
    points: usize,
    metric: SweepMetric,
    method: NiMethod,
) -> Result<ExitCode, Failure> {
    if points == 0 {
        return Err(Failure::config("config error: sweep needs at least one point"));
    }
    if !start.is_finite() || !stop.is_finite() {
        return Err(Failure::config("config error: sweep endpoints must be finite"));
    }
    println!("{axis},{}", metric_tag(metric));
    for i in 0..points {
        let x = if points == 1 {
            start
        } else {
            start + (stop - start) * i as f64 / (points - 1) as f64
        };
        let mut point = raw.clone();
        config::apply_axis(&mut point, axis, x)?;
        let res = config::resolve(&point)?;
        let value = eval_metric(&res, metric, method)?;
        println!("{x},{value}");
    }
    Ok(ExitCode::SUCCESS)
}
