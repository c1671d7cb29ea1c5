//! `aptsp`: a priori TSP solvers, evaluators, LP bounds, and certificate
//! verification behind one reproducible JSON-in/JSON-out binary.
//!
//! Exit codes: 0 success, 1 invalid input, 2 resource budget exceeded,
//! 3 certificate infeasible.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use aptsp_core::apriori::{self, solve_apriori, DepotAlgorithm, SamplingPolicy, SolveConfig};
use aptsp_core::eval;
use aptsp_core::lowerbound::{
    gen_mrr_lb_instance, gen_sampling_lb_instance, optimize_gamma_sigma, MrrLbParams,
    SamplingLbParams,
};
use aptsp_core::lp::{
    self, bound_from_primal, build_mrr_dual, build_mrr_lp, build_sampling_dual, build_sampling_lp,
    interval::parse_rational, verify_certificate, DualCertificate, MrrCertConfig, MrrLpConfig,
    SamplingCertConfig, SamplingLpConfig, Verdict,
};
use aptsp_core::{Error, Instance, MetricMode, Tour, TspKind};

const SCHEMA_VERSION: &str = "1";

#[derive(Parser)]
#[command(name = "aptsp", version, about = "a priori TSP toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for parallelizable inner operations (Monte-Carlo
    /// evaluation). Falls back to APTSP_THREADS, default 1.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an a priori tour.
    Solve(SolveArgs),
    /// Evaluate the expected cost of a tour.
    Eval(EvalArgs),
    /// Build, solve, or export the ratio-bound LPs.
    Bound(BoundArgs),
    /// Verify a dual certificate in exact rational arithmetic.
    Certify(CertifyArgs),
    /// Generate a lower-bound family instance.
    Gen(GenArgs),
    /// Evaluate the sampling lower-bound family analytically.
    Lb(LbArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Instance JSON file.
    #[arg(long)]
    input: PathBuf,
    /// Write the result JSON here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Algo::Auto)]
    algo: Algo,
    /// TSP subroutine.
    #[arg(long, default_value = "christofides")]
    tsp: String,
    /// Sampling policy: identity | power:<σ> | scaled:<σ>.
    #[arg(long, default_value = "power:0.663")]
    policy: String,
    /// Slack ε of the auto dispatch.
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Master-set size cap for the low-activity enumeration (default derived
    /// from the total activity and ε).
    #[arg(long)]
    n_max: Option<usize>,
    /// Declared guarantee of the depot algorithm (dispatch threshold 2ρ̂/ε).
    #[arg(long, default_value_t = 3.1)]
    rho_hat: f64,
    /// Depot algorithm used by auto dispatch.
    #[arg(long, value_enum, default_value_t = DepotAlgoArg::Sampling)]
    depot_algo: DepotAlgoArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Auto,
    Sampling,
    Derand,
    LowActivity,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DepotAlgoArg {
    Sampling,
    Derand,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    tour: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Exact)]
    method: Method,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Exact,
    MonteCarlo,
    BruteForce,
}

#[derive(Args)]
struct BoundArgs {
    /// LP family.
    #[arg(long)]
    family: Family,
    /// TSP guarantee α (sampling family), as a rational or decimal string.
    #[arg(long, default_value = "3/2")]
    alpha: String,
    /// Sampling exponent σ (sampling family).
    #[arg(long, default_value = "663/1000")]
    sigma: String,
    /// Bucket width parameter β.
    #[arg(long, default_value = "1/20")]
    beta: String,
    /// Truncation length N.
    #[arg(long, default_value_t = 200)]
    buckets: usize,
    /// Odd bucket-interval width a (mrr family).
    #[arg(long, default_value_t = 9)]
    interval: usize,
    /// Solve the primal internally and print value and ratio bound.
    #[arg(long)]
    solve: bool,
    /// Also solve the dual internally and print the duality gap.
    #[arg(long)]
    dual: bool,
    /// Export the primal LP in CPLEX format.
    #[arg(long)]
    export: Option<PathBuf>,
    /// Export the dual LP in CPLEX format.
    #[arg(long)]
    export_dual: Option<PathBuf>,
    /// Solve the dual and write a rational certificate here.
    #[arg(long)]
    emit_certificate: Option<PathBuf>,
    /// Safety factor sacrificed by the certificate (slack against solver
    /// roundoff).
    #[arg(long, default_value_t = lp::DEFAULT_SAFETY)]
    safety: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Sampling,
    Mrr,
}

#[derive(Args)]
struct CertifyArgs {
    /// Certificate JSON file.
    #[arg(long)]
    cert: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    /// Instance family.
    #[arg(long)]
    family: LbFamily,
    /// γ parameter (sampling-lb).
    #[arg(long, default_value_t = 1.623)]
    gamma: f64,
    /// Activation probability p with γ/p integral (sampling-lb).
    #[arg(long, default_value_t = 1.623 / 50.0)]
    p: f64,
    /// Customer count (sampling-lb).
    #[arg(long, default_value_t = 500)]
    n: usize,
    /// Group count (mrr-lb).
    #[arg(long, default_value_t = 3)]
    groups: usize,
    /// Group size (mrr-lb).
    #[arg(long, default_value_t = 2)]
    group_size: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LbFamily {
    SamplingLb,
    MrrLb,
}

#[derive(Args)]
struct LbArgs {
    /// TSP guarantee α of the sampling algorithm under attack.
    #[arg(long)]
    alpha: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli
        .threads
        .or_else(|| {
            std::env::var("APTSP_THREADS")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(1)
        .max(1);
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Eval(args) => cmd_eval(args, threads),
        Command::Bound(args) => cmd_bound(args),
        Command::Certify(args) => cmd_certify(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Lb(args) => cmd_lb(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = match err.downcast_ref::<Error>() {
                Some(Error::SizeLimit { .. } | Error::BudgetExceeded { .. }) => 2,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    Ok(serde_json::from_str(&text).map_err(Error::from)?)
}

fn emit(output: Option<&Path>, value: &impl Serialize) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    match output {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> anyhow::Result<ExitCode> {
    let inst: Instance = read_json(&args.input)?;
    let policy = SamplingPolicy::from_str(&args.policy)?;
    let tsp = TspKind::from_str(&args.tsp)?;
    let config = SolveConfig {
        epsilon: args.epsilon,
        policy,
        tsp,
        seed: args.seed,
        depot_algorithm: match args.depot_algo {
            DepotAlgoArg::Sampling => DepotAlgorithm::Sampling,
            DepotAlgoArg::Derand => DepotAlgorithm::Derandomized,
        },
        rho_hat: args.rho_hat,
    };
    let (algorithm, tour, expected_cost, trace) = match args.algo {
        Algo::Auto => {
            let outcome = solve_apriori(&inst, &config)?;
            (
                "auto",
                outcome.tour,
                outcome.expected_cost,
                serde_json::to_value(&outcome.trace).map_err(Error::from)?,
            )
        }
        Algo::Sampling => {
            let (tour, mrs) = apriori::run_sampling_algorithm(&inst, policy, tsp, args.seed)?;
            let cost = eval::expected_tour_cost_exact(&inst, &tour);
            (
                "sampling",
                tour,
                cost,
                json!({
                    "branch": "sampling",
                    "master_set": mrs.master_set,
                    "master_cost": mrs.master_cost,
                    "seed": args.seed,
                    "policy": policy.to_string(),
                }),
            )
        }
        Algo::Derand => {
            let result = apriori::derandomized_master_route(&inst, tsp)?;
            let cost = eval::expected_tour_cost_exact(&inst, &result.tour);
            (
                "derand",
                result.tour,
                cost,
                json!({
                    "branch": "derandomized",
                    "master_set": result.solution.master_set,
                    "estimator_trajectory": result.estimator_trajectory,
                    "lp_value": result.lp_value,
                }),
            )
        }
        Algo::LowActivity => {
            let n_max = args.n_max.unwrap_or_else(|| {
                apriori::low_activity_size_cap(inst.total_activity(), args.epsilon).min(inst.n())
            });
            let result = apriori::solve_low_activity(&inst, n_max)?;
            let cost = result.expected_cost;
            (
                "low-activity",
                result.tour,
                cost,
                json!({
                    "branch": "low-activity",
                    "master_set": result.master_set,
                    "n_max": n_max,
                }),
            )
        }
    };
    let result = json!({
        "schema_version": SCHEMA_VERSION,
        "algorithm": algorithm,
        "tsp": tsp.to_string(),
        "tour": tour,
        "exact_expected_cost": expected_cost,
        "trace": trace,
    });
    emit(args.output.as_deref(), &result)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_eval(args: EvalArgs, threads: usize) -> anyhow::Result<ExitCode> {
    let inst: Instance = read_json(&args.input)?;
    let tour: Tour = read_json(&args.tour)?;
    if !tour.is_permutation_of(inst.n()) {
        return Err(Error::invalid(format!("tour is not a permutation of 0..{}", inst.n())).into());
    }
    let report = match args.method {
        Method::Exact => eval::ExpectedCostReport {
            value: eval::expected_tour_cost_exact(&inst, &tour),
            method: eval::EvalMethod::Exact,
            stderr: None,
            samples: None,
        },
        Method::MonteCarlo => {
            eval::expected_cost_monte_carlo_threads(&inst, &tour, args.samples, args.seed, threads)?
        }
        Method::BruteForce => eval::ExpectedCostReport {
            value: eval::expected_cost_bruteforce(&inst, &tour)?,
            method: eval::EvalMethod::BruteForce,
            stderr: None,
            samples: None,
        },
    };
    let result = json!({
        "schema_version": SCHEMA_VERSION,
        "report": report,
    });
    emit(None, &result)?;
    Ok(ExitCode::SUCCESS)
}

fn rational_arg(name: &str, s: &str) -> anyhow::Result<(String, f64)> {
    let r = parse_rational(s)
        .ok_or_else(|| Error::invalid(format!("{name}: cannot parse {s:?} as a rational")))?;
    let f = aptsp_core::lp::interval::rational_to_f64(&r)
        .ok_or_else(|| Error::invalid(format!("{name}: out of f64 range")))?;
    Ok((s.to_string(), f))
}

fn cmd_bound(args: BoundArgs) -> anyhow::Result<ExitCode> {
    let (beta_s, beta) = rational_arg("beta", &args.beta)?;
    let mut out = json!({
        "schema_version": SCHEMA_VERSION,
        "family": match args.family { Family::Sampling => "sampling", Family::Mrr => "mrr" },
    });
    let (primal, dual_model, cert): (_, _, Option<DualCertificate>) = match args.family {
        Family::Sampling => {
            let (alpha_s, alpha) = rational_arg("alpha", &args.alpha)?;
            let (sigma_s, sigma) = rational_arg("sigma", &args.sigma)?;
            let config = SamplingLpConfig::new(alpha, sigma, beta, args.buckets)?;
            let primal = build_sampling_lp(&config);
            let dual = build_sampling_dual(&config);
            let cert_config = SamplingCertConfig {
                alpha: alpha_s,
                sigma: sigma_s,
                beta: beta_s,
                n_buckets: args.buckets,
            };
            let cert = if args.emit_certificate.is_some() {
                let solution = dual.solve()?;
                out["dual_value"] = json!(solution.value);
                Some(DualCertificate::Sampling(
                    lp::rationalize_sampling_certificate(
                        &dual,
                        &solution,
                        cert_config,
                        args.safety,
                    )?,
                ))
            } else {
                None
            };
            (primal, dual, cert)
        }
        Family::Mrr => {
            let config = MrrLpConfig::new(beta, args.buckets, args.interval)?;
            let primal = build_mrr_lp(&config);
            let dual = build_mrr_dual(&config);
            let cert_config = MrrCertConfig {
                beta: beta_s,
                n_buckets: args.buckets,
                interval_width: args.interval,
                offsets: None,
            };
            let cert = if args.emit_certificate.is_some() {
                let solution = dual.solve()?;
                out["dual_value"] = json!(solution.value);
                Some(DualCertificate::Mrr(lp::rationalize_mrr_certificate(
                    &dual,
                    &solution,
                    cert_config,
                    args.safety,
                )?))
            } else {
                None
            };
            (primal, dual, cert)
        }
    };
    if let Some(path) = &args.export {
        lp::write_lp(&primal, path)?;
        out["exported"] = json!(path.display().to_string());
    }
    if let Some(path) = &args.export_dual {
        lp::write_lp(&dual_model, path)?;
        out["exported_dual"] = json!(path.display().to_string());
    }
    if args.solve {
        let solution = primal.solve()?;
        out["primal_value"] = json!(solution.value);
        out["ratio_bound"] = json!(bound_from_primal(solution.value)?);
        if args.dual {
            let dual_solution = dual_model.solve()?;
            out["dual_value"] = json!(dual_solution.value);
            out["duality_gap"] = json!((solution.value - dual_solution.value).abs());
        }
    }
    if let (Some(path), Some(cert)) = (&args.emit_certificate, &cert) {
        std::fs::write(path, serde_json::to_string(cert).map_err(Error::from)?)?;
        out["certificate"] = json!(path.display().to_string());
    }
    emit(None, &out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_certify(args: CertifyArgs) -> anyhow::Result<ExitCode> {
    let cert: DualCertificate = read_json(&args.cert)?;
    let verdict = verify_certificate(&cert)?;
    let out = json!({
        "schema_version": SCHEMA_VERSION,
        "verdict": verdict,
    });
    emit(None, &out)?;
    match verdict {
        Verdict::Violation { .. } => Ok(ExitCode::from(3)),
        _ => Ok(ExitCode::SUCCESS),
    }
}

fn cmd_gen(args: GenArgs) -> anyhow::Result<ExitCode> {
    let (inst, mode) = match args.family {
        LbFamily::SamplingLb => {
            let params = SamplingLbParams::new(args.gamma, args.p, args.n)?;
            (gen_sampling_lb_instance(&params), MetricMode::Strict)
        }
        LbFamily::MrrLb => {
            let params = MrrLbParams::new(args.groups, args.group_size)?;
            (gen_mrr_lb_instance(&params), MetricMode::SemiMetric)
        }
    };
    let report = inst.validate(mode);
    if !report.ok() {
        return Err(Error::invalid(format!(
            "generated instance fails validation: {:?}",
            report.violations
        ))
        .into());
    }
    emit(args.output.as_deref(), &inst)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_lb(args: LbArgs) -> anyhow::Result<ExitCode> {
    if args.alpha < 1.0 {
        return Err(Error::invalid("alpha must be at least 1").into());
    }
    let (gamma, sigma, ratio) = optimize_gamma_sigma(args.alpha);
    let out = json!({
        "schema_version": SCHEMA_VERSION,
        "alpha": args.alpha,
        "gamma": gamma,
        "sigma": sigma,
        "ratio": ratio,
    });
    emit(None, &out)?;
    Ok(ExitCode::SUCCESS)
}
