//! Command-line experiment runner.
//!
//! Subcommands: `verify-kernel`, `simulate`, `estimate`, `risk-curve`,
//! `predict-rate`. Every command reads one JSON config (see
//! [`fundeconv::config`]) and writes its outputs under the config's
//! `out_dir`; flags override config keys. Exit codes: 0 success,
//! 1 computation failure, 2 usage or config error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fundeconv::config::ExperimentConfig;
use fundeconv::error::Error;
use fundeconv::estimator::{self, PlanSpec};
use fundeconv::io::{self, Provenance};
use fundeconv::meyer::MeyerBasis;
use fundeconv::model;
use fundeconv::risk::{self, SlopeAxis};
use fundeconv::rng::RngSpec;

#[derive(Parser)]
#[command(name = "fundeconv", version, about = "Periodic functional deconvolution experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config's replicate count.
    #[arg(long)]
    replicates: Option<u64>,
    /// Override the threshold constant d (regular) / d* (adaptive).
    #[arg(long)]
    d: Option<f64>,
    /// Override the threshold regime.
    #[arg(long, value_parser = ["auto", "regular", "super", "adaptive"])]
    regime: Option<String>,
    /// Inflate the adaptive threshold constant by ln ln n.
    #[arg(long)]
    loglog_inflation: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check the kernel's declared decay envelope and band statistics.
    VerifyKernel(CommonArgs),
    /// Draw one observation and write it as CSV.
    Simulate(CommonArgs),
    /// Estimate from an observation file; writes estimate, grid, plan.
    Estimate {
        #[command(flatten)]
        common: CommonArgs,
        /// Observation CSV produced by `simulate`.
        #[arg(long)]
        obs: PathBuf,
    },
    /// Monte Carlo risk over the config's n grid, with a slope fit.
    RiskCurve(CommonArgs),
    /// Write the theoretical rate prediction for the configured pair.
    PredictRate(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, result) = match &cli.command {
        Command::VerifyKernel(c) => (c, run(c, cmd_verify_kernel)),
        Command::Simulate(c) => (c, run(c, cmd_simulate)),
        Command::Estimate { common, obs } => {
            let obs = obs.clone();
            (common, run(common, move |ctx| cmd_estimate(ctx, &obs)))
        }
        Command::RiskCurve(c) => (c, run(c, cmd_risk_curve)),
        Command::PredictRate(c) => (c, run(c, cmd_predict_rate)),
    };
    let _ = common;
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

enum CliError {
    /// Bad invocation or config: exit 2.
    Usage(String),
    /// The computation itself failed: exit 1.
    Compute(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parameter(_) | Error::Precondition(_) | Error::Hypothesis(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Compute(other.to_string()),
        }
    }
}

struct Ctx {
    cfg: ExperimentConfig,
    prov: Provenance,
    out_dir: PathBuf,
}

fn run(common: &CommonArgs, f: impl FnOnce(&Ctx) -> Result<(), CliError>) -> Result<(), CliError> {
    let text = fs::read_to_string(&common.config)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", common.config.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    // flags win over config keys
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.out_dir = out.display().to_string();
    }
    if let Some(r) = common.replicates {
        cfg.replicates = r;
    }
    if let Some(d) = common.d {
        cfg.estimator.d = Some(d);
    }
    if let Some(regime) = &common.regime {
        cfg.estimator.regime = regime.clone();
    }
    if common.loglog_inflation {
        cfg.estimator.loglog_inflation = true;
    }
    cfg.validate()?;
    let prov = Provenance {
        config_sha256: cfg.sha256(),
        seed: cfg.seed,
    };
    let out_dir = PathBuf::from(&cfg.out_dir);
    fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", out_dir.display())))?;
    f(&Ctx { cfg, prov, out_dir })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::Compute(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn write_json<T: serde::Serialize>(
    ctx: &Ctx,
    path: &Path,
    payload: &T,
) -> Result<(), CliError> {
    // every JSON report carries the resolved config verbatim plus its hash
    let doc = serde_json::json!({
        "tool_version": io::TOOL_VERSION,
        "config_sha256": ctx.prov.config_sha256,
        "seed": ctx.prov.seed,
        "config": ctx.cfg,
        "result": payload,
    });
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| CliError::Compute(format!("serialization failed: {e}")))?;
    text.push('\n');
    write_file(path, &text)
}

fn cmd_verify_kernel(ctx: &Ctx) -> Result<(), CliError> {
    let kernel = ctx.cfg.build_kernel()?;
    let report = kernel.verify_decay(2, 64)?;
    // band-statistic growth alongside the envelope check
    let basis = MeyerBasis::new(ctx.cfg.estimator.basis_j_max.min(8));
    let mut growth = Vec::new();
    for j in 2..=5u32 {
        growth.push(serde_json::json!({
            "j": j,
            "log_delta1": kernel.log_delta_stat(&basis, 1, j)?,
            "log_delta2": kernel.log_delta_stat(&basis, 2, j)?,
        }));
    }
    let payload = serde_json::json!({
        "decay": report,
        "delta_growth": growth,
    });
    write_json(ctx, &ctx.out_dir.join("kernel_report.json"), &payload)?;
    if !report.pass {
        return Err(CliError::Compute(format!(
            "kernel '{}' failed its decay verification (see kernel_report.json)",
            kernel.name()
        )));
    }
    Ok(())
}

fn n_for_single_shot(ctx: &Ctx) -> Result<f64, CliError> {
    ctx.cfg
        .n
        .or_else(|| ctx.cfg.n_grid.last().copied())
        .ok_or_else(|| CliError::Usage("config needs 'n' (or a non-empty 'n_grid')".into()))
}

fn cmd_simulate(ctx: &Ctx) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let kernel = cfg.build_kernel()?;
    let truth = risk::make_test_function(&cfg.test_function_kind()?, &cfg.besov_params()?, cfg.seed)?;
    let n = n_for_single_shot(ctx)?;
    // Simulate only the band the configured plan can use: frequencies beyond
    // it carry unbounded noise for super-smooth kernels and would be
    // discarded by the estimator anyway.
    let basis = MeyerBasis::new(cfg.estimator.basis_j_max);
    let plan = estimator::make_plan(&kernel, &basis, n, &cfg.plan_spec()?)?;
    let truth = truth.truncated(truth.mmax().min(plan.required_mmax()));
    let seed = RngSpec::new(cfg.seed, 0);
    let text = if kernel.design().is_discrete() {
        let channels = kernel.design().channels() as f64;
        let grid = n / channels;
        if grid.fract() != 0.0 {
            return Err(CliError::Usage(format!(
                "n = {n} is not divisible by the {channels} channels"
            )));
        }
        let obs = model::simulate_discrete(&truth, &kernel, grid as usize, seed)?;
        io::write_discrete_observation(&obs, &ctx.prov)
    } else {
        let obs = model::simulate_continuous(&truth, &kernel, n, seed)?;
        io::write_continuous_observation(&obs, &ctx.prov)
    };
    write_file(&ctx.out_dir.join("observation.csv"), &text)
}

fn cmd_estimate(ctx: &Ctx, obs_path: &Path) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let obs_text = fs::read_to_string(obs_path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", obs_path.display())))?;
    let kernel = cfg.build_kernel()?;
    let basis = MeyerBasis::new(cfg.estimator.basis_j_max);
    let spec: PlanSpec = cfg.plan_spec()?;

    let (fhat, n) = match io::observation_kind(&obs_text)?.as_str() {
        "continuous" => {
            let obs = io::read_continuous_observation(&obs_text)?;
            (obs.fhat.clone(), obs.n)
        }
        "discrete" => {
            let obs = io::read_discrete_observation(&obs_text)?;
            let n = obs.n();
            let plan = estimator::make_plan(&kernel, &basis, n, &spec)?;
            (obs.estimate_fm(&kernel, plan.required_mmax())?, n)
        }
        other => {
            return Err(CliError::Usage(format!(
                "unsupported observation kind '{other}'"
            )))
        }
    };

    let plan = estimator::make_plan(&kernel, &basis, n, &spec)?;
    let estimate = estimator::estimate(&fhat, &plan, &basis)?;
    write_file(
        &ctx.out_dir.join("estimate.csv"),
        &io::write_series(&estimate, "estimate", &ctx.prov),
    )?;
    let grid_n = cfg.grid_points.max(2 * estimate.mmax() as usize + 1);
    let values = estimate.evaluate_on_grid(grid_n, 1e-10)?;
    write_file(&ctx.out_dir.join("estimate_grid.csv"), &io::write_grid(&values, &ctx.prov))?;
    write_json(ctx, &ctx.out_dir.join("plan.json"), &plan)
}

fn cmd_risk_curve(ctx: &Ctx) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    if cfg.n_grid.len() < 2 {
        return Err(CliError::Usage(
            "risk-curve needs an 'n_grid' with at least two sample sizes".into(),
        ));
    }
    let span = cfg.n_grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        / cfg.n_grid.iter().cloned().fold(f64::INFINITY, f64::min);
    if span < 100.0 {
        return Err(CliError::Usage(format!(
            "risk-curve n_grid must span >= 2 decades for the rate fit (got a factor {span:.3})"
        )));
    }
    let kernel = cfg.build_kernel()?;
    let basis = MeyerBasis::new(cfg.estimator.basis_j_max);
    let spec = cfg.plan_spec()?;
    let bp = cfg.besov_params()?;
    let truth = risk::make_test_function(&cfg.test_function_kind()?, &bp, cfg.seed)?;
    let prediction = risk::predicted_rate(&bp, &kernel.decay())?;
    let mut curve = risk::risk_curve(
        &truth,
        &kernel,
        &basis,
        &spec,
        &cfg.n_grid,
        cfg.replicates,
        cfg.seed,
    )?;
    curve.prediction = Some(prediction);
    write_file(
        &ctx.out_dir.join("risk_curve.csv"),
        &io::write_risk_curve(&curve, &ctx.prov),
    )?;
    let axis = match prediction.case {
        risk::RateCase::Supersmooth => SlopeAxis::LogLogN,
        _ => SlopeAxis::LogN,
    };
    let fit = risk::rate_slope(&curve, axis)?;
    let payload = serde_json::json!({
        "fit": fit,
        "prediction": prediction,
        "predicted_slope": -prediction.exponent,
        "points": curve.points,
    });
    write_json(ctx, &ctx.out_dir.join("risk_fit.json"), &payload)
}

fn cmd_predict_rate(ctx: &Ctx) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let kernel = cfg.build_kernel()?;
    let prediction = risk::predicted_rate(&cfg.besov_params()?, &kernel.decay())?;
    write_json(ctx, &ctx.out_dir.join("rate_prediction.json"), &prediction)
}
