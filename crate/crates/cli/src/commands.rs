//! Subcommand dispatch. Exit codes: 0 when the experiment passes its own
//! checks, 1 when a condition, fit, or criterion fails, 2 on usage or
//! configuration errors.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use specreg::{
    distance_profile, error_curve, fit_log_rate, fit_power_rate, ssc_witness, validate_generator,
    vi_constant, worst_case_bracket, BracketOutcome, CurveProvenance, RateFit, SscWitness,
};

use crate::config::{self, ExperimentConfig};
use crate::criteria;
use crate::output::{write_json, write_text, RunStamp};

#[derive(Parser)]
#[command(
    name = "specreg",
    version,
    about = "Spectral regularization experiments on diagonal operator models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a filter family against the admissibility conditions.
    ValidateFilter(JobArgs),
    /// Exact-data error curve and rate fit.
    RateExact(JobArgs),
    /// Balanced parameter, adversarial noise, and error bracket per noise level.
    RateNoisy(JobArgs),
    /// Variational-inequality constants and source-condition witnesses.
    VarIneq(JobArgs),
    /// Distance profile to smoothness balls.
    Distance(JobArgs),
    /// Run the full acceptance suite.
    RunAll(RunAllArgs),
}

#[derive(Args)]
struct JobArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Artifact directory (created if missing).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed override for randomized diagnostics.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RunAllArgs {
    /// Artifact directory (created if missing; scratch space otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized diagnostics.
    #[arg(long, default_value_t = criteria::DEFAULT_SEED)]
    seed: u64,
}

enum Outcome {
    Pass,
    Fail,
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::ValidateFilter(args) => cmd_validate_filter(args),
        Command::RateExact(args) => cmd_rate_exact(args),
        Command::RateNoisy(args) => cmd_rate_noisy(args),
        Command::VarIneq(args) => cmd_var_ineq(args),
        Command::Distance(args) => cmd_distance(args),
        Command::RunAll(args) => cmd_run_all(args),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Reports a computation failure on stderr and maps it to exit code 1.
macro_rules! try_compute {
    ($what:literal, $expr:expr) => {
        match $expr {
            Ok(v) => v,
            Err(e) => {
                eprintln!("{} failed: {e}", $what);
                return Ok(Outcome::Fail);
            }
        }
    };
}

struct Job {
    config: ExperimentConfig,
    stamp: RunStamp,
    out: Option<PathBuf>,
    seed: u64,
}

impl Job {
    fn new(args: JobArgs) -> Result<Self> {
        let loaded = config::load(&args.config)?;
        let seed = args.seed.or(loaded.config.seed).unwrap_or(0);
        let stamp = RunStamp::new(loaded.hash.clone(), Some(seed));
        Ok(Self {
            config: loaded.config,
            stamp,
            out: args.out,
            seed,
        })
    }

    fn artifact(&self, name: &str) -> Option<PathBuf> {
        self.out.as_ref().map(|d| d.join(name))
    }

    fn write_report<T: serde::Serialize>(&self, name: &str, report: &T) -> Result<()> {
        if let Some(path) = self.artifact(name) {
            write_json(&path, &self.stamp.wrap(report)?)?;
        }
        Ok(())
    }

    fn operator_label(&self) -> String {
        match &self.config.operator {
            Some(spec) => match (spec.p, spec.gamma) {
                (Some(p), _) => format!("{}:{p}:{}", spec.kind, spec.n),
                (_, Some(g)) => format!("{}:{g}:{}", spec.kind, spec.n),
                _ => format!("{}:{}", spec.kind, spec.n),
            },
            None => "none".into(),
        }
    }

    fn profile_label(&self) -> String {
        match &self.config.profile {
            Some(p) => format!("{}*{}", p.target, p.scale),
            None => "none".into(),
        }
    }
}

fn cmd_validate_filter(args: JobArgs) -> Result<Outcome> {
    let job = Job::new(args)?;
    let family = job.config.filter()?;
    let alphas = job.config.grid("alpha_grid")?;
    let lambdas = if job.config.lambda_grid.is_some() {
        job.config.grid("lambda_grid")?
    } else {
        job.config.operator()?.lambda().to_vec()
    };

    let report = try_compute!("validation", validate_generator(&family, &alphas, &lambdas));
    job.write_report("filter_report.json", &report)?;
    println!(
        "filter {}: pointwise={} monotone_lambda={} regular_alpha={} diagonal={} \
         rho_hat={:.4} rho_tilde_hat={:.4} clipped={}",
        report.filter,
        report.pointwise_bounds.passed,
        report.residual_monotone_in_lambda.passed,
        report.residual_regular_in_alpha.passed,
        report.diagonal_bounded.passed,
        report.rho_hat,
        report.rho_tilde_hat,
        report.clipped_lambdas,
    );
    Ok(if report.all_passed {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

fn cmd_rate_exact(args: JobArgs) -> Result<Outcome> {
    let job = Job::new(args)?;
    let op = job.config.operator()?;
    let x = job.config.solution(&op)?;
    let family = job.config.filter()?;
    let alphas = job.config.grid("alpha_grid")?;
    let window = job.config.window()?;
    let model = job
        .config
        .rate_model
        .clone()
        .unwrap_or_else(|| "power".into());
    if model != "power" && model != "log" {
        anyhow::bail!("rate_model must be 'power' or 'log', got '{model}'");
    }
    let nu = if model == "log" {
        Some(job.config.nu()?)
    } else {
        None
    };

    let provenance = CurveProvenance {
        operator: job.operator_label(),
        filter: family.name().to_string(),
        profile: job.profile_label(),
    };
    let curve = try_compute!(
        "error curve",
        error_curve(&op, &x, &family, &alphas, provenance)
    );
    if let Some(path) = job.artifact("error_curve.csv") {
        let mut buf = Vec::new();
        curve.write_csv(&mut buf, &[job.stamp.csv_comment()])?;
        write_text(&path, &String::from_utf8(buf)?)?;
    }

    let fit = match nu {
        None => fit_power_rate(&curve, window),
        Some(nu) => fit_log_rate(&curve, nu, window),
    };
    let fit = try_compute!("rate fit", fit);
    job.write_report("rate_fit.json", &fit)?;
    match &fit {
        RateFit::Power {
            slope,
            r_squared,
            points,
            ..
        } => {
            println!("power fit: slope={slope:.4} r_squared={r_squared:.5} points={points}");
        }
        RateFit::Logarithmic {
            nu, spread, points, ..
        } => {
            println!("log fit: nu={nu} spread={spread:.4} points={points}");
        }
    }
    Ok(Outcome::Pass)
}

fn cmd_rate_noisy(args: JobArgs) -> Result<Outcome> {
    let job = Job::new(args)?;
    let op = job.config.operator()?;
    let x = job.config.solution(&op)?;
    let family = job.config.filter()?;
    let deltas = job.config.deltas()?;
    let scan = job.config.grid("scan_grid")?;

    let mut reports = Vec::with_capacity(deltas.len());
    let mut csv = job.stamp.csv_comment();
    csv.push('\n');
    csv.push_str("delta,alpha_delta,lower,adversarial,upper,within_bracket\n");
    let mut all_ok = true;
    for &delta in &deltas {
        let report = try_compute!(
            "noisy bracket",
            worst_case_bracket(&op, &x, &family, delta, &scan)
        );
        match &report.outcome {
            BracketOutcome::Standard {
                alpha_delta,
                lower,
                upper,
                adversarial,
                within_bracket,
                ..
            } => {
                println!(
                    "delta={delta:.3e}: alpha_delta={alpha_delta:.3e} \
                     adversarial={adversarial:.4e} bracket=[{lower:.4e},{upper:.4e}] \
                     within={within_bracket}"
                );
                csv.push_str(&format!(
                    "{delta:e},{alpha_delta:e},{lower:e},{adversarial:e},{upper:e},{within_bracket}\n"
                ));
                all_ok &= within_bracket;
            }
            BracketOutcome::Trivial { epsilon, upper } => {
                println!(
                    "delta={delta:.3e}: trivial below epsilon={epsilon:.3e}, \
                     upper bound {upper:.4e}"
                );
                csv.push_str(&format!("{delta:e},,,,{upper:e},trivial\n"));
            }
        }
        reports.push(report);
    }
    if let Some(path) = job.artifact("noisy_rates.csv") {
        write_text(&path, &csv)?;
    }
    job.write_report("noisy_rates.json", &reports)?;
    Ok(if all_ok { Outcome::Pass } else { Outcome::Fail })
}

fn cmd_var_ineq(args: JobArgs) -> Result<Outcome> {
    let job = Job::new(args)?;
    let op = job.config.operator()?;
    let x = job.config.solution(&op)?;
    let phi = job.config.phi()?;
    let nu = job.config.nu()?;
    let samples = job.config.random_samples.unwrap_or(100);

    let report = try_compute!(
        "variational constant",
        vi_constant(&op, &x, &phi, nu, samples, job.seed)
    );
    let forward = report.c_spec <= report.c_vi * report.c_vi + 1e-9;
    let c_sq = report.c_spec * (1.0 + 1.0 / (1.0 - nu));
    let converse_bound = 2.0 * report.c_spec.powf((1.0 - nu) / 2.0) * c_sq.sqrt().powf(nu);
    let converse = report.c_vi <= converse_bound + 1e-9;

    let witness: Option<SscWitness> = match &job.config.dims {
        Some(dims) => Some(try_compute!(
            "witness",
            ssc_witness(&op, &x, &phi, nu, dims)
        )),
        None => None,
    };

    println!(
        "c_vi={:.6} ({}) c_spec={:.6} at lambda={:.3e}; forward={forward} converse={converse}",
        report.c_vi, report.c_vi_witness, report.c_spec, report.c_spec_lambda
    );
    if let Some(w) = &witness {
        println!(
            "witness partial norms at dims {:?}: {:?}",
            w.dims,
            w.partial_norms
                .iter()
                .map(|v| (v * 1e6).round() / 1e6)
                .collect::<Vec<_>>()
        );
    }
    job.write_report(
        "variational.json",
        &serde_json::json!({
            "variational": serde_json::to_value(&report)?,
            "forward_ok": forward,
            "converse_ok": converse,
            "ssc_witness": serde_json::to_value(&witness)?,
        }),
    )?;
    Ok(if forward && converse {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

fn cmd_distance(args: JobArgs) -> Result<Outcome> {
    let job = Job::new(args)?;
    let op = job.config.operator()?;
    let x = job.config.solution(&op)?;
    let phi = job.config.phi()?;
    let radii = job.config.grid("radius_grid")?;

    let profile = try_compute!("distance profile", distance_profile(&op, &x, &phi, &radii));
    if let Some(path) = job.artifact("distance_profile.csv") {
        let mut buf = Vec::new();
        profile.write_csv(&mut buf, &[job.stamp.csv_comment()])?;
        write_text(&path, &String::from_utf8(buf)?)?;
    }
    job.write_report("distance_fit.json", &profile)?;
    match (profile.slope, profile.r_squared) {
        (Some(s), Some(r2)) => println!(
            "distance profile: {} radii, slope={s:.4} r_squared={r2:.5}",
            profile.rows.len()
        ),
        _ => println!(
            "distance profile: {} radii, too few positive distances for a slope",
            profile.rows.len()
        ),
    }
    Ok(Outcome::Pass)
}

fn cmd_run_all(args: RunAllArgs) -> Result<Outcome> {
    let (dir, scratch) = match &args.out {
        Some(dir) => (dir.clone(), false),
        None => (
            std::env::temp_dir().join(format!("specreg-run-all-{}", std::process::id())),
            true,
        ),
    };
    let results = criteria::run_all(&dir, args.seed)?;
    for r in &results {
        println!("{}", r.line());
    }
    let passed = results.iter().filter(|r| r.pass).count();
    println!("acceptance: {passed}/{} checks passed", results.len());
    if !scratch {
        println!("artifacts in {}", dir.display());
    } else {
        std::fs::remove_dir_all(&dir).ok();
    }
    Ok(if passed == results.len() {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}
