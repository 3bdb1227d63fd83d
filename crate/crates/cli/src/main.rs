//! `magneflow`: build commuting families, verify them, and simulate the flow.
//!
//! Exit codes: 0 success, 1 a check failed, 2 bad input or I/O error.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use magneflow::exactpoly::parse_rational_list;
use magneflow::flow::{
    drift_of, drift_report, integrate, lorentz_residual, picture_map, random_initial, write_csv, DriftReport,
    IntegrationConfig, LorentzResidual, State,
};
use magneflow::integral_family::{commuting_basis, IntegralFamily};
use magneflow::magnetic_model::{omega_from_rows, skew_normal_form, MagneticModel, OmegaJson};
use magneflow::verify::verify_family;
use serde::Serialize;
use serde_json::{json, Value};

const THREADS_ENV: &str = "MAGNEFLOW_THREADS";

#[derive(Parser, Debug)]
#[command(name = "magneflow", version, about = "Commuting integrals and simulation of magnetic geodesic flows on spheres")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reduce a skew-symmetric matrix to orthogonal block normal form.
    NormalForm {
        /// JSON file `{"omega": [[...], ...]}`.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the commuting family for a model.
    Build {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check commutation, independence, membership and extra integrals.
    Verify {
        /// Family JSON written by `build`.
        #[arg(long)]
        family: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: PathBuf,
    },
    /// Integrate the flow and report drift of every integral.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// Sphere dimension.
    #[arg(long)]
    n: usize,
    /// Comma-separated exact strengths, e.g. `1,1/2`.
    #[arg(long, allow_hyphen_values = true)]
    alpha: String,
}

impl ModelArgs {
    fn model(&self) -> Result<MagneticModel, Failure> {
        let alphas = parse_rational_list(&self.alpha).map_err(Failure::input)?;
        MagneticModel::new(self.n, alphas).map_err(Failure::input)
    }
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    dt: f64,
    #[arg(long)]
    steps: usize,
    /// JSON file `{"x": [...], "p": [...]}`; random when absent.
    #[arg(long)]
    init: Option<PathBuf>,
    /// Seed for the random initial condition.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    record_every: usize,
    /// Maximum accepted relative drift.
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
    /// Also check the magnetic picture (gauge-shifted momenta).
    #[arg(long)]
    check_picture: bool,
    /// Keep |P| of the initial condition instead of normalizing it to 1.
    #[arg(long)]
    no_normalize: bool,
    /// Output prefix: writes `<prefix>.csv` and `<prefix>.drift.json`.
    #[arg(long)]
    out: PathBuf,
}

/// Error with its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(e: impl std::fmt::Display) -> Self {
        Failure { code: 2, message: e.to_string() }
    }

    fn check(e: impl std::fmt::Display) -> Self {
        Failure { code: 1, message: e.to_string() }
    }
}

fn meta(command: &str, config: Value, seed: u64) -> Value {
    json!({
        "tool": "magneflow",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
        "seed": seed,
    })
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, value: &Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(Failure::input)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn with_meta<T: Serialize>(body: &T, meta: Value) -> Result<Value, Failure> {
    let mut v = serde_json::to_value(body).map_err(Failure::input)?;
    match v.as_object_mut() {
        Some(obj) => {
            obj.insert("meta".into(), meta);
            Ok(v)
        }
        None => Err(Failure::input("output is not a JSON object")),
    }
}

fn normal_form(input: &Path, out: &Path) -> Result<(), Failure> {
    let parsed: OmegaJson = serde_json::from_str(&read(input)?).map_err(Failure::input)?;
    let omega = omega_from_rows(&parsed.omega).map_err(Failure::input)?;
    let nf = skew_normal_form(&omega).map_err(Failure::input)?;
    let config = json!({ "in": input.display().to_string() });
    write_json(out, &with_meta(&nf.to_json(&omega), meta("normal-form", config, 0))?)
}

fn build(args: &ModelArgs, out: &Path) -> Result<(), Failure> {
    let model = args.model()?;
    let family = commuting_basis(&model);
    let mut value = family.to_json_value();
    value["meta"] = meta("build", json!({ "n": args.n, "alpha": args.alpha }), 0);
    write_json(out, &value)
}

fn verify(family_path: &Path, samples: usize, seed: u64, report: &Path) -> Result<(), Failure> {
    let family = IntegralFamily::from_json_str(&read(family_path)?).map_err(Failure::input)?;
    let rep = verify_family(&family, samples, seed).map_err(Failure::input)?;
    for (phase, t) in &rep.wall_times {
        eprintln!("{phase}: {:.3}s", t.as_secs_f64());
    }
    let config = json!({ "family": family_path.display().to_string(), "samples": samples });
    write_json(report, &with_meta(&rep, meta("verify", config, seed))?)?;
    if rep.pass {
        Ok(())
    } else {
        Err(Failure::check(format!("verification failed for {}", rep.model_id)))
    }
}

#[derive(Serialize)]
struct PictureCheck {
    kinetic_drift: f64,
    lorentz: LorentzResidual,
}

#[derive(Serialize)]
struct SimulationSummary<'a> {
    model_id: String,
    drift: &'a DriftReport,
    picture: Option<PictureCheck>,
    within_tolerance: bool,
}

fn simulate(args: &SimulateArgs) -> Result<(), Failure> {
    let model = args.model.model()?;
    let family = commuting_basis(&model);
    let init = match &args.init {
        Some(path) => State::from_json_str(&read(path)?).map_err(Failure::input)?,
        None => random_initial(&model, args.seed),
    };
    let config = IntegrationConfig {
        dt: args.dt,
        steps: args.steps,
        record_every: args.record_every,
        normalize_momentum: !args.no_normalize,
    };
    let start = Instant::now();
    let traj = integrate(&family, &init, &config).map_err(|e| match e {
        magneflow::Error::StepFailure { .. } => Failure::check(e),
        other => Failure::input(other),
    })?;
    eprintln!("integration: {:.3}s", start.elapsed().as_secs_f64());

    let drift = drift_report(&traj);
    let picture = if args.check_picture {
        let shifted = picture_map(&traj, &model).map_err(Failure::input)?;
        let speed: Vec<f64> = shifted.samples.iter().map(|s| s.h).collect();
        let lorentz = if shifted.samples.len() >= 3 {
            lorentz_residual(&shifted, &model).map_err(Failure::input)?
        } else {
            LorentzResidual { velocity: 0.0, force: 0.0 }
        };
        Some(PictureCheck { kinetic_drift: drift_of("H", &speed).max_rel_drift, lorentz })
    } else {
        None
    };
    let within_tolerance = drift.within(args.tol) && picture.as_ref().is_none_or(|p| p.kinetic_drift <= args.tol);

    let csv_path = args.out.with_extension("csv");
    let file = fs::File::create(&csv_path).map_err(|e| Failure::input(format!("{}: {e}", csv_path.display())))?;
    write_csv(&traj, BufWriter::new(file)).map_err(Failure::input)?;

    let summary = SimulationSummary { model_id: model.id(), drift: &drift, picture, within_tolerance };
    let echo = json!({
        "n": args.model.n,
        "alpha": args.model.alpha,
        "dt": args.dt,
        "steps": args.steps,
        "record_every": args.record_every,
        "tol": args.tol,
        "init": args.init.as_ref().map(|p| p.display().to_string()),
        "check_picture": args.check_picture,
        "normalize_momentum": !args.no_normalize,
    });
    let drift_path = args.out.with_extension("drift.json");
    write_json(&drift_path, &with_meta(&summary, meta("simulate", echo, args.seed))?)?;
    if within_tolerance {
        Ok(())
    } else {
        Err(Failure::check(format!("drift {:.3e} above tolerance {:.1e}", drift.max_rel_drift, args.tol)))
    }
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let threads: usize = v
            .parse()
            .map_err(|_| Failure::input(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(Failure::input)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match &cli.command {
        Command::NormalForm { input, out } => normal_form(input, out),
        Command::Build { model, out } => build(model, out),
        Command::Verify { family, samples, seed, report } => verify(family, *samples, *seed, report),
        Command::Simulate(args) => simulate(args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
