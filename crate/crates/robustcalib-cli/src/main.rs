//! `robustcalib` — command-line front end for the calibration library.
//!
//! Subcommands:
//! - `calib`: emit a calibration-function curve (numeric, closed-form, or
//!   both with a cross-check) as CSV.
//! - `verdict`: print the calibration verdict for a loss/shift/budget triple.
//! - `train`: run one gradient-descent training run and write its trajectory.
//! - `sweep`: run a seed x loss grid in parallel and write per-run
//!   trajectories plus a summary of final excess-risk proxies.
//!
//! Exit codes: 0 success, 1 usage/validation error, 2 runtime or tolerance
//! failure.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use robustcalib::calibration::{biconjugate, calibration_fn_numeric, epsilon_grid, verdict};
use robustcalib::closed_form::{biconjugate_closed, delta_closed};
use robustcalib::experiment::{excess_proxies, gen_twonorm, train, Trajectory};
use robustcalib::loss::{Family, LossSpec};
use robustcalib::util::{format_float, write_atomic};
use robustcalib::Error as LibError;

/// Usage/validation failures exit 1; runtime/tolerance failures exit 2.
enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<LibError> for CliError {
    fn from(e: LibError) -> Self {
        match e {
            LibError::Io { .. } | LibError::Internal(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

#[derive(Parser)]
#[command(
    name = "robustcalib",
    version,
    about = "Calibration functions of surrogate losses for robust linear classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a calibration-function curve as CSV.
    Calib(CalibArgs),
    /// Print the calibration verdict for one loss/shift/budget triple.
    Verdict(VerdictArgs),
    /// Run one training run and write its trajectory CSV.
    Train(TrainArgs),
    /// Run a seed x loss sweep; write per-run CSVs and a summary.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum CalibMode {
    /// Brute-force numeric engine only.
    Numeric,
    /// Analytic closed forms only.
    Closed,
    /// Both, cross-checked against a tolerance.
    Both,
}

#[derive(Args)]
struct CalibArgs {
    /// Loss family: ramp, sigmoid, modified_squared, hinge, logistic, squared.
    #[arg(long)]
    loss: String,
    /// Shift beta of the surrogate.
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// Perturbation budget gamma in (0, 1).
    #[arg(long, default_value_t = 0.2)]
    gamma: f64,
    #[arg(long, value_enum, default_value = "numeric")]
    mode: CalibMode,
    /// Output CSV path.
    #[arg(long, default_value = "calib.csv")]
    out: PathBuf,
    /// Max allowed |numeric - closed| in mode=both.
    #[arg(long, default_value_t = 2e-2)]
    tolerance: f64,
    /// Number of epsilon grid points.
    #[arg(long, default_value_t = 97)]
    eps_points: usize,
    /// Eta grid nodes for the numeric engine (min 2001).
    #[arg(long, default_value_t = 2001)]
    eta_points: usize,
    /// Alpha grid nodes per interval for the numeric engine (min 2001).
    #[arg(long, default_value_t = 2001)]
    alpha_grid: usize,
}

#[derive(Args)]
struct VerdictArgs {
    #[arg(long)]
    loss: String,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    #[arg(long, default_value_t = 0.2)]
    gamma: f64,
}

/// Flags shared by `train` and `sweep`. All are optional so a key=value
/// config file can supply them; explicit flags always win, and documented
/// defaults fill whatever remains.
#[derive(Args)]
struct RunArgs {
    /// Optional key=value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Shift beta [default: 0.2].
    #[arg(long)]
    beta: Option<f64>,
    /// Perturbation budget gamma [default: 0.2].
    #[arg(long)]
    gamma: Option<f64>,
    /// Gradient-descent step size [default: 0.1].
    #[arg(long)]
    lr: Option<f64>,
    /// Number of gradient steps (must be >= 1) [default: 200].
    #[arg(long)]
    steps: Option<usize>,
    /// Training points per run [default: 800].
    #[arg(long)]
    n_train: Option<usize>,
    /// Test points per run [default: 200].
    #[arg(long)]
    n_test: Option<usize>,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Loss family [default: ramp].
    #[arg(long)]
    loss: Option<String>,
    /// RNG seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Output trajectory CSV path [default: trajectory.csv].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Comma-separated loss families [default: ramp,sigmoid,hinge,logistic].
    #[arg(long)]
    losses: Option<String>,
    /// Number of seeds, 0..seeds [default: 50].
    #[arg(long)]
    seeds: Option<u64>,
    /// Output directory for per-run CSVs and summary.csv [default: sweep_out].
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version are successes; every parse failure is a usage
            // error (exit 1), keeping exit 2 reserved for runtime failures.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Calib(args) => cmd_calib(args),
        Command::Verdict(args) => cmd_verdict(args),
        Command::Train(args) => cmd_train(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn parse_loss(name: &str, beta: f64) -> CliResult<LossSpec> {
    let family = Family::from_str(name)?;
    Ok(LossSpec::new(family, beta)?)
}

fn cmd_calib(args: CalibArgs) -> CliResult<()> {
    let loss = parse_loss(&args.loss, args.beta)?;
    if args.eps_points < 2 {
        return usage("--eps-points must be at least 2");
    }
    let eps = epsilon_grid(args.eps_points);

    let numeric = match args.mode {
        CalibMode::Closed => None,
        _ => {
            let curve =
                calibration_fn_numeric(&loss, args.gamma, &eps, args.eta_points, args.alpha_grid)?;
            let biconj = biconjugate(&curve)?;
            Some((curve, biconj))
        }
    };
    let closed = match args.mode {
        CalibMode::Numeric => None,
        _ => {
            let mut deltas = Vec::with_capacity(eps.len());
            let mut biconjs = Vec::with_capacity(eps.len());
            for &e in &eps {
                deltas.push(delta_closed(loss.family, args.beta, args.gamma, e)?.0);
                biconjs.push(biconjugate_closed(loss.family, args.beta, args.gamma, e)?);
            }
            Some((deltas, biconjs))
        }
    };

    let mut csv = String::new();
    match (&numeric, &closed) {
        (Some((curve, biconj)), None) => {
            csv.push_str("epsilon,delta,delta_biconj\n");
            for ((&e, &d), &b) in eps.iter().zip(curve.deltas()).zip(biconj.deltas()) {
                let _ = writeln!(
                    csv,
                    "{},{},{}",
                    format_float(e),
                    format_float(d),
                    format_float(b)
                );
            }
        }
        (None, Some((deltas, biconjs))) => {
            csv.push_str("epsilon,delta,delta_biconj\n");
            for ((&e, &d), &b) in eps.iter().zip(deltas).zip(biconjs) {
                let _ = writeln!(
                    csv,
                    "{},{},{}",
                    format_float(e),
                    format_float(d),
                    format_float(b)
                );
            }
        }
        (Some((curve, biconj)), Some((deltas, biconjs))) => {
            csv.push_str("epsilon,delta,delta_biconj,delta_closed,delta_biconj_closed,abs_diff\n");
            for i in 0..eps.len() {
                let (n, c) = (curve.deltas()[i], deltas[i]);
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    format_float(eps[i]),
                    format_float(n),
                    format_float(biconj.deltas()[i]),
                    format_float(c),
                    format_float(biconjs[i]),
                    format_float((n - c).abs())
                );
            }
        }
        (None, None) => unreachable!("mode covers at least one source"),
    }
    write_atomic(&args.out, &csv)?;

    if let (Some((curve, _)), Some((deltas, _))) = (&numeric, &closed) {
        let max_diff = curve
            .deltas()
            .iter()
            .zip(deltas)
            .map(|(n, c)| (n - c).abs())
            .fold(0.0_f64, f64::max);
        println!("max |numeric - closed| = {max_diff:.6e}");
        if max_diff > args.tolerance {
            return Err(CliError::Runtime(format!(
                "numeric/closed disagreement {max_diff:.6e} exceeds tolerance {:.6e}",
                args.tolerance
            )));
        }
    }
    Ok(())
}

fn cmd_verdict(args: VerdictArgs) -> CliResult<()> {
    let loss = parse_loss(&args.loss, args.beta)?;
    let report = loss.structural_report_default()?;
    let v = verdict(&loss, args.gamma, &report)?;
    println!("calibrated: {}", if v.calibrated { "yes" } else { "no" });
    println!("rule: {}", v.rule);
    println!("witness: {}", format_float(v.witness));
    if let Some(zo) = v.zero_one_calibrated {
        println!("zero_one_calibrated: {}", if zo { "yes" } else { "no" });
    }
    Ok(())
}

/// Parse a flat `key=value` config file. Blank lines and `#` comments are
/// allowed; unknown keys are rejected against `allowed`.
fn read_config(path: &Path, allowed: &[&str]) -> CliResult<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return usage(format!(
                "config {} line {}: expected key=value, got '{line}'",
                path.display(),
                lineno + 1
            ));
        };
        let key = key.trim().to_string();
        if !allowed.contains(&key.as_str()) {
            return usage(format!(
                "config {} line {}: unknown key '{key}' (allowed: {})",
                path.display(),
                lineno + 1,
                allowed.join(", ")
            ));
        }
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return usage(format!(
                "config {} line {}: duplicate key '{key}'",
                path.display(),
                lineno + 1
            ));
        }
    }
    Ok(map)
}

/// Flag value, else config-file value, else default.
fn resolve<T: FromStr>(
    flag: Option<T>,
    config: &HashMap<String, String>,
    key: &str,
    default: T,
) -> CliResult<T> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match config.get(key) {
        Some(raw) => raw
            .parse()
            .map_err(|_| CliError::Usage(format!("config key '{key}': cannot parse '{raw}'"))),
        None => Ok(default),
    }
}

struct ResolvedRun {
    beta: f64,
    gamma: f64,
    lr: f64,
    steps: usize,
    n_train: usize,
    n_test: usize,
}

fn resolve_run(args: &mut RunArgs, config: &HashMap<String, String>) -> CliResult<ResolvedRun> {
    let run = ResolvedRun {
        beta: resolve(args.beta.take(), config, "beta", 0.2)?,
        gamma: resolve(args.gamma.take(), config, "gamma", 0.2)?,
        lr: resolve(args.lr.take(), config, "lr", 0.1)?,
        steps: resolve(args.steps.take(), config, "steps", 200)?,
        n_train: resolve(args.n_train.take(), config, "n_train", 800)?,
        n_test: resolve(args.n_test.take(), config, "n_test", 200)?,
    };
    if run.steps == 0 {
        return usage("steps must be at least 1");
    }
    if run.n_train == 0 || run.n_test == 0 {
        return usage("n_train and n_test must be at least 1");
    }
    Ok(run)
}

const RUN_KEYS: [&str; 6] = ["beta", "gamma", "lr", "steps", "n_train", "n_test"];

fn cmd_train(mut args: TrainArgs) -> CliResult<()> {
    let mut allowed = RUN_KEYS.to_vec();
    allowed.extend(["loss", "seed", "out"]);
    let config = match &args.run.config {
        Some(path) => read_config(path, &allowed)?,
        None => HashMap::new(),
    };
    let run = resolve_run(&mut args.run, &config)?;
    let loss_name = resolve(args.loss.take(), &config, "loss", "ramp".to_string())?;
    let seed = resolve(args.seed.take(), &config, "seed", 0)?;
    let out = resolve(
        args.out.take(),
        &config,
        "out",
        PathBuf::from("trajectory.csv"),
    )?;

    let loss = parse_loss(&loss_name, run.beta)?;
    let (train_data, test_data) = gen_twonorm(run.n_train, run.n_test, seed)?;
    let traj = train(
        &loss,
        &train_data,
        run.lr,
        run.steps,
        run.gamma,
        &test_data,
        seed,
    )?;
    traj.write_csv(&out)?;
    let last = traj.records.last().expect("trajectory is never empty");
    println!(
        "wrote {} ({} rows); final test robust risk {:.4}, test surrogate risk {:.4}",
        out.display(),
        traj.records.len(),
        last.test_robust,
        last.test_surrogate
    );
    Ok(())
}

fn cmd_sweep(mut args: SweepArgs) -> CliResult<()> {
    let mut allowed = RUN_KEYS.to_vec();
    allowed.extend(["losses", "seeds", "out_dir"]);
    let config = match &args.run.config {
        Some(path) => read_config(path, &allowed)?,
        None => HashMap::new(),
    };
    let run = resolve_run(&mut args.run, &config)?;
    let losses_raw = resolve(
        args.losses.take(),
        &config,
        "losses",
        "ramp,sigmoid,hinge,logistic".to_string(),
    )?;
    let seeds = resolve(args.seeds.take(), &config, "seeds", 50)?;
    let out_dir = resolve(
        args.out_dir.take(),
        &config,
        "out_dir",
        PathBuf::from("sweep_out"),
    )?;
    if seeds == 0 {
        return usage("seeds must be at least 1");
    }
    let mut families = Vec::new();
    for name in losses_raw.split(',') {
        let name = name.trim();
        if name.is_empty() {
            continue;
        }
        let loss = parse_loss(name, run.beta)?;
        if families.contains(&loss.family) {
            return usage(format!("duplicate loss '{name}' in --losses"));
        }
        families.push(loss.family);
    }
    if families.is_empty() {
        return usage("--losses must name at least one family");
    }

    std::fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", out_dir.display())))?;

    if let Ok(raw) = std::env::var("ROBUSTCALIB_THREADS") {
        let n: usize = raw
            .parse()
            .map_err(|_| CliError::Usage(format!("ROBUSTCALIB_THREADS: cannot parse '{raw}'")))?;
        if n == 0 {
            return usage("ROBUSTCALIB_THREADS must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Runtime(format!("thread pool setup failed: {e}")))?;
    }

    // One unit of work per seed: the shared dataset is generated once and all
    // requested losses train on it, so the per-seed target reference below
    // compares like with like.
    let per_seed: Vec<Vec<Trajectory>> = (0..seeds)
        .into_par_iter()
        .map(|seed| -> robustcalib::Result<Vec<Trajectory>> {
            let (train_data, test_data) = gen_twonorm(run.n_train, run.n_test, seed)?;
            families
                .iter()
                .map(|&family| {
                    let loss = LossSpec::new(family, run.beta)?;
                    train(
                        &loss,
                        &train_data,
                        run.lr,
                        run.steps,
                        run.gamma,
                        &test_data,
                        seed,
                    )
                })
                .collect()
        })
        .collect::<robustcalib::Result<Vec<_>>>()?;

    for (seed, trajs) in per_seed.iter().enumerate() {
        for traj in trajs {
            let path = out_dir.join(format!("{}_seed{seed:03}.csv", traj.config.loss.family));
            traj.write_csv(&path)?;
        }
    }

    // Final excess proxies. Surrogate: the run's own final test surrogate
    // risk minus its trajectory minimum (surrogate scales differ across
    // losses, so no cross-loss reference makes sense). Target: final robust
    // test risk minus the best robust risk any requested loss reached on the
    // same seed's data — a shared stand-in for the optimal robust risk, so
    // slowly-but-monotonically converging losses still show their gap.
    let shared_target_min: Vec<f64> = per_seed
        .iter()
        .map(|trajs| {
            trajs
                .iter()
                .flat_map(|t| t.records.iter().map(|r| r.test_robust))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();

    let mut summary = String::from(
        "loss,mean_final_target_excess,se_final_target_excess,\
         mean_final_surrogate_excess,se_final_surrogate_excess\n",
    );
    for (fi, family) in families.iter().enumerate() {
        let mut target_finals = Vec::with_capacity(per_seed.len());
        let mut surrogate_finals = Vec::with_capacity(per_seed.len());
        for (si, trajs) in per_seed.iter().enumerate() {
            let traj = &trajs[fi];
            let last = traj.records.last().expect("trajectory is never empty");
            target_finals.push(last.test_robust - shared_target_min[si]);
            let (sur, _) = excess_proxies(traj);
            surrogate_finals.push(*sur.last().expect("trajectory is never empty"));
        }
        let (tm, ts) = mean_stderr(&target_finals);
        let (sm, ss) = mean_stderr(&surrogate_finals);
        let _ = writeln!(
            summary,
            "{family},{},{},{},{}",
            format_float(tm),
            format_float(ts),
            format_float(sm),
            format_float(ss)
        );
    }
    let summary_path = out_dir.join("summary.csv");
    write_atomic(&summary_path, &summary)?;
    println!(
        "wrote {} runs to {} and {}",
        seeds as usize * families.len(),
        out_dir.display(),
        summary_path.display()
    );
    Ok(())
}

/// Sample mean and standard error of the mean.
fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
