//! Command-line front door: evaluate extremal operators, sample closed-form
//! profiles, run Dirichlet solves and experiments, and summarize the run
//! directories they leave behind.
//!
//! Parameters come from flags or from a flat `key=value` file named with
//! `--config`; explicit flags override file entries.  Every command that
//! produces artifacts writes them into its own run directory under the
//! output root (`--out`, else `PUCCI_LAB_OUT`, else `runs`), named by a hash
//! of the effective configuration so identical runs land in identical paths.
//! The exit status is 0 only when every contract of the run held: solves
//! converged and experiment pass flags are set.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pucci_lab::experiments::{
    bernstein_experiment, limit_rate_experiment, rescale_experiment, sharp_constant_probe,
    symmetry_strip, symmetry_sweep, BernsteinConfig, LimitRateConfig, RescaleConfig,
    SharpConstantConfig, SymmetryConfig,
};
use pucci_lab::io::{fmt_f64, write_csv, write_json, RunDir};
use pucci_lab::profiles::{HamiltonianSign, Profile, ProfileError, ProfileRecord};
use pucci_lab::pucci::{pucci_eval, OperatorKind};
use pucci_lab::solver::{
    convergence_study, solve_1d, PdeCoeffs, Problem1, SolveMethod, StudyCase,
};
use pucci_lab::{Ellipticity64, Grid1D64, Profile64, SolverParams64, SymmetricMatrix64};
use serde_json::json;

#[derive(Parser)]
#[command(name = "pucci-lab", version, about = "Extremal-operator laboratory front end")]
struct Cli {
    /// Flat key=value parameter file; explicit flags override its entries.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output root for run directories (else PUCCI_LAB_OUT, else "runs").
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an extremal operator on a symmetric matrix literal.
    #[command(args_override_self = true)]
    Eval(EvalArgs),
    /// Sample a closed-form profile to CSV plus a JSON parameter record.
    #[command(args_override_self = true)]
    Profile(ProfileArgs),
    /// Solve a 1D Dirichlet problem and record the solution.
    #[command(args_override_self = true)]
    Solve(SolveArgs),
    /// Run a named experiment and write its report.
    #[command(args_override_self = true)]
    Experiment(ExperimentArgs),
    /// Summarize the run directories under a root.
    #[command(args_override_self = true)]
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Plus,
    Minus,
}

impl From<KindArg> for OperatorKind {
    fn from(kind: KindArg) -> Self {
        match kind {
            KindArg::Plus => OperatorKind::Plus,
            KindArg::Minus => OperatorKind::Minus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SignArg {
    Plus,
    Minus,
}

impl From<SignArg> for HamiltonianSign {
    fn from(sign: SignArg) -> Self {
        match sign {
            SignArg::Plus => HamiltonianSign::Plus,
            SignArg::Minus => HamiltonianSign::Minus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Lowp,
    Highp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExperimentId {
    Symmetry,
    Bernstein,
    SharpConstant,
    Rescale,
    LimitRate,
    Convergence,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long)]
    lambda: f64,
    #[arg(long = "Lambda")]
    big_lambda: f64,
    /// Row-major matrix literal, rows separated by ';': "a,b;c,d".
    #[arg(long, allow_hyphen_values = true)]
    matrix: String,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    lambda: f64,
    #[arg(long = "Lambda")]
    big_lambda: f64,
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Boundary value M (low-p family only).
    #[arg(long = "M", default_value_t = 1.0, allow_hyphen_values = true)]
    boundary: f64,
    /// Far-field limit l (low-p family only).
    #[arg(long = "l", default_value_t = 0.0, allow_hyphen_values = true)]
    limit: f64,
    /// Shift of the high-p branch.
    #[arg(long, default_value_t = 0.0)]
    chat: f64,
    /// Sampling endpoint: nodes cover [0, ymax].
    #[arg(long, default_value_t = 4.0)]
    ymax: f64,
    /// Node count of the sampling grid.
    #[arg(long, default_value_t = 401)]
    n: usize,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long)]
    lambda: f64,
    #[arg(long = "Lambda")]
    big_lambda: f64,
    #[arg(long)]
    p: f64,
    /// Sign s of the gradient term in -M(D2u) + s|Du|^p = f.
    #[arg(long, value_enum)]
    sign: SignArg,
    /// Grid literal "a,b,n".
    #[arg(long)]
    grid: String,
    /// Dirichlet data "left,right".
    #[arg(long, allow_hyphen_values = true)]
    bc: String,
    /// Constant source value.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    f: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long = "max-iter", default_value_t = 100_000)]
    max_iter: usize,
    /// One of auto, newton, sweep, pseudo-time.
    #[arg(long, default_value = "auto")]
    method: String,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment to run.
    #[arg(long, value_enum)]
    id: ExperimentId,
    #[arg(long)]
    p: Option<f64>,
    /// Exponent list "p1,p2,..." (bernstein, limit-rate).
    #[arg(long)]
    ps: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long = "Lambda")]
    big_lambda: Option<f64>,
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    /// Strip half-width W (symmetry, bernstein).
    #[arg(long = "half-width")]
    half_width: Option<f64>,
    /// Strip height H (symmetry, bernstein).
    #[arg(long)]
    height: Option<f64>,
    /// Grid spacing h; the strip sides must be multiples of it.
    #[arg(long)]
    resolution: Option<f64>,
    /// Lateral perturbation amplitude A (symmetry).
    #[arg(long)]
    amplitude: Option<f64>,
    /// Width sweep "w1,w2,..." (symmetry); one run directory per width.
    #[arg(long)]
    sweep: Option<String>,
    /// Grid node count (sharp-constant).
    #[arg(long)]
    n: Option<usize>,
    /// Allowed relative excess over the sharp constant (sharp-constant).
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long = "d-min")]
    d_min: Option<f64>,
    #[arg(long = "d-max")]
    d_max: Option<f64>,
    /// Number of random centre/radius draws (rescale).
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Hessian embedding dimension (rescale).
    #[arg(long)]
    dim: Option<usize>,
    /// Fit window floor in y (limit-rate).
    #[arg(long = "y-min")]
    y_min: Option<f64>,
    #[arg(long = "y-max")]
    y_max: Option<f64>,
    /// Fit sample count (limit-rate).
    #[arg(long)]
    samples: Option<usize>,
    /// Shift of the manufactured profile (convergence).
    #[arg(long)]
    chat: Option<f64>,
    /// Grid list "n1,n2,..." (convergence).
    #[arg(long)]
    ns: Option<String>,
    /// Study interval "a,b" (convergence).
    #[arg(long)]
    interval: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
}

#[derive(Args)]
struct ReportArgs {
    /// Root holding the run directories (else PUCCI_LAB_OUT, else "runs").
    #[arg(long)]
    dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<ExitCode> {
    let mut argv: Vec<OsString> = std::env::args_os().collect();
    // The config file may carry required flags, so it is located and spliced
    // in before clap ever sees the command line.
    if let Some(path) = find_config(&argv) {
        argv = inject_config(&argv, &path)?;
    }
    let cli = Cli::parse_from(argv);
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Eval(args) => run_eval(args),
        Command::Profile(args) => run_profile(args, out),
        Command::Solve(args) => run_solve(args, out),
        Command::Experiment(args) => run_experiment(args, out),
        Command::Report(args) => run_report(args),
    }
}

const SUBCOMMANDS: [&str; 5] = ["eval", "profile", "solve", "experiment", "report"];

fn find_config(argv: &[OsString]) -> Option<PathBuf> {
    let mut iter = argv.iter();
    while let Some(arg) = iter.next() {
        if arg == "--config" {
            return iter.next().map(PathBuf::from);
        }
        if let Some(rest) = arg.to_str().and_then(|s| s.strip_prefix("--config=")) {
            return Some(PathBuf::from(rest));
        }
    }
    None
}

/// Splices the config-file pairs (as `--key value` flags) directly after the
/// subcommand token, before the explicit flags, so the explicit flags win.
fn inject_config(argv: &[OsString], path: &Path) -> Result<Vec<OsString>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    let mut flags: Vec<OsString> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').with_context(|| {
            format!("{}:{}: expected key=value, got {raw:?}", path.display(), lineno + 1)
        })?;
        flags.push(format!("--{}", key.trim()).into());
        flags.push(value.trim().to_string().into());
    }
    let pos = argv
        .iter()
        .position(|arg| SUBCOMMANDS.iter().any(|name| arg == name))
        .context("--config needs a subcommand to apply its keys to")?;
    let mut merged = argv.to_vec();
    merged.splice(pos + 1..pos + 1, flags);
    Ok(merged)
}

fn parse_matrix(literal: &str) -> Result<SymmetricMatrix64> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for row in literal.split(';') {
        let entries = row
            .split(',')
            .map(|cell| {
                cell.trim()
                    .parse::<f64>()
                    .with_context(|| format!("matrix entry {:?} is not a number", cell.trim()))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(entries);
    }
    SymmetricMatrix64::from_rows(&rows).context("matrix literal must be square and symmetric")
}

fn parse_pair(literal: &str, what: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = literal.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        bail!("{what} must be \"a,b\", got {literal:?}");
    }
    let a = parts[0].parse::<f64>().with_context(|| format!("{what}: bad number {:?}", parts[0]))?;
    let b = parts[1].parse::<f64>().with_context(|| format!("{what}: bad number {:?}", parts[1]))?;
    Ok((a, b))
}

fn parse_list_f64(literal: &str, what: &str) -> Result<Vec<f64>> {
    literal
        .split(',')
        .map(|cell| {
            cell.trim()
                .parse::<f64>()
                .with_context(|| format!("{what}: bad number {:?}", cell.trim()))
        })
        .collect()
}

fn parse_list_usize(literal: &str, what: &str) -> Result<Vec<usize>> {
    literal
        .split(',')
        .map(|cell| {
            cell.trim()
                .parse::<usize>()
                .with_context(|| format!("{what}: bad count {:?}", cell.trim()))
        })
        .collect()
}

fn kind_name(kind: OperatorKind) -> &'static str {
    match kind {
        OperatorKind::Plus => "plus",
        OperatorKind::Minus => "minus",
    }
}

fn run_eval(args: &EvalArgs) -> Result<ExitCode> {
    let ell = Ellipticity64::new(args.lambda, args.big_lambda)?;
    let matrix = parse_matrix(&args.matrix)?;
    let value = pucci_eval(args.kind.into(), &ell, &matrix)?;
    println!("{}", fmt_f64(value));
    Ok(ExitCode::SUCCESS)
}

/// Runs `body` inside a fresh run directory; on error the directory is
/// discarded so no partial artifacts survive.
fn with_run_dir(
    out: Option<&Path>,
    id: &str,
    config_text: &str,
    body: impl FnOnce(&RunDir) -> Result<ExitCode>,
) -> Result<ExitCode> {
    let dir = RunDir::create(out, id, config_text)?;
    match body(&dir) {
        Ok(code) => Ok(code),
        Err(err) => {
            dir.discard()?;
            Err(err)
        }
    }
}

fn run_profile(args: &ProfileArgs, out: Option<&Path>) -> Result<ExitCode> {
    let ell = Ellipticity64::new(args.lambda, args.big_lambda)?;
    let kind: OperatorKind = args.kind.into();
    let profile: Profile64 = match args.family {
        FamilyArg::Lowp => Profile::low_p(args.p, args.boundary, args.limit, kind, ell)?,
        FamilyArg::Highp => Profile::high_p(args.p, args.chat, kind, ell)?,
    };
    if !(args.ymax > 0.0) {
        bail!("ymax must be positive, got {}", args.ymax);
    }
    let grid = Grid1D64::new(0.0, args.ymax, args.n)?;

    let mut config = String::from("# pucci-lab profile\n");
    let family = match args.family {
        FamilyArg::Lowp => "lowp",
        FamilyArg::Highp => "highp",
    };
    let _ = writeln!(config, "family={family}");
    let _ = writeln!(config, "p={}", args.p);
    let _ = writeln!(config, "lambda={}", args.lambda);
    let _ = writeln!(config, "Lambda={}", args.big_lambda);
    let _ = writeln!(config, "kind={}", kind_name(kind));
    match args.family {
        FamilyArg::Lowp => {
            let _ = writeln!(config, "M={}", args.boundary);
            let _ = writeln!(config, "l={}", args.limit);
        }
        FamilyArg::Highp => {
            let _ = writeln!(config, "chat={}", args.chat);
        }
    }
    let _ = writeln!(config, "ymax={}", args.ymax);
    let _ = writeln!(config, "n={}", args.n);

    with_run_dir(out, "profile", &config, |dir| {
        write_json(&dir.file("record.json"), &profile.to_record())?;
        let mut ys = Vec::new();
        let mut us = Vec::new();
        let mut dus = Vec::new();
        let mut d2us = Vec::new();
        for i in 0..args.n {
            let y = grid.node(i);
            match profile.eval(y) {
                Ok((u, du, d2u)) => {
                    ys.push(y);
                    us.push(u);
                    dus.push(du);
                    d2us.push(d2u);
                }
                // The zero-shift branch has infinite slope at the wall; the
                // sampled table simply starts one node in.
                Err(ProfileError::SingularPoint) => continue,
                Err(err) => return Err(err.into()),
            }
        }
        write_csv(&dir.file("data.csv"), &["y", "u", "du", "d2u"], &[ys, us, dus, d2us])?;
        println!("{}", dir.path().display());
        Ok(ExitCode::SUCCESS)
    })
}

fn run_solve(args: &SolveArgs, out: Option<&Path>) -> Result<ExitCode> {
    let ell = Ellipticity64::new(args.lambda, args.big_lambda)?;
    let kind: OperatorKind = args.kind.into();
    let sign: HamiltonianSign = args.sign.into();
    let (a, b, n_raw) = {
        let parts: Vec<&str> = args.grid.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            bail!("grid must be \"a,b,n\", got {:?}", args.grid);
        }
        let a = parts[0].parse::<f64>().with_context(|| format!("grid: bad number {:?}", parts[0]))?;
        let b = parts[1].parse::<f64>().with_context(|| format!("grid: bad number {:?}", parts[1]))?;
        let n = parts[2].parse::<usize>().with_context(|| format!("grid: bad count {:?}", parts[2]))?;
        (a, b, n)
    };
    let bc = parse_pair(&args.bc, "bc")?;
    let method = SolveMethod::from_str(&args.method).map_err(anyhow::Error::msg)?;
    let coeffs = PdeCoeffs::new(kind, ell, args.p, sign)?;
    let grid = Grid1D64::new(a, b, n_raw)?;
    let problem = Problem1::new(coeffs, grid.clone(), vec![args.f; n_raw], bc)?;
    let params = SolverParams64::default()
        .with_tol(args.tol)
        .with_max_iter(args.max_iter)
        .with_method(method);

    let mut config = String::from("# pucci-lab solve\n");
    let _ = writeln!(config, "kind={}", kind_name(kind));
    let _ = writeln!(config, "lambda={}", args.lambda);
    let _ = writeln!(config, "Lambda={}", args.big_lambda);
    let _ = writeln!(config, "p={}", args.p);
    let _ = writeln!(config, "sign={}", match sign {
        HamiltonianSign::Plus => "plus",
        HamiltonianSign::Minus => "minus",
    });
    let _ = writeln!(config, "grid={},{},{}", a, b, n_raw);
    let _ = writeln!(config, "bc={},{}", bc.0, bc.1);
    let _ = writeln!(config, "f={}", args.f);
    let _ = writeln!(config, "tol={}", args.tol);
    let _ = writeln!(config, "max-iter={}", args.max_iter);
    let _ = writeln!(config, "method={}", args.method);

    with_run_dir(out, "solve", &config, |dir| {
        let report = solve_1d(&problem, &params)?;
        write_json(
            &dir.file("report.json"),
            &json!({
                "kind": kind_name(kind),
                "lambda": args.lambda,
                "Lambda": args.big_lambda,
                "p": args.p,
                "grid": [a, b, n_raw],
                "bc": [bc.0, bc.1],
                "f": args.f,
                "tol": args.tol,
                "method": report.method,
                "iterations": report.iterations,
                "residual_inf": report.residual_inf,
                "converged": report.converged,
            }),
        )?;
        write_csv(
            &dir.file("solution.csv"),
            &["x", "u"],
            &[grid.nodes(), report.solution.values().to_vec()],
        )?;
        println!(
            "{} converged={} iterations={} residual={}",
            dir.path().display(),
            report.converged,
            report.iterations,
            fmt_f64(report.residual_inf)
        );
        Ok(if report.converged { ExitCode::SUCCESS } else { ExitCode::FAILURE })
    })
}

fn run_experiment(args: &ExperimentArgs, out: Option<&Path>) -> Result<ExitCode> {
    match args.id {
        ExperimentId::Symmetry => run_symmetry(args, out),
        ExperimentId::Bernstein => run_bernstein(args, out),
        ExperimentId::SharpConstant => run_sharp_constant(args, out),
        ExperimentId::Rescale => run_rescale(args, out),
        ExperimentId::LimitRate => run_limit_rate(args, out),
        ExperimentId::Convergence => run_convergence(args, out),
    }
}

fn symmetry_config(args: &ExperimentArgs) -> SymmetryConfig {
    let base = SymmetryConfig::default();
    SymmetryConfig {
        p: args.p.unwrap_or(base.p),
        lambda: args.lambda.unwrap_or(base.lambda),
        big_lambda: args.big_lambda.unwrap_or(base.big_lambda),
        kind: args.kind.map_or(base.kind, OperatorKind::from),
        half_width: args.half_width.unwrap_or(base.half_width),
        height: args.height.unwrap_or(base.height),
        resolution: args.resolution.unwrap_or(base.resolution),
        lateral_amplitude: args.amplitude.unwrap_or(base.lateral_amplitude),
        tol: args.tol.unwrap_or(base.tol),
        max_iter: args.max_iter.unwrap_or(base.max_iter),
    }
}

fn symmetry_config_text(config: &SymmetryConfig) -> String {
    let mut text = String::from("# pucci-lab experiment\nid=symmetry\n");
    let _ = writeln!(text, "p={}", config.p);
    let _ = writeln!(text, "lambda={}", config.lambda);
    let _ = writeln!(text, "Lambda={}", config.big_lambda);
    let _ = writeln!(text, "kind={}", kind_name(config.kind));
    let _ = writeln!(text, "half-width={}", config.half_width);
    let _ = writeln!(text, "height={}", config.height);
    let _ = writeln!(text, "resolution={}", config.resolution);
    let _ = writeln!(text, "amplitude={}", config.lateral_amplitude);
    let _ = writeln!(text, "tol={}", config.tol);
    let _ = writeln!(text, "max-iter={}", config.max_iter);
    text
}

fn run_symmetry(args: &ExperimentArgs, out: Option<&Path>) -> Result<ExitCode> {
    let base = symmetry_config(args);
    match &args.sweep {
        None => {
            let report = symmetry_strip(&base)?;
            with_run_dir(out, "experiment-symmetry", &symmetry_config_text(&base), |dir| {
                write_json(&dir.file("report.json"), &report)?;
                println!(
                    "{} passed={} max_osc={}",
                    dir.path().display(),
                    report.passed,
                    fmt_f64(report.max_osc)
                );
                Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
            })
        }
        Some(literal) => {
            let widths = parse_list_f64(literal, "sweep")?;
            let sweep = symmetry_sweep(&base, &widths)?;
            for report in &sweep.reports {
                let id = format!("experiment-symmetry-w{}", report.config.half_width);
                let dir = RunDir::create(out, &id, &symmetry_config_text(&report.config))?;
                write_json(&dir.file("report.json"), report)?;
            }
            let mut text = symmetry_config_text(&base);
            let _ = writeln!(text, "sweep={literal}");
            with_run_dir(out, "experiment-symmetry-sweep", &text, |dir| {
                write_json(&dir.file("sweep.json"), &sweep)?;
                println!(
                    "{} passed={} ratios={:?}",
                    dir.path().display(),
                    sweep.passed,
                    sweep.ratios.iter().map(|r| fmt_f64(*r)).collect::<Vec<_>>()
                );
                Ok(if sweep.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
            })
        }
    }
}

fn run_bernstein(args: &ExperimentArgs, out: Option<&Path>) -> Result<ExitCode> {
    let base = BernsteinConfig::default();
    let config = BernsteinConfig {
        ps: match &args.ps {
            Some(literal) => parse_list_f64(literal, "ps")?,
            None => base.ps.clone(),
        },
        lambda: args.lambda.unwrap_or(base.lambda),
        big_lambda: args.big_lambda.unwrap_or(base.big_lambda),
        kind: args.kind.map_or(base.kind, OperatorKind::from),
        half_width: args.half_width.unwrap_or(base.half_width),
        height: args.height.unwrap_or(base.height),
        resolution: args.resolution.unwrap_or(base.resolution),
        tol: args.tol.unwrap_or(base.tol),
        max_iter: args.max_iter.unwrap_or(base.max_iter),
        ..base
    };
    let mut text = String::from("# pucci-lab experiment\nid=bernstein\n");
    let ps: Vec<String> = config.ps.iter().map(|p| p.to_string()).collect();
    let _ = writeln!(text, "ps={}", ps.join(","));
    let _ = writeln!(text, "lambda={}", config.lambda);
    let _ = writeln!(text, "Lambda={}", config.big_lambda);
    let _ = writeln!(text, "kind={}", kind_name(config.kind));
    let _ = writeln!(text, "half-width={}", config.half_width);
    let _ = writeln!(text, "height={}", config.height);
    let _ = writeln!(text, "resolution={}", config.resolution);
    let _ = writeln!(text, "tol={}", config.tol);
    let _ = writeln!(text, "max-iter={}", config.max_iter);

    let report = bernstein_experiment(&config)?;
    with_run_dir(out, "experiment-bernstein", &text, |dir| {
        write_json(&dir.file("report.json"), &report)?;
        println!("{} passed={}", dir.path().display(), report.passed);
        Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
    })
}

fn run_sharp_constant(args: &ExperimentArgs, out: Option<&Path>) -> Result<ExitCode> {
    let base = SharpConstantConfig::default();
    let config = SharpConstantConfig {
        p: args.p.unwrap_or(base.p),
        lambda: args.lambda.unwrap_or(base.lambda),
        big_lambda: args.big_lambda.unwrap_or(base.big_lambda),
        kind: args.kind.map_or(base.kind, OperatorKind::from),
        n: args.n.unwrap_or(base.n),
        epsilon: args.eps.unwrap_or(base.epsilon),
        d_min: args.d_min.unwrap_or(base.d_min),
        d_max: args.d_max.unwrap_or(base.d_max),
        tol: args.tol.unwrap_or(base.tol),
        max_iter: args.max_iter.unwrap_or(base.max_iter),
        ..base
    };
    let mut text = String::from("# pucci-lab experiment\nid=sharp-constant\n");
    let _ = writeln!(text, "p={}", config.p);
    let _ = writeln!(text, "lambda={}", config.lambda);
    let _ = writeln!(text, "Lambda={}", config.big_lambda);
    let _ = writeln!(text, "kind={}", kind_name(config.kind));
    let _ = writeln!(text, "n={}", config.n);
    let _ = writeln!(text, "eps={}", config.epsilon);
    let _ = writeln!(text, "d-min={}", config.d_min);
    let _ = writeln!(text, "d-max={}", config.d_max);
    let _ = writeln!(text, "tol={}", config.tol);
    let _ = writeln!(text, "max-iter={}", config.max_iter);

    let report = sharp_constant_probe(&config)?;
    with_run_dir(out, "experiment-sharp-constant", &text, |dir| {
        write_json(&dir.file("report.json"), &report)?;
        println!(
            "{} passed={} sup={} bound={}",
            dir.path().display(),
            report.passed,
            fmt_f64(report.sup_normalized),
            fmt_f64(report.bound)
        );
        Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
    })
}

fn run_rescale(args: &ExperimentArgs, out: Option<&Path>) -> Result<ExitCode> {
    let base = RescaleConfig::default();
    let config = RescaleConfig {
        p: args.p.unwrap_or(base.p),
        lambda: args.lambda.unwrap_or(base.lambda),
        big_lambda: args.big_lambda.unwrap_or(base.big_lambda),
        kind: args.kind.map_or(base.kind, OperatorKind::from),
        dim: args.dim.unwrap_or(base.dim),
        pairs: args.pairs.unwrap_or(base.pairs),
        seed: args.seed.unwrap_or(base.seed),
        ..base
    };
    let mut text = String::from("# pucci-lab experiment\nid=rescale\n");
    let _ = writeln!(text, "p={}", config.p);
    let _ = writeln!(text, "lambda={}", config.lambda);
    let _ = writeln!(text, "Lambda={}", config.big_lambda);
    let _ = writeln!(text, "kind={}", kind_name(config.kind));
    let _ = writeln!(text, "dim={}", config.dim);
    let _ = writeln!(text, "pairs={}", config.pairs);
    let _ = writeln!(text, "seed={}", config.seed);

    let report = rescale_experiment(&config)?;
    with_run_dir(out, "experiment-rescale", &text, |dir| {
        write_json(&dir.file("report.json"), &report)?;
        println!(
            "{} passed={} max_residual={}",
            dir.path().display(),
            report.passed,
            fmt_f64(report.max_residual)
        );
        Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
    })
}

fn run_limit_rate(args: &ExperimentArgs, out: Option<&Path>) -> Result<ExitCode> {
    let base = LimitRateConfig::default();
    let config = LimitRateConfig {
        ps: match &args.ps {
            Some(literal) => parse_list_f64(literal, "ps")?,
            None => base.ps.clone(),
        },
        lambda: args.lambda.unwrap_or(base.lambda),
        big_lambda: args.big_lambda.unwrap_or(base.big_lambda),
        kind: args.kind.map_or(base.kind, OperatorKind::from),
        y_min: args.y_min.unwrap_or(base.y_min),
        y_max: args.y_max.unwrap_or(base.y_max),
        samples: args.samples.unwrap_or(base.samples),
        ..base
    };
    let mut text = String::from("# pucci-lab experiment\nid=limit-rate\n");
    let ps: Vec<String> = config.ps.iter().map(|p| p.to_string()).collect();
    let _ = writeln!(text, "ps={}", ps.join(","));
    let _ = writeln!(text, "lambda={}", config.lambda);
    let _ = writeln!(text, "Lambda={}", config.big_lambda);
    let _ = writeln!(text, "kind={}", kind_name(config.kind));
    let _ = writeln!(text, "y-min={}", config.y_min);
    let _ = writeln!(text, "y-max={}", config.y_max);
    let _ = writeln!(text, "samples={}", config.samples);

    let report = limit_rate_experiment(&config)?;
    with_run_dir(out, "experiment-limit-rate", &text, |dir| {
        write_json(&dir.file("report.json"), &report)?;
        println!("{} passed={}", dir.path().display(), report.passed);
        Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
    })
}

fn run_convergence(args: &ExperimentArgs, out: Option<&Path>) -> Result<ExitCode> {
    let p = args.p.unwrap_or(3.0);
    let chat = args.chat.unwrap_or(0.0);
    let lambda = args.lambda.unwrap_or(1.0);
    let big_lambda = args.big_lambda.unwrap_or(2.0);
    let kind: OperatorKind = args.kind.map_or(OperatorKind::Plus, OperatorKind::from);
    let interval = match &args.interval {
        Some(literal) => parse_pair(literal, "interval")?,
        None => (1e-2, 1.0),
    };
    let ns = match &args.ns {
        Some(literal) => parse_list_usize(literal, "ns")?,
        None => vec![65, 129, 257, 513],
    };
    let tol = args.tol.unwrap_or(1e-9);
    let max_iter = args.max_iter.unwrap_or(100_000);

    let ell = Ellipticity64::new(lambda, big_lambda)?;
    let profile = Profile::high_p(p, chat, kind, ell)?;
    let params = SolverParams64::default().with_tol(tol).with_max_iter(max_iter);
    let case = StudyCase::profile(profile, interval)?;
    let study = convergence_study(&case, &ns, &params)?;
    let monotone = study.errors.windows(2).all(|pair| pair[1] < pair[0]);
    let final_order = study.final_order().unwrap_or(0.0);

    let linear_case =
        StudyCase::linear_sine(kind, Ellipticity64::new(lambda, lambda)?, interval);
    let linear = convergence_study(&linear_case, &ns, &params)?;
    let linear_order = linear.final_order().unwrap_or(0.0);

    let passed = monotone && final_order >= 0.9 && (linear_order - 2.0).abs() <= 0.3;

    let mut text = String::from("# pucci-lab experiment\nid=convergence\n");
    let _ = writeln!(text, "p={p}");
    let _ = writeln!(text, "chat={chat}");
    let _ = writeln!(text, "lambda={lambda}");
    let _ = writeln!(text, "Lambda={big_lambda}");
    let _ = writeln!(text, "kind={}", kind_name(kind));
    let _ = writeln!(text, "interval={},{}", interval.0, interval.1);
    let ns_text: Vec<String> = ns.iter().map(|n| n.to_string()).collect();
    let _ = writeln!(text, "ns={}", ns_text.join(","));
    let _ = writeln!(text, "tol={tol}");
    let _ = writeln!(text, "max-iter={max_iter}");

    with_run_dir(out, "experiment-convergence", &text, |dir| {
        write_json(
            &dir.file("report.json"),
            &json!({
                "profile": study,
                "final_order": final_order,
                "errors_monotone": monotone,
                "linear": linear,
                "linear_order": linear_order,
                "passed": passed,
            }),
        )?;
        println!(
            "{} passed={} final_order={} linear_order={}",
            dir.path().display(),
            passed,
            fmt_f64(final_order),
            fmt_f64(linear_order)
        );
        Ok(if passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
    })
}

/// One summary row per run directory.  Profile records are re-ingested and
/// rebuilt to confirm the stored parameters survive the round trip.
fn run_report(args: &ReportArgs) -> Result<ExitCode> {
    let root = match &args.dir {
        Some(dir) => dir.clone(),
        None => std::env::var_os("PUCCI_LAB_OUT").map_or_else(|| PathBuf::from("runs"), PathBuf::from),
    };
    let mut entries: Vec<PathBuf> = fs::read_dir(&root)
        .with_context(|| format!("reading run root {}", root.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|path| path.is_dir())
        .collect();
    entries.sort();

    let mut all_ok = true;
    println!("{:<42} {:<12} {}", "run", "command", "status");
    for path in &entries {
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("?").to_string();
        let command = fs::read_to_string(path.join("config.txt"))
            .ok()
            .and_then(|text| {
                text.lines()
                    .next()
                    .and_then(|line| line.strip_prefix("# pucci-lab ").map(str::to_string))
            })
            .unwrap_or_else(|| "?".to_string());
        let status = summarize_run(path);
        if status != "ok" && status != "pass" {
            all_ok = false;
        }
        println!("{name:<42} {command:<12} {status}");
    }
    println!("{} runs", entries.len());
    Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn summarize_run(path: &Path) -> String {
    let record = path.join("record.json");
    if record.is_file() {
        return match profile_roundtrip(&record) {
            Ok(true) => "ok".to_string(),
            Ok(false) => "drift".to_string(),
            Err(_) => "error".to_string(),
        };
    }
    for name in ["report.json", "sweep.json"] {
        let file = path.join(name);
        if !file.is_file() {
            continue;
        }
        let Ok(text) = fs::read_to_string(&file) else {
            return "error".to_string();
        };
        let Ok(value) = serde_json::from_str::<serde_json::Value>(&text) else {
            return "error".to_string();
        };
        if let Some(passed) = value.get("passed").and_then(|v| v.as_bool()) {
            return if passed { "pass".to_string() } else { "fail".to_string() };
        }
        if let Some(converged) = value.get("converged").and_then(|v| v.as_bool()) {
            return if converged { "pass".to_string() } else { "fail".to_string() };
        }
        return "ok".to_string();
    }
    "empty".to_string()
}

fn profile_roundtrip(record_path: &Path) -> Result<bool> {
    let text = fs::read_to_string(record_path)?;
    let record: ProfileRecord = serde_json::from_str(&text)?;
    let rebuilt: Profile64 = Profile::from_record(&record)?;
    Ok(rebuilt.to_record() == record)
}
