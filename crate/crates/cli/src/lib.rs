//! Command-line front end for the `socave` solver.
//!
//! Exit codes: 0 on success, 1 for bad input, 2 when the integrator gives up
//! (step limit or step-size underflow), 3 when a verification fails.

pub mod csv;
pub mod suite;

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use socave::ave::{AveProblem, ProblemFile, SolvabilityCertificate};
use socave::dynamics::DynamicsConfig;
use socave::integrator::{integrate, time_to_tolerance, IntegratorOptions, Termination, Trajectory};
use socave::linalg::{distance, norm, norm_inf, sub};
use socave::problems::{start_grid, BuiltinSpec, GRID_RADIUS};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_NOT_CONVERGED: u8 = 2;
pub const EXIT_VERIFY_FAILED: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "socave", version, about = "Solve second-order cone absolute value equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the dynamical system from one or more starting points.
    Solve(SolveArgs),
    /// Check whether a candidate vector solves a problem.
    Verify(VerifyArgs),
    /// Regenerate the reference experiments and check their outcomes.
    Suite(SuiteArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ProblemSource {
    /// Problem description in JSON.
    #[arg(long)]
    pub problem: Option<PathBuf>,
    /// Built-in problem: tridiag, multi, unique or none.
    #[arg(long)]
    pub builtin: Option<String>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: ProblemSource,
    /// Dimension of the built-in tridiagonal problem.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub gamma: f64,
    /// Integration interval as `T0,TF`.
    #[arg(long, value_parser = parse_tspan, allow_hyphen_values = true)]
    pub tspan: (f64, f64),
    /// Start point: a comma-separated list, `zeros`, `grid:<k>` (k points at
    /// distance 3 from the known solution, or from the origin) or a JSON file
    /// holding one vector or an array of vectors.
    #[arg(long, default_value = "zeros", allow_hyphen_values = true)]
    pub x0: String,
    #[arg(long, default_value_t = 1e-6)]
    pub rtol: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub atol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_steps: usize,
    /// Stop once the residual norm drops to this level.
    #[arg(long)]
    pub stop_residual: Option<f64>,
    /// Residual levels whose first hitting time goes into the report.
    #[arg(long, value_delimiter = ',')]
    pub time_to_tol: Vec<f64>,
    /// Trajectory CSV. With several starts, `<stem>_NNN.csv` files are written
    /// next to it.
    #[arg(long)]
    pub out: PathBuf,
    /// Report JSON; an array when there are several starts.
    #[arg(long)]
    pub report: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub source: ProblemSource,
    #[arg(long)]
    pub n: Option<usize>,
    /// JSON array with the candidate solution.
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    #[arg(long)]
    pub name: String,
    #[arg(long)]
    pub out_dir: PathBuf,
}

fn parse_tspan(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected T0,TF")?;
    let t0: f64 = a.trim().parse().map_err(|e| format!("T0: {e}"))?;
    let tf: f64 = b.trim().parse().map_err(|e| format!("TF: {e}"))?;
    if !(t0.is_finite() && tf.is_finite() && tf > t0) {
        return Err(format!("need finite T0 < TF, got {t0},{tf}"));
    }
    Ok((t0, tf))
}

/// First hitting time of one residual level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToleranceHit {
    pub tol: f64,
    pub time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub problem: String,
    pub certificate: SolvabilityCertificate,
    pub gamma: f64,
    pub tspan: [f64; 2],
    pub x0: Vec<f64>,
    pub termination: Termination,
    pub final_time: f64,
    pub final_state: Vec<f64>,
    /// Recomputed from `final_state`.
    pub final_residual_norm: f64,
    pub time_to_tolerance: Vec<ToleranceHit>,
    pub wall_time_seconds: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_to_reference: Option<f64>,
    pub trajectory_csv: String,
}

impl SolveReport {
    pub fn new(
        p: &AveProblem,
        cfg: DynamicsConfig,
        x0: &[f64],
        traj: &Trajectory,
        tols: &[f64],
        reference: Option<&[f64]>,
    ) -> Result<Self> {
        let final_state = traj.final_state().to_vec();
        Ok(Self {
            problem: p.name().to_string(),
            certificate: p.solvability_certificate(),
            gamma: cfg.gamma(),
            tspan: [traj.times[0], traj.final_time()],
            x0: x0.to_vec(),
            termination: traj.termination,
            final_time: traj.final_time(),
            final_residual_norm: p.residual_norm(&final_state)?,
            time_to_tolerance: tols
                .iter()
                .map(|&tol| ToleranceHit { tol, time: time_to_tolerance(traj, tol) })
                .collect(),
            wall_time_seconds: 0.0,
            accepted_steps: traj.accepted_steps,
            rejected_steps: traj.rejected_steps,
            distance_to_reference: reference.map(|xs| distance(&final_state, xs)),
            final_state,
            trajectory_csv: String::new(),
        })
    }
}

/// Problem and optional known solution from a file or a built-in name.
pub fn load_problem(source: &ProblemSource, n: Option<usize>) -> Result<(AveProblem, Option<Vec<f64>>)> {
    if let Some(path) = &source.problem {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let file = ProblemFile::from_json(&text)?;
        return Ok(file.into_problem()?);
    }
    let name = source.builtin.as_deref().context("either --problem or --builtin is required")?;
    Ok(BuiltinSpec::parse(name, n)?.build()?)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StartFile {
    One(Vec<f64>),
    Many(Vec<Vec<f64>>),
}

/// Expands an `--x0` argument into start points of length `n`.
pub fn parse_starts(spec: &str, n: usize, center: Option<&[f64]>) -> Result<Vec<Vec<f64>>> {
    let starts = if spec == "zeros" {
        vec![vec![0.0; n]]
    } else if let Some(k) = spec.strip_prefix("grid:") {
        let k: usize = k.parse().with_context(|| format!("grid size in {spec:?}"))?;
        ensure!(k > 0, "grid size must be positive");
        let origin = vec![0.0; n];
        start_grid(center.unwrap_or(&origin), k, GRID_RADIUS)
    } else if let Ok(values) = spec.split(',').map(|v| v.trim().parse::<f64>()).collect::<Result<Vec<_>, _>>() {
        vec![values]
    } else {
        let text =
            std::fs::read_to_string(spec).with_context(|| format!("x0 {spec:?} is not a list, keyword or file"))?;
        match serde_json::from_str(&text).with_context(|| format!("parsing {spec}"))? {
            StartFile::One(v) => vec![v],
            StartFile::Many(vs) => vs,
        }
    };
    ensure!(!starts.is_empty(), "no start points");
    for x in &starts {
        ensure!(x.len() == n, "start point has length {}, problem has dimension {n}", x.len());
        ensure!(x.iter().all(|v| v.is_finite()), "start point has non-finite entries");
    }
    Ok(starts)
}

fn numbered_path(out: &Path, index: usize) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = out.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_else(|| "csv".into());
    out.with_file_name(format!("{stem}_{index:03}.{ext}"))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

pub fn cmd_solve(args: &SolveArgs) -> Result<u8> {
    let (p, reference) = load_problem(&args.source, args.n)?;
    let cfg = DynamicsConfig::new(args.gamma)?;
    let opts = IntegratorOptions {
        rtol: args.rtol,
        atol: args.atol,
        max_steps: args.max_steps,
        stop_on_residual: args.stop_residual,
        ..Default::default()
    };
    opts.validate()?;
    let starts = parse_starts(&args.x0, p.dim(), reference.as_deref())?;
    let mut tols = args.time_to_tol.clone();
    if let Some(level) = args.stop_residual {
        if !tols.contains(&level) {
            tols.push(level);
        }
    }

    let mut reports = Vec::with_capacity(starts.len());
    for (i, x0) in starts.iter().enumerate() {
        let clock = Instant::now();
        let traj = integrate(&p, cfg, x0, args.tspan, &opts)?;
        let wall = clock.elapsed().as_secs_f64();
        let path = if starts.len() == 1 { args.out.clone() } else { numbered_path(&args.out, i) };
        csv::write(&path, &traj)?;
        let mut report = SolveReport::new(&p, cfg, x0, &traj, &tols, reference.as_deref())?;
        report.wall_time_seconds = wall;
        report.trajectory_csv = path.display().to_string();
        reports.push(report);
    }

    if reports.len() == 1 {
        write_json(&args.report, &reports[0])?;
    } else {
        write_json(&args.report, &reports)?;
    }
    for r in &reports {
        println!(
            "{}: {:?} at t = {} with residual {:.3e} ({} steps)",
            r.trajectory_csv, r.termination, r.final_time, r.final_residual_norm, r.accepted_steps
        );
    }
    let converged = reports.iter().all(|r| r.termination.is_success());
    Ok(if converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<u8> {
    let (p, _) = load_problem(&args.source, args.n)?;
    ensure!(args.tol > 0.0 && args.tol.is_finite(), "tolerance must be positive");
    let text = std::fs::read_to_string(&args.x).with_context(|| format!("reading {}", args.x.display()))?;
    let x: Vec<f64> = serde_json::from_str(&text).with_context(|| format!("parsing {}", args.x.display()))?;
    if x.len() != p.dim() {
        bail!("candidate has length {}, problem has dimension {}", x.len(), p.dim());
    }
    let direct = p.residual(&x)?;
    let projected = p.residual_projection_form(&x)?;
    let solved = p.is_solution(&x, args.tol)?;
    println!("residual_norm {:.6e}", norm(&direct));
    println!("projection_form_norm {:.6e}", norm(&projected));
    println!("form_disagreement {:.3e}", norm_inf(&sub(&direct, &projected)));
    println!("{}", if solved { "solution" } else { "not a solution" });
    Ok(if solved { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

pub fn cmd_suite(args: &SuiteArgs) -> Result<u8> {
    let summary = suite::run(&args.name, &args.out_dir)?;
    for c in &summary.criteria {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(if summary.passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

pub fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Suite(a) => cmd_suite(a),
    }
}
