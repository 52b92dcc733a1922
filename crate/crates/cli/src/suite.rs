//! The `paper-examples` suite: the tridiagonal example at two sizes and three
//! values of γ, its phase portraits in two and three dimensions, and the three
//! planar toy problems. Every trajectory gets its own CSV; `summary.json`
//! records the outcomes and the checks made on them. Wall times are left out
//! so that repeated runs give identical summaries.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use socave::ave::AveProblem;
use socave::dynamics::DynamicsConfig;
use socave::integrator::{integrate, time_to_tolerance, IntegratorOptions, Termination, Trajectory};
use socave::linalg::{distance, norm_inf, sub};
use socave::problems::{example_toy, example_tridiag, start_grid, tridiag_alternating, ToyExample, GRID_RADIUS};

pub const SUITE_NAME: &str = "paper-examples";

const TRIDIAG_GAMMAS: [f64; 3] = [50.0, 100.0, 200.0];
const TRIDIAG_SIZES: [usize; 2] = [100, 1000];
const TRIDIAG_TSPAN: (f64, f64) = (0.0, 0.1);
const CONVERGENCE_TOL: f64 = 1e-4;
const PHASE_GAMMA: f64 = 100.0;
const TOY_GAMMA: f64 = 2.0;

/// States wider than this are summarized by their error instead of written
/// out in full.
const FULL_CSV_MAX_DIM: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub id: String,
    pub problem: String,
    pub gamma: f64,
    pub tspan: [f64; 2],
    pub x0: Option<Vec<f64>>,
    pub termination: Termination,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub final_state: Option<Vec<f64>>,
    pub final_residual_norm: f64,
    pub min_residual_norm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_inf: Option<f64>,
    pub time_to_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
    pub csv: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub passed: bool,
    pub criteria: Vec<CriterionResult>,
    pub runs: Vec<RunSummary>,
}

struct Job {
    id: String,
    group: &'static str,
    problem: AveProblem,
    x_star: Option<Vec<f64>>,
    gamma: f64,
    tspan: (f64, f64),
    x0: Vec<f64>,
}

fn plan() -> Result<Vec<Job>> {
    let mut jobs = Vec::new();
    for n in TRIDIAG_SIZES {
        let (p, xs) = example_tridiag(n)?;
        for gamma in TRIDIAG_GAMMAS {
            jobs.push(Job {
                id: format!("tridiag-n{n}-gamma{gamma}"),
                group: if n == 100 { "tridiag-100" } else { "tridiag-1000" },
                problem: p.clone(),
                x_star: Some(xs.clone()),
                gamma,
                tspan: TRIDIAG_TSPAN,
                x0: vec![0.0; n],
            });
        }
    }
    for (n, points) in [(2, 16), (3, 20)] {
        let (p, xs) = tridiag_alternating(n)?;
        for (j, x0) in start_grid(&xs, points, GRID_RADIUS).into_iter().enumerate() {
            jobs.push(Job {
                id: format!("phase-n{n}-{j:03}"),
                group: if n == 2 { "phase-2" } else { "phase-3" },
                problem: p.clone(),
                x_star: Some(xs.clone()),
                gamma: PHASE_GAMMA,
                tspan: TRIDIAG_TSPAN,
                x0,
            });
        }
    }
    let toys = [
        (ToyExample::Multi, [0.0, 0.0], 7, 5.0),
        (ToyExample::Unique, [0.0, 1.0], 8, 5.0),
        (ToyExample::NoSolution, [0.0, 0.0], 8, 10.0),
    ];
    for (which, center, points, tf) in toys {
        for (j, x0) in start_grid(&center, points, GRID_RADIUS).into_iter().enumerate() {
            jobs.push(Job {
                id: format!("toy-{}-{j:03}", which.name()),
                group: which.name(),
                problem: example_toy(which),
                x_star: which.solution(),
                gamma: TOY_GAMMA,
                tspan: (0.0, tf),
                x0,
            });
        }
    }
    Ok(jobs)
}

fn convergence_csv(traj: &Trajectory, x_star: &[f64]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "error_norm", "residual_norm"]).expect("writing to memory");
    for ((t, x), r) in traj.times.iter().zip(&traj.states).zip(&traj.residual_norms) {
        let row = [*t, distance(x, x_star), *r].map(|v| format!("{v:.16e}"));
        w.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output")
}

fn summarize(job: &Job, traj: &Trajectory, csv_name: String) -> RunSummary {
    let small = job.problem.dim() <= FULL_CSV_MAX_DIM;
    let x1_increasing = traj.states.windows(2).all(|w| w[1][0] > w[0][0]);
    let mut flags = Vec::new();
    if job.group == ToyExample::NoSolution.name() && x1_increasing {
        flags.push("diverging, x1 increasing".to_string());
    }
    RunSummary {
        id: job.id.clone(),
        problem: job.problem.name().to_string(),
        gamma: job.gamma,
        tspan: [job.tspan.0, job.tspan.1],
        x0: small.then(|| job.x0.clone()),
        termination: traj.termination,
        accepted_steps: traj.accepted_steps,
        rejected_steps: traj.rejected_steps,
        final_state: small.then(|| traj.final_state().to_vec()),
        final_residual_norm: *traj.residual_norms.last().unwrap(),
        min_residual_norm: traj.residual_norms.iter().copied().fold(f64::INFINITY, f64::min),
        error_inf: job.x_star.as_ref().map(|xs| norm_inf(&sub(traj.final_state(), xs))),
        time_to_tolerance: time_to_tolerance(traj, CONVERGENCE_TOL),
        flags,
        csv: csv_name,
    }
}

fn criterion(name: &str, passed: bool, detail: String) -> CriterionResult {
    CriterionResult { name: name.to_string(), passed, detail }
}

fn group<'a>(jobs: &'a [Job], runs: &'a [RunSummary], name: &'a str) -> impl Iterator<Item = &'a RunSummary> + 'a {
    jobs.iter().zip(runs).filter(move |(j, _)| j.group == name).map(|(_, r)| r)
}

fn check(jobs: &[Job], runs: &[RunSummary]) -> Vec<CriterionResult> {
    let mut out = Vec::new();

    let large: Vec<&RunSummary> = group(jobs, runs, "tridiag-1000").collect();
    let err = large.last().and_then(|r| r.error_inf).unwrap_or(f64::INFINITY);
    out.push(criterion(
        "tridiag-1000 accuracy",
        err <= CONVERGENCE_TOL,
        format!("‖x(tf) − x*‖∞ = {err:.3e} at γ = {}", TRIDIAG_GAMMAS[2]),
    ));
    for g in ["tridiag-100", "tridiag-1000"] {
        let times: Vec<Option<f64>> = group(jobs, runs, g).map(|r| r.time_to_tolerance).collect();
        let ok = times.iter().all(Option::is_some) && times.windows(2).all(|w| w[1] < w[0]);
        out.push(criterion(
            &format!("{g} faster with larger gamma"),
            ok,
            format!("time to residual {CONVERGENCE_TOL:e} for γ = {TRIDIAG_GAMMAS:?}: {times:?}"),
        ));
    }
    for g in ["phase-2", "phase-3"] {
        let worst = group(jobs, runs, g).filter_map(|r| r.error_inf).fold(0.0, f64::max);
        let count = group(jobs, runs, g).count();
        out.push(criterion(
            &format!("{g} converges"),
            worst <= CONVERGENCE_TOL,
            format!("{count} starts, max ‖x(tf) − x*‖∞ = {worst:.3e}"),
        ));
    }

    let multi: Vec<&RunSummary> = group(jobs, runs, ToyExample::Multi.name()).collect();
    let (mut x2, mut x1, mut res) = (0.0f64, f64::INFINITY, 0.0f64);
    for r in &multi {
        let xf = r.final_state.as_deref().unwrap_or(&[f64::NAN, f64::NAN]);
        x2 = x2.max(xf[1].abs());
        x1 = x1.min(xf[0]);
        res = res.max(r.final_residual_norm);
    }
    out.push(criterion(
        "multi reaches the solution ray",
        x2 <= 1e-4 && x1 >= -1e-6 && res <= 1e-3,
        format!("{} starts, max |x2| = {x2:.2e}, min x1 = {x1:.4}, max residual {res:.2e}", multi.len()),
    ));

    let worst = group(jobs, runs, ToyExample::Unique.name())
        .map(|r| r.final_state.as_deref().map_or(f64::INFINITY, |x| distance(x, &[0.0, 1.0])))
        .fold(0.0, f64::max);
    out.push(criterion("unique converges to (0, 1)", worst <= 1e-3, format!("max distance {worst:.2e}")));

    let none: Vec<&RunSummary> = group(jobs, runs, ToyExample::NoSolution.name()).collect();
    let diverging = none.iter().filter(|r| !r.flags.is_empty()).count();
    let min_res = none.iter().map(|r| r.min_residual_norm).fold(f64::INFINITY, f64::min);
    out.push(criterion(
        "none diverges",
        diverging == none.len() && min_res >= 0.1,
        format!("{diverging} of {} starts with x1 increasing, min residual {min_res:.4}", none.len()),
    ));
    out
}

/// Runs the named suite, writing CSVs and `summary.json` into `out_dir`.
pub fn run(name: &str, out_dir: &Path) -> Result<SuiteSummary> {
    if name != SUITE_NAME {
        bail!("unknown suite {name:?}; the only suite is {SUITE_NAME:?}");
    }
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let jobs = plan()?;
    let opts = IntegratorOptions::default();

    // Trajectories are independent; run them side by side and keep job order.
    let trajectories: Vec<Result<Trajectory>> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|job| {
                let opts = &opts;
                s.spawn(move || -> Result<Trajectory> {
                    let cfg = DynamicsConfig::new(job.gamma)?;
                    Ok(integrate(&job.problem, cfg, &job.x0, job.tspan, opts)?)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("integration thread panicked")).collect()
    });

    let mut runs = Vec::with_capacity(jobs.len());
    for (job, traj) in jobs.iter().zip(trajectories) {
        let traj = traj.with_context(|| format!("run {}", job.id))?;
        let file = format!("{}.csv", job.id);
        let path = out_dir.join(&file);
        match &job.x_star {
            Some(xs) if job.problem.dim() > FULL_CSV_MAX_DIM => std::fs::write(&path, convergence_csv(&traj, xs))
                .with_context(|| format!("writing {}", path.display()))?,
            _ => crate::csv::write(&path, &traj)?,
        }
        runs.push(summarize(job, &traj, file));
    }

    let criteria = check(&jobs, &runs);
    let summary = SuiteSummary { suite: name.to_string(), passed: criteria.iter().all(|c| c.passed), criteria, runs };
    let path = out_dir.join("summary.json");
    std::fs::write(&path, serde_json::to_string_pretty(&summary)? + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(summary)
}
