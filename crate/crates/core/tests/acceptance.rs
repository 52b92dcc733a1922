//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use socave::ave::AveProblem;
use socave::dynamics::{lyapunov_value, rhs, DynamicsConfig};
use socave::integrator::{integrate, solve_ivp, time_to_tolerance, IntegratorOptions, Termination, Trajectory};
use socave::linalg::{distance, dot, norm, norm_inf, sub};
use socave::problems::{example_toy, example_tridiag, random_unique, start_grid, ToyExample, GRID_RADIUS};
use socave::rng::SplitMix64;
use socave::soc::{
    complementarity_residual, cone_membership, decompose, jordan_product, project_cone, soc_abs, BlockMembership,
};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn run_toy(which: ToyExample, center: &[f64], points: usize, tf: f64) -> Vec<Trajectory> {
    let p = example_toy(which);
    let cfg = DynamicsConfig::new(2.0).unwrap();
    start_grid(center, points, GRID_RADIUS)
        .iter()
        .map(|x0| integrate(&p, cfg, x0, (0.0, tf), &IntegratorOptions::default()).unwrap())
        .collect()
}

// 1. Tridiagonal example at n = 1000 and the effect of γ.
fn tridiag_reproduction() -> Outcome {
    const N: usize = 1000;
    let (p, x_star) = example_tridiag(N).unwrap();
    let x0 = vec![0.0; N];
    let mut times = Vec::new();
    let mut final_err = f64::NAN;
    let mut elapsed = Duration::ZERO;
    for gamma in [50.0, 100.0, 200.0] {
        let start = Instant::now();
        let traj =
            integrate(&p, DynamicsConfig::new(gamma).unwrap(), &x0, (0.0, 0.1), &IntegratorOptions::default()).unwrap();
        if gamma == 200.0 {
            elapsed = start.elapsed();
            final_err = norm_inf(&sub(traj.final_state(), &x_star));
        }
        times.push(time_to_tolerance(&traj, 1e-4));
    }
    let decreasing = times.iter().all(Option::is_some) && times.windows(2).all(|w| w[1].unwrap() < w[0].unwrap());
    outcome(
        final_err <= 1e-4 && elapsed <= Duration::from_secs(60) && decreasing,
        format!("‖x(tf)−x*‖∞ = {final_err:.3e}, runtime {elapsed:.2?}, time to 1e-4 for γ = 50/100/200: {times:?}"),
    )
}

// 2. Infinitely many solutions: limits and case signs.
fn multi_solution_example() -> Outcome {
    let p = example_toy(ToyExample::Multi);
    let cfg = DynamicsConfig::new(2.0).unwrap();
    let trajs = run_toy(ToyExample::Multi, &[0.0, 0.0], 7, 5.0);
    let mut worst_x2 = 0.0f64;
    let mut worst_x1 = f64::INFINITY;
    let mut worst_res = 0.0f64;
    let mut sign_violations = 0;
    for traj in &trajs {
        let xf = traj.final_state();
        worst_x2 = worst_x2.max(xf[1].abs());
        worst_x1 = worst_x1.min(xf[0]);
        worst_res = worst_res.max(*traj.residual_norms.last().unwrap());
        for x in &traj.states {
            let d = rhs(&p, cfg, x).unwrap();
            let (x1, x2) = (x[0], x[1]);
            let x2_ok = if x2 > 0.0 {
                d[1] <= 1e-12
            } else if x2 < 0.0 {
                d[1] >= -1e-12
            } else {
                d[1].abs() <= 1e-12
            };
            let x1_ok = if x1 >= x2.abs() { d[0].abs() <= 1e-12 } else { d[0] >= -1e-12 };
            if !(x1_ok && x2_ok) {
                sign_violations += 1;
            }
        }
    }
    outcome(
        worst_x2 <= 1e-4 && worst_x1 >= -1e-6 && worst_res <= 1e-3 && sign_violations == 0,
        format!(
            "{} starts: max |x₂| = {worst_x2:.2e}, min x₁ = {worst_x1:.3}, max ‖r‖ = {worst_res:.2e}, sign violations {sign_violations}",
            trajs.len()
        ),
    )
}

// 3. Unique solution (0, 1).
fn unique_solution_example() -> Outcome {
    let trajs = run_toy(ToyExample::Unique, &[0.0, 1.0], 8, 5.0);
    let worst = trajs.iter().map(|t| distance(t.final_state(), &[0.0, 1.0])).fold(0.0, f64::max);
    outcome(worst <= 1e-3, format!("{} starts: max ‖x(5) − (0,1)‖ = {worst:.2e}", trajs.len()))
}

// 4. No solution: x₁ increases, residual stays away from zero.
fn no_solution_example() -> Outcome {
    let trajs = run_toy(ToyExample::NoSolution, &[0.0, 0.0], 8, 10.0);
    let increasing = trajs.iter().all(|t| t.states.windows(2).all(|w| w[1][0] > w[0][0]));
    let min_res = trajs.iter().flat_map(|t| t.residual_norms.iter().copied()).fold(f64::INFINITY, f64::min);
    outcome(
        increasing && min_res >= 0.1,
        format!("{} starts: x₁ strictly increasing = {increasing}, min ‖r‖ = {min_res:.4}", trajs.len()),
    )
}

// 5. Direct and projection residuals agree.
fn residual_form_equivalence() -> Outcome {
    let mut rng = SplitMix64::new(5);
    let mut max_gap = 0.0f64;
    let mut counts = [0usize; 3];
    for _ in 0..1000 {
        let n = 1 + rng.below(50);
        let cone = random_blocks(&mut rng, n, 8);
        let a = random_matrix(&mut rng, n);
        let b = rng.gaussian_vec(n);
        let p = AveProblem::new(a, b, cone.clone(), "random").unwrap();
        let mut x = Vec::with_capacity(n);
        for &len in cone.blocks() {
            let case = random_case(&mut rng, len);
            x.extend(block_in_case(&mut rng, len, case));
        }
        for m in cone_membership(&x, &cone, 0.0).unwrap().blocks {
            match m {
                BlockMembership::Interior | BlockMembership::Boundary => counts[0] += 1,
                BlockMembership::InsideNegativeCone | BlockMembership::OutsideCone => counts[1] += 1,
                BlockMembership::Neither => counts[2] += 1,
            }
        }
        let direct = p.residual(&x).unwrap();
        let projected = p.residual_projection_form(&x).unwrap();
        max_gap = max_gap.max(norm_inf(&sub(&direct, &projected)));
    }
    outcome(
        max_gap <= 1e-10 && counts.iter().all(|&c| c >= 100),
        format!("max discrepancy {max_gap:.2e}; blocks in K / −K / neither: {counts:?}"),
    )
}

fn violating_block(rng: &mut SplitMix64, len: usize) -> (Vec<f64>, Vec<f64>) {
    let delta = rng.uniform(0.01, 1.0);
    if len == 1 {
        return if rng.below(2) == 0 { (vec![delta], vec![rng.uniform(0.01, 1.0)]) } else { (vec![-delta], vec![0.0]) };
    }
    let d = unit(rng, len - 1);
    match rng.below(3) {
        // Same frame, both eigenvalues in one slot positive.
        0 => (
            frame_combination(&d, [rng.uniform(0.01, 2.0), rng.uniform(0.0, 2.0)]),
            frame_combination(&d, [delta, 0.0]),
        ),
        // A negative eigenvalue.
        1 => (frame_combination(&d, [-delta, rng.uniform(0.0, 2.0)]), vec![0.0; len]),
        // Two interior points: ⟨s, t⟩ > 0.
        _ => (block_in_case(rng, len, Case::Cone), block_in_case(rng, len, Case::Cone)),
    }
}

// 6. Complementarity through s + t = |s − t|.
fn complementarity_oracle() -> Outcome {
    let mut rng = SplitMix64::new(6);
    let mut worst_good = 0.0f64;
    let mut worst_bad = f64::INFINITY;
    for _ in 0..500 {
        let n = 1 + rng.below(20);
        let cone = random_blocks(&mut rng, n, 6);
        let (s, t) = complementary_pair(&mut rng, &cone);
        debug_assert!(dot(&s, &t).abs() < 1e-12);
        worst_good = worst_good.max(complementarity_residual(&s, &t, &cone).unwrap());
    }
    for _ in 0..500 {
        let n = 1 + rng.below(20);
        let cone = random_blocks(&mut rng, n, 6);
        let (mut s, mut t) = complementary_pair(&mut rng, &cone);
        let j = rng.below(cone.num_blocks());
        let range = cone.ranges().nth(j).unwrap();
        let (bs, bt) = violating_block(&mut rng, range.len());
        s[range.clone()].copy_from_slice(&bs);
        t[range].copy_from_slice(&bt);
        worst_bad = worst_bad.min(complementarity_residual(&s, &t, &cone).unwrap());
    }
    outcome(
        worst_good <= 1e-10 && worst_bad > 1e-6,
        format!("complementary max {worst_good:.2e}, violated min {worst_bad:.2e}"),
    )
}

// 7. Contraction inequality on certified instances.
fn contraction_inequality() -> Outcome {
    let mut rng = SplitMix64::new(7);
    let mut worst = f64::INFINITY;
    for instance in 0..50u64 {
        let n = 1 + rng.below(30);
        let cone = random_blocks(&mut rng, n, 8);
        let (p, x_star) = random_unique(n, &cone, 0.1, 1000 + instance).unwrap();
        for _ in 0..100 {
            let scale = 10f64.powf(rng.uniform(-3.0, 1.0));
            let x: Vec<f64> = x_star.iter().map(|v| v + scale * rng.gaussian()).collect();
            worst = worst.min(p.contraction_gap(&x, &x_star).unwrap());
        }
    }
    outcome(worst >= -1e-10, format!("min gap over 5000 points {worst:.3e}"))
}

fn lyapunov_nonincreasing(traj: &Trajectory, x_star: &[f64]) -> (bool, f64) {
    let values: Vec<f64> = traj.states.iter().map(|x| lyapunov_value(x, x_star).unwrap()).collect();
    let worst_rise =
        values.windows(2).map(|w| if w[0].is_infinite() { 0.0 } else { w[1] - w[0] }).fold(f64::NEG_INFINITY, f64::max);
    (worst_rise <= 1e-8, worst_rise)
}

// 8. Lyapunov function decreases along trajectories.
fn lyapunov_monotonicity() -> Outcome {
    let mut all_ok = true;
    let mut details = Vec::new();

    let (p, x_star) = example_tridiag(100).unwrap();
    let traj =
        integrate(&p, DynamicsConfig::new(10.0).unwrap(), &[0.0; 100], (0.0, 1.0), &IntegratorOptions::default())
            .unwrap();
    let (ok, rise) = lyapunov_nonincreasing(&traj, &x_star);
    all_ok &= ok;
    details.push(format!("tridiag-100 worst rise {rise:.2e} over {} states", traj.len()));

    let mut rng = SplitMix64::new(8);
    let mut worst = f64::NEG_INFINITY;
    for seed in 0..10u64 {
        let n = 2 + rng.below(19);
        let cone = random_blocks(&mut rng, n, 6);
        let (p, x_star) = random_unique(n, &cone, 0.1, 500 + seed).unwrap();
        let x0 = start_grid(&x_star, 1 + seed as usize, GRID_RADIUS)[seed as usize].clone();
        let traj =
            integrate(&p, DynamicsConfig::new(1.0).unwrap(), &x0, (0.0, 5.0), &IntegratorOptions::default()).unwrap();
        let (ok, rise) = lyapunov_nonincreasing(&traj, &x_star);
        all_ok &= ok;
        worst = worst.max(rise);
    }
    details.push(format!("10 random instances worst rise {worst:.2e}"));
    outcome(all_ok, details.join("; "))
}

// 9. Jordan algebra identities.
fn jordan_suite() -> Outcome {
    let mut rng = SplitMix64::new(9);
    let mut worst = [0.0f64; 6];
    for _ in 0..1000 {
        let n = 1 + rng.below(12);
        let cone = random_blocks(&mut rng, n, 6);
        let x: Vec<f64> = rng.gaussian_vec(n);
        let y: Vec<f64> = rng.gaussian_vec(n);

        let rebuilt: Vec<f64> = decompose(&x, &cone).unwrap().iter().flat_map(|d| d.reconstruct()).collect();
        worst[0] = worst[0].max(norm_inf(&sub(&rebuilt, &x)));

        let ax = soc_abs(&x, &cone).unwrap();
        let lhs = jordan_product(&ax, &ax, &cone).unwrap();
        let rhs_sq = jordan_product(&x, &x, &cone).unwrap();
        worst[1] = worst[1].max(norm_inf(&sub(&lhs, &rhs_sq)));

        let ay = soc_abs(&y, &cone).unwrap();
        worst[2] = worst[2].max(norm(&sub(&ax, &ay)) - norm(&sub(&x, &y)));

        let px = project_cone(&x, &cone).unwrap();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let pnx = project_cone(&neg, &cone).unwrap();
        worst[3] = worst[3].max(norm_inf(&sub(&sub(&px, &pnx), &x))).max(dot(&px, &pnx).abs());

        let v = random_in_cone(&mut rng, &cone);
        worst[4] = worst[4].max(dot(&sub(&x, &px), &sub(&v, &px)));

        let lambda_min = decompose(&ax, &cone).unwrap().iter().map(|d| d.lambda1).fold(f64::INFINITY, f64::min);
        worst[5] = worst[5].max(-lambda_min);
    }
    let limits = [1e-12, 1e-10, 1e-12, 1e-10, 1e-10, 1e-12];
    let passed = worst.iter().zip(&limits).all(|(w, l)| w <= l);
    outcome(
        passed,
        format!(
            "reconstruction {:.1e}, |x|∘|x| vs x∘x {:.1e}, nonexpansive excess {:.1e}, Moreau {:.1e}, projection inequality {:.1e}, −λ₁(|x|) {:.1e}",
            worst[0], worst[1], worst[2], worst[3], worst[4], worst[5]
        ),
    )
}

// 10. Global error tracks the tolerance linearly.
fn integrator_order() -> Outcome {
    let exact = (-1.0f64).exp();
    let rtols = [1e-4, 1e-6, 1e-8];
    let errors: Vec<f64> = rtols
        .iter()
        .map(|&rtol| {
            let opts = IntegratorOptions { rtol, atol: rtol * 1e-3, ..Default::default() };
            let sol = solve_ivp(|_, x| vec![-x[0]], (0.0, 1.0), &[1.0], &opts, |_, _| false).unwrap();
            assert_eq!(sol.termination, Termination::ReachedTf);
            (sol.states.last().unwrap()[0] - exact).abs()
        })
        .collect();
    let lx: Vec<f64> = rtols.iter().map(|v| v.log10()).collect();
    let ly: Vec<f64> = errors.iter().map(|v| v.log10()).collect();
    let mx = lx.iter().sum::<f64>() / 3.0;
    let my = ly.iter().sum::<f64>() / 3.0;
    let slope = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / lx.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let errors_txt = errors.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join(", ");
    outcome((slope - 1.0).abs() <= 0.2, format!("errors {errors_txt} at rtol {rtols:?}: fitted exponent {slope:.3}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("tridiagonal example, n = 1000", tridiag_reproduction),
        ("infinitely many solutions", multi_solution_example),
        ("unique solution", unique_solution_example),
        ("no solution", no_solution_example),
        ("residual form equivalence", residual_form_equivalence),
        ("complementarity identity", complementarity_oracle),
        ("contraction inequality", contraction_inequality),
        ("Lyapunov monotonicity", lyapunov_monotonicity),
        ("Jordan algebra identities", jordan_suite),
        ("integrator order", integrator_order),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let tag = if result.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} {name} ({:.2?}): {}", i + 1, start.elapsed(), result.detail);
        if !result.passed {
            failures += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
