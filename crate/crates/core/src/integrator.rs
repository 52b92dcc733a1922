//! Adaptive Bogacki-Shampine 3(2) integration with trajectory recording.
//!
//! The third-order solution is propagated (local extrapolation) and the
//! embedded second-order solution only drives step control. The last stage of
//! an accepted step is reused as the first stage of the next one.

use serde::{Deserialize, Serialize};

use crate::ave::AveProblem;
use crate::dynamics::{rhs, DynamicsConfig};
use crate::error::{check_len, Error, Result};

// Bogacki-Shampine tableau.
const C2: f64 = 1.0 / 2.0;
const C3: f64 = 3.0 / 4.0;
const B1: f64 = 2.0 / 9.0;
const B2: f64 = 1.0 / 3.0;
const B3: f64 = 4.0 / 9.0;
// Third-order minus second-order weights, times 72. Integer weights make the
// estimate vanish exactly when all stages agree.
const E1: f64 = -5.0;
const E2: f64 = 6.0;
const E3: f64 = 8.0;
const E4: f64 = -9.0;
const E_DENOM: f64 = 72.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: Option<f64>,
    pub h_min: f64,
    pub h_max: Option<f64>,
    pub max_steps: usize,
    /// Stop at the first accepted state whose residual norm is below this.
    pub stop_on_residual: Option<f64>,
    /// Record every `record_stride`-th accepted step (the first and last states
    /// are always recorded).
    pub record_stride: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-6,
            atol: 1e-9,
            h_init: None,
            h_min: 1e-14,
            h_max: None,
            max_steps: 1_000_000,
            stop_on_residual: None,
            record_stride: 1,
        }
    }
}

impl IntegratorOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.rtol) || !positive(self.atol) {
            return Err(Error::InvalidArgument("rtol and atol must be positive".into()));
        }
        if !positive(self.h_min) {
            return Err(Error::InvalidArgument("h_min must be positive".into()));
        }
        for (name, v) in [("h_init", self.h_init), ("h_max", self.h_max), ("stop_on_residual", self.stop_on_residual)] {
            if let Some(v) = v {
                if !positive(v) {
                    return Err(Error::InvalidArgument(format!("{name} must be positive")));
                }
            }
        }
        if let (Some(h0), Some(hm)) = (self.h_init, self.h_max) {
            if h0 > hm {
                return Err(Error::InvalidArgument("h_init exceeds h_max".into()));
            }
        }
        if let Some(h0) = self.h_init {
            if h0 < self.h_min {
                return Err(Error::InvalidArgument("h_init is below h_min".into()));
            }
        }
        if self.max_steps == 0 || self.record_stride == 0 {
            return Err(Error::InvalidArgument("max_steps and record_stride must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    ReachedTf,
    ResidualEvent,
    MaxSteps,
    StepUnderflow,
}

impl Termination {
    /// True for the two normal endings.
    pub fn is_success(self) -> bool {
        matches!(self, Self::ReachedTf | Self::ResidualEvent)
    }
}

/// Result of [`rk23_step`].
#[derive(Debug, Clone, PartialEq)]
pub struct Rk23Step {
    /// Third-order solution at `t + h`.
    pub x_high: Vec<f64>,
    /// Infinity norm of the componentwise scaled error estimate.
    pub err_est: f64,
    /// Field value at `(t + h, x_high)`.
    pub f_end: Vec<f64>,
}

/// A stage produced a non-finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepFailure;

impl std::fmt::Display for StepFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("non-finite stage value")
    }
}

impl std::error::Error for StepFailure {}

/// One Bogacki-Shampine step of size `h` from `(t, x)`.
pub fn rk23_step<F>(
    mut f: F,
    t: f64,
    x: &[f64],
    h: f64,
    rtol: f64,
    atol: f64,
) -> std::result::Result<Rk23Step, StepFailure>
where
    F: FnMut(f64, &[f64]) -> Vec<f64>,
{
    let k1 = f(t, x);
    step_with_first_stage(&mut f, t, x, &k1, h, rtol, atol)
}

fn step_with_first_stage<F>(
    f: &mut F,
    t: f64,
    x: &[f64],
    k1: &[f64],
    h: f64,
    rtol: f64,
    atol: f64,
) -> std::result::Result<Rk23Step, StepFailure>
where
    F: FnMut(f64, &[f64]) -> Vec<f64>,
{
    let finite = |v: &[f64]| v.iter().all(|c| c.is_finite());
    if !finite(k1) {
        return Err(StepFailure);
    }
    let stage = |k: &[f64], c: f64| -> Vec<f64> { x.iter().zip(k).map(|(xi, ki)| xi + h * c * ki).collect() };
    let k2 = f(t + C2 * h, &stage(k1, C2));
    if !finite(&k2) {
        return Err(StepFailure);
    }
    let k3 = f(t + C3 * h, &stage(&k2, C3));
    if !finite(&k3) {
        return Err(StepFailure);
    }
    let x_high: Vec<f64> = (0..x.len()).map(|i| x[i] + h * (B1 * k1[i] + B2 * k2[i] + B3 * k3[i])).collect();
    let k4 = f(t + h, &x_high);
    if !finite(&k4) || !finite(&x_high) {
        return Err(StepFailure);
    }
    let mut err_est = 0.0f64;
    for i in 0..x.len() {
        let e = h * (E1 * k1[i] + E2 * k2[i] + E3 * k3[i] + E4 * k4[i]) / E_DENOM;
        let scale = atol + rtol * x[i].abs().max(x_high[i].abs());
        err_est = err_est.max(e.abs() / scale);
    }
    Ok(Rk23Step { x_high, err_est, f_end: k4 })
}

/// Step-size factor after a step with scaled error `err`.
fn step_factor(err: f64) -> f64 {
    if err == 0.0 {
        MAX_FACTOR
    } else {
        (SAFETY * err.powf(-1.0 / 3.0)).clamp(MIN_FACTOR, MAX_FACTOR)
    }
}

/// Recorded output of [`solve_ivp`].
#[derive(Debug, Clone, PartialEq)]
pub struct IvpSolution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub termination: Termination,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

/// Integrates `dx/dt = f(t, x)` over `[t0, tf]`.
///
/// `stop` is evaluated at the initial state and after every accepted step; a
/// `true` ends the run with [`Termination::ResidualEvent`].
pub fn solve_ivp<F, S>(
    mut f: F,
    (t0, tf): (f64, f64),
    x0: &[f64],
    opts: &IntegratorOptions,
    mut stop: S,
) -> Result<IvpSolution>
where
    F: FnMut(f64, &[f64]) -> Vec<f64>,
    S: FnMut(f64, &[f64]) -> bool,
{
    opts.validate()?;
    if !(t0.is_finite() && tf.is_finite() && t0 < tf) {
        return Err(Error::InvalidArgument(format!("time span must satisfy t0 < tf, got [{t0}, {tf}]")));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("initial state"));
    }

    let span = tf - t0;
    let h_max = opts.h_max.unwrap_or(span);
    let mut h = opts.h_init.unwrap_or(0.01 * span).clamp(opts.h_min, h_max.max(opts.h_min));

    let mut out = IvpSolution {
        times: vec![t0],
        states: vec![x0.to_vec()],
        termination: Termination::ReachedTf,
        accepted_steps: 0,
        rejected_steps: 0,
    };
    if stop(t0, x0) {
        out.termination = Termination::ResidualEvent;
        return Ok(out);
    }

    let mut t = t0;
    let mut x = x0.to_vec();
    let mut k1 = f(t, &x);
    let mut last_recorded = true;

    loop {
        if out.accepted_steps >= opts.max_steps {
            out.termination = Termination::MaxSteps;
            break;
        }
        // Land exactly on tf instead of creeping up to it.
        let remaining = tf - t;
        let last = h >= remaining || remaining - h <= 1e-12 * span;
        let h_try = if last { remaining } else { h };

        match step_with_first_stage(&mut f, t, &x, &k1, h_try, opts.rtol, opts.atol) {
            Ok(step) if step.err_est <= 1.0 => {
                t = if last { tf } else { t + h_try };
                x = step.x_high;
                k1 = step.f_end;
                out.accepted_steps += 1;
                if !last {
                    h = (h_try * step_factor(step.err_est)).min(h_max);
                }
                let event = stop(t, &x);
                last_recorded = out.accepted_steps.is_multiple_of(opts.record_stride) || last || event;
                if last_recorded {
                    out.times.push(t);
                    out.states.push(x.clone());
                }
                if event {
                    out.termination = Termination::ResidualEvent;
                    break;
                }
                if last {
                    break;
                }
                if h < opts.h_min || t + h <= t {
                    out.termination = Termination::StepUnderflow;
                    break;
                }
            }
            Ok(step) => {
                out.rejected_steps += 1;
                h = h_try * step_factor(step.err_est);
                if h < opts.h_min {
                    out.termination = Termination::StepUnderflow;
                    break;
                }
            }
            Err(StepFailure) => {
                out.rejected_steps += 1;
                h = h_try * MIN_FACTOR;
                if h < opts.h_min {
                    out.termination = Termination::StepUnderflow;
                    break;
                }
            }
        }
    }
    if !last_recorded {
        out.times.push(t);
        out.states.push(x);
    }
    Ok(out)
}

/// Time-stamped states of the dynamical system with their residual norms.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub residual_norms: Vec<f64>,
    pub termination: Termination,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectories hold at least the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectories hold at least the initial state")
    }
}

/// Integrates the dynamical system of `p` from `x0` over `tspan`.
pub fn integrate(
    p: &AveProblem,
    cfg: DynamicsConfig,
    x0: &[f64],
    tspan: (f64, f64),
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    check_len(p.dim(), x0.len())?;
    let field = |_t: f64, x: &[f64]| rhs(p, cfg, x).expect("dimension checked above");
    let threshold = opts.stop_on_residual;
    let stop = |_t: f64, x: &[f64]| match threshold {
        Some(level) => p.residual_norm(x).expect("dimension checked above") <= level,
        None => false,
    };
    let sol = solve_ivp(field, tspan, x0, opts, stop)?;
    let residual_norms = sol.states.iter().map(|x| p.residual_norm(x)).collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        times: sol.times,
        states: sol.states,
        residual_norms,
        termination: sol.termination,
        accepted_steps: sol.accepted_steps,
        rejected_steps: sol.rejected_steps,
    })
}

/// First recorded time at which the residual norm is at most `tol`.
pub fn time_to_tolerance(traj: &Trajectory, tol: f64) -> Option<f64> {
    traj.residual_norms.iter().position(|&r| r <= tol).map(|i| traj.times[i])
}
