//! The projection dynamical system `dx/dt = γ Aᵀ (b + |x| − Ax)` and its
//! stability diagnostics.

use crate::ave::AveProblem;
use crate::error::{check_len, Error, Result};
use crate::linalg::{distance, dot, spectral_norm};

/// Squared distances above this make the Lyapunov exponential overflow; the
/// diagnostics report infinities instead.
pub const LYAPUNOV_EXP_LIMIT: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsConfig {
    gamma: f64,
}

impl DynamicsConfig {
    pub fn new(gamma: f64) -> Result<Self> {
        if gamma > 0.0 && gamma.is_finite() {
            Ok(Self { gamma })
        } else {
            Err(Error::InvalidArgument(format!("gamma must be positive and finite, got {gamma}")))
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Right-hand side `h(x) = −γ Aᵀ r(x)`.
pub fn rhs(p: &AveProblem, cfg: DynamicsConfig, x: &[f64]) -> Result<Vec<f64>> {
    let r = p.residual(x)?;
    let mut v = p.a().transpose_mul_vec(&r)?;
    v.iter_mut().for_each(|vi| *vi *= -cfg.gamma);
    Ok(v)
}

/// Global Lipschitz constant `γ ‖A‖ (‖A‖ + 1)` of [`rhs`].
pub fn lipschitz_bound(p: &AveProblem, cfg: DynamicsConfig) -> f64 {
    let a = spectral_norm(p.a());
    cfg.gamma * a * (a + 1.0)
}

/// `V(x) = exp(‖x − x*‖²) − 1`; infinite once the exponent passes
/// [`LYAPUNOV_EXP_LIMIT`].
pub fn lyapunov_value(x: &[f64], x_star: &[f64]) -> Result<f64> {
    check_len(x_star.len(), x.len())?;
    let d2 = distance(x, x_star).powi(2);
    Ok(if d2 > LYAPUNOV_EXP_LIMIT { f64::INFINITY } else { d2.exp_m1() })
}

/// `dV/dt = −2γ exp(‖x − x*‖²) (x − x*)ᵀ Aᵀ r(x)` along the flow.
///
/// `x_star` must be a solution. When `σ_min(A) ≥ 1` the rate is bounded above
/// by `−γ exp(‖x − x*‖²) ‖r(x)‖²`.
pub fn lyapunov_rate(p: &AveProblem, cfg: DynamicsConfig, x: &[f64], x_star: &[f64]) -> Result<f64> {
    p.check_reference(x_star)?;
    let r = p.residual(x)?;
    let inner = p.descent_product(x, x_star, &r)?;
    let d2 = distance(x, x_star).powi(2);
    if d2 > LYAPUNOV_EXP_LIMIT {
        return Ok(if inner > 0.0 {
            f64::NEG_INFINITY
        } else if inner < 0.0 {
            f64::INFINITY
        } else {
            0.0
        });
    }
    Ok(-2.0 * cfg.gamma * d2.exp() * inner)
}

/// `−γ exp(‖x − x*‖²) ‖r(x)‖²`, the upper bound on [`lyapunov_rate`] for
/// problems with `σ_min(A) ≥ 1`.
pub fn lyapunov_rate_bound(p: &AveProblem, cfg: DynamicsConfig, x: &[f64], x_star: &[f64]) -> Result<f64> {
    let r = p.residual(x)?;
    let d2 = distance(x, x_star).powi(2);
    if d2 > LYAPUNOV_EXP_LIMIT {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(-cfg.gamma * d2.exp() * dot(&r, &r))
}
