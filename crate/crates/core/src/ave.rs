//! The cone absolute value equation `Ax − |x| − b = 0`.
//!
//! Besides the direct residual, the problem exposes the affine pair
//! `Q(x) = Ax + x − b`, `F(x) = Ax − x − b`. Solving the equation is the same as
//! finding `x` with `Q(x), F(x) ∈ K` and `⟨Q(x), F(x)⟩ = 0`, and the residual of
//! the projection equation `Q(x) = P_K[Q(x) − F(x)]` coincides with the direct
//! residual for every `x`.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg::{dot, min_singular_value, norm, sub, DenseMatrix};
use crate::soc::{project_cone, soc_abs, ConeStructure};

/// Half-width of the band around `σ_min = 1` reported as [`Verdict::BoundaryRegime`].
pub const CERTIFICATE_EPS: f64 = 1e-10;

/// Residual norm a reference solution must reach before it is trusted.
pub const REFERENCE_SOLUTION_TOL: f64 = 1e-8;

/// `A`, `b` and the cone they act on.
#[derive(Debug, Clone, PartialEq)]
pub struct AveProblem {
    a: DenseMatrix,
    b: Vec<f64>,
    cone: ConeStructure,
    name: String,
}

impl AveProblem {
    pub fn new(a: DenseMatrix, b: Vec<f64>, cone: ConeStructure, name: impl Into<String>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidArgument(format!("A must be square, got {}x{}", a.rows(), a.cols())));
        }
        check_len(a.rows(), b.len())?;
        check_len(a.rows(), cone.dim())?;
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("right-hand side"));
        }
        Ok(Self { a, b, cone, name: name.into() })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn cone(&self) -> &ConeStructure {
        &self.cone
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `Ax − |x| − b`
    pub fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        let ax = self.a.mul_vec(x)?;
        let abs = soc_abs(x, &self.cone)?;
        Ok(ax.iter().zip(&abs).zip(&self.b).map(|((p, q), r)| p - q - r).collect())
    }

    pub fn residual_norm(&self, x: &[f64]) -> Result<f64> {
        Ok(norm(&self.residual(x)?))
    }

    /// `(Q(x), F(x))`
    pub fn qf_maps(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let ax = self.a.mul_vec(x)?;
        let base = sub(&ax, &self.b);
        let q = base.iter().zip(x).map(|(v, xi)| v + xi).collect();
        let f = base.iter().zip(x).map(|(v, xi)| v - xi).collect();
        Ok((q, f))
    }

    /// `Q(x) − P_K[Q(x) − F(x)]`, evaluated literally.
    ///
    /// Agrees with [`AveProblem::residual`] up to rounding; it exists to
    /// cross-check that path.
    pub fn residual_projection_form(&self, x: &[f64]) -> Result<Vec<f64>> {
        let (q, f) = self.qf_maps(x)?;
        let p = project_cone(&sub(&q, &f), &self.cone)?;
        Ok(sub(&q, &p))
    }

    pub fn is_solution(&self, x: &[f64], tol: f64) -> Result<bool> {
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::InvalidArgument("solution tolerance must be positive".into()));
        }
        Ok(self.residual_norm(x)? <= tol)
    }

    pub fn solvability_certificate(&self) -> SolvabilityCertificate {
        SolvabilityCertificate::from_sigma_min(min_singular_value(&self.a))
    }

    /// `(x − x*)ᵀ Aᵀ r(x) − ½‖r(x)‖²`, nonnegative whenever `‖A⁻¹‖ ≤ 1`.
    ///
    /// `x_star` must solve the equation to within [`REFERENCE_SOLUTION_TOL`].
    pub fn contraction_gap(&self, x: &[f64], x_star: &[f64]) -> Result<f64> {
        self.check_reference(x_star)?;
        let r = self.residual(x)?;
        Ok(self.descent_product(x, x_star, &r)? - 0.5 * dot(&r, &r))
    }

    /// `(x − x*)ᵀ Aᵀ r`, computed as `(A(x − x*))ᵀ r`.
    pub(crate) fn descent_product(&self, x: &[f64], x_star: &[f64], r: &[f64]) -> Result<f64> {
        check_len(x.len(), x_star.len())?;
        let ad = self.a.mul_vec(&sub(x, x_star))?;
        Ok(dot(&ad, r))
    }

    pub(crate) fn check_reference(&self, x_star: &[f64]) -> Result<()> {
        let residual_norm = self.residual_norm(x_star)?;
        if residual_norm <= REFERENCE_SOLUTION_TOL {
            Ok(())
        } else {
            Err(Error::NotASolution { residual_norm })
        }
    }
}

/// Outcome of the singular-value solvability test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// `σ_min(A) > 1`: exactly one solution, globally attracting.
    UniqueGuaranteed,
    /// `σ_min(A) ≈ 1`: anything from no solution to infinitely many.
    BoundaryRegime,
    /// `σ_min(A) < 1`: the test says nothing.
    NotCertified,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolvabilityCertificate {
    pub sigma_min: f64,
    pub verdict: Verdict,
}

impl SolvabilityCertificate {
    pub fn from_sigma_min(sigma_min: f64) -> Self {
        let verdict = if sigma_min > 1.0 + CERTIFICATE_EPS {
            Verdict::UniqueGuaranteed
        } else if sigma_min >= 1.0 - CERTIFICATE_EPS {
            Verdict::BoundaryRegime
        } else {
            Verdict::NotCertified
        };
        Self { sigma_min, verdict }
    }
}

/// Matrix section of a problem file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MatrixSpec {
    Dense { entries: Vec<Vec<f64>> },
    Tridiag { sub: f64, diag: f64, sup: f64 },
}

/// On-disk problem description (JSON).
///
/// ```json
/// {"name": "toy", "n": 2, "cone_blocks": [2],
///  "A": {"kind": "dense", "entries": [[1, 0], [0, -1]]},
///  "b": [-1, -1], "x_star": [0, 1]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n: usize,
    pub cone_blocks: Vec<usize>,
    #[serde(rename = "A")]
    pub a: MatrixSpec,
    pub b: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_star: Option<Vec<f64>>,
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("problem JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files always serialize")
    }

    /// Describes `problem` with a dense matrix.
    pub fn from_problem(problem: &AveProblem, x_star: Option<&[f64]>) -> Self {
        Self {
            name: Some(problem.name().to_string()),
            n: problem.dim(),
            cone_blocks: problem.cone().blocks().to_vec(),
            a: MatrixSpec::Dense { entries: problem.a().to_rows() },
            b: problem.b().to_vec(),
            x_star: x_star.map(<[f64]>::to_vec),
        }
    }

    /// Validates the description and builds the problem together with the
    /// optional reference solution.
    pub fn into_problem(self) -> Result<(AveProblem, Option<Vec<f64>>)> {
        let n = self.n;
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        let a = match self.a {
            MatrixSpec::Dense { entries } => {
                check_len(n, entries.len())?;
                DenseMatrix::from_rows(&entries)?
            }
            MatrixSpec::Tridiag { sub, diag, sup } => crate::linalg::build_tridiag(n, sub, diag, sup)?,
        };
        let cone = ConeStructure::new(self.cone_blocks)?;
        if let Some(xs) = &self.x_star {
            check_len(n, xs.len())?;
            if xs.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("x_star"));
            }
        }
        let name = self.name.unwrap_or_else(|| "problem".to_string());
        Ok((AveProblem::new(a, self.b, cone, name)?, self.x_star))
    }
}
