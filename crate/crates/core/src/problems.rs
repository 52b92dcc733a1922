//! Built-in experiment problems, seeded random instances and start grids.

use std::fmt;
use std::str::FromStr;

use crate::ave::{AveProblem, MatrixSpec, ProblemFile};
use crate::error::{Error, Result};
use crate::linalg::{build_tridiag, orthonormal_factor, DenseMatrix};
use crate::rng::SplitMix64;
use crate::soc::{soc_abs, ConeStructure};

/// Radius of the default start grids.
pub const GRID_RADIUS: f64 = 3.0;

/// The three two-dimensional problems with `A = diag(1, −1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ToyExample {
    /// `b = (0, 0)`: every `(a, 0)` with `a ≥ 0` is a solution.
    Multi,
    /// `b = (−1, −1)`: the only solution is `(0, 1)`.
    Unique,
    /// `b = (1, 1)`: no solution.
    NoSolution,
}

impl ToyExample {
    pub const ALL: [ToyExample; 3] = [Self::Multi, Self::Unique, Self::NoSolution];

    pub fn name(self) -> &'static str {
        match self {
            Self::Multi => "multi",
            Self::Unique => "unique",
            Self::NoSolution => "none",
        }
    }

    pub fn rhs(self) -> [f64; 2] {
        match self {
            Self::Multi => [0.0, 0.0],
            Self::Unique => [-1.0, -1.0],
            Self::NoSolution => [1.0, 1.0],
        }
    }

    /// The known solution, when there is exactly one.
    pub fn solution(self) -> Option<Vec<f64>> {
        match self {
            Self::Unique => Some(vec![0.0, 1.0]),
            _ => None,
        }
    }
}

impl FromStr for ToyExample {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| Error::UnknownProblem(s.to_string()))
    }
}

impl fmt::Display for ToyExample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn example_toy(which: ToyExample) -> AveProblem {
    AveProblem::new(
        DenseMatrix::from_diag(&[1.0, -1.0]),
        which.rhs().to_vec(),
        ConeStructure::single(2).expect("valid block"),
        which.name(),
    )
    .expect("consistent toy dimensions")
}

/// `A = tridiag(−1, 4, −1)` over a single cone `Kⁿ`, with
/// `x* = (−1, 1, …, −1, 1)` and `b = Ax* − |x*|`.
pub fn example_tridiag(n: usize) -> Result<(AveProblem, Vec<f64>)> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("tridiagonal example needs an even n ≥ 2, got {n}")));
    }
    tridiag_alternating(n)
}

/// Same construction as [`example_tridiag`] for any `n ≥ 1`; odd `n` ends the
/// solution on `−1`. Used for the three-dimensional phase portrait.
pub fn tridiag_alternating(n: usize) -> Result<(AveProblem, Vec<f64>)> {
    let a = build_tridiag(n, -1.0, 4.0, -1.0)?;
    let x_star = alternating_solution(n);
    let cone = ConeStructure::single(n)?;
    let b = rhs_for_solution(&a, &x_star, &cone)?;
    let p = AveProblem::new(a, b, cone, format!("tridiag-{n}"))?;
    Ok((p, x_star))
}

fn alternating_solution(n: usize) -> Vec<f64> {
    (0..n).map(|i| if i % 2 == 0 { -1.0 } else { 1.0 }).collect()
}

/// `Ax* − |x*|`, evaluated in the same order as the residual so that the
/// residual at `x*` vanishes exactly.
fn rhs_for_solution(a: &DenseMatrix, x_star: &[f64], cone: &ConeStructure) -> Result<Vec<f64>> {
    let ax = a.mul_vec(x_star)?;
    let abs = soc_abs(x_star, cone)?;
    Ok(ax.iter().zip(&abs).map(|(p, q)| p - q).collect())
}

/// Random problem with `σ_min(A) ≥ 1 + margin`, hence a unique solution.
///
/// Draw order from `SplitMix64::new(seed)`: the `n²` row-major Gaussian entries
/// of `G₁`, then those of `G₂`, then `n` uniforms for `D`, then `n` Gaussians
/// for `x*`. With `Q₁, Q₂` the orthonormal QR factors of `G₁, G₂` and
/// `D_ii ∈ [1 + margin, 3 + margin)`, the matrix is `A = Q₁ D Q₂ᵀ` and
/// `b = Ax* − |x*|`.
pub fn random_unique(n: usize, blocks: &ConeStructure, margin: f64, seed: u64) -> Result<(AveProblem, Vec<f64>)> {
    if !(margin > 0.0 && margin.is_finite()) {
        return Err(Error::InvalidArgument("margin must be positive".into()));
    }
    blocks.check(&vec![0.0; n])?;
    let mut rng = SplitMix64::new(seed);
    let g1 = DenseMatrix::from_row_major(n, n, rng.gaussian_vec(n * n))?;
    let g2 = DenseMatrix::from_row_major(n, n, rng.gaussian_vec(n * n))?;
    let diag: Vec<f64> = (0..n).map(|_| rng.uniform(1.0 + margin, 3.0 + margin)).collect();
    let x_star = rng.gaussian_vec(n);

    let q1 = orthonormal_factor(&g1)?;
    let q2 = orthonormal_factor(&g2)?;
    let a = q1.matmul(&DenseMatrix::from_diag(&diag))?.matmul(&q2.transpose())?;
    let b = rhs_for_solution(&a, &x_star, blocks)?;
    let p = AveProblem::new(a, b, blocks.clone(), format!("random-n{n}-seed{seed}"))?;
    Ok((p, x_star))
}

/// Named built-in problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinSpec {
    Tridiag { n: usize },
    Toy(ToyExample),
}

impl BuiltinSpec {
    /// `name` is one of `tridiag`, `multi`, `unique`, `none`; `n` is only read
    /// for `tridiag`.
    pub fn parse(name: &str, n: Option<usize>) -> Result<Self> {
        match name {
            "tridiag" => {
                let n = n.ok_or_else(|| Error::InvalidArgument("tridiag needs n".into()))?;
                if n < 2 || !n.is_multiple_of(2) {
                    return Err(Error::InvalidArgument(format!("tridiag needs an even n ≥ 2, got {n}")));
                }
                Ok(Self::Tridiag { n })
            }
            other => other.parse().map(Self::Toy),
        }
    }

    /// Problem and, when known, its solution.
    pub fn build(self) -> Result<(AveProblem, Option<Vec<f64>>)> {
        match self {
            Self::Tridiag { n } => example_tridiag(n).map(|(p, xs)| (p, Some(xs))),
            Self::Toy(t) => Ok((example_toy(t), t.solution())),
        }
    }

    /// Problem file, with the compact tridiagonal matrix form where it applies.
    pub fn to_file(self) -> Result<ProblemFile> {
        let (p, xs) = self.build()?;
        let mut file = ProblemFile::from_problem(&p, xs.as_deref());
        if let Self::Tridiag { .. } = self {
            file.a = MatrixSpec::Tridiag { sub: -1.0, diag: 4.0, sup: -1.0 };
        }
        Ok(file)
    }
}

/// `k` deterministic start points at distance `radius` from `center`.
///
/// * dimension 1: alternately `center ± radius`;
/// * dimension 2: angles `2πj/k`, `j = 0..k`;
/// * dimension 3: a Fibonacci sphere (`z_j = 1 − (2j + 1)/k`, golden-angle
///   azimuth);
/// * higher dimensions: normalized Gaussian directions from
///   `SplitMix64::new(k)`.
pub fn start_grid(center: &[f64], k: usize, radius: f64) -> Vec<Vec<f64>> {
    let n = center.len();
    let directions: Vec<Vec<f64>> = match n {
        0 => vec![vec![]; k],
        1 => (0..k).map(|j| vec![if j % 2 == 0 { 1.0 } else { -1.0 }]).collect(),
        2 => (0..k)
            .map(|j| {
                let th = std::f64::consts::TAU * j as f64 / k as f64;
                vec![th.cos(), th.sin()]
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..k)
                .map(|j| {
                    let z = 1.0 - (2.0 * j as f64 + 1.0) / k as f64;
                    let rho = (1.0 - z * z).max(0.0).sqrt();
                    let phi = golden * j as f64;
                    vec![rho * phi.cos(), rho * phi.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut rng = SplitMix64::new(k as u64);
            (0..k)
                .map(|_| {
                    let g = rng.gaussian_vec(n);
                    let ng = crate::linalg::norm(&g);
                    g.into_iter().map(|v| v / ng).collect()
                })
                .collect()
        }
    };
    directions.into_iter().map(|d| center.iter().zip(&d).map(|(c, di)| c + radius * di).collect()).collect()
}
