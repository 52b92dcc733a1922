//! Jordan algebra of second-order cones.
//!
//! A vector `x ∈ Rⁿ` is read against a [`ConeStructure`] that cuts it into
//! consecutive blocks, one per factor of `K = K^{n₁} × ⋯ × K^{n_r}`. Within a
//! block of size `m ≥ 2` the vector splits as `x = (x₁, x₂) ∈ R × R^{m-1}` and
//!
//! * the eigenvalues are `λ₁ = x₁ − ‖x₂‖` and `λ₂ = x₁ + ‖x₂‖`,
//! * the Jordan frame is `u⁽ⁱ⁾ = ½ (1, ∓ x₂/‖x₂‖)`,
//! * `|x| = |λ₁| u⁽¹⁾ + |λ₂| u⁽²⁾` and `P_K(x) = max(λ₁,0) u⁽¹⁾ + max(λ₂,0) u⁽²⁾`.
//!
//! A block of size one is the half line `R₊`; all of the above collapses to the
//! scalar absolute value and `max(x, 0)`. Every operation acts block by block.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg::{dot, norm};

/// `‖x₂‖` at or below this is treated as zero.
pub const TAIL_NORM_EPS: f64 = 1e-14;

/// Default tolerance band for [`cone_membership`].
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-10;

/// Ordered block sizes of a Cartesian product of second-order cones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct ConeStructure {
    blocks: Vec<usize>,
}

impl ConeStructure {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidArgument("cone structure needs at least one block".into()));
        }
        if blocks.contains(&0) {
            return Err(Error::InvalidArgument("cone blocks must have positive size".into()));
        }
        Ok(Self { blocks })
    }

    /// A single block `Kⁿ`.
    pub fn single(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    /// `n` copies of `R₊`, i.e. the nonnegative orthant.
    pub fn orthant(n: usize) -> Result<Self> {
        Self::new(vec![1; n])
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// Index ranges of the blocks within the ambient vector.
    pub fn ranges(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        self.blocks.iter().scan(0, |start, &len| {
            let r = *start..*start + len;
            *start += len;
            Some(r)
        })
    }

    pub fn check(&self, x: &[f64]) -> Result<()> {
        check_len(self.dim(), x.len())
    }
}

impl TryFrom<Vec<usize>> for ConeStructure {
    type Error = Error;

    fn try_from(blocks: Vec<usize>) -> Result<Self> {
        Self::new(blocks)
    }
}

impl From<ConeStructure> for Vec<usize> {
    fn from(c: ConeStructure) -> Self {
        c.blocks
    }
}

/// Spectral decomposition of one block.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomp {
    pub lambda1: f64,
    pub lambda2: f64,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
}

impl SpectralDecomp {
    /// `λ₁ u⁽¹⁾ + λ₂ u⁽²⁾`
    pub fn reconstruct(&self) -> Vec<f64> {
        self.map(|l| l)
    }

    /// Spectral function `f(λ₁) u⁽¹⁾ + f(λ₂) u⁽²⁾`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let (a, b) = (f(self.lambda1), f(self.lambda2));
        self.u1.iter().zip(&self.u2).map(|(p, q)| a * p + b * q).collect()
    }
}

/// Eigenvalues and Jordan frame of a single block.
///
/// When the tail vanishes the frame uses `w = (1, 0, …, 0)`. A block of size
/// one degenerates to `λ₁ = λ₂ = x` with `u⁽¹⁾ = u⁽²⁾ = ½`.
pub fn spectral_decompose(block: &[f64]) -> SpectralDecomp {
    match block {
        [] => panic!("empty cone block"),
        [x] => SpectralDecomp { lambda1: *x, lambda2: *x, u1: vec![0.5], u2: vec![0.5] },
        [x1, tail @ ..] => {
            let r = norm(tail);
            let mut u1 = Vec::with_capacity(block.len());
            let mut u2 = Vec::with_capacity(block.len());
            u1.push(0.5);
            u2.push(0.5);
            if r > TAIL_NORM_EPS {
                for &t in tail {
                    u1.push(-0.5 * t / r);
                    u2.push(0.5 * t / r);
                }
            } else {
                for k in 0..tail.len() {
                    let w = if k == 0 { 0.5 } else { 0.0 };
                    u1.push(-w);
                    u2.push(w);
                }
            }
            SpectralDecomp { lambda1: x1 - r, lambda2: x1 + r, u1, u2 }
        }
    }
}

/// Blockwise spectral decompositions.
pub fn decompose(x: &[f64], cone: &ConeStructure) -> Result<Vec<SpectralDecomp>> {
    cone.check(x)?;
    Ok(cone.ranges().map(|r| spectral_decompose(&x[r])).collect())
}

/// Blockwise Jordan product `(⟨x,y⟩, y₁x₂ + x₁y₂)`.
pub fn jordan_product(x: &[f64], y: &[f64], cone: &ConeStructure) -> Result<Vec<f64>> {
    cone.check(x)?;
    cone.check(y)?;
    let mut out = Vec::with_capacity(x.len());
    for r in cone.ranges() {
        let (xb, yb) = (&x[r.clone()], &y[r]);
        out.push(dot(xb, yb));
        out.extend(xb[1..].iter().zip(&yb[1..]).map(|(xi, yi)| yb[0] * xi + xb[0] * yi));
    }
    Ok(out)
}

fn abs_block(x: &[f64], out: &mut Vec<f64>) {
    let (x1, tail) = (x[0], &x[1..]);
    let r = norm(tail);
    if r <= TAIL_NORM_EPS {
        out.push(x1.abs());
        out.extend(std::iter::repeat_n(0.0, tail.len()));
    } else {
        let (lo, hi) = ((x1 - r).abs(), (x1 + r).abs());
        out.push(0.5 * (lo + hi));
        let coef = 0.5 * (hi - lo) / r;
        out.extend(tail.iter().map(|t| coef * t));
    }
}

/// Jordan absolute value `|x| = √(x∘x)`, blockwise.
pub fn soc_abs(x: &[f64], cone: &ConeStructure) -> Result<Vec<f64>> {
    cone.check(x)?;
    let mut out = Vec::with_capacity(x.len());
    for r in cone.ranges() {
        abs_block(&x[r], &mut out);
    }
    Ok(out)
}

fn project_block(x: &[f64], out: &mut Vec<f64>) {
    let (x1, tail) = (x[0], &x[1..]);
    let r = norm(tail);
    if r <= x1 {
        out.extend_from_slice(x);
    } else if r <= -x1 {
        out.extend(std::iter::repeat_n(0.0, x.len()));
    } else {
        // Here |x1| < r, so r > 0.
        let half = 0.5 * (x1 + r);
        out.push(half);
        out.extend(tail.iter().map(|t| half * t / r));
    }
}

/// Euclidean projection onto the cone, blockwise.
pub fn project_cone(x: &[f64], cone: &ConeStructure) -> Result<Vec<f64>> {
    cone.check(x)?;
    let mut out = Vec::with_capacity(x.len());
    for r in cone.ranges() {
        project_block(&x[r], &mut out);
    }
    Ok(out)
}

/// Position of one block relative to `K` and `−K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockMembership {
    /// `λ₁ > tol`: interior of `K`.
    Interior,
    /// `|λ₁| ≤ tol`, `λ₂ ≥ −tol`: on the boundary of `K` (includes the origin).
    Boundary,
    /// `λ₁ < −tol`, `|λ₂| ≤ tol`: on the boundary of `−K`, away from the origin.
    OutsideCone,
    /// `λ₂ < −tol`: interior of `−K`.
    InsideNegativeCone,
    /// `λ₁ < −tol < tol < λ₂`: in neither `K` nor `−K`.
    Neither,
}

impl BlockMembership {
    pub fn classify(lambda1: f64, lambda2: f64, tol: f64) -> Self {
        if lambda1 > tol {
            Self::Interior
        } else if lambda1 >= -tol {
            Self::Boundary
        } else if lambda2 < -tol {
            Self::InsideNegativeCone
        } else if lambda2 <= tol {
            Self::OutsideCone
        } else {
            Self::Neither
        }
    }

    pub fn in_cone(self) -> bool {
        matches!(self, Self::Interior | Self::Boundary)
    }

    pub fn in_negative_cone(self) -> bool {
        matches!(self, Self::OutsideCone | Self::InsideNegativeCone)
    }
}

/// Per-block classification.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeMembership {
    pub blocks: Vec<BlockMembership>,
    tol: f64,
    lambda2: Vec<f64>,
}

impl ConeMembership {
    pub fn in_cone(&self) -> bool {
        self.blocks.iter().all(|b| b.in_cone())
    }

    /// True when every block lies in `−K`, zero blocks included.
    pub fn in_negative_cone(&self) -> bool {
        self.lambda2.iter().all(|&l| l <= self.tol)
    }
}

pub fn cone_membership(x: &[f64], cone: &ConeStructure, tol: f64) -> Result<ConeMembership> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::InvalidArgument("membership tolerance must be nonnegative".into()));
    }
    let decomps = decompose(x, cone)?;
    let blocks = decomps.iter().map(|d| BlockMembership::classify(d.lambda1, d.lambda2, tol)).collect();
    let lambda2 = decomps.iter().map(|d| d.lambda2).collect();
    Ok(ConeMembership { blocks, tol, lambda2 })
}

/// `‖(s + t) − |s − t|‖`, which vanishes exactly when `s, t ∈ K` and
/// `⟨s, t⟩ = 0`.
pub fn complementarity_residual(s: &[f64], t: &[f64], cone: &ConeStructure) -> Result<f64> {
    cone.check(s)?;
    cone.check(t)?;
    let diff: Vec<f64> = s.iter().zip(t).map(|(a, b)| a - b).collect();
    let abs = soc_abs(&diff, cone)?;
    Ok(s.iter().zip(t).zip(&abs).map(|((a, b), c)| (a + b - c).powi(2)).sum::<f64>().sqrt())
}
