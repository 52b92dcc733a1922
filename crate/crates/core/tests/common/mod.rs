//! Random instance helpers shared by the integration tests.
#![allow(dead_code)]

use socave::linalg::{norm, DenseMatrix};
use socave::rng::SplitMix64;
use socave::soc::ConeStructure;

/// Random partition of `n` into blocks of size at most `max_block`.
pub fn random_blocks(rng: &mut SplitMix64, n: usize, max_block: usize) -> ConeStructure {
    let mut blocks = Vec::new();
    let mut left = n;
    while left > 0 {
        let size = 1 + rng.below(left.min(max_block));
        blocks.push(size);
        left -= size;
    }
    ConeStructure::new(blocks).unwrap()
}

pub fn random_matrix(rng: &mut SplitMix64, n: usize) -> DenseMatrix {
    DenseMatrix::from_row_major(n, n, rng.gaussian_vec(n * n)).unwrap()
}

/// Where a generated block should land.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    Cone,
    NegativeCone,
    Neither,
}

/// A block of length `len` placed strictly inside `K`, strictly inside `−K`,
/// or strictly outside both. Size-one blocks cannot be in neither.
pub fn block_in_case(rng: &mut SplitMix64, len: usize, case: Case) -> Vec<f64> {
    let mut tail = rng.gaussian_vec(len - 1);
    let r = norm(&tail);
    let margin = 0.05 + rng.next_f64();
    let head = match case {
        Case::Cone => r + margin,
        Case::NegativeCone => -r - margin,
        Case::Neither => {
            if r == 0.0 {
                tail[0] = 1.0;
                return block_in_case(rng, len, case);
            }
            r * rng.uniform(-0.95, 0.95)
        }
    };
    let mut out = vec![head];
    out.append(&mut tail);
    out
}

pub fn random_case(rng: &mut SplitMix64, len: usize) -> Case {
    let k = if len == 1 { rng.below(2) } else { rng.below(3) };
    [Case::Cone, Case::NegativeCone, Case::Neither][k]
}

/// Random unit direction in `R^m`.
pub fn unit(rng: &mut SplitMix64, m: usize) -> Vec<f64> {
    loop {
        let g = rng.gaussian_vec(m);
        let ng = norm(&g);
        if ng > 1e-6 {
            return g.into_iter().map(|v| v / ng).collect();
        }
    }
}

/// A vector inside the cone.
pub fn random_in_cone(rng: &mut SplitMix64, cone: &ConeStructure) -> Vec<f64> {
    let mut x = Vec::with_capacity(cone.dim());
    for &len in cone.blocks() {
        x.extend(block_in_case(rng, len, Case::Cone));
    }
    x
}

/// A pair `(s, t)` sharing a Jordan frame per block with `λᵢ μᵢ = 0`, so that
/// `s, t ∈ K` and `⟨s, t⟩ = 0`.
pub fn complementary_pair(rng: &mut SplitMix64, cone: &ConeStructure) -> (Vec<f64>, Vec<f64>) {
    let (mut s, mut t) = (Vec::new(), Vec::new());
    for &len in cone.blocks() {
        if len == 1 {
            let v = rng.uniform(0.0, 3.0);
            if rng.below(2) == 0 {
                s.push(v);
                t.push(0.0);
            } else {
                s.push(0.0);
                t.push(v);
            }
            continue;
        }
        let d = unit(rng, len - 1);
        // Eigenvalue pairs (λ1, λ2) for s and (μ1, μ2) for t.
        let (lam, mu) = match rng.below(4) {
            0 => ([0.0, rng.uniform(0.0, 3.0)], [rng.uniform(0.0, 3.0), 0.0]),
            1 => ([rng.uniform(0.0, 3.0), 0.0], [0.0, rng.uniform(0.0, 3.0)]),
            2 => ([0.0, 0.0], [rng.uniform(0.0, 3.0), rng.uniform(0.0, 3.0)]),
            _ => ([rng.uniform(0.0, 3.0), rng.uniform(0.0, 3.0)], [0.0, 0.0]),
        };
        s.extend(frame_combination(&d, lam));
        t.extend(frame_combination(&d, mu));
    }
    (s, t)
}

/// `λ₁ ½(1, −d) + λ₂ ½(1, d)`.
pub fn frame_combination(d: &[f64], [l1, l2]: [f64; 2]) -> Vec<f64> {
    let mut out = vec![0.5 * (l1 + l2)];
    out.extend(d.iter().map(|di| 0.5 * (l2 - l1) * di));
    out
}
