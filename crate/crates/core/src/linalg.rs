//! Dense linear algebra: matrices, vector helpers, extremal singular values.
//!
//! Everything here is sized for desk-scale problems (a few thousand unknowns
//! at most). Singular values are obtained from the symmetric eigenproblem of
//! the Gram matrix `AᵀA`: cyclic Jacobi for small orders, Householder
//! tridiagonalization followed by implicit QL for larger ones. A power
//! iteration on `AᵀA` is also exposed as an independent estimate of the
//! spectral norm.

use std::ops::{Index, IndexMut};

use crate::error::{check_len, Error, Result};

/// Largest order handled by the Jacobi eigensolver.
pub const JACOBI_MAX_ORDER: usize = 64;

/// Power iteration stops when successive Rayleigh quotients agree to this
/// relative tolerance.
pub const POWER_ITERATION_RTOL: f64 = 1e-12;

/// Power iteration budget.
pub const POWER_ITERATION_MAX_ITERS: usize = 10_000;

/// Row-major dense matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row-major storage, rejecting empty shapes and
    /// non-finite entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("matrix must have at least one row and column".into()));
        }
        check_len(rows * cols, data.len())?;
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            check_len(ncols, row.len())?;
            data.extend_from_slice(row);
        }
        Self::from_row_major(nrows, ncols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * factor).collect() }
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.cols, x.len())?;
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    /// `Aᵀ y`, without forming the transpose.
    pub fn transpose_mul_vec(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len(self.rows, y.len())?;
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            if yi != 0.0 {
                axpy(yi, self.row(i), &mut out);
            }
        }
        Ok(out)
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        check_len(self.cols, other.rows)?;
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &aik) in self.row(i).iter().enumerate() {
                if aik != 0.0 {
                    axpy(aik, other.row(k), out_row);
                }
            }
        }
        Ok(out)
    }

    /// Gram matrix `AᵀA` (symmetric, `cols × cols`).
    pub fn gram(&self) -> DenseMatrix {
        let n = self.cols;
        let mut g = Self::zeros(n, n);
        for r in 0..self.rows {
            let row = self.row(r);
            for (i, &ri) in row.iter().enumerate() {
                if ri == 0.0 {
                    continue;
                }
                let g_row = &mut g.data[i * n..(i + 1) * n];
                for j in i..n {
                    g_row[j] += ri * row[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                g.data[i * n + j] = g.data[j * n + i];
            }
        }
        g
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `n × n` matrix with constant sub-, main and super-diagonals.
pub fn build_tridiag(n: usize, sub: f64, diag: f64, sup: f64) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("tridiagonal order must be positive".into()));
    }
    if ![sub, diag, sup].iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("tridiagonal coefficients"));
    }
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag;
        if i > 0 {
            m[(i, i - 1)] = sub;
        }
        if i + 1 < n {
            m[(i, i + 1)] = sup;
        }
    }
    Ok(m)
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Euclidean norm.
pub fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn sub(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn add(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

pub fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Largest singular value `max ‖Ax‖` over unit `x`.
///
/// Returns 0 for the zero matrix.
pub fn spectral_norm(a: &DenseMatrix) -> f64 {
    extremal_gram_eigenvalues(a).1.max(0.0).sqrt()
}

/// Smallest singular value of a square matrix (`1 / ‖A⁻¹‖` when nonsingular).
///
/// For a non-square input this is the smallest singular value of the column
/// space, i.e. the square root of the smallest eigenvalue of `AᵀA`.
pub fn min_singular_value(a: &DenseMatrix) -> f64 {
    extremal_gram_eigenvalues(a).0.max(0.0).sqrt()
}

fn extremal_gram_eigenvalues(a: &DenseMatrix) -> (f64, f64) {
    let eig = symmetric_eigenvalues(&a.gram());
    (eig[0], eig[eig.len() - 1])
}

/// Outcome of [`power_iteration_norm`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerIteration {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Spectral norm estimate by power iteration on `AᵀA`.
///
/// The start vector is all ones with the first entry raised by one half, which
/// breaks the symmetry that makes the plain ones vector orthogonal to the
/// dominant singular vector of alternating-sign matrices. The estimate is a
/// lower bound that converges slowly when the top singular values cluster.
pub fn power_iteration_norm(a: &DenseMatrix) -> PowerIteration {
    let n = a.cols();
    let mut v = vec![1.0; n];
    v[0] += 0.5;
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let mut previous = 0.0;
    for it in 1..=POWER_ITERATION_MAX_ITERS {
        let av = a.mul_vec(&v).expect("square dimensions");
        let w = a.transpose_mul_vec(&av).expect("square dimensions");
        // Rayleigh quotient of AᵀA at a unit vector.
        let rq = dot(&av, &av);
        let nw = norm(&w);
        if nw == 0.0 {
            return PowerIteration { value: 0.0, iterations: it, converged: true };
        }
        v = w.into_iter().map(|x| x / nw).collect();
        if (rq - previous).abs() <= POWER_ITERATION_RTOL * rq {
            return PowerIteration { value: rq.sqrt(), iterations: it, converged: true };
        }
        previous = rq;
    }
    PowerIteration { value: previous.sqrt(), iterations: POWER_ITERATION_MAX_ITERS, converged: false }
}

/// Eigenvalues of a symmetric matrix in ascending order.
///
/// Only the upper triangle is trusted to be consistent with the lower one;
/// callers must pass a symmetric matrix.
pub fn symmetric_eigenvalues(s: &DenseMatrix) -> Vec<f64> {
    assert!(s.is_square(), "symmetric eigensolve needs a square matrix");
    let mut eig = if s.rows() <= JACOBI_MAX_ORDER { jacobi_eigenvalues(s) } else { householder_ql_eigenvalues(s) };
    eig.sort_by(f64::total_cmp);
    eig
}

/// Cyclic Jacobi rotations until the off-diagonal mass is negligible.
pub fn jacobi_eigenvalues(s: &DenseMatrix) -> Vec<f64> {
    let n = s.rows();
    let mut a = s.clone();
    let frob: f64 = a.as_slice().iter().map(|v| v * v).sum::<f64>().sqrt();
    if frob == 0.0 {
        return vec![0.0; n];
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * frob {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[(i, i)]).collect()
}

/// Householder reduction to tridiagonal form, then implicit QL with Wilkinson
/// shifts. Eigenvalues only.
pub fn householder_ql_eigenvalues(s: &DenseMatrix) -> Vec<f64> {
    let n = s.rows();
    let (mut d, mut e) = tridiagonalize(s);
    tridiagonal_ql(&mut d, &mut e);
    debug_assert_eq!(d.len(), n);
    d
}

/// Returns the diagonal and the subdiagonal (`e[i]` couples `i-1` and `i`,
/// `e[0] = 0`) of a tridiagonal matrix similar to `s`.
fn tridiagonalize(s: &DenseMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = s.rows();
    let mut a = s.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a[(i, k)].abs()).sum();
            if scale == 0.0 {
                e[i] = a[(i, l)];
            } else {
                for k in 0..=l {
                    a[(i, k)] /= scale;
                    h += a[(i, k)] * a[(i, k)];
                }
                let f = a[(i, l)];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[(i, l)] = f - g;
                let mut f = 0.0;
                for j in 0..=l {
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[(j, k)] * a[(i, k)];
                    }
                    for k in j + 1..=l {
                        g += a[(k, j)] * a[(i, k)];
                    }
                    e[j] = g / h;
                    f += e[j] * a[(i, j)];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[(j, k)] -= f * e[k] + g * a[(i, k)];
                    }
                }
            }
        } else {
            e[i] = a[(i, l)];
        }
        d[i] = h;
    }
    e[0] = 0.0;
    for (i, di) in d.iter_mut().enumerate() {
        *di = a[(i, i)];
    }
    (d, e)
}

fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    if n <= 1 {
        return;
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                // Not reached for symmetric input in practice; keep the
                // current diagonal rather than spin.
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Orthonormal factor `Q` of the QR decomposition of a square matrix, via
/// modified Gram-Schmidt with one reorthogonalization pass. Column signs follow
/// the convention `R_ii > 0`.
pub fn orthonormal_factor(g: &DenseMatrix) -> Result<DenseMatrix> {
    if !g.is_square() {
        return Err(Error::InvalidArgument("orthonormal factor needs a square matrix".into()));
    }
    let n = g.rows();
    let gt = g.transpose();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = gt.row(j).to_vec();
        for _pass in 0..2 {
            for q in &cols {
                let proj = dot(q, &v);
                axpy(-proj, q, &mut v);
            }
        }
        let nv = norm(&v);
        if nv <= 1e-12 * norm(gt.row(j)).max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidArgument("matrix is numerically rank deficient".into()));
        }
        v.iter_mut().for_each(|x| *x /= nv);
        cols.push(v);
    }
    let mut q = DenseMatrix::zeros(n, n);
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            q[(i, j)] = v;
        }
    }
    Ok(q)
}
