//! Dense linear-algebra kernels.
//!
//! Matrices are stored row-major. Every reduction (dot products, matrix
//! products, norms) sums left to right in index order so that repeated runs
//! produce bit-identical results regardless of how trials are scheduled.
//! The SVD is a one-sided Jacobi iteration, which keeps small singular values
//! accurate relative to their size and copes with exactly rank-deficient input.

use std::fmt;
use std::ops::Deref;

use crate::error::{Error, Result};

/// Jacobi sweeps before the SVD reports non-convergence.
const SVD_MAX_SWEEPS: usize = 60;

#[derive(Clone, PartialEq, Default)]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    /// Builds a vector, rejecting NaN and infinite entries.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some(index) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "DenseVector", index });
        }
        Ok(Self(entries))
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<f64>) -> Self {
        Self(entries)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn ones(len: usize) -> Self {
        Self(vec![1.0; len])
    }

    pub fn filled(len: usize, value: f64) -> Self {
        Self(vec![value; len])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self(self.0.iter().map(|&v| f(v)).collect())
    }

    pub fn dot(&self, other: &DenseVector) -> Result<f64> {
        check_len("dot", self.len(), other.len())?;
        Ok(dot(&self.0, &other.0))
    }

    pub fn norm2(&self) -> f64 {
        dot(&self.0, &self.0).sqrt()
    }

    pub fn sub(&self, other: &DenseVector) -> Result<DenseVector> {
        check_len("sub", self.len(), other.len())?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    pub fn scale(&self, factor: f64) -> DenseVector {
        self.map(|v| v * factor)
    }

    /// Number of entries with magnitude strictly above `threshold`.
    pub fn count_above(&self, threshold: f64) -> usize {
        self.0.iter().filter(|v| v.abs() > threshold).count()
    }
}

impl Deref for DenseVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl fmt::Debug for DenseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl TryFrom<Vec<f64>> for DenseVector {
    type Error = Error;

    fn try_from(value: Vec<f64>) -> Result<Self> {
        Self::new(value)
    }
}

#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dimension(
                "DenseMatrix::new",
                format!("{} entries", rows * cols),
                format!("{} entries", data.len()),
            ));
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "DenseMatrix", index });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::dimension(
                    "DenseMatrix::from_rows",
                    format!("{cols} columns"),
                    format!("{} columns in row {i}", row.len()),
                ));
            }
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, data)
    }

    pub(crate) fn from_vec_unchecked(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_vec_unchecked(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&DenseVector::ones(n))
    }

    pub fn from_diagonal(d: &DenseVector) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in d.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> DenseVector {
        DenseVector((0..self.rows).map(|i| self.get(i, j)).collect())
    }

    pub fn diagonal(&self) -> DenseVector {
        DenseVector((0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut out = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.push(self.get(i, j));
            }
        }
        Self::from_vec_unchecked(self.cols, self.rows, out)
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::dimension(
                "matmul",
                format!("lhs cols == rhs rows ({})", self.cols),
                format!("rhs rows {}", other.rows),
            ));
        }
        // i-k-j loop: each output entry still accumulates over k in increasing order.
        let mut out = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            let dst = &mut out[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.get(i, k);
                for (d, &b) in dst.iter_mut().zip(other.row(k)) {
                    *d += a * b;
                }
            }
        }
        Ok(Self::from_vec_unchecked(self.rows, other.cols, out))
    }

    /// `self * v`
    pub fn matvec(&self, v: &DenseVector) -> Result<DenseVector> {
        check_len("matvec", self.cols, v.len())?;
        Ok(DenseVector((0..self.rows).map(|i| dot(self.row(i), v)).collect()))
    }

    /// `selfᵀ * v` without materialising the transpose.
    pub fn tmatvec(&self, v: &DenseVector) -> Result<DenseVector> {
        check_len("tmatvec", self.rows, v.len())?;
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * vi;
            }
        }
        Ok(DenseVector(out))
    }

    /// `self * selfᵀ`, symmetric by construction.
    pub fn outer_gram(&self) -> DenseMatrix {
        let n = self.rows;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = dot(self.row(i), self.row(j));
                out[i * n + j] = v;
                out[j * n + i] = v;
            }
        }
        Self::from_vec_unchecked(n, n, out)
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::dimension("sub", format!("{:?}", self.shape()), format!("{:?}", other.shape())));
        }
        Ok(Self::from_vec_unchecked(
            self.rows,
            self.cols,
            self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn scale(&self, factor: f64) -> DenseMatrix {
        Self::from_vec_unchecked(self.rows, self.cols, self.data.iter().map(|v| v * factor).collect())
    }

    /// Adds `shift` to every diagonal entry.
    pub fn add_diagonal(&self, shift: &DenseVector) -> Result<DenseMatrix> {
        if self.rows != self.cols || shift.len() != self.rows {
            return Err(Error::dimension(
                "add_diagonal",
                format!("square {n}x{n} with {n} shifts", n = shift.len()),
                format!("{}x{}", self.rows, self.cols),
            ));
        }
        let mut out = self.clone();
        for (i, &s) in shift.iter().enumerate() {
            out.data[i * self.cols + i] += s;
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        dot(&self.data, &self.data).sqrt()
    }

    pub fn max_abs_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Thin singular value decomposition `m = u · diag(s) · vt`.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub u: DenseMatrix,
    pub singular_values: DenseVector,
    pub vt: DenseMatrix,
}

impl SvdFactors {
    pub fn reconstruct(&self) -> DenseMatrix {
        let k = self.singular_values.len();
        let mut us = self.u.clone();
        for i in 0..us.rows {
            for j in 0..k {
                us.data[i * k + j] *= self.singular_values[j];
            }
        }
        us.matmul(&self.vt).expect("thin SVD factors are conformant")
    }
}

/// Singular values sorted non-increasing.
pub fn svd(m: &DenseMatrix) -> Result<SvdFactors> {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return Ok(SvdFactors {
            u: DenseMatrix::zeros(rows, 0),
            singular_values: DenseVector::zeros(0),
            vt: DenseMatrix::zeros(0, cols),
        });
    }
    if !m.is_finite() {
        return Err(Error::numerical("svd", rows, cols, "non-finite input"));
    }
    if rows >= cols {
        jacobi_tall(m)
    } else {
        let t = jacobi_tall(&m.transpose())?;
        Ok(SvdFactors { u: t.vt.transpose(), singular_values: t.singular_values, vt: t.u.transpose() })
    }
}

/// One-sided Jacobi on the columns of a matrix with `rows >= cols`.
///
/// Plane rotations are applied to column pairs until every pair is
/// orthogonal to working precision; the column norms are then the singular
/// values. Columns belonging to a zero singular value are left as zeros in `u`.
///
/// The input is first scaled by a power of two so the largest entry is in
/// `[1, 2)`. Columns whose norm falls below `ε‖A‖_F/√cols` are not rotated
/// further; their singular values are below any [`pinv`] truncation level.
fn jacobi_tall(m: &DenseMatrix) -> Result<SvdFactors> {
    let (rows, cols) = m.shape();
    let max_abs = m.as_slice().iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let scale = if max_abs > 0.0 { 2f64.powi(max_abs.log2().floor() as i32) } else { 1.0 };
    let mut u: Vec<Vec<f64>> = (0..cols).map(|j| m.column(j).0.iter().map(|x| x / scale).collect()).collect();
    let frob_sq: f64 = u.iter().map(|c| dot(c, c)).sum();
    let negligible_sq = f64::EPSILON * f64::EPSILON * frob_sq / cols as f64;
    let mut v: Vec<Vec<f64>> = (0..cols)
        .map(|j| {
            let mut e = vec![0.0; cols];
            e[j] = 1.0;
            e
        })
        .collect();
    // Rounding in a length-`rows` dot product bounds attainable orthogonality.
    let tol = f64::EPSILON * (rows as f64).sqrt().max(1.0);
    let mut converged = false;
    for _ in 0..SVD_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = dot(&u[p], &u[p]);
                let beta = dot(&u[q], &u[q]);
                let gamma = dot(&u[p], &u[q]);
                if alpha <= negligible_sq || beta <= negligible_sq || gamma.abs() <= tol * alpha.sqrt() * beta.sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta.abs() > 1e150 {
                    0.5 / zeta
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut u, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::numerical("svd", rows, cols, "Jacobi sweeps did not converge"));
    }

    let norms: Vec<f64> = u.iter().map(|c| dot(c, c).sqrt()).collect();
    let sv: Vec<f64> = norms.iter().map(|s| s * scale).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let mut u_data = vec![0.0; rows * cols];
    let mut vt_data = vec![0.0; cols * cols];
    let mut sorted = Vec::with_capacity(cols);
    for (k, &j) in order.iter().enumerate() {
        let s = norms[j];
        sorted.push(sv[j]);
        if s > 0.0 {
            for i in 0..rows {
                u_data[i * cols + k] = u[j][i] / s;
            }
        }
        vt_data[k * cols..(k + 1) * cols].copy_from_slice(&v[j]);
    }
    Ok(SvdFactors {
        u: DenseMatrix::from_vec_unchecked(rows, cols, u_data),
        singular_values: DenseVector(sorted),
        vt: DenseMatrix::from_vec_unchecked(cols, cols, vt_data),
    })
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(q);
    for (x, y) in head[p].iter_mut().zip(tail[0].iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// Default relative truncation level for [`pinv`]: `max(rows, cols) · ε`.
pub fn default_rank_tol(rows: usize, cols: usize) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON
}

/// Moore–Penrose pseudoinverse through the SVD.
///
/// Singular values `s ≤ rank_tol · s_max` are treated as zero. Passing `None`
/// uses [`default_rank_tol`].
pub fn pinv(m: &DenseMatrix, rank_tol: Option<f64>) -> Result<DenseMatrix> {
    let (rows, cols) = m.shape();
    let rank_tol = rank_tol.unwrap_or_else(|| default_rank_tol(rows, cols));
    if !(rank_tol >= 0.0) {
        return Err(Error::domain(format!("rank tolerance must be >= 0, got {rank_tol}")));
    }
    let f = svd(m)?;
    let s_max = f.singular_values.first().copied().unwrap_or(0.0);
    let cutoff = rank_tol * s_max;
    let kept: Vec<(usize, f64)> = f
        .singular_values
        .iter()
        .enumerate()
        .filter(|&(_, &s)| s > cutoff && s > 0.0)
        .map(|(k, &s)| (k, 1.0 / s))
        .collect();

    // pinv[i][j] = Σ_k vt[k][i] · (1/s_k) · u[j][k]
    let mut out = vec![0.0; cols * rows];
    for i in 0..cols {
        let dst = &mut out[i * rows..(i + 1) * rows];
        for &(k, inv_s) in &kept {
            let w = f.vt.get(k, i) * inv_s;
            for (j, d) in dst.iter_mut().enumerate() {
                *d += w * f.u.get(j, k);
            }
        }
    }
    Ok(DenseMatrix::from_vec_unchecked(cols, rows, out))
}

/// Elementwise product `u ∘ v`.
pub fn hadamard(u: &DenseVector, v: &DenseVector) -> Result<DenseVector> {
    check_len("hadamard", u.len(), v.len())?;
    Ok(DenseVector(u.iter().zip(v.iter()).map(|(a, b)| a * b).collect()))
}

/// `m · diag(d)`: column `j` multiplied by `d[j]`.
pub fn scale_cols(m: &DenseMatrix, d: &DenseVector) -> Result<DenseMatrix> {
    check_len("scale_cols", m.cols, d.len())?;
    let mut out = m.data.clone();
    for row in out.chunks_exact_mut(m.cols.max(1)) {
        for (x, &s) in row.iter_mut().zip(d.iter()) {
            *x *= s;
        }
    }
    Ok(DenseMatrix::from_vec_unchecked(m.rows, m.cols, out))
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    lower: DenseMatrix,
}

impl Cholesky {
    /// Fails when a pivot is not positive or the pivot ratio exceeds `1/ε`.
    pub fn new(g: &DenseMatrix) -> Result<Self> {
        let n = g.rows;
        if g.cols != n {
            return Err(Error::dimension("cholesky", "square matrix", format!("{}x{}", g.rows, g.cols)));
        }
        let scale = g.frobenius_norm();
        if !g.is_finite() || g.max_abs_asymmetry() > 1e-10 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::numerical("cholesky", n, n, "matrix is not symmetric"));
        }
        let mut l = vec![0.0; n * n];
        let mut max_pivot = 0.0f64;
        for j in 0..n {
            let mut d = g.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > 0.0) {
                return Err(Error::numerical("cholesky", n, n, format!("non-positive pivot at {j}")));
            }
            max_pivot = max_pivot.max(d);
            let ljj = d.sqrt();
            l[j * n + j] = ljj;
            for i in (j + 1)..n {
                let mut s = g.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / ljj;
            }
        }
        for j in 0..n {
            let d = l[j * n + j] * l[j * n + j];
            if d * (1.0 / f64::EPSILON) < max_pivot {
                return Err(Error::numerical("cholesky", n, n, "condition exceeds 1/machine epsilon"));
            }
        }
        Ok(Self { lower: DenseMatrix::from_vec_unchecked(n, n, l) })
    }

    #[allow(clippy::needless_range_loop)]
    pub fn solve(&self, c: &DenseVector) -> Result<DenseVector> {
        let n = self.lower.rows;
        check_len("cholesky solve", n, c.len())?;
        let l = &self.lower;
        let mut z = c.0.clone();
        for i in 0..n {
            let mut s = z[i];
            for k in 0..i {
                s -= l.get(i, k) * z[k];
            }
            z[i] = s / l.get(i, i);
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in (i + 1)..n {
                s -= l.get(k, i) * z[k];
            }
            z[i] = s / l.get(i, i);
        }
        Ok(DenseVector(z))
    }

    /// Solves for each column of `rhs`.
    pub fn solve_matrix(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        let mut out = DenseMatrix::zeros(rhs.rows, rhs.cols);
        for j in 0..rhs.cols {
            let col = self.solve(&rhs.column(j))?;
            for (i, v) in col.iter().enumerate() {
                out.data[i * rhs.cols + j] = *v;
            }
        }
        Ok(out)
    }
}

/// Solves `g · z = c` for symmetric positive definite `g` by Cholesky.
///
/// Returns a numerical-failure error when `g` is not SPD to working
/// precision; callers that can tolerate it fall back to [`solve_spd_or_pinv`].
pub fn solve_spd(g: &DenseMatrix, c: &DenseVector) -> Result<DenseVector> {
    check_len("solve_spd", g.rows, c.len())?;
    Cholesky::new(g)?.solve(c)
}

/// [`solve_spd`] with a pseudoinverse fallback for near-singular systems.
pub fn solve_spd_or_pinv(g: &DenseMatrix, c: &DenseVector) -> Result<DenseVector> {
    match solve_spd(g, c) {
        Ok(z) => Ok(z),
        Err(e) if e.is_numerical() => pinv(g, None)?.matvec(c),
        Err(e) => Err(e),
    }
}

/// Left-to-right dot product.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        s += x * y;
    }
    s
}

fn check_len(op: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::dimension(op, format!("length {expected}"), format!("length {actual}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0)).unwrap()
    }

    fn rel(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
        a.sub(b).unwrap().frobenius_norm() / b.frobenius_norm().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn svd_of_exactly_rank_deficient_products() {
        for seed in 0..200 {
            let (m, n, r) = (2 + seed as usize % 9, 2 + (seed as usize * 7) % 13, 1 + seed as usize % 2);
            let a = random_matrix(m, r, 2 * seed).matmul(&random_matrix(r, n, 2 * seed + 1)).unwrap();
            let f = svd(&a).unwrap();
            assert!(rel(&f.reconstruct(), &a) < 1e-14, "seed {seed}");
            assert!(f.singular_values[r..].iter().all(|&s| s < 1e-14 * f.singular_values[0]));
        }
    }

    #[test]
    fn svd_with_underflowing_columns() {
        for seed in 0..50 {
            let base = random_matrix(25, 60, seed);
            let d = DenseVector::new((0..60).map(|j| if j % 7 == 0 { 1.0 } else { 10f64.powi(-160 - j) }).collect())
                .unwrap();
            let a = scale_cols(&base, &d).unwrap();
            for m in [a.clone(), a.transpose()] {
                let f = svd(&m).unwrap();
                assert!(rel(&f.reconstruct(), &m) < 1e-14, "seed {seed}");
                let p = pinv(&m, None).unwrap();
                let back = m.matmul(&p).unwrap().matmul(&m).unwrap();
                assert!(rel(&back, &m) < 1e-12, "seed {seed}");
            }
        }
    }

    #[test]
    fn huge_and_tiny_scales() {
        for factor in [1e-300, 1e300] {
            let a = random_matrix(6, 4, 9);
            let f = svd(&a.scale(factor)).unwrap();
            let g = svd(&a).unwrap();
            for (s, t) in f.singular_values.iter().zip(g.singular_values.iter()) {
                assert!((s / factor - t).abs() <= 1e-14 * t);
            }
        }
    }

    #[test]
    fn rejects_non_finite_entries() {
        assert!(matches!(DenseVector::new(vec![1.0, f64::NAN]), Err(Error::NonFinite { index: 1, .. })));
        assert!(DenseMatrix::new(1, 2, vec![f64::INFINITY, 0.0]).is_err());
        assert!(DenseMatrix::new(2, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn pinv_of_identity_is_identity() {
        let p = pinv(&DenseMatrix::identity(3), None).unwrap();
        assert!(rel(&p, &DenseMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn pinv_of_zero_is_transposed_zero() {
        let p = pinv(&DenseMatrix::zeros(2, 4), None).unwrap();
        assert_eq!(p.shape(), (4, 2));
        assert!(p.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn pinv_satisfies_penrose_conditions() {
        let m = random_matrix(5, 8, 7);
        let p = pinv(&m, None).unwrap();
        let mpm = m.matmul(&p).unwrap().matmul(&m).unwrap();
        let pmp = p.matmul(&m).unwrap().matmul(&p).unwrap();
        assert!(rel(&mpm, &m) < 1e-10);
        assert!(rel(&pmp, &p) < 1e-10);
        let mp = m.matmul(&p).unwrap();
        let pm = p.matmul(&m).unwrap();
        assert!(rel(&mp, &mp.transpose()) < 1e-10);
        assert!(rel(&pm, &pm.transpose()) < 1e-10);
    }

    #[test]
    fn pinv_rejects_negative_tolerance() {
        assert!(pinv(&DenseMatrix::identity(2), Some(-1.0)).is_err());
    }

    #[test]
    fn svd_reconstructs_and_sorts() {
        let m = random_matrix(6, 4, 3);
        let f = svd(&m).unwrap();
        assert!(rel(&f.reconstruct(), &m) < 1e-12);
        assert!(f.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn hadamard_examples() {
        let u = DenseVector::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(hadamard(&u, &DenseVector::ones(3)).unwrap(), u);
        let a = DenseVector::new(vec![2.0, 0.0, -1.0]).unwrap();
        let b = DenseVector::new(vec![3.0, 5.0, 4.0]).unwrap();
        assert_eq!(hadamard(&a, &b).unwrap().as_slice(), &[6.0, 0.0, -4.0]);
        assert!(matches!(hadamard(&a, &DenseVector::ones(2)), Err(Error::Dimension { .. })));
    }

    #[test]
    fn scale_cols_examples() {
        let d = DenseVector::new(vec![2.0, 3.0, 4.0]).unwrap();
        assert_eq!(scale_cols(&DenseMatrix::identity(3), &d).unwrap(), DenseMatrix::from_diagonal(&d));
        let m = random_matrix(4, 6, 11);
        assert_eq!(scale_cols(&m, &DenseVector::ones(6)).unwrap(), m);
        assert!(scale_cols(&m, &DenseVector::ones(5)).is_err());
    }

    #[test]
    fn scale_cols_matches_dense_product() {
        let m = random_matrix(4, 6, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let d = DenseVector::new((0..6).map(|_| rng.random_range(-2.0..2.0)).collect()).unwrap();
        let dense = m.matmul(&DenseMatrix::from_diagonal(&d)).unwrap();
        // The dense product adds exact zeros, so the entries agree bit for bit.
        assert_eq!(scale_cols(&m, &d).unwrap(), dense);
    }

    #[test]
    fn solve_spd_examples() {
        let c = DenseVector::new(vec![1.0, -2.0, 0.5]).unwrap();
        assert_eq!(solve_spd(&DenseMatrix::identity(3), &c).unwrap(), c);
        let g = DenseMatrix::from_diagonal(&DenseVector::new(vec![2.0, 4.0]).unwrap());
        let z = solve_spd(&g, &DenseVector::new(vec![2.0, 8.0]).unwrap()).unwrap();
        assert!((z[0] - 1.0).abs() < 1e-15 && (z[1] - 2.0).abs() < 1e-15, "{z:?}");
    }

    #[test]
    fn solve_spd_matches_pinv_oracle() {
        let r = random_matrix(10, 10, 21);
        let g = r.matmul(&r.transpose()).unwrap().add_diagonal(&DenseVector::ones(10)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let c = DenseVector::new((0..10).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
        let z = solve_spd(&g, &c).unwrap();
        let oracle = pinv(&g, None).unwrap().matvec(&c).unwrap();
        assert!(z.sub(&oracle).unwrap().norm2() <= 1e-8 * oracle.norm2());
        let residual = g.matvec(&z).unwrap().sub(&c).unwrap().norm2();
        assert!(residual <= 1e-8 * c.norm2());
    }

    #[test]
    fn solve_spd_rejects_indefinite_and_falls_back() {
        let g = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let c = DenseVector::new(vec![3.0, 0.0]).unwrap();
        assert!(solve_spd(&g, &c).unwrap_err().is_numerical());
        assert_eq!(solve_spd_or_pinv(&g, &c).unwrap().as_slice(), &[3.0, 0.0]);
    }
}
