//! Small dense linear algebra: enough for least-squares normal equations,
//! Householder QR solves and singular values of design matrices.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length does not match shape");
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Columns `idx` in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (k, &j) in idx.iter().enumerate() {
                out[(i, k)] = self[(i, j)];
            }
        }
        out
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

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| (0..self.cols).map(|j| self[(i, j)] * x[j]).sum()).collect()
    }

    /// `Aᵀ y`.
    pub fn tr_mul_vec(&self, y: &[T]) -> Vec<T> {
        assert_eq!(y.len(), self.rows);
        let mut out = vec![T::zero(); self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[j] += self[(i, j)] * y[i];
            }
        }
        out
    }

    /// `AᵀA`.
    pub fn gram(&self) -> Self {
        let mut g = Self::zeros(self.cols, self.cols);
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            for a in 0..self.cols {
                for b in a..self.cols {
                    g[(a, b)] += row[a] * row[b];
                }
            }
        }
        for a in 0..self.cols {
            for b in 0..a {
                g[(a, b)] = g[(b, a)];
            }
        }
        g
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky<T: Real>(a: &Matrix<T>) -> Result<Matrix<T>> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > T::zero()) || !d.is_finite() {
            return Err(Error::SingularMatrix(format!("pivot {j} is {d}")));
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

fn cholesky_solve<T: Real>(l: &Matrix<T>, b: &[T]) -> Vec<T> {
    let n = l.rows();
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            let v = l[(i, k)] * y[k];
            y[i] -= v;
        }
        y[i] /= l[(i, i)];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            let v = l[(k, i)] * y[k];
            y[i] -= v;
        }
        y[i] /= l[(i, i)];
    }
    y
}

/// Solves `A x = b` for symmetric positive definite `A`.
pub fn solve_spd<T: Real>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    Ok(cholesky_solve(&cholesky(a)?, b))
}

/// Inverse of a symmetric positive definite matrix.
///
/// The matrix is first scaled to unit diagonal so that parameters of very
/// different magnitude do not trip the pivot test.
pub fn inverse_spd<T: Real>(a: &Matrix<T>) -> Result<Matrix<T>> {
    let n = a.rows();
    let mut scale = vec![T::one(); n];
    for (i, s) in scale.iter_mut().enumerate() {
        let d = a[(i, i)];
        if !(d > T::zero()) {
            return Err(Error::SingularMatrix(format!("diagonal entry {i} is {d}")));
        }
        *s = d.sqrt().recip();
    }
    let mut scaled = a.clone();
    for i in 0..n {
        for j in 0..n {
            scaled[(i, j)] = a[(i, j)] * scale[i] * scale[j];
        }
    }
    let l = cholesky(&scaled)?;
    let mut inv = Matrix::zeros(n, n);
    let mut e = vec![T::zero(); n];
    for j in 0..n {
        e.iter_mut().for_each(|v| *v = T::zero());
        e[j] = T::one();
        let col = cholesky_solve(&l, &e);
        for i in 0..n {
            inv[(i, j)] = col[i] * scale[i] * scale[j];
        }
    }
    Ok(inv)
}

/// Least-squares solution of `A x ≈ b` (`rows ≥ cols`) by Householder QR.
pub fn lstsq<T: Real>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        return Err(Error::InsufficientData { needed: n - 1, got: m });
    }
    let mut r = a.clone();
    let mut y = b.to_vec();
    let scale_ref = (0..n).map(|j| (0..m).map(|i| r[(i, j)] * r[(i, j)]).sum::<T>().sqrt()).fold(T::zero(), T::max);
    for k in 0..n {
        let norm = (k..m).map(|i| r[(i, k)] * r[(i, k)]).sum::<T>().sqrt();
        if norm <= scale_ref * T::epsilon() * T::from_usize_lossy(m.max(n) * 10) {
            return Err(Error::SingularMatrix(format!("column {k} is linearly dependent")));
        }
        let alpha = if r[(k, k)] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: T = v.iter().map(|x| *x * *x).sum();
        if vnorm2 == T::zero() {
            continue;
        }
        let two = T::lit(2.0);
        for j in k..n {
            let dot: T = (k..m).map(|i| v[i - k] * r[(i, j)]).sum();
            let f = two * dot / vnorm2;
            for i in k..m {
                r[(i, j)] -= f * v[i - k];
            }
        }
        let dot: T = (k..m).map(|i| v[i - k] * y[i]).sum();
        let f = two * dot / vnorm2;
        for i in k..m {
            y[i] -= f * v[i - k];
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for j in i + 1..n {
            s -= r[(i, j)] * x[j];
        }
        x[i] = s / r[(i, i)];
    }
    Ok(x)
}

/// Non-negative least squares `min ‖A x − b‖` subject to `x ≥ 0`
/// (Lawson-Hanson active set).
pub fn nnls<T: Real>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    let (m, n) = (a.rows(), a.cols());
    assert_eq!(b.len(), m);
    let norm1 = (0..n).map(|j| (0..m).map(|i| a[(i, j)].abs()).sum::<T>()).fold(T::zero(), T::max);
    let tol = T::lit(10.0) * T::epsilon() * norm1 * T::from_usize_lossy(m.max(n));
    let mut x = vec![T::zero(); n];
    let mut passive = vec![false; n];
    let residual = |x: &[T]| -> Vec<T> { a.mul_vec(x).iter().zip(b).map(|(ax, bi)| *bi - *ax).collect() };
    for _outer in 0..3 * n.max(1) {
        let w = a.tr_mul_vec(&residual(&x));
        let candidate = (0..n)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].partial_cmp(&w[j]).unwrap_or(std::cmp::Ordering::Equal));
        let Some(j) = candidate else { return Ok(x) };
        passive[j] = true;
        loop {
            let idx: Vec<usize> = (0..n).filter(|&k| passive[k]).collect();
            let sub = lstsq(&a.select_columns(&idx), b)?;
            let mut s = vec![T::zero(); n];
            for (k, &i) in idx.iter().enumerate() {
                s[i] = sub[k];
            }
            if idx.iter().all(|&i| s[i] > T::zero()) {
                x = s;
                break;
            }
            // Step towards s until the first passive variable hits zero.
            let alpha =
                idx.iter().filter(|&&i| s[i] <= T::zero()).map(|&i| x[i] / (x[i] - s[i])).fold(T::infinity(), T::min);
            for (xi, si) in x.iter_mut().zip(&s) {
                *xi += alpha * (*si - *xi);
            }
            for &i in &idx {
                if x[i] <= tol {
                    x[i] = T::zero();
                    passive[i] = false;
                }
            }
        }
    }
    Err(Error::NonConvergence("nnls exceeded its iteration budget".into()))
}

/// Singular values in descending order (one-sided Jacobi).
pub fn singular_values<T: Real>(a: &Matrix<T>) -> Vec<T> {
    // Work on the orientation with fewer columns.
    let mut u = if a.rows() >= a.cols() { a.clone() } else { a.transpose() };
    let (m, n) = (u.rows(), u.cols());
    let tol = T::epsilon() * T::from_usize_lossy(m);
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for i in 0..m {
                    alpha += u[(i, p)] * u[(i, p)];
                    beta += u[(i, q)] * u[(i, q)];
                    gamma += u[(i, p)] * u[(i, q)];
                }
                if gamma.abs() <= tol * (alpha * beta).sqrt() || gamma == T::zero() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let cs = (T::one() + t * t).sqrt().recip();
                let sn = cs * t;
                for i in 0..m {
                    let up = u[(i, p)];
                    let uq = u[(i, q)];
                    u[(i, p)] = cs * up - sn * uq;
                    u[(i, q)] = sn * up + cs * uq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut s: Vec<T> = (0..n).map(|j| (0..m).map(|i| u[(i, j)] * u[(i, j)]).sum::<T>().sqrt()).collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// `σ_max / σ_min`; infinite for rank-deficient matrices.
pub fn condition_number<T: Real>(a: &Matrix<T>) -> T {
    let s = singular_values(a);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > T::zero() => hi / lo,
        _ => T::infinity(),
    }
}
