//! Small dense matrices over a [`Scalar`], with Gaussian-elimination based
//! kernels (rank, nullspace, inverse, determinant) that are exact for
//! rationals and pivoted/thresholded for floats.

use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;

use crate::scalar::{max_abs, Scalar, Tolerance};

#[derive(Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type Vector<T> = Vec<T>;

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Panics if rows are ragged.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, cols: &[Vector<T>]) -> Self {
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn diagonal(entries: &[T]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { T::zero() })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> Vector<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vector<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vector<T>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> Mat<f64> {
        self.map(Scalar::to_f64)
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].to_f64())
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let v = out[(i, j)].clone() + a.clone() * b.clone();
                    out[(i, j)] = v;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vector<T> {
        assert_eq!(self.cols, v.len(), "mul_vec shape mismatch");
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(T::zero(), |acc, j| {
                    if v[j].is_zero() {
                        acc
                    } else {
                        acc + self[(i, j)].clone() * v[j].clone()
                    }
                })
            })
            .collect()
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(&T, &T) -> T) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x.clone())
    }

    /// `self · rhs − rhs · self`
    pub fn commutator(&self, rhs: &Self) -> Self {
        self.matmul(rhs).sub(&rhs.matmul(self))
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    /// `tr(self · rhs)` without forming the product.
    pub fn trace_product(&self, rhs: &Self) -> T {
        assert_eq!((self.cols, self.rows), (rhs.rows, rhs.cols), "shape mismatch");
        let mut acc = T::zero();
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc = acc + self[(i, k)].clone() * rhs[(k, i)].clone();
            }
        }
        acc
    }

    pub fn max_abs(&self) -> T {
        max_abs(&self.data)
    }

    pub fn frobenius_sq(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, x| acc + x.clone() * x.clone())
    }

    /// Largest absolute entry of `self − rhs`.
    pub fn max_abs_diff(&self, rhs: &Self) -> T {
        self.sub(rhs).max_abs()
    }

    /// Submatrix of the given row and column ranges.
    pub fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let (r0, c0) = (rows.start, cols.start);
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(r0 + i, c0 + j)].clone())
    }

    /// Reduced row echelon form. Returns the reduced matrix and the pivot
    /// columns. Float entries below `tol.rel · max|entry|` are treated as zero.
    pub fn rref(&self, tol: &Tolerance) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let scale = self.max_abs().to_f64();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let (best, best_abs) = (r..m.rows)
                .map(|i| (i, m[(i, c)].to_f64().abs()))
                .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            let negligible = if T::is_exact() {
                m[(best, c)].is_zero()
            } else {
                best_abs <= tol.rel * scale || best_abs == 0.0
            };
            if negligible {
                if !T::is_exact() {
                    for i in r..m.rows {
                        m[(i, c)] = T::zero();
                    }
                }
                continue;
            }
            m.swap_rows(r, best);
            let p = m[(r, c)].clone();
            for j in c..m.cols {
                let v = m[(r, j)].clone() / p.clone();
                m[(r, j)] = v;
            }
            m[(r, c)] = T::one();
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    let v = m[(i, j)].clone() - f.clone() * m[(r, j)].clone();
                    m[(i, j)] = v;
                }
                m[(i, c)] = T::zero();
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, tol: &Tolerance) -> usize {
        self.rref(tol).1.len()
    }

    /// Canonical nullspace basis: one vector per free column of the RREF.
    pub fn nullspace(&self, tol: &Tolerance) -> Vec<Vector<T>> {
        let (r, pivots) = self.rref(tol);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![T::zero(); self.cols];
                v[f] = T::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r[(row, f)].clone();
                }
                v
            })
            .collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Determinant by Gaussian elimination with partial
    /// pivoting (exact for rationals).
    pub fn determinant(&self) -> T {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = T::one();
        for c in 0..n {
            let best = (c..n)
                .max_by(|&a, &b| {
                    m[(a, c)]
                        .to_f64()
                        .abs()
                        .partial_cmp(&m[(b, c)].to_f64().abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(c);
            let best = if m[(best, c)].is_zero() {
                match (c..n).find(|&i| !m[(i, c)].is_zero()) {
                    Some(i) => i,
                    None => return T::zero(),
                }
            } else {
                best
            };
            if best != c {
                m.swap_rows(best, c);
                det = -det;
            }
            let p = m[(c, c)].clone();
            det = det * p.clone();
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone() / p.clone();
                for j in c..n {
                    let v = m[(i, j)].clone() - f.clone() * m[(c, j)].clone();
                    m[(i, j)] = v;
                }
            }
        }
        det
    }

    /// Gauss–Jordan inverse; `None` when singular (exact zero pivot, or a
    /// float pivot under `tol` relative to the largest entry).
    pub fn inverse(&self, tol: &Tolerance) -> Option<Self> {
        assert!(self.is_square(), "inverse of non-square matrix");
        let n = self.rows;
        let mut aug = Self::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                T::one()
            } else {
                T::zero()
            }
        });
        let (r, pivots) = aug.rref_left(n, tol);
        if pivots != n {
            return None;
        }
        aug = r;
        Some(aug.block(0..n, n..2 * n))
    }

    fn rref_left(&self, ncols: usize, tol: &Tolerance) -> (Self, usize) {
        let left = self.block(0..self.rows, 0..ncols);
        let scale = left.max_abs().to_f64();
        let mut m = self.clone();
        let mut r = 0;
        for c in 0..ncols {
            if r == m.rows {
                break;
            }
            let (best, best_abs) = (r..m.rows)
                .map(|i| (i, m[(i, c)].to_f64().abs()))
                .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            let negligible = if T::is_exact() {
                m[(best, c)].is_zero()
            } else {
                best_abs <= tol.rel * scale || best_abs == 0.0
            };
            if negligible {
                continue;
            }
            m.swap_rows(r, best);
            let p = m[(r, c)].clone();
            for j in 0..m.cols {
                let v = m[(r, j)].clone() / p.clone();
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in 0..m.cols {
                    let v = m[(i, j)].clone() - f.clone() * m[(r, j)].clone();
                    m[(i, j)] = v;
                }
            }
            r += 1;
        }
        (m, r)
    }

    /// Solve `self · x = b` for every column of `b`; `None` if the system is
    /// inconsistent. Free variables are set to zero.
    pub fn solve(&self, b: &Self, tol: &Tolerance) -> Option<Self> {
        assert_eq!(self.rows, b.rows, "solve shape mismatch");
        let n = self.cols;
        let aug = Self::from_fn(self.rows, n + b.cols, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else {
                b[(i, j - n)].clone()
            }
        });
        let (r, rank) = aug.rref_left(n, tol);
        // Rows past the rank must have vanishing right-hand sides.
        let scale = b.max_abs().to_f64().max(self.max_abs().to_f64());
        for i in rank..r.rows {
            for j in n..r.cols {
                if !tol.is_zero(&r[(i, j)], scale.max(1.0)) {
                    return None;
                }
            }
        }
        let mut x = Self::zeros(n, b.cols);
        for i in 0..rank {
            let pc = (0..n).find(|&c| !r[(i, c)].is_zero()).expect("pivot row");
            for j in 0..b.cols {
                x[(pc, j)] = r[(i, n + j)].clone();
            }
        }
        Some(x)
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{:>12} ", format!("{}", self.data[i * self.cols + j]))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn axpy<T: Scalar>(alpha: &T, x: &[T], y: &[T]) -> Vector<T> {
    x.iter()
        .zip(y)
        .map(|(a, b)| alpha.clone() * a.clone() + b.clone())
        .collect()
}

pub fn scale_vec<T: Scalar>(alpha: &T, x: &[T]) -> Vector<T> {
    x.iter().map(|a| alpha.clone() * a.clone()).collect()
}

pub fn unit<T: Scalar>(n: usize, i: usize) -> Vector<T> {
    let mut v = vec![T::zero(); n];
    v[i] = T::one();
    v
}

pub fn from_nalgebra(m: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}
