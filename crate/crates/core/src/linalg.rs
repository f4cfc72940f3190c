//! Dense row-major matrices and the small amount of linear algebra the
//! regression code needs: matrix-vector products and a one-sided Jacobi SVD.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a matrix whose columns are the given slices.
    pub fn from_columns(columns: &[&[f64]]) -> Result<Self> {
        let rows = columns.first().map_or(0, |c| c.len());
        let cols = columns.len();
        let mut m = Matrix::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    found: c.len(),
                });
            }
            for (i, &v) in c.iter().enumerate() {
                m.data[i * cols + j] = v;
            }
        }
        Ok(m)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn scale(&mut self, factor: f64) {
        self.data.iter_mut().for_each(|v| *v *= factor);
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `self * v`.
    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    /// `uᵀ · self · v`, accumulated row by row.
    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        if u.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: u.len(),
            });
        }
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(u.iter().enumerate().map(|(i, &ui)| ui * dot(self.row(i), v)).sum())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }
}

impl AsRef<Matrix> for Matrix {
    fn as_ref(&self) -> &Matrix {
        self
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.iter().sum::<f64>() / v.len() as f64
}

/// Thin singular value decomposition `A = U diag(s) Vᵀ` of an `n x k` matrix
/// with `n >= k`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// Left singular vectors, stored column-wise (`k` columns of length `n`).
    pub u: Vec<Vec<f64>>,
    pub singular_values: Vec<f64>,
    /// Right singular vectors as a `k x k` matrix; column `j` pairs with `s[j]`.
    pub v: Matrix,
}

const JACOBI_SWEEPS: usize = 60;

impl Svd {
    /// One-sided (Hestenes) Jacobi SVD. Accurate to working precision in the
    /// small singular values, which is what the rank test relies on.
    pub fn compute(a: &Matrix) -> Result<Svd> {
        let (n, k) = (a.rows(), a.cols());
        if n < k {
            return Err(Error::InsufficientData {
                observations: n,
                parameters: k,
            });
        }
        let mut cols: Vec<Vec<f64>> = (0..k).map(|j| a.column(j)).collect();
        let mut v = Matrix::from_fn(k, k, |i, j| if i == j { 1.0 } else { 0.0 });

        for _ in 0..JACOBI_SWEEPS {
            let mut rotated = false;
            for p in 0..k {
                for q in p + 1..k {
                    let alpha = dot(&cols[p], &cols[p]);
                    let beta = dot(&cols[q], &cols[q]);
                    let gamma = dot(&cols[p], &cols[q]);
                    if gamma == 0.0 || gamma.abs() <= f64::EPSILON * libm::sqrt(alpha * beta) {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (2.0 * gamma);
                    let t = zeta.signum() / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                    let t = if zeta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / libm::sqrt(1.0 + t * t);
                    let s = c * t;
                    let (left, right) = cols.split_at_mut(q);
                    for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
                        let (xp, yq) = (*x, *y);
                        *x = c * xp - s * yq;
                        *y = s * xp + c * yq;
                    }
                    for i in 0..k {
                        let (vp, vq) = (v.get(i, p), v.get(i, q));
                        v.set(i, p, c * vp - s * vq);
                        v.set(i, q, s * vp + c * vq);
                    }
                }
            }
            if !rotated {
                break;
            }
        }

        let singular_values: Vec<f64> = cols.iter().map(|c| libm::sqrt(dot(c, c))).collect();
        let u = cols
            .into_iter()
            .zip(&singular_values)
            .map(|(c, &s)| {
                if s > 0.0 {
                    c.into_iter().map(|x| x / s).collect()
                } else {
                    c
                }
            })
            .collect();
        Ok(Svd { u, singular_values, v })
    }

    pub fn max_singular_value(&self) -> f64 {
        self.singular_values.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_singular_value(&self) -> f64 {
        self.singular_values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Ratio of smallest to largest singular value (0 for a zero matrix).
    pub fn condition_ratio(&self) -> f64 {
        let max = self.max_singular_value();
        if max == 0.0 {
            0.0
        } else {
            self.min_singular_value() / max
        }
    }

    /// Least-squares solution of `A b = y` assuming full column rank.
    pub fn solve(&self, y: &[f64]) -> Vec<f64> {
        let k = self.singular_values.len();
        let mut b = vec![0.0; k];
        for (j, (uj, &s)) in self.u.iter().zip(&self.singular_values).enumerate() {
            let coef = dot(uj, y) / s;
            for (i, bi) in b.iter_mut().enumerate() {
                *bi += self.v.get(i, j) * coef;
            }
        }
        b
    }

    /// `(AᵀA)⁻¹ = V diag(1/s²) Vᵀ`.
    pub fn gram_inverse(&self) -> Matrix {
        let k = self.singular_values.len();
        Matrix::from_fn(k, k, |i, j| {
            (0..k)
                .map(|m| self.v.get(i, m) * self.v.get(j, m) / (self.singular_values[m] * self.singular_values[m]))
                .sum()
        })
    }
}
