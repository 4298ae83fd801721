//! Small dense matrices sized for the filter (3×3 to 9×9).
//!
//! Shapes here are tiny and known at the call site, so the arithmetic is
//! written out directly; shape mismatches are programmer errors and panic.
//! The symmetric solver is the root-free Cholesky variant (LDLᵀ), which
//! keeps scalar-matrix cases exact: solving (s·I)x = b costs one division
//! per entry, no square root.

use crate::error::FusionError;
use serde::{Deserialize, Serialize};

/// Reciprocal-condition floor below which the innovation solve fails.
pub const RCOND_FLOOR: f64 = 1e-12;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Mat {
        Mat::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, scale: f64) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = scale;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Mat {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == n_cols), "ragged rows");
        Mat {
            rows: n_rows,
            cols: n_cols,
            data: rows.concat(),
        }
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

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "mul_vec shape mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn add(&self, rhs: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, rhs: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
        out
    }

    /// Largest |a_ij − a_ji|; 0 for an exactly symmetric matrix.
    pub fn max_asymmetry(&self) -> f64 {
        assert!(self.is_square());
        let mut worst = 0.0_f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// Averages the matrix with its transpose in place.
    pub fn symmetrize(&mut self) {
        assert!(self.is_square());
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let mean = 0.5 * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = mean;
                self[(j, i)] = mean;
            }
        }
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Factors a symmetric positive-definite matrix as L·D·Lᵀ with L unit
    /// lower-triangular and D diagonal. Fails when a pivot is non-positive
    /// or the pivot spread signals an ill-conditioned system.
    pub fn ldlt(&self) -> Result<Ldlt, FusionError> {
        assert!(self.is_square(), "ldlt needs a square matrix");
        let n = self.rows;
        let mut l = Mat::identity(n);
        let mut d = vec![0.0; n];
        for j in 0..n {
            let mut pivot = self[(j, j)];
            for k in 0..j {
                pivot -= l[(j, k)] * l[(j, k)] * d[k];
            }
            if !pivot.is_finite() || pivot <= 0.0 {
                return Err(FusionError::NotPositiveDefinite { pivot, index: j });
            }
            d[j] = pivot;
            for i in (j + 1)..n {
                let mut value = self[(i, j)];
                for k in 0..j {
                    value -= l[(i, k)] * l[(j, k)] * d[k];
                }
                l[(i, j)] = value / pivot;
            }
        }
        let max = d.iter().cloned().fold(f64::MIN, f64::max);
        let min = d.iter().cloned().fold(f64::MAX, f64::min);
        let rcond = min / max;
        if rcond < RCOND_FLOOR {
            return Err(FusionError::IllConditioned { rcond });
        }
        Ok(Ldlt { l, d })
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// LDLᵀ factorization of a symmetric positive-definite matrix.
pub struct Ldlt {
    l: Mat,
    d: Vec<f64>,
}

impl Ldlt {
    fn n(&self) -> usize {
        self.d.len()
    }

    /// Solves A·x = b.
    pub fn solve_vec(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n());
        let n = self.n();
        // Forward: L z = b.
        let mut x = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                x[i] -= self.l[(i, k)] * x[k];
            }
        }
        // Diagonal: D y = z.
        for (xi, di) in x.iter_mut().zip(&self.d) {
            *xi /= di;
        }
        // Backward: Lᵀ x = y.
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                x[i] -= self.l[(k, i)] * x[k];
            }
        }
        x
    }

    /// Solves A·X = B column by column.
    pub fn solve_mat(&self, b: &Mat) -> Mat {
        assert_eq!(b.rows(), self.n());
        let mut out = Mat::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            let column: Vec<f64> = (0..b.rows()).map(|i| b[(i, j)]).collect();
            let solved = self.solve_vec(&column);
            for (i, value) in solved.into_iter().enumerate() {
                out[(i, j)] = value;
            }
        }
        out
    }
}
