//! Minimal dense complex matrix used for received-signal blocks.
//!
//! The simulator only needs a handful of shapes (N×P observations, N×L
//! de-spread blocks) and a few operations on them, so a small row-major
//! container is used instead of a general linear-algebra dependency.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    /// All-zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    /// Builds a matrix from a row-major element vector.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::invalid_parameter(format!(
                "matrix data length {} does not match shape {rows}x{cols}",
                data.len()
            )));
        }
        Ok(CMat { rows, cols, data })
    }

    /// Outer product `a · bᵀ` of two vectors (rows = len(a), cols = len(b)).
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        let mut data = Vec::with_capacity(a.len() * b.len());
        for &ai in a {
            for &bj in b {
                data.push(ai * bj);
            }
        }
        CMat {
            rows: a.len(),
            cols: b.len(),
            data,
        }
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Element at (`r`, `c`).
    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    /// Mutable element at (`r`, `c`).
    #[inline]
    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }

    /// Row `r` as a slice.
    #[inline]
    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Mutable row `r` as a slice.
    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [Complex64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Element-wise sum; shapes must match.
    pub fn add(&self, other: &CMat) -> Result<CMat> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::invalid_parameter(format!(
                "matrix shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CMat {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Element-wise difference; shapes must match.
    pub fn sub(&self, other: &CMat) -> Result<CMat> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::invalid_parameter(format!(
                "matrix shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(CMat {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// `wᴴ · self` for a weight vector with len = rows: returns a length-cols
    /// vector whose j-th entry is `Σ_r conj(w[r]) · self[r][j]`.
    pub fn conj_dot_rows(&self, w: &[Complex64]) -> Result<Vec<Complex64>> {
        if w.len() != self.rows {
            return Err(Error::invalid_parameter(format!(
                "weight length {} does not match row count {}",
                w.len(),
                self.rows
            )));
        }
        let mut out = vec![Complex64::ZERO; self.cols];
        for (r, &wr) in w.iter().enumerate() {
            let wc = wr.conj();
            for (o, &v) in out.iter_mut().zip(self.row(r)) {
                *o += wc * v;
            }
        }
        Ok(out)
    }

    /// Flat row-major element slice.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }
}

/// Squared Euclidean norm of a complex vector.
pub fn norm_sq(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}
