//! Dense row-major matrices: a small general-purpose `Matrix` for covariance
//! algebra and the `SampleMatrix` data container (rows = observations).

use crate::error::{Error, Result};

/// Dense `rows x cols` matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            data: vec![0.0; rows * cols],
            rows,
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { data, rows, cols }
    }

    /// Builds a matrix from a flat row-major slice.
    pub fn from_row_major(data: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dim(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { data, rows, cols })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Sum of squared entries; equals `Tr(A*A')`, and `Tr(A^2)` when `A` is
    /// symmetric.
    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// `v' A v` for square `A`.
    pub fn quad_form(&self, v: &[f64]) -> Result<f64> {
        if !self.is_square() || v.len() != self.rows {
            return Err(Error::dim(format!(
                "quadratic form needs a square matrix matching the vector length ({} vs {})",
                self.rows,
                v.len()
            )));
        }
        let mut acc = 0.0;
        for i in 0..self.rows {
            let row = self.row(i);
            let mut inner = 0.0;
            for j in 0..self.cols {
                inner += row[j] * v[j];
            }
            acc += v[i] * inner;
        }
        Ok(acc)
    }

    /// `Tr(A B)` for symmetric `A`, `B`; reduces to an elementwise product sum.
    pub fn trace_product_sym(&self, other: &Matrix) -> Result<f64> {
        if self.rows != other.rows || self.cols != other.cols || !self.is_square() {
            return Err(Error::dim(
                "trace product needs equal square shapes".to_string(),
            ));
        }
        Ok(self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a * b)
            .sum())
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &Matrix, c: f64) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dim("matrix addition needs equal shapes".to_string()));
        }
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a + c * b)
            .collect();
        Ok(Matrix {
            data,
            rows: self.rows,
            cols: self.cols,
        })
    }

    pub fn scale(&self, c: f64) -> Matrix {
        Matrix {
            data: self.data.iter().map(|v| v * c).collect(),
            rows: self.rows,
            cols: self.cols,
        }
    }

    /// `out += A * v` for an `rows x cols` matrix and `v` of length `cols`.
    pub fn matvec_add(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.cols)) {
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(v) {
                acc += a * b;
            }
            *o += acc;
        }
    }
}

/// `T` observations of dimension `n`, one observation per row.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl SampleMatrix {
    /// Builds the matrix from flat row-major data, checking shape and
    /// finiteness of every entry.
    pub fn new(data: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dim(format!(
                "expected {} entries for {rows} observations of dimension {cols}, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!(
                "non-finite entry at row {}, column {}",
                pos / cols + 1,
                pos % cols + 1
            )));
        }
        Ok(SampleMatrix { data, rows, cols })
    }

    /// Internal constructor for data that is finite by construction.
    pub(crate) fn from_parts_unchecked(data: Vec<f64>, rows: usize, cols: usize) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        SampleMatrix { data, rows, cols }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::dim(
                "sample matrix needs at least one row".to_string(),
            ));
        }
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::dim(format!(
                    "row {} has {} entries, expected {cols}",
                    i + 1,
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        SampleMatrix::new(data, rows.len(), cols)
    }

    /// Number of observations `T`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Dimension `n`.
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Column means (the sample mean vector).
    pub fn col_means(&self) -> Vec<f64> {
        let mut means = vec![0.0; self.cols];
        for i in 0..self.rows {
            let row = self.row(i);
            for j in 0..self.cols {
                means[j] += row[j];
            }
        }
        let inv = 1.0 / self.rows as f64;
        for m in &mut means {
            *m *= inv;
        }
        means
    }

    /// Copy of the rows in `[start, end)`.
    pub fn slice_rows(&self, start: usize, end: usize) -> SampleMatrix {
        debug_assert!(start <= end && end <= self.rows);
        SampleMatrix {
            data: self.data[start * self.cols..end * self.cols].to_vec(),
            rows: end - start,
            cols: self.cols,
        }
    }

    /// Returns a copy with `shift` subtracted from every row.
    pub fn shift_rows(&self, shift: &[f64]) -> Result<SampleMatrix> {
        if shift.len() != self.cols {
            return Err(Error::dim(format!(
                "shift vector has length {}, expected {}",
                shift.len(),
                self.cols
            )));
        }
        let mut data = self.data.clone();
        for i in 0..self.rows {
            let base = i * self.cols;
            for j in 0..self.cols {
                data[base + j] -= shift[j];
            }
        }
        Ok(SampleMatrix {
            data,
            rows: self.rows,
            cols: self.cols,
        })
    }

    /// Reorders rows in place according to `perm` (a permutation of 0..T).
    pub fn permute_rows(&self, perm: &[usize]) -> Result<SampleMatrix> {
        if perm.len() != self.rows {
            return Err(Error::dim(
                "permutation length must equal the row count".to_string(),
            ));
        }
        let mut data = Vec::with_capacity(self.data.len());
        for &i in perm {
            data.extend_from_slice(self.row(i));
        }
        Ok(SampleMatrix {
            data,
            rows: self.rows,
            cols: self.cols,
        })
    }
}
