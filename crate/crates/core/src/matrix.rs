//! Dense quaternionic matrices.
//!
//! `QMatrix` is a row-major `rows x cols` grid of [`Quaternion`]s. Products
//! keep the left factor's entries on the left, so `H^n` is a right
//! H-module: columns are scaled by quaternions from the right.
//!
//! The public surface never mutates a matrix in place; every operation
//! returns a new value.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;

#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion>,
}

impl QMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<Quaternion>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(QMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Quaternion::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Quaternion::ONE } else { Quaternion::ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        QMatrix { rows, cols, data }
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<Quaternion>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidArgument("ragged rows".into()));
        }
        Ok(QMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    /// Real matrix embedded in H.
    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::new(rows, cols, values.iter().map(|&v| Quaternion::real(v)).collect())
    }

    /// `rows x cols` matrix with the given real values on the main diagonal.
    pub fn real_diagonal(rows: usize, cols: usize, diag: &[f64]) -> Self {
        Self::from_fn(rows, cols, |i, j| {
            if i == j && i < diag.len() {
                Quaternion::real(diag[i])
            } else {
                Quaternion::ZERO
            }
        })
    }

    /// `1 x 1` matrix.
    pub fn scalar(q: Quaternion) -> Self {
        QMatrix {
            rows: 1,
            cols: 1,
            data: vec![q],
        }
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
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Quaternion] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Quaternion {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, q: Quaternion) {
        self.data[i * self.cols + j] = q;
    }

    pub fn map(&self, f: impl Fn(Quaternion) -> Quaternion) -> Self {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&q| f(q)).collect(),
        }
    }

    pub fn try_mul(&self, rhs: &QMatrix) -> Result<QMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                op: "mat_mul",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let mut out = QMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == Quaternion::ZERO {
                    continue;
                }
                let row = &rhs.data[l * rhs.cols..(l + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, rhs: &QMatrix) -> Result<QMatrix> {
        self.zip_with("add", rhs, |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &QMatrix) -> Result<QMatrix> {
        self.zip_with("sub", rhs, |a, b| a - b)
    }

    fn zip_with(
        &self,
        op: &'static str,
        rhs: &QMatrix,
        f: impl Fn(Quaternion, Quaternion) -> Quaternion,
    ) -> Result<QMatrix> {
        if self.shape() != rhs.shape() {
            return Err(Error::DimensionMismatch {
                op,
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        Ok(QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn scale(&self, s: f64) -> QMatrix {
        self.map(|q| q * s)
    }

    /// `A q`: every entry multiplied by `q` on the right.
    pub fn right_scale(&self, q: Quaternion) -> QMatrix {
        self.map(|a| a * q)
    }

    /// `q A`: every entry multiplied by `q` on the left.
    pub fn left_scale(&self, q: Quaternion) -> QMatrix {
        self.map(|a| q * a)
    }

    /// Conjugate transpose `A*`.
    pub fn adjoint(&self) -> QMatrix {
        QMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> QMatrix {
        QMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Real part of the trace.
    pub fn re_trace(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                op: "re_trace",
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok((0..self.rows).map(|i| self.get(i, i).w).sum())
    }

    /// Euclidean inner product `Re Tr(A* B)` on `R^{4 rows x 4 cols}`.
    pub fn frobenius_inner(&self, rhs: &QMatrix) -> Result<f64> {
        if self.shape() != rhs.shape() {
            return Err(Error::DimensionMismatch {
                op: "frobenius_inner",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        // Re(conj(a) b) is the R^4 dot product
        Ok(self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z)
            .sum())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|q| q.norm_sqr()).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Frobenius distance `|A - B|`.
    pub fn dist(&self, rhs: &QMatrix) -> Result<f64> {
        Ok(self.try_sub(rhs)?.norm())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|q| q.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|q| q.is_finite())
    }

    /// `|A*A - I|`, the failure of the columns to be orthonormal.
    pub fn orthonormality_residual(&self) -> f64 {
        let g = &self.adjoint() * self;
        g.try_sub(&QMatrix::identity(self.cols))
            .expect("square gram matrix")
            .norm()
    }

    /// Copy of the `rows x cols` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> QMatrix {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "block out of range");
        QMatrix::from_fn(rows, cols, |i, j| self.get(r0 + i, c0 + j))
    }

    pub fn column(&self, j: usize) -> QMatrix {
        self.block(0, j, self.rows, 1)
    }

    /// Columns selected (and reordered) by index.
    pub fn select_columns(&self, idx: &[usize]) -> QMatrix {
        QMatrix::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]))
    }

    /// Copy with `b` written over the block at `(r0, c0)`.
    pub fn with_block(&self, r0: usize, c0: usize, b: &QMatrix) -> QMatrix {
        assert!(r0 + b.rows <= self.rows && c0 + b.cols <= self.cols, "block out of range");
        let mut out = self.clone();
        for i in 0..b.rows {
            for j in 0..b.cols {
                out.set(r0 + i, c0 + j, b.get(i, j));
            }
        }
        out
    }

    /// `[top; bottom]`.
    pub fn vstack(top: &QMatrix, bottom: &QMatrix) -> Result<QMatrix> {
        if top.cols != bottom.cols {
            return Err(Error::DimensionMismatch {
                op: "vstack",
                left: top.shape(),
                right: bottom.shape(),
            });
        }
        let mut data = top.data.clone();
        data.extend_from_slice(&bottom.data);
        Ok(QMatrix {
            rows: top.rows + bottom.rows,
            cols: top.cols,
            data,
        })
    }

    /// `[left | right]`.
    pub fn hstack(left: &QMatrix, right: &QMatrix) -> Result<QMatrix> {
        if left.rows != right.rows {
            return Err(Error::DimensionMismatch {
                op: "hstack",
                left: left.shape(),
                right: right.shape(),
            });
        }
        Ok(QMatrix::from_fn(left.rows, left.cols + right.cols, |i, j| {
            if j < left.cols {
                left.get(i, j)
            } else {
                right.get(i, j - left.cols)
            }
        }))
    }

    /// `diag(A, B)`.
    pub fn block_diag(a: &QMatrix, b: &QMatrix) -> QMatrix {
        QMatrix::zeros(a.rows + b.rows, a.cols + b.cols)
            .with_block(0, 0, a)
            .with_block(a.rows, a.cols, b)
    }

    /// Real coordinates in row-major order, `(w, x, y, z)` per entry.
    pub fn to_real_vec(&self) -> Vec<f64> {
        self.data.iter().flat_map(|q| q.to_array()).collect()
    }

    pub fn from_real_vec(rows: usize, cols: usize, v: &[f64]) -> Result<Self> {
        if v.len() != 4 * rows * cols {
            return Err(Error::InvalidArgument(format!(
                "{} reals for a {}x{} quaternion matrix",
                v.len(),
                rows,
                cols
            )));
        }
        Self::new(
            rows,
            cols,
            v.chunks_exact(4)
                .map(|c| Quaternion::new(c[0], c[1], c[2], c[3]))
                .collect(),
        )
    }
}

impl Mul<&QMatrix> for &QMatrix {
    type Output = QMatrix;

    /// Panics on a dimension mismatch; see [`QMatrix::try_mul`].
    fn mul(self, rhs: &QMatrix) -> QMatrix {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Add<&QMatrix> for &QMatrix {
    type Output = QMatrix;
    fn add(self, rhs: &QMatrix) -> QMatrix {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub<&QMatrix> for &QMatrix {
    type Output = QMatrix;
    fn sub(self, rhs: &QMatrix) -> QMatrix {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for &QMatrix {
    type Output = QMatrix;
    fn neg(self) -> QMatrix {
        self.map(|q| -q)
    }
}

impl Mul<f64> for &QMatrix {
    type Output = QMatrix;
    fn mul(self, s: f64) -> QMatrix {
        self.scale(s)
    }
}

/// Wire form: `{"rows": r, "cols": c, "entries": [[[w,x,y,z], ...], ...]}`.
#[derive(Serialize, Deserialize)]
pub(crate) struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<[f64; 4]>>,
}

impl From<&QMatrix> for MatrixJson {
    fn from(m: &QMatrix) -> Self {
        MatrixJson {
            rows: m.rows,
            cols: m.cols,
            entries: (0..m.rows)
                .map(|i| (0..m.cols).map(|j| m.get(i, j).to_array()).collect())
                .collect(),
        }
    }
}

impl TryFrom<MatrixJson> for QMatrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        if j.entries.len() != j.rows || j.entries.iter().any(|r| r.len() != j.cols) {
            return Err(Error::Json(format!(
                "entries do not match declared shape {}x{}",
                j.rows, j.cols
            )));
        }
        let data = j
            .entries
            .into_iter()
            .flatten()
            .map(Quaternion::from_array)
            .collect();
        QMatrix::new(j.rows, j.cols, data)
    }
}

impl Serialize for QMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for QMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        QMatrix::try_from(j).map_err(serde::de::Error::custom)
    }
}
