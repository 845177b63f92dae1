//! Dense complex matrices.
//!
//! [`ComplexMatrix`] is an immutable row-major buffer of `Complex64` with the
//! handful of primitives the separability machinery needs: Kronecker
//! products, column-stacking `vec`, adjoints, singular values and the trace
//! norm. Decompositions are delegated to `nalgebra`; everything else is plain
//! index arithmetic over the row-major buffer.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Upper bound on the number of entries of any matrix we are willing to allocate.
pub const MAX_ENTRIES: usize = 1 << 24;

const SVD_EPS: f64 = 1e-15;
const MAX_SWEEPS: usize = 10_000;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

fn checked_size(rows: usize, cols: usize) -> Result<usize> {
    if rows == 0 || cols == 0 {
        return Err(Error::Shape(format!("matrix dimensions must be positive, got {rows}x{cols}")));
    }
    match rows.checked_mul(cols) {
        Some(n) if n <= MAX_ENTRIES => Ok(n),
        _ => Err(Error::Size(format!("{rows}x{cols} matrix exceeds the limit of {MAX_ENTRIES} entries"))),
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        let n = checked_size(rows, cols)?;
        if data.len() != n {
            return Err(Error::Shape(format!("{rows}x{cols} matrix needs {n} entries, got {}", data.len())));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Argument(format!("non-finite entry at ({}, {})", pos / cols, pos % cols)));
        }
        Ok(Self { rows, cols, data })
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(rows * cols, data.len());
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        let n = checked_size(rows, cols)?;
        Ok(Self::from_raw(rows, cols, vec![ZERO; n]))
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        Ok(m)
    }

    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::new(rows, cols, values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::Shape(format!("row {i} has {} entries, expected {cols}", r.len())));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// Column vector.
    pub fn column(values: Vec<Complex64>) -> Result<Self> {
        Self::new(values.len(), 1, values)
    }

    pub fn diagonal(values: &[Complex64]) -> Result<Self> {
        let n = values.len();
        let mut m = Self::zeros(n, n)?;
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        Ok(m)
    }

    /// Outer product `u v†` of two column vectors.
    pub fn outer(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<Self> {
        u.matmul(&v.adjoint())
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        assert!(row < self.rows && col < self.cols, "index ({row}, {col}) out of bounds");
        self.data[row * self.cols + col]
    }

    /// Reinterprets the row-major buffer with a new shape of equal size.
    pub fn reshape(&self, rows: usize, cols: usize) -> Result<Self> {
        let n = checked_size(rows, cols)?;
        if n != self.data.len() {
            return Err(Error::Shape(format!("cannot reshape {}x{} into {rows}x{cols}", self.rows, self.cols)));
        }
        Ok(Self::from_raw(rows, cols, self.data.clone()))
    }

    /// Kronecker product; indices of `self` vary slowest.
    pub fn kron(&self, other: &ComplexMatrix) -> Result<Self> {
        let rows = self.rows.checked_mul(other.rows).ok_or_else(|| Error::Size("kron row count overflows".into()))?;
        let cols =
            self.cols.checked_mul(other.cols).ok_or_else(|| Error::Size("kron column count overflows".into()))?;
        let mut out = Self::zeros(rows, cols)?;
        for ia in 0..self.rows {
            for ja in 0..self.cols {
                let a = self.data[ia * self.cols + ja];
                if a == ZERO {
                    continue;
                }
                for ib in 0..other.rows {
                    let row = ia * other.rows + ib;
                    let src = &other.data[ib * other.cols..(ib + 1) * other.cols];
                    let dst = &mut out.data[row * cols + ja * other.cols..][..other.cols];
                    for (d, &b) in dst.iter_mut().zip(src) {
                        *d = a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Column-stacking vectorization, returned as a `rows*cols x 1` column.
    pub fn vec(&self) -> Self {
        let mut out = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.push(self.data[i * self.cols + j]);
            }
        }
        Self::from_raw(self.data.len(), 1, out)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.push(self.data[i * self.cols + j]);
            }
        }
        Self::from_raw(self.cols, self.rows, out)
    }

    pub fn conjugate(&self) -> Self {
        Self::from_raw(self.rows, self.cols, self.data.iter().map(|z| z.conj()).collect())
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.push(self.data[i * self.cols + j].conj());
            }
        }
        Self::from_raw(self.cols, self.rows, out)
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols)?;
        for i in 0..self.rows {
            let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let src = &other.data[k * other.cols..(k + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, other: &ComplexMatrix, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!(
                "shapes {}x{} and {}x{} differ",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self::from_raw(self.rows, self.cols, data))
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_raw(self.rows, self.cols, self.data.iter().map(|&z| z * factor).collect())
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Sum of the diagonal; defined for rectangular matrices too (min side).
    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.data[i * self.cols + i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> Result<f64> {
        Ok(self.sub(other)?.data.iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    /// `max |a - a†|` entrywise; infinite for non-square input.
    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = self.data[i * n + j] - self.data[j * n + i].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// Short description used in numerical error messages.
    pub fn fingerprint(&self) -> String {
        let tr = self.trace();
        format!(
            "{}x{} matrix, frobenius norm {:.6e}, trace {:.6e}{:+.6e}i",
            self.rows,
            self.cols,
            self.frobenius_norm(),
            tr.re,
            tr.im
        )
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn singular_values(&self) -> Result<SingularSpectrum> {
        let svd = self
            .to_nalgebra()
            .try_svd(false, false, SVD_EPS, MAX_SWEEPS)
            .ok_or_else(|| Error::Numerical(format!("SVD did not converge for {}", self.fingerprint())))?;
        let mut values: Vec<f64> = svd.singular_values.iter().map(|s| s.max(0.0)).collect();
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(SingularSpectrum { values })
    }

    /// Sum of singular values.
    pub fn trace_norm(&self) -> Result<f64> {
        Ok(self.singular_values()?.sum())
    }

    /// Eigenvalues of a Hermitian matrix in ascending order. Only the lower
    /// triangle is read, so callers are responsible for hermiticity.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.is_square() {
            return Err(Error::Shape(format!("eigenvalues need a square matrix, got {}x{}", self.rows, self.cols)));
        }
        let eig = SymmetricEigen::try_new(self.to_nalgebra(), SVD_EPS, MAX_SWEEPS)
            .ok_or_else(|| Error::Numerical(format!("eigensolver did not converge for {}", self.fingerprint())))?;
        let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        values.sort_by(f64::total_cmp);
        Ok(values)
    }

    /// `Q` factor of a QR decomposition, with the phases of `R`'s diagonal
    /// pushed into `Q` so that `R` has a non-negative real diagonal.
    pub(crate) fn phase_fixed_q(&self) -> Self {
        let qr = self.to_nalgebra().qr();
        let q = qr.q();
        let r = qr.r();
        let mut out = self.clone();
        for j in 0..self.cols.min(self.rows) {
            let d = r[(j, j)];
            let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
            for i in 0..self.rows {
                out.data[i * self.cols + j] = q[(i, j)] * phase;
            }
        }
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self.data[i * self.cols + j];
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Singular values in decreasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    values: Vec<f64>,
}

impl SingularSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}
