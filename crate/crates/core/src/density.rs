//! Multipartite density matrices.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ZERO};

/// Numerical tolerances used throughout validation and criterion evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative hermiticity tolerance, scaled by `max(1, ‖ρ‖_F)`.
    pub herm: f64,
    pub trace: f64,
    pub psd: f64,
    pub purity: f64,
    /// Frobenius tolerance for reconstructing a pure state from its marginals.
    pub recon: f64,
    /// Absolute slack on `‖ρ^{T_Y}‖ - 1` before a subset counts as violating.
    pub norm: f64,
    /// Largest trace deviation that auto-normalization will absorb.
    pub normalize_window: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { herm: 1e-10, trace: 1e-10, psd: 1e-9, purity: 1e-9, recon: 1e-9, norm: 1e-9, normalize_window: 1e-3 }
    }
}

/// A square complex matrix together with the dimensions of its tensor factors.
///
/// Construction checks shape, hermiticity and unit trace. Positivity is only
/// checked on request through [`DensityMatrix::validate_psd`], since states
/// read from files often carry rounding-level negative eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    dims: Vec<usize>,
}

fn check_dims(dims: &[usize], side: usize) -> Result<()> {
    if dims.is_empty() {
        return Err(Error::arg("at least one subsystem dimension is required"));
    }
    if let Some(k) = dims.iter().position(|&d| d == 0) {
        return Err(Error::arg(format!("subsystem {k} has dimension 0")));
    }
    let total = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::Size("product of subsystem dimensions overflows".into()))?;
    if total != side {
        return Err(Error::Shape(format!("subsystem dimensions {dims:?} multiply to {total}, matrix side is {side}")));
    }
    Ok(())
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        Self::with_tolerances(mat, dims, &Tolerances::default())
    }

    pub fn with_tolerances(mat: ComplexMatrix, dims: Vec<usize>, tol: &Tolerances) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::Shape(format!("density matrix must be square, got {}x{}", mat.rows(), mat.cols())));
        }
        check_dims(&dims, mat.rows())?;
        let herm_limit = tol.herm * mat.frobenius_norm().max(1.0);
        let residual = mat.hermiticity_residual();
        if residual > herm_limit {
            return Err(Error::InvalidState(format!(
                "not Hermitian: max |ρ - ρ†| = {residual:.3e} exceeds {herm_limit:.3e}"
            )));
        }
        let tr = mat.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > tol.trace {
            return Err(Error::InvalidState(format!(
                "trace is {:.12}{:+.3e}i, expected 1 within {:.1e} (use normalization to rescale)",
                tr.re, tr.im, tol.trace
            )));
        }
        Ok(Self { mat, dims })
    }

    /// Like [`DensityMatrix::new`] but divides by the trace first, provided the
    /// trace is within the normalization window of 1.
    pub fn normalized(mat: ComplexMatrix, dims: Vec<usize>, tol: &Tolerances) -> Result<Self> {
        let tr = mat.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > tol.normalize_window {
            return Err(Error::InvalidState(format!(
                "trace {:.6}{:+.3e}i is too far from 1 to normalize (window {:.1e})",
                tr.re, tr.im, tol.normalize_window
            )));
        }
        let scaled = mat.scale_real(1.0 / tr.re);
        Self::with_tolerances(scaled, dims, tol)
    }

    /// Projector onto a state vector, normalizing the vector first.
    pub fn from_pure(amplitudes: &[Complex64], dims: Vec<usize>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::arg("state vector is zero"));
        }
        let psi = ComplexMatrix::column(amplitudes.iter().map(|z| z / norm).collect())?;
        Self::new(ComplexMatrix::outer(&psi, &psi)?, dims)
    }

    /// Maximally mixed state on the given subsystems.
    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let side = dims.iter().product::<usize>();
        let m = ComplexMatrix::identity(side)?.scale_real(1.0 / side as f64);
        Self::new(m, dims)
    }

    /// Kronecker product of states, concatenating their subsystem lists.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::new(self.mat.kron(&other.mat)?, dims)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn side(&self) -> usize {
        self.mat.rows()
    }

    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ
        self.mat.frobenius_norm().powi(2)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.mat.hermitian_eigenvalues()?[0])
    }

    /// Checks positive semidefiniteness within `tol.psd`.
    pub fn validate_psd(&self, tol: &Tolerances) -> Result<()> {
        let min = self.min_eigenvalue()?;
        if min < -tol.psd {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite: minimum eigenvalue {min:.3e} below -{:.1e}",
                tol.psd
            )));
        }
        Ok(())
    }

    /// `U ρ U†` for a unitary `u` of matching size.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        let m = u.matmul(&self.mat)?.matmul(&u.adjoint())?;
        Self::new(m, self.dims.clone())
    }

    /// Reorders the tensor factors so that new factor `k` is old factor `order[k]`.
    pub fn permute_subsystems(&self, order: &[usize]) -> Result<Self> {
        let n = self.dims.len();
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&k| k >= n || std::mem::replace(&mut seen[k], true)) {
            return Err(Error::arg(format!("{order:?} is not a permutation of 0..{n}")));
        }
        let new_dims: Vec<usize> = order.iter().map(|&k| self.dims[k]).collect();
        let old_strides = strides(&self.dims);
        // offset in the old composite index contributed by each new digit
        let steps: Vec<usize> = order.iter().map(|&k| old_strides[k]).collect();
        let map = offsets(&new_dims, &steps);
        let side = self.side();
        let src = self.mat.entries();
        let mut data = Vec::with_capacity(side * side);
        for &r in &map {
            for &c in &map {
                data.push(src[r * side + c]);
            }
        }
        Ok(Self { mat: ComplexMatrix::from_raw(side, side, data), dims: new_dims })
    }

    /// Reduced state on the subsystems in `keep` (0-based), in ascending order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let n = self.dims.len();
        if keep.is_empty() {
            return Err(Error::arg("partial trace needs at least one subsystem to keep"));
        }
        let mut kept = vec![false; n];
        for &k in keep {
            if k >= n {
                return Err(Error::arg(format!("subsystem {k} out of range for {n} subsystems")));
            }
            kept[k] = true;
        }
        let all = strides(&self.dims);
        let (keep_dims, keep_steps): (Vec<usize>, Vec<usize>) =
            (0..n).filter(|&k| kept[k]).map(|k| (self.dims[k], all[k])).unzip();
        let (trace_dims, trace_steps): (Vec<usize>, Vec<usize>) =
            (0..n).filter(|&k| !kept[k]).map(|k| (self.dims[k], all[k])).unzip();
        let keep_off = offsets(&keep_dims, &keep_steps);
        let trace_off = offsets(&trace_dims, &trace_steps);

        let side = self.side();
        let out_side = keep_off.len();
        let src = self.mat.entries();
        let mut data = vec![ZERO; out_side * out_side];
        for (a, &ra) in keep_off.iter().enumerate() {
            for (b, &rb) in keep_off.iter().enumerate() {
                let mut acc = ZERO;
                for &t in &trace_off {
                    acc += src[(ra + t) * side + rb + t];
                }
                data[a * out_side + b] = acc;
            }
        }
        Ok(Self { mat: ComplexMatrix::from_raw(out_side, out_side, data), dims: keep_dims })
    }

    /// Decides separability of a pure state by comparing it with the product
    /// of its single-subsystem marginals.
    pub fn is_pure_product(&self, tol: &Tolerances) -> Result<bool> {
        let purity = self.purity();
        if purity < 1.0 - tol.purity {
            return Err(Error::Precondition(format!("state is not pure: tr(ρ²) = {purity:.12}")));
        }
        let mut product = self.partial_trace(&[0])?.mat;
        for k in 1..self.dims.len() {
            product = product.kron(&self.partial_trace(&[k])?.mat)?;
        }
        Ok(self.mat.sub(&product)?.frobenius_norm() <= tol.recon)
    }
}

/// Row-major strides of a composite index with the first factor slowest.
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Enumerates `Σ digit_k * step_k` over all mixed-radix digit tuples, last digit fastest.
pub(crate) fn offsets(radices: &[usize], steps: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for (&d, &s) in radices.iter().zip(steps) {
        out = out.iter().flat_map(|&base| (0..d).map(move |x| base + x * s)).collect();
    }
    out
}
