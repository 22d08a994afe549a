//! Dense complex linear-algebra primitives with explicit numerical contracts:
//! Hermitian eigendecompositions, functional calculus, polar decomposition,
//! generalized inverses and Loewner-order testing.

mod eig;
mod order;
mod polar;

pub use eig::{generalized_inverse_half, hermitian_eig, psd_sqrt, PsdMatrix};
pub use order::{classify, loewner_accepts, loewner_margin, normality_residual, MatrixClass};
pub use polar::{extend_to_unitary, operator_abs, polar_decompose, PartialIsometry};
pub(crate) use polar::svd_sorted;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix, the universal carrier type.
pub type CMatrix = DMatrix<Complex64>;

pub(crate) fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Relative/absolute tolerance pair governing every numerical contract.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: 1e-8, abs: 1e-12 }
    }
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Result<Self> {
        if !(rel > 0.0) || !(abs > 0.0) {
            return Err(Error::ConfigInvalid(format!(
                "tolerances must be positive, got rel={rel}, abs={abs}"
            )));
        }
        Ok(Tolerance { rel, abs })
    }

    /// Threshold for a residual measured against a quantity of size `scale`.
    pub fn threshold(&self, scale: f64) -> f64 {
        self.rel * scale + self.abs
    }
}

/// Hermitian symmetrization (M + M*)/2.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Largest singular value (spectral norm). Zero for empty matrices.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Frobenius norm.
pub fn fro_norm(m: &CMatrix) -> f64 {
    m.norm()
}

/// True when every entry is finite.
pub fn all_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub(crate) fn check_finite(m: &CMatrix) -> Result<()> {
    if all_finite(m) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub(crate) fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    Ok(m.nrows())
}

pub(crate) fn check_same_shape(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: b.nrows() });
    }
    Ok(())
}

/// Identity matrix of dimension `n`.
pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub(crate) fn from_real_diag(d: &[f64]) -> CMatrix {
    let v: DVector<Complex64> = DVector::from_iterator(d.len(), d.iter().map(|&x| c64(x, 0.0)));
    CMatrix::from_diagonal(&v)
}

/// Eigenvalues of the Hermitian part, sorted descending.
pub(crate) fn hermitian_eigenvalues_desc(m: &CMatrix) -> Vec<f64> {
    let h = hermitian_part(m);
    let mut v: Vec<f64> = h.symmetric_eigenvalues().iter().cloned().collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}
