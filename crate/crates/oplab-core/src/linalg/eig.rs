use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use super::{
    c64, check_finite, check_square, fro_norm, from_real_diag, hermitian_part, CMatrix, Tolerance,
};
use crate::error::{Error, Result};

/// Rotate a vector so its largest-modulus component is real positive, then
/// produce a lexicographic sort key from components rounded to 1e-10.
fn canonical_phase(col: &mut nalgebra::DVectorViewMut<Complex64>) {
    let mut best = 0usize;
    let mut best_mod = -1.0;
    for (i, z) in col.iter().enumerate() {
        let m = z.norm();
        if m > best_mod + 1e-14 {
            best_mod = m;
            best = i;
        }
    }
    if best_mod > 0.0 {
        let z = col[best];
        if z.norm() > 0.0 {
            let phase = z / c64(z.norm(), 0.0);
            let rot = phase.conj();
            for v in col.iter_mut() {
                *v *= rot;
            }
        }
    }
}

fn lex_key(col: &nalgebra::DVectorView<Complex64>) -> Vec<(i64, i64)> {
    col.iter()
        .map(|z| ((z.re * 1e10).round() as i64, (z.im * 1e10).round() as i64))
        .collect()
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized as (A + A*)/2 before decomposition; the asymmetry
/// must stay within tolerance. Eigenvalues come back sorted descending and the
/// output is deterministic for identical input: eigenvector phases are
/// canonicalized and, within an eigenvalue cluster, columns are ordered by
/// lexicographic comparison of rounded components.
pub fn hermitian_eig(a: &CMatrix, tol: Tolerance) -> Result<(Vec<f64>, CMatrix)> {
    check_finite(a)?;
    let n = check_square(a)?;
    let asym = fro_norm(&(a - a.adjoint())).max(0.0) * 0.5;
    let scale = fro_norm(a);
    if asym > tol.threshold(scale) {
        return Err(Error::NotHermitian { residual: asym });
    }
    let h = hermitian_part(a);
    let eig = SymmetricEigen::new(h);
    let mut vals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    let mut vecs = eig.eigenvectors;

    for j in 0..n {
        canonical_phase(&mut vecs.column_mut(j));
    }

    // sort descending by eigenvalue; stable on the original column index
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap().then(i.cmp(&j)));
    let mut sorted_vals: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let mut sorted = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        sorted.set_column(dst, &vecs.column(src));
    }

    // tie-break inside eigenvalue clusters by lexicographic component order
    let cluster_tol = tol.threshold(scale.max(1.0));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (sorted_vals[start] - sorted_vals[end]).abs() <= cluster_tol {
            end += 1;
        }
        if end - start > 1 {
            let mut idx: Vec<usize> = (start..end).collect();
            idx.sort_by_key(|&j| lex_key(&sorted.column(j).as_view()));
            let block_vals: Vec<f64> = idx.iter().map(|&j| sorted_vals[j]).collect();
            let block_cols: Vec<_> = idx.iter().map(|&j| sorted.column(j).clone_owned()).collect();
            for (off, (v, col)) in block_vals.into_iter().zip(block_cols).enumerate() {
                sorted_vals[start + off] = v;
                sorted.set_column(start + off, &col);
            }
        }
        start = end;
    }

    vals = sorted_vals;
    vecs = sorted;
    Ok((vals, vecs))
}

/// Hermitian positive-semidefinite matrix carried by its certified
/// eigendecomposition: eigenvalues sorted descending, unitary eigenvector
/// columns.
#[derive(Debug, Clone)]
pub struct PsdMatrix {
    dim: usize,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl PsdMatrix {
    /// Certify a matrix as PSD. Eigenvalues in [-tol*scale, 0) are clamped to
    /// zero; anything more negative raises `NotPsd`.
    pub fn from_matrix(a: &CMatrix, tol: Tolerance) -> Result<Self> {
        let (vals, vecs) = hermitian_eig(a, tol)?;
        Self::from_eigen(vals, vecs, tol)
    }

    /// Assemble from an eigensystem already sorted descending, applying the
    /// same clamp rule as `from_matrix`.
    pub(crate) fn from_eigen(mut vals: Vec<f64>, vecs: CMatrix, tol: Tolerance) -> Result<Self> {
        let dim = vecs.nrows();
        let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let clamp = tol.threshold(scale);
        for v in vals.iter_mut() {
            if *v < 0.0 {
                if *v >= -clamp {
                    *v = 0.0;
                } else {
                    return Err(Error::NotPsd { min_eigenvalue: *v });
                }
            }
        }
        Ok(PsdMatrix { dim, eigenvalues: vals, eigenvectors: vecs })
    }

    /// Assemble the zero matrix of dimension `n`.
    pub fn zero(n: usize) -> Self {
        PsdMatrix { dim: n, eigenvalues: vec![0.0; n], eigenvectors: CMatrix::identity(n, n) }
    }

    /// Identity of dimension `n`.
    pub fn identity_psd(n: usize) -> Self {
        PsdMatrix { dim: n, eigenvalues: vec![1.0; n], eigenvectors: CMatrix::identity(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Eigenvalues sorted descending; all non-negative.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn trace(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    /// Reassemble the dense matrix U diag(lambda) U*.
    pub fn to_matrix(&self) -> CMatrix {
        self.apply_spectral(|x| x)
    }

    /// U diag(f(lambda)) U*, symmetrized.
    pub fn apply_spectral(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let d: Vec<f64> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        let m = &self.eigenvectors * from_real_diag(&d) * self.eigenvectors.adjoint();
        hermitian_part(&m)
    }

    fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> PsdMatrix {
        PsdMatrix {
            dim: self.dim,
            eigenvalues: self.eigenvalues.iter().map(|&x| f(x)).collect(),
            eigenvectors: self.eigenvectors.clone(),
        }
    }

    /// PSD square root: S with S^2 = A.
    pub fn sqrt(&self) -> PsdMatrix {
        self.map_eigenvalues(f64::sqrt)
    }

    /// Generalized inverse square root: eigenvalues above `cutoff` map to
    /// lambda^{-1/2}, the rest to zero, in the same eigenbasis.
    pub fn generalized_inverse_half(&self, cutoff: f64) -> PsdMatrix {
        self.map_eigenvalues(|x| if x > cutoff { 1.0 / x.sqrt() } else { 0.0 })
    }

    /// Orthogonal projection onto the span of eigenvectors above `cutoff`.
    pub fn support_projection(&self, cutoff: f64) -> PsdMatrix {
        self.map_eigenvalues(|x| if x > cutoff { 1.0 } else { 0.0 })
    }

    /// Numerical rank at the scale-invariant cutoff `tol.rel * lambda_max`.
    pub fn rank(&self, tol: Tolerance) -> usize {
        let cutoff = tol.rel * self.max_eigenvalue();
        self.eigenvalues.iter().filter(|&&x| x > cutoff).count()
    }
}

/// PSD square root of a certified PSD matrix.
pub fn psd_sqrt(a: &PsdMatrix) -> PsdMatrix {
    a.sqrt()
}

/// Generalized inverse square root with explicit cutoff.
pub fn generalized_inverse_half(a: &PsdMatrix, cutoff: f64) -> PsdMatrix {
    a.generalized_inverse_half(cutoff)
}
