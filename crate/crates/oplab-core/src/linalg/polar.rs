use nalgebra::SVD;
use num_complex::Complex64;

use super::eig::PsdMatrix;
use super::{c64, check_finite, check_square, from_real_diag, hermitian_part, CMatrix, Tolerance};
use crate::error::{Error, Result};

/// SVD with singular values sorted descending and factors permuted to match.
/// Returns (u, sigma, v) with m = u diag(sigma) v*.
pub(crate) fn svd_sorted(m: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let svd = SVD::new(m.clone(), true, true);
    let u = svd.u.expect("svd requested u");
    let vt = svd.v_t.expect("svd requested v_t");
    let mut sv: Vec<(usize, f64)> = svd.singular_values.iter().cloned().enumerate().collect();
    sv.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let k = sv.len();
    let mut us = CMatrix::zeros(u.nrows(), k);
    let mut vs = CMatrix::zeros(vt.ncols(), k);
    let v = vt.adjoint();
    let mut sigma = Vec::with_capacity(k);
    for (dst, (src, s)) in sv.into_iter().enumerate() {
        us.set_column(dst, &u.column(src));
        vs.set_column(dst, &v.column(src));
        sigma.push(s.max(0.0));
    }
    (us, sigma, vs)
}

/// Operator modulus |X| = (X*X)^{1/2}, assembled from the singular value
/// decomposition so that kernel eigenvalues stay at roundoff level. The
/// eigenvalues of the result are the singular values of X.
pub fn operator_abs(x: &CMatrix) -> Result<PsdMatrix> {
    check_finite(x)?;
    let (_, sigma, v) = svd_sorted(x);
    // (X*X)^{1/2} = V diag(sigma) V*; V spans the row space, complete freely
    let n = x.ncols();
    let vals = if sigma.len() == n {
        sigma
    } else {
        let mut vals = sigma;
        vals.resize(n, 0.0);
        vals
    };
    if v.ncols() == n {
        PsdMatrix::from_eigen(vals, v, Tolerance::default())
    } else {
        // wide matrices keep only rank-many right vectors; rebuild dense
        let m = &v * from_real_diag(&vals[..v.ncols()]) * v.adjoint();
        PsdMatrix::from_matrix(&hermitian_part(&m), Tolerance::default())
    }
}

/// A partial isometry with its initial and final support projections.
#[derive(Debug, Clone)]
pub struct PartialIsometry {
    matrix: CMatrix,
    initial_projection: PsdMatrix,
    final_projection: PsdMatrix,
    rank: usize,
}

impl PartialIsometry {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn initial_projection(&self) -> &PsdMatrix {
        &self.initial_projection
    }

    pub fn final_projection(&self) -> &PsdMatrix {
        &self.final_projection
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Wrap an explicit matrix, verifying V*V and VV* are projections.
    pub fn from_matrix(v: &CMatrix, tol: Tolerance) -> Result<Self> {
        check_finite(v)?;
        let init = v.adjoint() * v;
        let fin = v * v.adjoint();
        let scale = super::op_norm(v).max(1.0);
        for p in [&init, &fin] {
            let resid = super::op_norm(&(p * p - p));
            if resid > tol.threshold(scale * scale) * 10.0 {
                return Err(Error::InvalidMap(format!(
                    "matrix is not a partial isometry (projection residual {resid:.3e})"
                )));
            }
        }
        let initial_projection = PsdMatrix::from_matrix(&hermitian_part(&init), tol)?;
        let final_projection = PsdMatrix::from_matrix(&hermitian_part(&fin), tol)?;
        let rank = initial_projection.eigenvalues().iter().filter(|&&e| e > 0.5).count();
        Ok(PartialIsometry { matrix: v.clone(), initial_projection, final_projection, rank })
    }
}

/// Polar decomposition X = V R with R = |X| and V a partial isometry that
/// vanishes on ker |X|. The rank of V is the numerical rank of X at the
/// cutoff `tol.rel * sigma_max`.
pub fn polar_decompose(x: &CMatrix, tol: Tolerance) -> Result<(PartialIsometry, PsdMatrix)> {
    check_finite(x)?;
    let n = check_square(x)?;
    let (u, sigma, v) = svd_sorted(x);
    let smax = sigma.first().copied().unwrap_or(0.0);
    let cutoff = tol.rel * smax;
    let rank = sigma.iter().filter(|&&s| s > cutoff).count();

    let mut vmat = CMatrix::zeros(n, n);
    for k in 0..rank {
        let wk = u.column(k);
        let qk = v.column(k);
        // V += w_k q_k*
        for i in 0..n {
            for j in 0..n {
                vmat[(i, j)] += wk[i] * qk[j].conj();
            }
        }
    }

    let r = PsdMatrix::from_eigen(sigma, v.clone(), Tolerance::default())?;
    let proj = |basis: &CMatrix| -> PsdMatrix {
        let vals: Vec<f64> = (0..n).map(|k| if k < rank { 1.0 } else { 0.0 }).collect();
        PsdMatrix::from_eigen(vals, basis.clone(), Tolerance::default())
            .expect("projection eigenvalues are 0/1")
    };
    let pi = PartialIsometry {
        matrix: vmat,
        initial_projection: proj(&v),
        final_projection: proj(&u),
        rank,
    };
    Ok((pi, r))
}

fn canonical_phase_vec(mut col: nalgebra::DVector<Complex64>) -> nalgebra::DVector<Complex64> {
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
        let rot = (z / c64(z.norm(), 0.0)).conj();
        for v in col.iter_mut() {
            *v *= rot;
        }
    }
    col
}

/// Complete a square partial isometry to a unitary W that agrees with V on
/// its initial support. Orthonormal bases of the kernel and cokernel are
/// paired in descending index order, with canonical phases so the completion
/// is reproducible. The zero partial isometry completes to the identity.
pub fn extend_to_unitary(v: &PartialIsometry) -> Result<CMatrix> {
    let n = check_square(v.matrix())?;
    let rank = v.rank();
    if rank == 0 {
        return Ok(CMatrix::identity(n, n));
    }
    if rank == n {
        return Ok(v.matrix().clone());
    }
    // kernel of the initial projection and of the final projection: trailing
    // eigenvectors (eigenvalues sorted descending put the 0-eigenspace last)
    let init = v.initial_projection();
    let fin = v.final_projection();
    let k_init = init.eigenvalues().iter().filter(|&&e| e < 0.5).count();
    let k_fin = fin.eigenvalues().iter().filter(|&&e| e < 0.5).count();
    if k_init != k_fin {
        return Err(Error::DimensionMismatch { expected: k_init, found: k_fin });
    }
    let mut w = v.matrix().clone();
    for k in 0..k_init {
        let a = canonical_phase_vec(init.eigenvectors().column(n - 1 - k).clone_owned());
        let b = canonical_phase_vec(fin.eigenvectors().column(n - 1 - k).clone_owned());
        for i in 0..n {
            for j in 0..n {
                w[(i, j)] += b[i] * a[j].conj();
            }
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, op_norm};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn seeded(n: usize, m: usize, mut state: u64) -> CMatrix {
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        CMatrix::from_fn(n, m, |_, _| c64(next(), next()))
    }

    #[test]
    fn abs_of_nilpotent_shift() {
        let x = CMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)]);
        let a = operator_abs(&x).unwrap().to_matrix();
        assert!((a[(0, 0)].re - 1.0).abs() < 1e-14);
        assert!(a[(1, 1)].norm() < 1e-14);
        assert!(a[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn abs_of_hermitian_is_entrywise_eigen_abs() {
        let h = CMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)]);
        let a = operator_abs(&h).unwrap().to_matrix();
        // |H| has eigenvalues |1|, |-1| in H's eigenbasis = identity
        assert!(op_norm(&(&a - &identity(2))) < 1e-12);
    }

    #[test]
    fn abs_eigenvalues_match_jordan_wielandt_dilation() {
        // independent oracle: the Hermitian dilation [[0, X],[X*, 0]] has
        // eigenvalues +-sigma_i(X)
        let x = seeded(5, 5, 2024);
        let a = operator_abs(&x).unwrap();
        let n = 5;
        let mut dil = CMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                dil[(i, n + j)] = x[(i, j)];
                dil[(n + i, j)] = x[(j, i)].conj();
            }
        }
        let (vals, _) = crate::linalg::hermitian_eig(&dil, tol()).unwrap();
        for k in 0..n {
            assert!(
                (vals[k] - a.eigenvalues()[k]).abs() < 1e-10 * vals[0].max(1.0),
                "sigma_{k}: dilation {} vs abs {}",
                vals[k],
                a.eigenvalues()[k]
            );
        }
    }

    #[test]
    fn polar_of_shift() {
        let x = CMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)]);
        let (v, r) = polar_decompose(&x, tol()).unwrap();
        assert!(op_norm(&(v.matrix() - &x)) < 1e-12);
        let rm = r.to_matrix();
        assert!((rm[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!(rm[(1, 1)].norm() < 1e-12);
        assert_eq!(v.rank(), 1);
    }

    #[test]
    fn polar_of_psd_is_support_projection() {
        let g = seeded(3, 2, 55);
        let a = &g * g.adjoint(); // rank 2 PSD of dim 3
        let (v, r) = polar_decompose(&a, tol()).unwrap();
        let p = PsdMatrix::from_matrix(&a, tol()).unwrap();
        let cutoff = 1e-8 * p.max_eigenvalue();
        let supp = p.support_projection(cutoff).to_matrix();
        assert!(op_norm(&(v.matrix() - &supp)) < 1e-9);
        assert!(op_norm(&(r.to_matrix() - &a)) < 1e-9 * op_norm(&a));
    }

    #[test]
    fn polar_reconstructs_invertible() {
        let x = seeded(4, 4, 99);
        let (v, r) = polar_decompose(&x, tol()).unwrap();
        let recon = v.matrix() * r.to_matrix();
        assert!(op_norm(&(&recon - &x)) / op_norm(&x) < 1e-10);
        // V unitary for invertible input
        assert!(op_norm(&(v.matrix().adjoint() * v.matrix() - identity(4))) < 1e-10);
        assert_eq!(v.rank(), 4);
    }

    #[test]
    fn polar_of_zero() {
        let z = CMatrix::zeros(3, 3);
        let (v, r) = polar_decompose(&z, tol()).unwrap();
        assert_eq!(v.rank(), 0);
        assert!(op_norm(v.matrix()) < 1e-15);
        assert!(op_norm(&r.to_matrix()) < 1e-15);
    }

    #[test]
    fn extend_shift_to_swap() {
        let x = CMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)]);
        let (v, _) = polar_decompose(&x, tol()).unwrap();
        let w = extend_to_unitary(&v).unwrap();
        let swap = CMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)]);
        assert!(op_norm(&(&w - &swap)) < 1e-12);
    }

    #[test]
    fn extend_unitary_is_identity_on_full_rank() {
        let g = seeded(3, 3, 7);
        let (v, _) = polar_decompose(&g, tol()).unwrap();
        let w = extend_to_unitary(&v).unwrap();
        assert!(op_norm(&(&w - v.matrix())) < 1e-12);
    }

    #[test]
    fn extend_zero_to_identity() {
        let z = CMatrix::zeros(2, 2);
        let (v, _) = polar_decompose(&z, tol()).unwrap();
        let w = extend_to_unitary(&v).unwrap();
        assert!(op_norm(&(&w - &identity(2))) < 1e-14);
    }

    #[test]
    fn extension_is_unitary_and_agrees_on_support() {
        let g = seeded(5, 3, 31);
        let x = &g * seeded(3, 5, 32); // rank <= 3 inside 5x5
        let (v, _) = polar_decompose(&x, tol()).unwrap();
        let w = extend_to_unitary(&v).unwrap();
        assert!(op_norm(&(w.adjoint() * &w - identity(5))) < 1e-10);
        let agree = &w * v.initial_projection().to_matrix() - v.matrix();
        assert!(op_norm(&agree) < 1e-10);
    }
}
