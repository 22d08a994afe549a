//! Independent oracles shared by the integration suites. These deliberately
//! take different evaluation routes than the library code they check.

use oplab_core::linalg::{hermitian_eig, hermitian_part, CMatrix, PsdMatrix, Tolerance};
use num_complex::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// U diag(f(lambda)) U* computed from a fresh Hermitian eigendecomposition,
/// with eigenvalues below `cutoff` sent to zero before applying `f`.
fn spectral_apply(m: &CMatrix, cutoff: f64, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = hermitian_eig(m, Tolerance::default()).expect("oracle input is Hermitian");
    let n = vals.len();
    let mut out = CMatrix::zeros(n, n);
    for k in 0..n {
        let v = if vals[k] > cutoff { f(vals[k]) } else { 0.0 };
        if v == 0.0 {
            continue;
        }
        let col = vecs.column(k);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += col[i] * col[j].conj() * c(v, 0.0);
            }
        }
    }
    hermitian_part(&out)
}

/// Plain half-power sandwich formula for strictly positive matrices, run
/// entirely through Hermitian eigendecompositions (no SVD factorization,
/// no regularization schedule) so it is an independent route.
pub fn pd_mean_eig_route(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let amax = hermitian_eig(a, Tolerance::default()).unwrap().0[0].max(0.0);
    let cutoff = 1e-12 * amax.max(1.0);
    let a_half = spectral_apply(a, cutoff, f64::sqrt);
    let a_inv_half = spectral_apply(a, cutoff, |x| 1.0 / x.sqrt());
    let mid = hermitian_part(&(&a_inv_half * b * &a_inv_half));
    let mid_max = hermitian_eig(&mid, Tolerance::default()).unwrap().0[0].max(0.0);
    let mid_sqrt = spectral_apply(&mid, 1e-14 * mid_max.max(1.0) - 1e-300, f64::sqrt);
    hermitian_part(&(&a_half * mid_sqrt * &a_half))
}

/// Support-projection oracle for the geometric mean of a singular PSD pair:
/// compress both matrices onto the intersection of their supports through
/// generalized Schur complements, take the positive-definite mean there, and
/// embed back. This is the value the regularized schedule must approach.
pub fn support_projection_mean_oracle(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let tol = Tolerance::default();
    let n = a.nrows();
    let pa = PsdMatrix::from_matrix(a, tol).unwrap();
    let pb = PsdMatrix::from_matrix(b, tol).unwrap();
    let proj = |p: &PsdMatrix| {
        let cutoff = 1e-8 * p.max_eigenvalue().max(1e-300);
        p.support_projection(cutoff).to_matrix()
    };
    let sum = proj(&pa) + proj(&pb);
    let (vals, vecs) = hermitian_eig(&sum, tol).unwrap();
    let r = vals.iter().filter(|&&v| v > 2.0 - 1e-6).count();
    if r == 0 {
        return CMatrix::zeros(n, n);
    }
    let j = vecs.columns(0, r).clone_owned();
    let jc = vecs.columns(r, n - r).clone_owned();
    let shorted = |m: &CMatrix| -> CMatrix {
        let m11 = j.adjoint() * m * &j;
        if n == r {
            return hermitian_part(&m11);
        }
        let m12 = j.adjoint() * m * &jc;
        let m22 = hermitian_part(&(jc.adjoint() * m * &jc));
        let m22_max = hermitian_eig(&m22, tol).unwrap().0[0].max(0.0);
        let m22_pinv = spectral_apply(&m22, 1e-12 * m22_max.max(1e-300), |x| 1.0 / x);
        hermitian_part(&(m11 - &m12 * m22_pinv * m12.adjoint()))
    };
    let sa = shorted(a);
    let sb = shorted(b);
    let g = pd_mean_eig_route(&sa, &sb);
    hermitian_part(&(&j * g * j.adjoint()))
}

/// Random PSD matrix of the given rank, seeded.
pub fn psd_of_rank(n: usize, rank: usize, seed: u64) -> CMatrix {
    let g = oplab_core::ensemble::ginibre(n, rank, seed);
    hermitian_part(&(&g * g.adjoint()))
}
