//! The matrix geometric mean for positive-definite pairs, extended to
//! positive-semidefinite pairs through a regularized strong-limit schedule.

use crate::error::{Error, Result};
use crate::linalg::{fro_norm, hermitian_part, svd_sorted, CMatrix, PsdMatrix, Tolerance};

/// Outcome of the regularized geometric mean: the value, the recorded
/// (r, iterate-distance) schedule, and whether the Cauchy stop fired.
#[derive(Debug, Clone)]
pub struct MeanResult {
    pub value: PsdMatrix,
    pub regularization_trace: Vec<(f64, f64)>,
    pub converged: bool,
}

/// Geometric mean of two strictly positive matrices through the half-power
/// sandwich formula. The middle square root is assembled from the singular
/// value decomposition of (A)^{-1/2} B^{1/2}, which keeps kernel-adjacent
/// directions at roundoff accuracy.
pub fn geometric_mean_pd(a: &PsdMatrix, b: &PsdMatrix, tol: Tolerance) -> Result<PsdMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    for m in [a, b] {
        let cutoff = tol.rel * m.max_eigenvalue();
        if m.min_eigenvalue() <= cutoff {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: m.min_eigenvalue(),
                cutoff,
            });
        }
    }
    Ok(sharp_from_shifted(a, b, 0.0, tol))
}

/// (A + rI) # (B + rI) evaluated entirely in the fixed eigenbases of A and B;
/// the shift enters per-eigenvalue, so arbitrarily small r stays resolved.
fn sharp_from_shifted(a: &PsdMatrix, b: &PsdMatrix, r: f64, tol: Tolerance) -> PsdMatrix {
    let half = a.apply_spectral(|x| (x + r).sqrt());
    let inv_half = a.apply_spectral(|x| 1.0 / (x + r).sqrt());
    let b_half = b.apply_spectral(|x| (x + r).sqrt());
    let c = &inv_half * &b_half;
    let (u, sigma, _) = svd_sorted(&c);
    // A_r^{1/2} (C C*)^{1/2} A_r^{1/2} with (C C*)^{1/2} = U diag(sigma) U*
    let hu = &half * &u;
    let mut m = CMatrix::zeros(a.dim(), a.dim());
    for (k, s) in sigma.iter().enumerate() {
        let col = hu.column(k);
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                m[(i, j)] += col[i] * col[j].conj() * crate::linalg::c64(*s, 0.0);
            }
        }
    }
    let m = hermitian_part(&m);
    PsdMatrix::from_matrix(&m, Tolerance { rel: tol.rel.max(1e-6), abs: tol.abs })
        .expect("sandwiched square root is PSD up to roundoff")
}

/// Regularized geometric mean of a PSD pair: the value of
/// (A + rI) # (B + rI) along the schedule r_k = (||A|| + ||B|| + 1) 2^{-k},
/// k = 4, 5, ..., stopping when successive iterates differ by at most
/// 1e-10 (1 + ||A|| + ||B||), capped at k = 60.
///
/// Both arguments are block diagonal with respect to the joint support
/// S = supp(A + B), and so is every iterate:
/// (A + rI) # (B + rI) = J (A' + rI) # (B' + rI) J* + r (I - P). The
/// iteration therefore runs on the compression to S with the complement
/// shift added back analytically; a shared kernel never meets the 1/sqrt(r)
/// factors that would otherwise swamp the iterate in roundoff.
///
/// Once successive distances stop decreasing below 1e-6 scale the iterate
/// has reached its floating-point floor; the schedule then stops and keeps
/// the iterate before the stall, which is the schedule's best approximation
/// of the strong limit. `converged` stays true only for a genuine Cauchy
/// stop at 1e-10 scale.
pub fn geometric_mean(a: &PsdMatrix, b: &PsdMatrix, tol: Tolerance) -> Result<MeanResult> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let n = a.dim();
    let scale = a.max_eigenvalue() + b.max_eigenvalue() + 1.0;
    let stop = 1e-10 * scale;
    let stall_floor = 1e-6 * scale;
    let value_clamp = Tolerance { rel: tol.rel.max(1e-6), abs: tol.abs };

    let sum = PsdMatrix::from_matrix(&hermitian_part(&(a.to_matrix() + b.to_matrix())), tol)?;
    let join_cut = 1e-12 * sum.max_eigenvalue();
    let s = sum.eigenvalues().iter().filter(|&&x| x > join_cut).count();
    if s == 0 {
        return Ok(MeanResult {
            value: PsdMatrix::zero(n),
            regularization_trace: Vec::new(),
            converged: true,
        });
    }
    let j = sum.eigenvectors().columns(0, s).clone_owned();
    let complement = CMatrix::identity(n, n) - &j * j.adjoint();
    let a_c = PsdMatrix::from_matrix(&hermitian_part(&(j.adjoint() * a.to_matrix() * &j)), tol)?;
    let b_c = PsdMatrix::from_matrix(&hermitian_part(&(j.adjoint() * b.to_matrix() * &j)), tol)?;

    let mut trace = Vec::new();
    let mut prev: Option<CMatrix> = None;
    let mut prev_d = f64::INFINITY;
    let mut converged = false;
    for k in 4..=60u32 {
        let r = scale * (0.5f64).powi(k as i32);
        let compressed = sharp_from_shifted(&a_c, &b_c, r, tol);
        let cur = &j * compressed.to_matrix() * j.adjoint() + complement.scale(r);
        if let Some(prev_dense) = &prev {
            let d = fro_norm(&(&cur - prev_dense));
            if d > prev_d && prev_d <= stall_floor {
                // floating-point floor reached; the previous iterate stands
                break;
            }
            trace.push((r, d));
            prev_d = d;
            if d <= stop {
                converged = true;
                prev = Some(cur);
                break;
            }
        }
        prev = Some(cur);
    }
    let dense = prev.expect("schedule ran at least once");
    Ok(MeanResult {
        value: PsdMatrix::from_matrix(&hermitian_part(&dense), value_clamp)?,
        regularization_trace: trace,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, identity, loewner_margin, op_norm};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn psd(m: &CMatrix) -> PsdMatrix {
        PsdMatrix::from_matrix(m, tol()).unwrap()
    }

    fn diag(entries: &[f64]) -> CMatrix {
        CMatrix::from_fn(entries.len(), entries.len(), |i, j| {
            if i == j { c64(entries[i], 0.0) } else { c64(0.0, 0.0) }
        })
    }

    fn seeded(n: usize, m: usize, mut state: u64) -> CMatrix {
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        CMatrix::from_fn(n, m, |_, _| c64(next(), next()))
    }

    #[test]
    fn scalar_mean() {
        let a = psd(&diag(&[4.0]));
        let b = psd(&diag(&[9.0]));
        let g = geometric_mean_pd(&a, &b, tol()).unwrap().to_matrix();
        assert!((g[(0, 0)].re - 6.0).abs() < 1e-12);
    }

    #[test]
    fn idempotence() {
        let a = psd(&CMatrix::from_row_slice(2, 2, &[
            c64(2.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(2.0, 0.0),
        ]));
        let g = geometric_mean_pd(&a, &a, tol()).unwrap().to_matrix();
        assert!(op_norm(&(&g - &a.to_matrix())) < 1e-12);
    }

    #[test]
    fn commuting_diagonals() {
        let a = psd(&diag(&[2.0, 1.0]));
        let b = psd(&diag(&[1.0, 2.0]));
        let g = geometric_mean_pd(&a, &b, tol()).unwrap().to_matrix();
        let s = 2f64.sqrt();
        assert!((g[(0, 0)].re - s).abs() < 1e-12);
        assert!((g[(1, 1)].re - s).abs() < 1e-12);
        assert!(g[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn singular_argument_rejected_by_pd_form() {
        let a = psd(&diag(&[1.0, 0.0]));
        let b = psd(&diag(&[1.0, 1.0]));
        assert!(matches!(
            geometric_mean_pd(&a, &b, tol()),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn regularized_orthogonal_supports_vanish() {
        let a = psd(&diag(&[1.0, 0.0]));
        let b = psd(&diag(&[0.0, 1.0]));
        let m = geometric_mean(&a, &b, tol()).unwrap();
        assert!(op_norm(&m.value.to_matrix()) < 1e-7);
    }

    #[test]
    fn identity_sharp_b_is_sqrt() {
        let g = seeded(4, 4, 11);
        let b = psd(&(g.adjoint() * &g));
        let m = geometric_mean(&PsdMatrix::identity_psd(4), &b, tol()).unwrap();
        assert!(m.converged);
        let resid = op_norm(&(m.value.to_matrix() - b.sqrt().to_matrix()));
        assert!(resid < 1e-9 * (1.0 + b.max_eigenvalue()), "residual {resid}");
    }

    #[test]
    fn riccati_property_pd() {
        let g1 = seeded(5, 5, 21);
        let g2 = seeded(5, 5, 22);
        let a = psd(&(g1.adjoint() * &g1 + identity(5).scale(0.3)));
        let b = psd(&(g2.adjoint() * &g2 + identity(5).scale(0.3)));
        let m = geometric_mean_pd(&a, &b, tol()).unwrap().to_matrix();
        let ainv = a.apply_spectral(|x| 1.0 / x);
        let resid = op_norm(&(&m * &ainv * &m - b.to_matrix()));
        let scale = 1.0 + a.max_eigenvalue() + b.max_eigenvalue();
        assert!(resid < 1e-8 * scale, "riccati residual {resid}");
    }

    #[test]
    fn agm_margin_nonnegative() {
        let g1 = seeded(4, 4, 31);
        let g2 = seeded(4, 4, 32);
        let a = psd(&(g1.adjoint() * &g1 + identity(4).scale(0.2)));
        let b = psd(&(g2.adjoint() * &g2 + identity(4).scale(0.2)));
        let mean = geometric_mean_pd(&a, &b, tol()).unwrap().to_matrix();
        let arith = (a.to_matrix() + b.to_matrix()).scale(0.5);
        let scale = 1.0 + a.max_eigenvalue() + b.max_eigenvalue();
        assert!(loewner_margin(&mean, &arith).unwrap() >= -1e-8 * scale);
        // scaled form A + B/4
        let scaled = a.to_matrix() + b.to_matrix().scale(0.25);
        assert!(loewner_margin(&mean, &scaled).unwrap() >= -1e-8 * scale);
    }

    #[test]
    fn regularized_trace_distances_shrink_then_stop() {
        let g1 = seeded(4, 4, 41);
        let g2 = seeded(4, 4, 42);
        let a = psd(&(g1.adjoint() * &g1 + identity(4).scale(0.5)));
        let b = psd(&(g2.adjoint() * &g2 + identity(4).scale(0.5)));
        let m = geometric_mean(&a, &b, tol()).unwrap();
        assert!(m.converged);
        let d = &m.regularization_trace;
        assert!(d.len() >= 3);
        for w in d.windows(2) {
            assert!(w[1].1 <= w[0].1 * 1.5 + 1e-12, "distance grew: {:?}", w);
        }
        let scale = 1.0 + a.max_eigenvalue() + b.max_eigenvalue();
        assert!(d.last().unwrap().1 <= 1e-10 * scale);
    }
}
