use super::polar::operator_abs;
use super::{
    check_finite, check_same_shape, check_square, fro_norm, hermitian_eigenvalues_desc,
    hermitian_part, identity, op_norm, CMatrix, Tolerance,
};
use crate::error::Result;

/// Smallest eigenvalue of the symmetrized difference (rhs - lhs). The
/// Loewner inequality lhs <= rhs is accepted when this margin stays above
/// `-tol.rel * max(1, ||lhs|| + ||rhs||)`.
pub fn loewner_margin(lhs: &CMatrix, rhs: &CMatrix) -> Result<f64> {
    check_finite(lhs)?;
    check_finite(rhs)?;
    check_same_shape(lhs, rhs)?;
    check_square(lhs)?;
    let diff = hermitian_part(&(rhs - lhs));
    let vals = hermitian_eigenvalues_desc(&diff);
    Ok(vals.last().copied().unwrap_or(0.0))
}

/// Margin together with the acceptance verdict at the standard scale.
pub fn loewner_accepts(lhs: &CMatrix, rhs: &CMatrix, tol: Tolerance) -> Result<(f64, bool)> {
    let margin = loewner_margin(lhs, rhs)?;
    let scale = (op_norm(lhs) + op_norm(rhs)).max(1.0);
    Ok((margin, margin >= -tol.rel * scale))
}

/// Operator classes testable by their defining residuals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixClass {
    Normal,
    Contraction,
    SemiHyponormal,
    Psd,
    Unitary,
    Projection,
}

/// Membership test for `class` at tolerance `tol`.
pub fn classify(x: &CMatrix, class: MatrixClass, tol: Tolerance) -> Result<bool> {
    check_finite(x)?;
    let n = check_square(x)?;
    let op = op_norm(x);
    Ok(match class {
        MatrixClass::Normal => {
            let comm = x * x.adjoint() - x.adjoint() * x;
            fro_norm(&comm) <= tol.threshold(op * op + 1.0)
        }
        MatrixClass::Contraction => op <= 1.0 + tol.rel,
        MatrixClass::SemiHyponormal => {
            let ax = operator_abs(x)?.to_matrix();
            let axs = operator_abs(&x.adjoint())?.to_matrix();
            let margin = loewner_margin(&axs, &ax)?;
            margin >= -tol.rel * (op_norm(&ax) + op_norm(&axs)).max(1.0)
        }
        MatrixClass::Psd => {
            let asym = fro_norm(&(x - x.adjoint())) * 0.5;
            if asym > tol.threshold(fro_norm(x)) {
                false
            } else {
                let vals = hermitian_eigenvalues_desc(x);
                vals.last().copied().unwrap_or(0.0) >= -tol.threshold(op.max(1.0))
            }
        }
        MatrixClass::Unitary => {
            let resid = x.adjoint() * x - identity(n);
            fro_norm(&resid) <= tol.threshold(op * op + 1.0)
        }
        MatrixClass::Projection => {
            let asym = fro_norm(&(x - x.adjoint())) * 0.5;
            let idem = fro_norm(&(x * x - x));
            asym <= tol.threshold(fro_norm(x)) && idem <= tol.threshold(op * op + 1.0)
        }
    })
}

/// Commutator residual used by the `Normal` class, exposed for diagnostics.
pub fn normality_residual(x: &CMatrix) -> f64 {
    fro_norm(&(x * x.adjoint() - x.adjoint() * x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::linalg::c64;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn diag(entries: &[f64]) -> CMatrix {
        CMatrix::from_fn(entries.len(), entries.len(), |i, j| {
            if i == j { c64(entries[i], 0.0) } else { c64(0.0, 0.0) }
        })
    }

    #[test]
    fn margin_identity_vs_twice() {
        let m = loewner_margin(&identity(3), &identity(3).scale(2.0)).unwrap();
        assert!((m - 1.0).abs() < 1e-14);
    }

    #[test]
    fn margin_of_equal_is_zero() {
        let a = CMatrix::from_row_slice(2, 2, &[c64(2.0, 0.0), c64(1.0, 0.5), c64(1.0, -0.5), c64(3.0, 0.0)]);
        let m = loewner_margin(&a, &a).unwrap();
        assert!(m.abs() < 1e-14);
    }

    #[test]
    fn margin_detects_order_failure() {
        let m = loewner_margin(&diag(&[2.0, 0.0]), &diag(&[1.0, 1.0])).unwrap();
        assert!((m + 1.0).abs() < 1e-14);
    }

    #[test]
    fn margin_dimension_mismatch() {
        let e = loewner_margin(&identity(2), &identity(3));
        assert!(matches!(e, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn unitary_is_normal_contraction() {
        // a rotation with a phase
        let u = CMatrix::from_row_slice(2, 2, &[
            c64(0.6, 0.0), c64(0.0, 0.8),
            c64(0.0, 0.8), c64(0.6, 0.0),
        ]);
        assert!(classify(&u, MatrixClass::Unitary, tol()).unwrap());
        assert!(classify(&u, MatrixClass::Normal, tol()).unwrap());
        assert!(classify(&u, MatrixClass::Contraction, tol()).unwrap());
    }

    #[test]
    fn shift_is_neither_normal_nor_semi_hyponormal() {
        let x = CMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)]);
        assert!(!classify(&x, MatrixClass::Normal, tol()).unwrap());
        // |X*| = diag(0,1) is not <= |X| = diag(1,0)
        assert!(!classify(&x, MatrixClass::SemiHyponormal, tol()).unwrap());
    }

    #[test]
    fn normal_is_semi_hyponormal() {
        let n = CMatrix::from_row_slice(2, 2, &[c64(1.0, 2.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-3.0, 0.5)]);
        assert!(classify(&n, MatrixClass::Normal, tol()).unwrap());
        assert!(classify(&n, MatrixClass::SemiHyponormal, tol()).unwrap());
    }

    #[test]
    fn psd_and_projection_classes() {
        let p = diag(&[1.0, 0.0]);
        assert!(classify(&p, MatrixClass::Psd, tol()).unwrap());
        assert!(classify(&p, MatrixClass::Projection, tol()).unwrap());
        assert!(!classify(&diag(&[1.0, -0.2]), MatrixClass::Psd, tol()).unwrap());
        assert!(!classify(&diag(&[1.0, 0.5]), MatrixClass::Projection, tol()).unwrap());
    }
}
