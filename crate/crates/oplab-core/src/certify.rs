//! Certificate-producing verifiers. Each inequality gets its certifying
//! isometry built the way the underlying argument builds it — from the polar
//! decomposition of the mapped operator — and the certificate carries both
//! sides plus the Loewner margin, so acceptance is recomputable.

use crate::error::{Error, Result};
use crate::linalg::{
    c64, classify, extend_to_unitary, hermitian_part, loewner_margin, normality_residual,
    op_norm, operator_abs, polar_decompose, CMatrix, MatrixClass, PsdMatrix, Tolerance,
};
use crate::means::geometric_mean;
use crate::posmaps::{schur_product, PositiveMapSpec};

/// Identifies which inequality a certificate (or suite row) refers to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TheoremId {
    /// |Phi(N)| <= Phi(|N|) # V Phi(|N|) V* for normal N.
    ThmBH,
    /// |Phi(X + X*)| <= arithmetic bound from Phi(|X| + |X*|).
    CorCons2Plus,
    /// |Phi(X - X*)| <= arithmetic bound from Phi(|X| + |X*|).
    CorCons2Minus,
    /// |Phi(Z)| <= Phi(I) # V Phi(I) V* for contractions Z.
    CorRD1,
    /// |Phi(sum S_k)| <= geometric bound from Phi(sum |S_k|).
    ThmSemi,
    /// |Phi(Z)| <= geometric bound from Phi(|X| + |Y|), Z = X + iY.
    CorGeo1,
    /// |Phi(N)| <= beta Phi(|N|) + (1/4 beta) V Phi(|N|) V*.
    BetaFamily,
    /// |A o B| <= |A| o |B| + (1/4) V (|A| o |B|) V*.
    SchurProduct,
    /// lambda_3(|S o Z|) <= delta_2(S).
    EigSchur,
    /// |A*| <= nu |A| with nu = ||A* A^{-1}||.
    NuBound,
    /// Arithmetic Russo-Dye improvement |Phi(Z)| <= (Phi(I) + V Phi(I) V*)/2.
    RussoDyeNorm,
    /// mu_{2t}(Phi(Z)) <= mu_t(Phi(I)) on (0, 1/2).
    MuDoubling,
}

impl TheoremId {
    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremId::ThmBH => "thm-bh",
            TheoremId::CorCons2Plus => "cor-cons2-plus",
            TheoremId::CorCons2Minus => "cor-cons2-minus",
            TheoremId::CorRD1 => "cor-rd1",
            TheoremId::ThmSemi => "thm-semi",
            TheoremId::CorGeo1 => "cor-geo1",
            TheoremId::BetaFamily => "beta-family",
            TheoremId::SchurProduct => "schur-product",
            TheoremId::EigSchur => "eig-schur",
            TheoremId::NuBound => "nu-bound",
            TheoremId::RussoDyeNorm => "russo-dye-norm",
            TheoremId::MuDoubling => "mu-doubling",
        }
    }

    pub fn from_str_tag(s: &str) -> Option<TheoremId> {
        Some(match s {
            "thm-bh" => TheoremId::ThmBH,
            "cor-cons2-plus" => TheoremId::CorCons2Plus,
            "cor-cons2-minus" => TheoremId::CorCons2Minus,
            "cor-rd1" => TheoremId::CorRD1,
            "thm-semi" => TheoremId::ThmSemi,
            "cor-geo1" => TheoremId::CorGeo1,
            "beta-family" => TheoremId::BetaFamily,
            "schur-product" => TheoremId::SchurProduct,
            "eig-schur" => TheoremId::EigSchur,
            "nu-bound" => TheoremId::NuBound,
            "russo-dye-norm" => TheoremId::RussoDyeNorm,
            "mu-doubling" => TheoremId::MuDoubling,
            _ => return None,
        })
    }

    pub const ALL: [TheoremId; 12] = [
        TheoremId::ThmBH,
        TheoremId::CorCons2Plus,
        TheoremId::CorCons2Minus,
        TheoremId::CorRD1,
        TheoremId::ThmSemi,
        TheoremId::CorGeo1,
        TheoremId::BetaFamily,
        TheoremId::SchurProduct,
        TheoremId::EigSchur,
        TheoremId::NuBound,
        TheoremId::RussoDyeNorm,
        TheoremId::MuDoubling,
    ];
}

/// A verified inequality instance. The stored `isometry` V satisfies
/// `mapped = V* |mapped|`, i.e. it is the adjoint of the completed polar
/// factor of the mapped operand, exactly the element the proofs conjugate by.
#[derive(Debug, Clone)]
pub struct InequalityCertificate {
    pub theorem_id: TheoremId,
    pub lhs: CMatrix,
    pub rhs: CMatrix,
    pub isometry: CMatrix,
    pub margin: f64,
    pub accepted: bool,
    pub beta: Option<f64>,
}

impl InequalityCertificate {
    /// Normalization used by the acceptance rule:
    /// margin >= -tol.rel * max(1, ||lhs|| + ||rhs||).
    pub fn margin_scale(&self) -> f64 {
        (op_norm(&self.lhs) + op_norm(&self.rhs)).max(1.0)
    }

    pub fn normalized_margin(&self) -> f64 {
        self.margin / self.margin_scale()
    }
}

fn finish(
    theorem_id: TheoremId,
    lhs: CMatrix,
    rhs: CMatrix,
    isometry: CMatrix,
    beta: Option<f64>,
    tol: Tolerance,
) -> Result<InequalityCertificate> {
    let margin = loewner_margin(&lhs, &rhs)?;
    let scale = (op_norm(&lhs) + op_norm(&rhs)).max(1.0);
    let accepted = margin >= -tol.rel * scale;
    Ok(InequalityCertificate { theorem_id, lhs, rhs, isometry, margin, accepted, beta })
}

/// The unitary V with m = V* |m|: adjoint of the completed polar factor.
pub fn certifying_unitary(m: &CMatrix, tol: Tolerance) -> Result<CMatrix> {
    let (pi, _) = polar_decompose(m, tol)?;
    Ok(extend_to_unitary(&pi)?.adjoint())
}

/// A contraction dilated into a unitary on doubled dimension.
#[derive(Debug, Clone)]
pub struct HalmosDilation {
    pub z: CMatrix,
    pub unitary: CMatrix,
}

/// Canonical 2n x 2n unitary dilation
/// [[Z, -sqrt(I - Z Z*)], [sqrt(I - Z* Z), Z*]] with clamped square roots.
pub fn halmos_dilate(z: &CMatrix, tol: Tolerance) -> Result<HalmosDilation> {
    let n = z.nrows();
    if z.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: z.ncols() });
    }
    let sigma = op_norm(z);
    if sigma > 1.0 + tol.rel {
        return Err(Error::NotContraction { sigma_max: sigma });
    }
    let eye = CMatrix::identity(n, n);
    // boundary contractions leave lambda_min(I - ZZ*) at -O(tol); widen the clamp
    let clamp = Tolerance { rel: (tol.rel * 10.0).max(1e-7), abs: tol.abs };
    let left = PsdMatrix::from_matrix(&hermitian_part(&(&eye - z * z.adjoint())), clamp)?.sqrt();
    let right = PsdMatrix::from_matrix(&hermitian_part(&(&eye - z.adjoint() * z)), clamp)?.sqrt();
    let mut u = CMatrix::zeros(2 * n, 2 * n);
    let lm = left.to_matrix();
    let rm = right.to_matrix();
    let za = z.adjoint();
    for i in 0..n {
        for j in 0..n {
            u[(i, j)] = z[(i, j)];
            u[(i, n + j)] = -lm[(i, j)];
            u[(n + i, j)] = rm[(i, j)];
            u[(n + i, n + j)] = za[(i, j)];
        }
    }
    Ok(HalmosDilation { z: z.clone(), unitary: u })
}

fn require_normal(n: &CMatrix, tol: Tolerance) -> Result<()> {
    if !classify(n, MatrixClass::Normal, tol)? {
        return Err(Error::NotNormal { residual: normality_residual(n) });
    }
    Ok(())
}

fn require_input_dim(phi: &PositiveMapSpec, m: &CMatrix) -> Result<()> {
    if m.nrows() != phi.input_dim() || m.ncols() != phi.input_dim() {
        return Err(Error::DimensionMismatch { expected: phi.input_dim(), found: m.nrows() });
    }
    Ok(())
}

/// Geometric-mean bound for a normal operand:
/// |Phi(N)| <= Phi(|N|) # V Phi(|N|) V*.
pub fn certify_normal_geo(
    phi: &PositiveMapSpec,
    n: &CMatrix,
    tol: Tolerance,
) -> Result<InequalityCertificate> {
    require_input_dim(phi, n)?;
    require_normal(n, tol)?;
    let phi_n = phi.apply(n)?;
    let lhs = operator_abs(&phi_n)?.to_matrix();
    let v = certifying_unitary(&phi_n, tol)?;
    let phi_absn = PsdMatrix::from_matrix(&hermitian_part(&phi.apply(&operator_abs(n)?.to_matrix())?), tol)?;
    let conj = PsdMatrix::from_matrix(&hermitian_part(&(&v * phi_absn.to_matrix() * v.adjoint())), tol)?;
    let rhs = geometric_mean(&phi_absn, &conj, tol)?.value.to_matrix();
    finish(TheoremId::ThmBH, lhs, rhs, v, None, tol)
}

/// Arithmetic beta-family bound for a normal operand:
/// |Phi(N)| <= beta Phi(|N|) + (1/4 beta) V Phi(|N|) V*.
pub fn certify_normal_beta(
    phi: &PositiveMapSpec,
    n: &CMatrix,
    beta: f64,
    tol: Tolerance,
) -> Result<InequalityCertificate> {
    if !(beta > 0.0) {
        return Err(Error::ConfigInvalid(format!("beta must be positive, got {beta}")));
    }
    require_input_dim(phi, n)?;
    require_normal(n, tol)?;
    let phi_n = phi.apply(n)?;
    let lhs = operator_abs(&phi_n)?.to_matrix();
    let v = certifying_unitary(&phi_n, tol)?;
    let phi_absn = hermitian_part(&phi.apply(&operator_abs(n)?.to_matrix())?);
    let conj = hermitian_part(&(&v * &phi_absn * v.adjoint()));
    let rhs = phi_absn.scale(beta) + conj.scale(1.0 / (4.0 * beta));
    finish(TheoremId::BetaFamily, lhs, rhs, v, Some(beta), tol)
}

/// Which Hermitian combination of X is bounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Arithmetic form of the Hermitian-parts bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitForm {
    /// (Phi(|X|+|X*|) + V Phi(|X|+|X*|) V*)/2  (beta = 1/2).
    Mean,
    /// Phi(|X|+|X*|) + (1/4) V Phi(|X|+|X*|) V*  (beta = 1).
    Quarter,
}

/// Bound on |Phi(X +- X*)| through the 2x2 block lift: the lifted map sums
/// all four blocks and the block operator [[0, Y],[Y*, 0]] (Y = X, or iX for
/// the minus sign) is Hermitian, so the beta-family machinery applies.
pub fn certify_hermitian_parts(
    phi: &PositiveMapSpec,
    x: &CMatrix,
    sign: Sign,
    form: SplitForm,
    tol: Tolerance,
) -> Result<InequalityCertificate> {
    require_input_dim(phi, x)?;
    let n = phi.input_dim();
    let y = match sign {
        Sign::Plus => x.clone(),
        Sign::Minus => x * c64(0.0, 1.0),
    };
    let mut block = CMatrix::zeros(2 * n, 2 * n);
    let ya = y.adjoint();
    for i in 0..n {
        for j in 0..n {
            block[(i, n + j)] = y[(i, j)];
            block[(n + i, j)] = ya[(i, j)];
        }
    }
    let lifted = PositiveMapSpec::lift_sum(phi.clone());
    let beta = match form {
        SplitForm::Mean => 0.5,
        SplitForm::Quarter => 1.0,
    };
    let inner = certify_normal_beta(&lifted, &block, beta, tol)?;
    let theorem_id = match sign {
        Sign::Plus => TheoremId::CorCons2Plus,
        Sign::Minus => TheoremId::CorCons2Minus,
    };
    Ok(InequalityCertificate { theorem_id, ..inner })
}

/// Russo-Dye improvement: geometric or arithmetic comparison against Phi(I).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContractionForm {
    Geo,
    Arithmetic,
}

/// Bound on |Phi(Z)| for a contraction Z, through the Halmos dilation and
/// the corner lift.
pub fn certify_contraction(
    phi: &PositiveMapSpec,
    z: &CMatrix,
    form: ContractionForm,
    tol: Tolerance,
) -> Result<InequalityCertificate> {
    require_input_dim(phi, z)?;
    let dilation = halmos_dilate(z, tol)?;
    let lifted = PositiveMapSpec::lift_corner(phi.clone());
    let inner = match form {
        ContractionForm::Geo => certify_normal_geo(&lifted, &dilation.unitary, tol)?,
        ContractionForm::Arithmetic => {
            certify_normal_beta(&lifted, &dilation.unitary, 0.5, tol)?
        }
    };
    let theorem_id = match form {
        ContractionForm::Geo => TheoremId::CorRD1,
        ContractionForm::Arithmetic => TheoremId::RussoDyeNorm,
    };
    Ok(InequalityCertificate { theorem_id, ..inner })
}

/// Certificate plus the internal contraction diagnostic for the
/// sum-of-semi-hyponormals bound.
#[derive(Debug, Clone)]
pub struct SumNormalsOutcome {
    pub certificate: InequalityCertificate,
    /// Largest singular value of Y = |S|^{-1/2} S |S|^{-1/2}; the argument
    /// requires Y to be a contraction.
    pub y_sigma_max: f64,
}

/// Bound on |Phi(sum S_k)| for semi-hyponormal S_k: builds the direct sum,
/// the summing map, and the contraction Y of the generalized-inverse
/// sandwich, then routes through the contraction certificate.
pub fn certify_sum_normals(
    phi: &PositiveMapSpec,
    terms: &[CMatrix],
    tol: Tolerance,
) -> Result<SumNormalsOutcome> {
    if terms.is_empty() {
        return Err(Error::ConfigInvalid("need at least one summand".into()));
    }
    let n = phi.input_dim();
    for s in terms {
        require_input_dim(phi, s)?;
        if !classify(s, MatrixClass::SemiHyponormal, tol)? {
            let ax = operator_abs(s)?.to_matrix();
            let axs = operator_abs(&s.adjoint())?.to_matrix();
            let margin = loewner_margin(&axs, &ax)?;
            return Err(Error::NotSemiHyponormal { margin });
        }
    }
    let m = terms.len();
    let mut direct_sum = CMatrix::zeros(m * n, m * n);
    for (k, s) in terms.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                direct_sum[(k * n + i, k * n + j)] = s[(i, j)];
            }
        }
    }
    let summing = PositiveMapSpec::block_sum(phi.clone(), m)?;
    let s_abs = operator_abs(&direct_sum)?;
    let cutoff = tol.rel * s_abs.max_eigenvalue();
    let s_half = s_abs.sqrt().to_matrix();
    let s_inv_half = s_abs.generalized_inverse_half(cutoff).to_matrix();
    let y = &s_inv_half * &direct_sum * &s_inv_half;
    let y_sigma_max = op_norm(&y);
    let lambda = PositiveMapSpec::compose(summing, PositiveMapSpec::conjugation(s_half)?)?;
    let inner = certify_contraction(&lambda, &y, ContractionForm::Geo, tol)?;
    Ok(SumNormalsOutcome {
        certificate: InequalityCertificate { theorem_id: TheoremId::ThmSemi, ..inner },
        y_sigma_max,
    })
}

/// Cartesian-decomposition bound: |Phi(Z)| against Phi(|X| + |Y|) with
/// Z = X + iY.
pub fn certify_cartesian(
    phi: &PositiveMapSpec,
    z: &CMatrix,
    tol: Tolerance,
) -> Result<InequalityCertificate> {
    require_input_dim(phi, z)?;
    let x = hermitian_part(z);
    let y = (z - z.adjoint()) * c64(0.0, -0.5);
    let r = operator_abs(&x)?.to_matrix() + operator_abs(&y)?.to_matrix();
    let phi_z = phi.apply(z)?;
    let lhs = operator_abs(&phi_z)?.to_matrix();
    let v = certifying_unitary(&phi_z, tol)?;
    let phi_r = PsdMatrix::from_matrix(&hermitian_part(&phi.apply(&r)?), tol)?;
    let conj = PsdMatrix::from_matrix(&hermitian_part(&(&v * phi_r.to_matrix() * v.adjoint())), tol)?;
    let rhs = geometric_mean(&phi_r, &conj, tol)?.value.to_matrix();
    finish(TheoremId::CorGeo1, lhs, rhs, v, None, tol)
}

/// Schur-product bound for normal A, B:
/// |A o B| <= |A| o |B| + (1/4) V (|A| o |B|) V*.
pub fn certify_schur_product(
    a: &CMatrix,
    b: &CMatrix,
    tol: Tolerance,
) -> Result<InequalityCertificate> {
    if a.shape() != b.shape() || a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: b.nrows() });
    }
    require_normal(a, tol)?;
    require_normal(b, tol)?;
    let ab = schur_product(a, b);
    let lhs = operator_abs(&ab)?.to_matrix();
    let v = certifying_unitary(&ab, tol)?;
    let s = hermitian_part(&schur_product(
        &operator_abs(a)?.to_matrix(),
        &operator_abs(b)?.to_matrix(),
    ));
    let rhs = &s + (&v * &s * v.adjoint()).scale(0.25);
    finish(TheoremId::SchurProduct, lhs, hermitian_part(&rhs), v, None, tol)
}

/// Result of the eigenvalue-vs-diagonal comparison.
#[derive(Debug, Clone, Copy)]
pub struct EigSchurOutcome {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// k-th largest eigenvalue of |S o Z| against the j-th largest diagonal
/// entry of S (both 1-based). The published inequality is (k, j) = (3, 2);
/// other index pairs serve as negative controls.
pub fn eig_schur_indices(
    s: &PsdMatrix,
    z: &CMatrix,
    k_eig: usize,
    j_diag: usize,
    tol: Tolerance,
) -> Result<EigSchurOutcome> {
    let n = s.dim();
    if z.nrows() != n || z.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: z.nrows() });
    }
    if k_eig == 0 || j_diag == 0 || k_eig > n || j_diag > n {
        return Err(Error::DimensionTooSmall { dim: n, required: k_eig.max(j_diag) });
    }
    if !classify(z, MatrixClass::Contraction, tol)? {
        return Err(Error::NotContraction { sigma_max: op_norm(z) });
    }
    let sz = schur_product(&s.to_matrix(), z);
    let modulus = operator_abs(&sz)?;
    let lhs = modulus.eigenvalues()[k_eig - 1];
    let sm = s.to_matrix();
    let mut diag: Vec<f64> = (0..n).map(|i| sm[(i, i)].re).collect();
    diag.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let rhs = diag[j_diag - 1];
    let pass = lhs <= rhs + tol.rel * s.max_eigenvalue().max(1.0) + tol.abs;
    Ok(EigSchurOutcome { lhs, rhs, pass })
}

/// The published index pair: third largest eigenvalue of |S o Z| against the
/// second largest diagonal entry of S. Needs dimension at least 3.
pub fn check_eig_schur(s: &PsdMatrix, z: &CMatrix, tol: Tolerance) -> Result<EigSchurOutcome> {
    if s.dim() < 3 {
        return Err(Error::DimensionTooSmall { dim: s.dim(), required: 3 });
    }
    eig_schur_indices(s, z, 3, 2, tol)
}

/// nu together with the two order certificates it controls.
#[derive(Debug, Clone)]
pub struct NuOutcome {
    pub nu: f64,
    /// |A*| <= nu |A|.
    pub certificate: InequalityCertificate,
    /// Margin of A A* <= nu^2 A* A.
    pub square_margin: f64,
    pub square_accepted: bool,
}

/// For invertible A: nu = ||A* A^{-1}|| certifies |A*| <= nu |A| and
/// A A* <= nu^2 A* A.
pub fn nu_bound(a: &CMatrix, tol: Tolerance) -> Result<NuOutcome> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.ncols() });
    }
    let sv = a.singular_values();
    let smax = sv.max();
    let smin = sv.min();
    if smin <= tol.rel * smax {
        return Err(Error::Singular { sigma_min: smin });
    }
    let inv = a
        .clone()
        .try_inverse()
        .ok_or(Error::Singular { sigma_min: smin })?;
    let nu = op_norm(&(a.adjoint() * &inv));
    let abs_a = operator_abs(a)?.to_matrix();
    let abs_astar = operator_abs(&a.adjoint())?.to_matrix();
    let cert = finish(
        TheoremId::NuBound,
        abs_astar,
        abs_a.scale(nu),
        CMatrix::identity(n, n),
        None,
        tol,
    )?;
    let aa_star = hermitian_part(&(a * a.adjoint()));
    let astar_a = hermitian_part(&(a.adjoint() * a));
    let square_margin = loewner_margin(&aa_star, &astar_a.scale(nu * nu))?;
    let scale = (op_norm(&aa_star) + nu * nu * op_norm(&astar_a)).max(1.0);
    let square_accepted = square_margin >= -tol.rel * scale;
    Ok(NuOutcome { nu, certificate: cert, square_margin, square_accepted })
}
