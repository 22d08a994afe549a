//! Spectral scales, generalized s-numbers, spectral-dominance certificates
//! and convergence-in-measure diagnostics, with the matrix algebra viewed as
//! a finite factor under a normalized or unnormalized trace.

use crate::certify::InequalityCertificate;
use crate::error::{Error, Result};
use crate::linalg::{
    classify, hermitian_eig, loewner_margin, op_norm, operator_abs, CMatrix, MatrixClass,
    Tolerance,
};
use crate::posmaps::PositiveMapSpec;

/// Trace normalization for the scale: total mass 1 or total mass dim.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMode {
    Normalized,
    Unnormalized,
}

/// Right-continuous non-increasing step function t -> lambda_t(A) on (0, T),
/// T = 1 (normalized trace) or T = dim (unnormalized).
#[derive(Debug, Clone)]
pub struct SpectralScale {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    trace_mode: TraceMode,
}

impl SpectralScale {
    fn from_sorted_eigenvalues(values: Vec<f64>, mode: TraceMode) -> Self {
        let n = values.len();
        let step = match mode {
            TraceMode::Normalized => 1.0 / n as f64,
            TraceMode::Unnormalized => 1.0,
        };
        let breakpoints = (1..n).map(|k| k as f64 * step).collect();
        SpectralScale { breakpoints, values, trace_mode: mode }
    }

    pub fn trace_mode(&self) -> TraceMode {
        self.trace_mode
    }

    /// Total parameter length: 1 for the normalized trace, dim otherwise.
    pub fn total(&self) -> f64 {
        match self.trace_mode {
            TraceMode::Normalized => 1.0,
            TraceMode::Unnormalized => self.values.len() as f64,
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Evaluate at t in (0, T), right-continuously. Queries at t <= 0 return
    /// the maximal spectrum (the lambda_0 left-limit convention); queries at
    /// t >= T return the last interval's value (lambda_1 likewise).
    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.lambda_zero();
        }
        if t >= self.total() {
            return self.lambda_one();
        }
        let idx = self.breakpoints.partition_point(|b| *b <= t);
        self.values[idx]
    }

    /// lim_{t -> 0+} lambda_t: the maximal spectrum.
    pub fn lambda_zero(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// lim_{t -> T-} lambda_t: the minimal spectrum.
    pub fn lambda_one(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// Spectral scale of a Hermitian matrix: the step function whose value on
/// the k-th interval is the (k+1)-th largest eigenvalue.
pub fn spectral_scale(a: &CMatrix, mode: TraceMode, tol: Tolerance) -> Result<SpectralScale> {
    let (vals, _) = hermitian_eig(a, tol)?;
    Ok(SpectralScale::from_sorted_eigenvalues(vals, mode))
}

/// Generalized s-numbers mu_t(X) = lambda_t(|X|): the singular values as a
/// step function.
pub fn s_numbers(x: &CMatrix, mode: TraceMode) -> Result<SpectralScale> {
    let modulus = operator_abs(x)?;
    Ok(SpectralScale::from_sorted_eigenvalues(modulus.eigenvalues().to_vec(), mode))
}

/// Outcome of a spectral-dominance test between two Hermitian matrices.
#[derive(Debug, Clone)]
pub struct DominanceOutcome {
    pub dominated: bool,
    /// When dominated: the unitary with U A U* <= B, exact in finite
    /// dimension (the lemma's epsilon is not needed).
    pub unitary: Option<CMatrix>,
    /// Margin of the certificate U A U* <= B.
    pub certificate_margin: Option<f64>,
    /// When not dominated: a witness (t, lambda_t(A), lambda_t(B)) with
    /// lambda_t(A) > lambda_t(B).
    pub violation: Option<(f64, f64, f64)>,
}

/// Spectral dominance lambda_t(A) <= lambda_t(B) for all t, certified by the
/// unitary that aligns the two eigenbases in descending order.
pub fn dominance_check(
    a: &CMatrix,
    b: &CMatrix,
    mode: TraceMode,
    tol: Tolerance,
) -> Result<DominanceOutcome> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: b.nrows() });
    }
    let (va, ua) = hermitian_eig(a, tol)?;
    let (vb, ub) = hermitian_eig(b, tol)?;
    let n = va.len();
    let scale = (op_norm(a) + op_norm(b)).max(1.0);
    let thr = tol.rel * scale + tol.abs;
    let step = match mode {
        TraceMode::Normalized => 1.0 / n as f64,
        TraceMode::Unnormalized => 1.0,
    };
    for k in 0..n {
        if va[k] > vb[k] + thr {
            let t = (k as f64 + 0.5) * step;
            return Ok(DominanceOutcome {
                dominated: false,
                unitary: None,
                certificate_margin: None,
                violation: Some((t, va[k], vb[k])),
            });
        }
    }
    let u = &ub * ua.adjoint();
    let conj = &u * a * u.adjoint();
    let margin = loewner_margin(&conj, b)?;
    Ok(DominanceOutcome {
        dominated: true,
        unitary: Some(u),
        certificate_margin: Some(margin),
        violation: None,
    })
}

/// Per-grid-point record of how lambda_t(A_n) approaches lambda_t(A).
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    /// Query points, the midpoints of the limit scale's intervals (hence
    /// never breakpoints).
    pub grid: Vec<f64>,
    /// deviations[i][k] = |lambda_{t_k}(A_i) - lambda_{t_k}(A)|.
    pub deviations: Vec<Vec<f64>>,
    /// tail_sups[m][k] = sup over i >= m of deviations[i][k].
    pub tail_sups: Vec<Vec<f64>>,
    /// Operator norms ||A_i - A||, the Weyl perturbation budget.
    pub weyl_norms: Vec<f64>,
}

impl ConvergenceReport {
    /// Every deviation within its Weyl budget plus slack.
    pub fn weyl_bounded(&self, slack: f64) -> bool {
        self.deviations.iter().zip(&self.weyl_norms).all(|(row, w)| {
            row.iter().all(|d| *d <= w + slack)
        })
    }

    /// Largest final-tail deviation over the grid.
    pub fn final_tail_sup(&self) -> f64 {
        self.tail_sups
            .last()
            .map(|row| row.iter().cloned().fold(0.0, f64::max))
            .unwrap_or(0.0)
    }
}

/// Probe pointwise convergence of spectral scales along a matrix sequence,
/// at a grid that avoids the limit scale's breakpoints (the scale of the
/// limit need not converge at its jump points).
pub fn measure_convergence_probe(
    sequence: &[CMatrix],
    a: &CMatrix,
    mode: TraceMode,
    tol: Tolerance,
) -> Result<ConvergenceReport> {
    let limit = spectral_scale(a, mode, tol)?;
    let n = limit.values().len();
    let step = limit.total() / n as f64;
    let grid: Vec<f64> = (0..n).map(|k| (k as f64 + 0.5) * step).collect();
    let mut deviations: Vec<Vec<f64>> = Vec::with_capacity(sequence.len());
    let mut weyl_norms = Vec::with_capacity(sequence.len());
    for m in sequence {
        if m.shape() != a.shape() {
            return Err(Error::DimensionMismatch { expected: a.nrows(), found: m.nrows() });
        }
        let sc = spectral_scale(m, mode, tol)?;
        deviations.push(grid.iter().map(|&t| (sc.eval(t) - limit.eval(t)).abs()).collect());
        weyl_norms.push(op_norm(&(m - a)));
    }
    let len = sequence.len();
    let mut tail_sups = vec![vec![0.0; grid.len()]; len];
    if len > 0 {
        tail_sups[len - 1] = deviations[len - 1].clone();
        for i in (0..len - 1).rev() {
            for k in 0..grid.len() {
                tail_sups[i][k] = deviations[i][k].max(tail_sups[i + 1][k]);
            }
        }
    }
    Ok(ConvergenceReport { grid, deviations, tail_sups, weyl_norms })
}

/// Result of the s-number doubling inequality sweep.
#[derive(Debug, Clone, Copy)]
pub struct MuDoublingOutcome {
    pub pass: bool,
    /// min over the grid of mu_t(Phi(I)) - mu_{2t}(Phi(Z)).
    pub worst_gap: f64,
}

/// Check mu_{2t}(Phi(Z)) <= mu_t(Phi(I)) over a grid in (0, 1/2), under the
/// normalized trace. Grid points that hit a breakpoint of either step
/// function are nudged by 1e-9.
pub fn mu_doubling_check(
    phi: &PositiveMapSpec,
    z: &CMatrix,
    grid: &[f64],
    tol: Tolerance,
) -> Result<MuDoublingOutcome> {
    if !classify(z, MatrixClass::Contraction, tol)? {
        return Err(Error::NotContraction { sigma_max: op_norm(z) });
    }
    if z.nrows() != phi.input_dim() || z.ncols() != phi.input_dim() {
        return Err(Error::DimensionMismatch { expected: phi.input_dim(), found: z.nrows() });
    }
    let mu_z = s_numbers(&phi.apply(z)?, TraceMode::Normalized)?;
    let unit = phi.apply(&CMatrix::identity(phi.input_dim(), phi.input_dim()))?;
    let mu_unit = s_numbers(&unit, TraceMode::Normalized)?;
    let n_out = phi.output_dim() as f64;
    let thr = tol.rel * op_norm(&unit).max(1.0);
    let mut worst = f64::INFINITY;
    for &t0 in grid {
        if !(0.0 < t0 && t0 < 0.5) {
            return Err(Error::ConfigInvalid(format!("grid point {t0} outside (0, 1/2)")));
        }
        // both step functions break on multiples of 1/(2 n_out) in t
        let mut t = t0;
        let snapped = (t * 2.0 * n_out).round();
        if (t * 2.0 * n_out - snapped).abs() < 1e-12 && snapped > 0.0 {
            t += 1e-9;
        }
        let gap = mu_unit.eval(t) - mu_z.eval(2.0 * t);
        worst = worst.min(gap);
    }
    Ok(MuDoublingOutcome { pass: worst >= -thr, worst_gap: worst })
}

/// Loewner order implies spectral dominance; verify it on a stored
/// certificate by comparing the sorted Hermitian spectra of both sides.
pub fn certificate_scale_dominance(
    cert: &InequalityCertificate,
    mode: TraceMode,
    tol: Tolerance,
) -> Result<bool> {
    let out = dominance_check(&cert.lhs, &cert.rhs, mode, tol)?;
    Ok(out.dominated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble;
    use crate::linalg::{c64, hermitian_part, identity};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn diag(entries: &[f64]) -> CMatrix {
        CMatrix::from_fn(entries.len(), entries.len(), |i, j| {
            if i == j { c64(entries[i], 0.0) } else { c64(0.0, 0.0) }
        })
    }

    #[test]
    fn scale_of_diag_3_1_normalized() {
        let s = spectral_scale(&diag(&[3.0, 1.0]), TraceMode::Normalized, tol()).unwrap();
        assert_eq!(s.breakpoints(), &[0.5]);
        assert_eq!(s.eval(0.25), 3.0);
        assert_eq!(s.eval(0.5), 1.0); // right-continuity at the breakpoint
        assert_eq!(s.eval(0.75), 1.0);
        assert_eq!(s.lambda_zero(), 3.0);
        assert_eq!(s.lambda_one(), 1.0);
    }

    #[test]
    fn scale_of_scalar_multiple_is_constant() {
        let s = spectral_scale(&identity(4).scale(2.5), TraceMode::Normalized, tol()).unwrap();
        for t in [0.1, 0.3, 0.6, 0.9] {
            assert_eq!(s.eval(t), 2.5);
        }
    }

    #[test]
    fn scale_matches_sorted_eigenvalue_oracle() {
        let h = hermitian_part(&ensemble::ginibre(7, 7, 123));
        let s = spectral_scale(&h, TraceMode::Normalized, tol()).unwrap();
        let (sorted, _) = hermitian_eig(&h, tol()).unwrap();
        for k in 1..=7usize {
            let t = k as f64 / 7.0 - 1e-6;
            assert!((s.eval(t) - sorted[k - 1]).abs() < 1e-12);
        }
    }

    #[test]
    fn unnormalized_breakpoints_are_integers() {
        let s = spectral_scale(&diag(&[5.0, 4.0, 2.0]), TraceMode::Unnormalized, tol()).unwrap();
        assert_eq!(s.breakpoints(), &[1.0, 2.0]);
        assert_eq!(s.total(), 3.0);
        assert_eq!(s.eval(1.5), 4.0);
    }

    #[test]
    fn s_numbers_of_unitary_constant_one() {
        let u = ensemble::haar_unitary(4, 9);
        let s = s_numbers(&u, TraceMode::Normalized).unwrap();
        for t in [0.1, 0.45, 0.8] {
            assert!((s.eval(t) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn s_numbers_of_shift() {
        let x = CMatrix::from_row_slice(2, 2, &[
            c64(0.0, 0.0), c64(0.0, 0.0),
            c64(1.0, 0.0), c64(0.0, 0.0),
        ]);
        let s = s_numbers(&x, TraceMode::Normalized).unwrap();
        assert_eq!(s.eval(0.25), 1.0);
        assert_eq!(s.eval(0.5), 0.0);
        assert_eq!(s.eval(0.75), 0.0);
    }

    #[test]
    fn s_numbers_symmetric_under_adjoint() {
        let x = ensemble::ginibre(5, 5, 321);
        let s1 = s_numbers(&x, TraceMode::Normalized).unwrap();
        let s2 = s_numbers(&x.adjoint(), TraceMode::Normalized).unwrap();
        for (a, b) in s1.values().iter().zip(s2.values()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn dominance_trivial_cases() {
        let out = dominance_check(&diag(&[1.0, 0.0]), &diag(&[2.0, 1.0]), TraceMode::Normalized, tol()).unwrap();
        assert!(out.dominated);
        assert!(out.certificate_margin.unwrap() >= -1e-12);

        let out2 = dominance_check(&diag(&[2.0, 0.0]), &diag(&[1.0, 1.0]), TraceMode::Normalized, tol()).unwrap();
        assert!(!out2.dominated);
        let (t, la, lb) = out2.violation.unwrap();
        assert!(t > 0.0 && t < 1.0);
        assert!(la > lb);
    }

    #[test]
    fn dominance_certificate_on_constructed_pair() {
        // B = U D U* with D dominating A's eigenvalues entrywise
        let h = hermitian_part(&ensemble::ginibre(5, 5, 17));
        let (va, _) = hermitian_eig(&h, tol()).unwrap();
        let u = ensemble::haar_unitary(5, 18);
        let d: Vec<f64> = va.iter().map(|x| x + 0.5).collect();
        let b = &u * diag(&d) * u.adjoint();
        let out = dominance_check(&h, &hermitian_part(&b), TraceMode::Normalized, tol()).unwrap();
        assert!(out.dominated);
        assert!(out.certificate_margin.unwrap() >= -1e-10);
        // the certificate unitary really conjugates below B
        let w = out.unitary.unwrap();
        let conj = &w * &h * w.adjoint();
        assert!(loewner_margin(&conj, &hermitian_part(&b)).unwrap() >= -1e-10);
    }

    #[test]
    fn convergence_probe_shift_sequence() {
        let a = hermitian_part(&ensemble::ginibre(4, 4, 51));
        let seq: Vec<CMatrix> = (1..=30)
            .map(|k| &a + identity(4).scale(1.0 / k as f64))
            .collect();
        let rep = measure_convergence_probe(&seq, &a, TraceMode::Normalized, tol()).unwrap();
        assert!(rep.weyl_bounded(1e-12));
        // deviations are exactly 1/k here, so final tail sup = 1/30
        assert!((rep.final_tail_sup() - 1.0 / 30.0).abs() < 1e-12);
    }

    #[test]
    fn convergence_probe_constant_sequence() {
        let a = hermitian_part(&ensemble::ginibre(3, 3, 52));
        let seq = vec![a.clone(); 5];
        let rep = measure_convergence_probe(&seq, &a, TraceMode::Normalized, tol()).unwrap();
        assert!(rep.final_tail_sup() < 1e-14);
    }

    #[test]
    fn mu_doubling_identity_map() {
        let z = ensemble::contraction(6, 0.9, 61);
        let phi = PositiveMapSpec::identity_map(6);
        let grid: Vec<f64> = (0..16).map(|j| (2 * j + 1) as f64 / 64.0).collect();
        let out = mu_doubling_check(&phi, &z, &grid, tol()).unwrap();
        assert!(out.pass, "worst gap {}", out.worst_gap);
    }

    #[test]
    fn mu_doubling_pinching_of_unitary() {
        let z = ensemble::haar_unitary(4, 62);
        let phi = ensemble::pinching_map(4, 63).unwrap();
        let grid: Vec<f64> = (0..16).map(|j| (2 * j + 1) as f64 / 64.0).collect();
        let out = mu_doubling_check(&phi, &z, &grid, tol()).unwrap();
        assert!(out.pass, "worst gap {}", out.worst_gap);
    }

    #[test]
    fn mu_doubling_rejects_expansion() {
        let phi = PositiveMapSpec::identity_map(3);
        let z = identity(3).scale(1.2);
        let grid = [0.25];
        assert!(matches!(
            mu_doubling_check(&phi, &z, &grid, tol()),
            Err(Error::NotContraction { .. })
        ));
    }

    #[test]
    fn scale_monotone_nonincreasing_property() {
        let h = hermitian_part(&ensemble::ginibre(6, 6, 71));
        let s = spectral_scale(&h, TraceMode::Normalized, tol()).unwrap();
        let mut t = 0.01;
        let mut prev = s.eval(t);
        while t < 0.99 {
            t += 0.013;
            let cur = s.eval(t.min(0.999));
            assert!(cur <= prev + 1e-14);
            prev = cur;
        }
    }
}
