//! Constructive positive linear maps between matrix algebras: Kraus sums,
//! Schur multipliers, pinchings, the 2x2 block lifts used in the certificate
//! constructions, and composition.

use crate::ensemble;
use crate::error::{Error, Result};
use crate::linalg::{
    c64, check_finite, hermitian_eigenvalues_desc, hermitian_part, op_norm, CMatrix, PsdMatrix,
    Tolerance,
};

/// The constructive form of a positive linear map.
#[derive(Debug, Clone)]
pub enum MapKind {
    /// X -> sum_i K_i* X K_i with weights of shape input_dim x output_dim.
    Kraus { weights: Vec<CMatrix> },
    /// X -> S o X with a multiplier certified PSD at construction; positive
    /// by the Schur product theorem.
    Schur { multiplier: CMatrix },
    /// Bypass for negative tests only: same action, no PSD certificate.
    SchurRaw { multiplier: CMatrix },
    /// X -> sum_b P_b X P_b over an orthogonal block partition.
    Pinching { blocks: Vec<Vec<usize>> },
    /// [[A, B],[C, D]] -> inner(A + B + C + D).
    LiftSum { inner: Box<PositiveMapSpec> },
    /// [[A, B],[C, D]] -> inner(A).
    LiftCorner { inner: Box<PositiveMapSpec> },
    /// outer after inner.
    Compose { outer: Box<PositiveMapSpec>, inner: Box<PositiveMapSpec> },
}

/// A positive linear map with its domain and codomain dimensions.
#[derive(Debug, Clone)]
pub struct PositiveMapSpec {
    kind: MapKind,
    input_dim: usize,
    output_dim: usize,
}

impl PositiveMapSpec {
    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    /// Kraus form from weights of common shape input_dim x output_dim.
    pub fn kraus(weights: Vec<CMatrix>) -> Result<Self> {
        let first = weights
            .first()
            .ok_or_else(|| Error::InvalidMap("Kraus form needs at least one weight".into()))?;
        let (n_in, n_out) = first.shape();
        if n_in == 0 || n_out == 0 {
            return Err(Error::InvalidMap("Kraus weights must be non-empty".into()));
        }
        for w in &weights {
            check_finite(w)?;
            if w.shape() != (n_in, n_out) {
                return Err(Error::InvalidMap(format!(
                    "Kraus weights must share one shape, found {:?} and {:?}",
                    (n_in, n_out),
                    w.shape()
                )));
            }
        }
        Ok(PositiveMapSpec { kind: MapKind::Kraus { weights }, input_dim: n_in, output_dim: n_out })
    }

    /// Schur multiplier. The multiplier is certified PSD here and the
    /// original dense entries are kept, so the action S o X stays bit-exact.
    pub fn schur(multiplier: &CMatrix, tol: Tolerance) -> Result<Self> {
        PsdMatrix::from_matrix(multiplier, tol)?;
        let n = multiplier.nrows();
        Ok(PositiveMapSpec {
            kind: MapKind::Schur { multiplier: multiplier.clone() },
            input_dim: n,
            output_dim: n,
        })
    }

    /// Schur multiplier that skips the PSD certificate. Exists so negative
    /// tests can build maps that fail positivity sampling.
    pub fn schur_multiplier_unchecked(multiplier: CMatrix) -> Result<Self> {
        check_finite(&multiplier)?;
        if multiplier.nrows() != multiplier.ncols() {
            return Err(Error::DimensionMismatch {
                expected: multiplier.nrows(),
                found: multiplier.ncols(),
            });
        }
        let n = multiplier.nrows();
        Ok(PositiveMapSpec { kind: MapKind::SchurRaw { multiplier }, input_dim: n, output_dim: n })
    }

    /// Pinching onto disjoint index blocks covering 0..n.
    pub fn pinching(blocks: Vec<Vec<usize>>, n: usize) -> Result<Self> {
        let mut seen = vec![false; n];
        for b in &blocks {
            for &i in b {
                if i >= n {
                    return Err(Error::InvalidMap(format!("block index {i} out of range 0..{n}")));
                }
                if seen[i] {
                    return Err(Error::InvalidMap(format!("index {i} appears in two blocks")));
                }
                seen[i] = true;
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::InvalidMap("blocks must cover every index".into()));
        }
        Ok(PositiveMapSpec { kind: MapKind::Pinching { blocks }, input_dim: n, output_dim: n })
    }

    /// [[A, B],[C, D]] -> inner(A + B + C + D); positive because the block sum
    /// factors as (I I) X (I I)*.
    pub fn lift_sum(inner: PositiveMapSpec) -> Self {
        let (n_in, n_out) = (2 * inner.input_dim, inner.output_dim);
        PositiveMapSpec { kind: MapKind::LiftSum { inner: Box::new(inner) }, input_dim: n_in, output_dim: n_out }
    }

    /// [[A, B],[C, D]] -> inner(A).
    pub fn lift_corner(inner: PositiveMapSpec) -> Self {
        let (n_in, n_out) = (2 * inner.input_dim, inner.output_dim);
        PositiveMapSpec { kind: MapKind::LiftCorner { inner: Box::new(inner) }, input_dim: n_in, output_dim: n_out }
    }

    /// outer after inner.
    pub fn compose(outer: PositiveMapSpec, inner: PositiveMapSpec) -> Result<Self> {
        if inner.output_dim != outer.input_dim {
            return Err(Error::DimensionMismatch {
                expected: outer.input_dim,
                found: inner.output_dim,
            });
        }
        let (n_in, n_out) = (inner.input_dim, outer.output_dim);
        Ok(PositiveMapSpec {
            kind: MapKind::Compose { outer: Box::new(outer), inner: Box::new(inner) },
            input_dim: n_in,
            output_dim: n_out,
        })
    }

    /// The identity map, realized as a Schur multiplier by the all-ones
    /// (PSD, rank one) matrix.
    pub fn identity_map(n: usize) -> Self {
        let ones = CMatrix::from_element(n, n, c64(1.0, 0.0));
        PositiveMapSpec::schur(&ones, Tolerance::default()).expect("all-ones matrix is PSD")
    }

    /// The unnormalized trace functional X -> Tr(X), as a Kraus sum over the
    /// standard basis columns.
    pub fn trace_map(n: usize) -> Self {
        let weights = (0..n)
            .map(|k| CMatrix::from_fn(n, 1, |i, _| if i == k { c64(1.0, 0.0) } else { c64(0.0, 0.0) }))
            .collect();
        PositiveMapSpec::kraus(weights).expect("basis columns share one shape")
    }

    /// Conjugation X -> C* X C by a single square matrix.
    pub fn conjugation(c: CMatrix) -> Result<Self> {
        PositiveMapSpec::kraus(vec![c])
    }

    /// X viewed in m x m blocks -> inner(sum of all blocks); the m-fold
    /// generalization of `lift_sum`, realized through the stacked-identity
    /// Kraus weight (I; ...; I).
    pub fn block_sum(inner: PositiveMapSpec, copies: usize) -> Result<Self> {
        let n = inner.input_dim;
        let stacked = CMatrix::from_fn(copies * n, n, |i, j| {
            if i % n == j { c64(1.0, 0.0) } else { c64(0.0, 0.0) }
        });
        PositiveMapSpec::compose(inner, PositiveMapSpec::kraus(vec![stacked])?)
    }

    /// Apply the map to a square matrix of the domain dimension.
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.nrows() != self.input_dim || x.ncols() != self.input_dim {
            return Err(Error::DimensionMismatch { expected: self.input_dim, found: x.nrows() });
        }
        check_finite(x)?;
        Ok(match &self.kind {
            MapKind::Kraus { weights } => {
                let mut acc = CMatrix::zeros(self.output_dim, self.output_dim);
                for w in weights {
                    acc += w.adjoint() * x * w;
                }
                acc
            }
            MapKind::Schur { multiplier } | MapKind::SchurRaw { multiplier } => {
                schur_product(multiplier, x)
            }
            MapKind::Pinching { blocks } => {
                let mut out = CMatrix::zeros(self.input_dim, self.input_dim);
                for b in blocks {
                    for &i in b {
                        for &j in b {
                            out[(i, j)] = x[(i, j)];
                        }
                    }
                }
                out
            }
            MapKind::LiftSum { inner } => {
                let n = inner.input_dim;
                let mut s = CMatrix::zeros(n, n);
                for bi in 0..2 {
                    for bj in 0..2 {
                        s += x.view((bi * n, bj * n), (n, n)).clone_owned();
                    }
                }
                inner.apply(&s)?
            }
            MapKind::LiftCorner { inner } => {
                let n = inner.input_dim;
                inner.apply(&x.view((0, 0), (n, n)).clone_owned())?
            }
            MapKind::Compose { outer, inner } => outer.apply(&inner.apply(x)?)?,
        })
    }

    /// Image of the identity, certified PSD. A failure here signals a map
    /// specification that is not positive.
    pub fn unit_image(&self, tol: Tolerance) -> Result<PsdMatrix> {
        let img = self.apply(&CMatrix::identity(self.input_dim, self.input_dim))?;
        PsdMatrix::from_matrix(&hermitian_part(&img), tol)
    }

    /// Sampled positivity check on seeded PSD inputs G*G. Returns the pass
    /// verdict together with the worst normalized margin
    /// `lambda_min(image) / max(1, ||image||)` seen over the trials.
    pub fn positivity_sample_test(
        &self,
        trials: usize,
        seed: u64,
        tol: Tolerance,
    ) -> Result<(bool, f64)> {
        if trials == 0 {
            return Err(Error::ConfigInvalid("positivity sampling needs at least one trial".into()));
        }
        let mut worst = f64::INFINITY;
        for t in 0..trials {
            let s = ensemble::splitmix64(seed ^ (t as u64));
            let x = ensemble::psd_gram(self.input_dim, s);
            let y = self.apply(&x)?;
            let vals = hermitian_eigenvalues_desc(&y);
            let lo = vals.last().copied().unwrap_or(0.0);
            let margin = lo / op_norm(&y).max(1.0);
            worst = worst.min(margin);
        }
        Ok((worst >= -tol.rel, worst))
    }
}

/// Entrywise (Schur/Hadamard) product.
pub fn schur_product(a: &CMatrix, b: &CMatrix) -> CMatrix {
    CMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * b[(i, j)])
}

/// Trace norm (sum of singular values) of a small dense matrix.
fn trace_norm(m: &CMatrix) -> f64 {
    m.singular_values().iter().sum()
}

/// First `n_blocks` blocks of the two direct sums in the trace-class
/// divergence counterexample. Returns the trace norms of the truncations of
/// S o |A| (blocks diag(1/n^2, 0)) and S o A (blocks with 1/n in the corner),
/// each computed from the constructed block matrices rather than the closed
/// forms.
pub fn schur_block_counterexample(n_blocks: usize) -> Result<(f64, f64)> {
    if n_blocks == 0 {
        return Err(Error::InvalidDims("counterexample needs at least one block".into()));
    }
    let mut abs_sum = 0.0;
    let mut raw_sum = 0.0;
    for n in 1..=n_blocks {
        let nf = n as f64;
        let block_abs = CMatrix::from_row_slice(2, 2, &[
            c64(1.0 / (nf * nf), 0.0), c64(0.0, 0.0),
            c64(0.0, 0.0), c64(0.0, 0.0),
        ]);
        let block_raw = CMatrix::from_row_slice(2, 2, &[
            c64(0.0, 0.0), c64(0.0, 0.0),
            c64(1.0 / nf, 0.0), c64(0.0, 0.0),
        ]);
        // direct sums have blockwise-additive trace norms
        abs_sum += trace_norm(&block_abs);
        raw_sum += trace_norm(&block_raw);
    }
    Ok((abs_sum, raw_sum))
}

/// Dense assembly of the first `n_blocks` blocks of either direct sum;
/// exercised by tests to confirm the blockwise trace-norm identity.
pub fn schur_block_truncation(n_blocks: usize, absolute: bool) -> CMatrix {
    let dim = 2 * n_blocks;
    let mut m = CMatrix::zeros(dim, dim);
    for n in 1..=n_blocks {
        let nf = n as f64;
        let o = 2 * (n - 1);
        if absolute {
            m[(o, o)] = c64(1.0 / (nf * nf), 0.0);
        } else {
            m[(o + 1, o)] = c64(1.0 / nf, 0.0);
        }
    }
    m
}
