//! Seeded random matrix and map ensembles. Identical (kind, dims, seed)
//! triples yield bit-identical output: every generator owns a ChaCha stream
//! derived only from its arguments.

use nalgebra::QR;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{c64, hermitian_part, CMatrix};
use crate::posmaps::PositiveMapSpec;

/// SplitMix64 step, used to derive independent sub-seeds.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

fn std_normal(r: &mut ChaCha12Rng) -> f64 {
    r.sample(StandardNormal)
}

/// Matrix of i.i.d. standard complex Gaussian entries (re + i im)/sqrt(2).
pub fn ginibre(rows: usize, cols: usize, seed: u64) -> CMatrix {
    let mut r = rng(seed);
    let s = 1.0 / 2f64.sqrt();
    CMatrix::from_fn(rows, cols, |_, _| c64(std_normal(&mut r) * s, std_normal(&mut r) * s))
}

/// Random PSD matrix G*G from a Ginibre factor.
pub fn psd_gram(n: usize, seed: u64) -> CMatrix {
    let g = ginibre(n, n, seed);
    hermitian_part(&(g.adjoint() * &g))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of the
/// R diagonal absorbed into Q.
pub fn haar_unitary(n: usize, seed: u64) -> CMatrix {
    let g = ginibre(n, n, seed);
    let qr = QR::new(g);
    let q = qr.q();
    let r = qr.r();
    let mut u = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / c64(d.norm(), 0.0) } else { c64(1.0, 0.0) };
        let mut col = u.column_mut(j);
        for v in col.iter_mut() {
            *v *= phase;
        }
    }
    u
}

/// Random normal matrix U diag(z) U* with complex Gaussian eigenvalues.
pub fn normal_matrix(n: usize, seed: u64) -> CMatrix {
    let u = haar_unitary(n, splitmix64(seed ^ 0x6e6f726d));
    let mut r = rng(splitmix64(seed ^ 0x65696773));
    let d = CMatrix::from_fn(n, n, |i, j| {
        if i == j { c64(std_normal(&mut r), std_normal(&mut r)) } else { c64(0.0, 0.0) }
    });
    &u * d * u.adjoint()
}

/// Ginibre matrix rescaled so its largest singular value equals `sigma_max`.
pub fn contraction(n: usize, sigma_max: f64, seed: u64) -> CMatrix {
    let g = ginibre(n, n, seed);
    let top = crate::linalg::op_norm(&g);
    if top == 0.0 {
        return g;
    }
    g.scale(sigma_max / top)
}

/// Kraus map with 1 to 4 Ginibre weights of shape n_in x n_out.
pub fn kraus_map(n_in: usize, n_out: usize, seed: u64) -> Result<PositiveMapSpec> {
    let mut r = rng(splitmix64(seed ^ 0x6b726175));
    let count = r.random_range(1..=4usize);
    let weights = (0..count)
        .map(|k| ginibre(n_in, n_out, splitmix64(seed ^ (0x77 + k as u64))))
        .collect();
    PositiveMapSpec::kraus(weights)
}

/// Schur-multiplier map with multiplier G*G scaled to unit diagonal maximum.
pub fn schur_map(n: usize, seed: u64) -> Result<PositiveMapSpec> {
    let mut s = psd_gram(n, splitmix64(seed ^ 0x73636875));
    let dmax = (0..n).map(|i| s[(i, i)].re).fold(f64::MIN, f64::max);
    if dmax > 0.0 {
        s = s.scale(1.0 / dmax);
    }
    PositiveMapSpec::schur(&s, crate::Tolerance::default())
}

/// Pinching onto a random partition of the index set.
pub fn pinching_map(n: usize, seed: u64) -> Result<PositiveMapSpec> {
    let mut r = rng(splitmix64(seed ^ 0x70696e63));
    let mut idx: Vec<usize> = (0..n).collect();
    // Fisher-Yates with the owned stream keeps the draw reproducible
    for i in (1..n).rev() {
        let j = r.random_range(0..=i);
        idx.swap(i, j);
    }
    let nblocks = r.random_range(1..=n);
    let mut cuts: Vec<usize> = Vec::new();
    while cuts.len() < nblocks - 1 {
        let c = r.random_range(1..n);
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.sort_unstable();
    cuts.push(n);
    let mut blocks = Vec::new();
    let mut prev = 0;
    for c in cuts {
        blocks.push(idx[prev..c].to_vec());
        prev = c;
    }
    PositiveMapSpec::pinching(blocks, n)
}

/// The ensemble kinds drawn by the verification suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleKind {
    Ginibre,
    Psd,
    Unitary,
    Normal,
    Contraction,
    KrausMap,
    SchurMap,
    PinchingMap,
}

/// Matrix-valued ensembles. Map-valued kinds live behind `rand_map_ensemble`.
pub fn rand_matrix_ensemble(kind: EnsembleKind, n: usize, seed: u64) -> Result<CMatrix> {
    if n == 0 {
        return Err(Error::InvalidDims("ensemble dimension must be positive".into()));
    }
    Ok(match kind {
        EnsembleKind::Ginibre => ginibre(n, n, seed),
        EnsembleKind::Psd => psd_gram(n, seed),
        EnsembleKind::Unitary => haar_unitary(n, seed),
        EnsembleKind::Normal => normal_matrix(n, seed),
        EnsembleKind::Contraction => contraction(n, 0.9, seed),
        _ => return Err(Error::InvalidDims(format!("{kind:?} is map-valued"))),
    })
}

/// Map-valued ensembles.
pub fn rand_map_ensemble(
    kind: EnsembleKind,
    n_in: usize,
    n_out: usize,
    seed: u64,
) -> Result<PositiveMapSpec> {
    if n_in == 0 || n_out == 0 {
        return Err(Error::InvalidDims("ensemble dimensions must be positive".into()));
    }
    match kind {
        EnsembleKind::KrausMap => kraus_map(n_in, n_out, seed),
        EnsembleKind::SchurMap => {
            if n_in != n_out {
                return Err(Error::InvalidDims("Schur maps need square dims".into()));
            }
            schur_map(n_in, seed)
        }
        EnsembleKind::PinchingMap => {
            if n_in != n_out {
                return Err(Error::InvalidDims("pinchings need square dims".into()));
            }
            pinching_map(n_in, seed)
        }
        _ => Err(Error::InvalidDims(format!("{kind:?} is matrix-valued"))),
    }
}
