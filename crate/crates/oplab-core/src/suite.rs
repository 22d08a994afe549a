//! Seeded per-theorem verification suites: ensemble generation, trial
//! execution, deterministic parallel aggregation, and line-delimited report
//! emission.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;

use crate::certify::{
    certify_cartesian, certify_contraction, certify_hermitian_parts, certify_normal_beta,
    certify_normal_geo, certify_schur_product, certify_sum_normals, check_eig_schur, nu_bound,
    ContractionForm, InequalityCertificate, Sign, SplitForm, TheoremId,
};
use crate::ensemble::{self, splitmix64, EnsembleKind};
use crate::error::{Error, Result};
use crate::linalg::{op_norm, CMatrix, PsdMatrix, Tolerance};
use crate::posmaps::PositiveMapSpec;
use crate::spectral::mu_doubling_check;

/// Configuration of one suite run.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub master_seed: u64,
    pub trials: usize,
    pub dim_range: (usize, usize),
    pub beta_grid: Vec<f64>,
    pub tolerance: Tolerance,
    pub theorems: Vec<TheoremId>,
}

impl SuiteConfig {
    pub fn default_beta_grid() -> Vec<f64> {
        vec![0.25, 0.5, 1.0, 2.0, 4.0]
    }

    pub fn new(master_seed: u64, trials: usize, dim_range: (usize, usize)) -> Self {
        SuiteConfig {
            master_seed,
            trials,
            dim_range,
            beta_grid: Self::default_beta_grid(),
            tolerance: Tolerance::default(),
            theorems: TheoremId::ALL.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::ConfigInvalid("trials must be at least 1".into()));
        }
        let (lo, hi) = self.dim_range;
        if lo < 2 || hi < lo {
            return Err(Error::ConfigInvalid(format!(
                "dim range ({lo}, {hi}) must satisfy 2 <= min <= max"
            )));
        }
        if self.theorems.contains(&TheoremId::EigSchur) && lo < 3 {
            return Err(Error::ConfigInvalid(
                "EigSchur needs dim_range.min >= 3".into(),
            ));
        }
        if self.theorems.is_empty() {
            return Err(Error::ConfigInvalid("select at least one theorem".into()));
        }
        if self.beta_grid.iter().any(|b| !(*b > 0.0)) {
            return Err(Error::ConfigInvalid("beta grid entries must be positive".into()));
        }
        Ok(())
    }
}

/// Outcome of a single trial: the normalized margin that was compared
/// against the acceptance floor, plus every certificate the trial produced.
#[derive(Debug, Clone)]
pub struct TrialResult {
    pub seed: u64,
    pub margin: f64,
    pub accepted: bool,
    pub certificates: Vec<InequalityCertificate>,
}

/// Per-theorem aggregation.
#[derive(Debug, Clone)]
pub struct TheoremStats {
    pub theorem: TheoremId,
    pub trials: usize,
    pub accepted: usize,
    pub min_margin: f64,
    pub argmin_seed: u64,
    pub failure_seeds: Vec<u64>,
}

/// Environment stamp for reproducibility records.
#[derive(Debug, Clone)]
pub struct EnvironmentStamp {
    pub f64_epsilon: f64,
    pub version: String,
}

impl Default for EnvironmentStamp {
    fn default() -> Self {
        EnvironmentStamp {
            f64_epsilon: f64::EPSILON,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub rows: Vec<TheoremStats>,
    pub environment: EnvironmentStamp,
    pub elapsed_seconds: f64,
    pub all_accepted: bool,
}

fn theorem_salt(theorem: TheoremId) -> u64 {
    let idx = TheoremId::ALL.iter().position(|t| *t == theorem).unwrap_or(0) as u64;
    splitmix64(0x7468656f72656d ^ (idx.wrapping_mul(0x100000001b3)))
}

/// The reproducing seed of trial `index` for `theorem` under `master_seed`.
pub fn trial_seed(master_seed: u64, theorem: TheoremId, index: usize) -> u64 {
    master_seed ^ splitmix64((index as u64).wrapping_add(theorem_salt(theorem)))
}

fn sub_seed(seed: u64, tag: u64) -> u64 {
    splitmix64(seed ^ tag)
}

/// Draw a map with the requested square/any output shape. Kinds rotate
/// through Kraus, Schur and pinching based on the seed stream.
fn draw_map(seed: u64, dim_in: usize, max_out: usize, square_output: bool) -> Result<PositiveMapSpec> {
    let pick = sub_seed(seed, 0x6d6170) % 3;
    match pick {
        0 => {
            let n_out = if square_output {
                dim_in
            } else {
                1 + (sub_seed(seed, 0x6f7574) % max_out as u64) as usize
            };
            ensemble::rand_map_ensemble(EnsembleKind::KrausMap, dim_in, n_out, sub_seed(seed, 1))
        }
        1 => ensemble::rand_map_ensemble(EnsembleKind::SchurMap, dim_in, dim_in, sub_seed(seed, 2)),
        _ => {
            ensemble::rand_map_ensemble(EnsembleKind::PinchingMap, dim_in, dim_in, sub_seed(seed, 3))
        }
    }
}

fn draw_dim(seed: u64, range: (usize, usize)) -> usize {
    let (lo, hi) = range;
    lo + (sub_seed(seed, 0x64696d) % (hi - lo + 1) as u64) as usize
}

/// The (map, normal operand) pair a normal-operand trial draws from its
/// reproducing seed; exposed so external harnesses can rebuild trial inputs.
pub fn draw_normal_trial_inputs(
    seed: u64,
    dim_range: (usize, usize),
) -> Result<(PositiveMapSpec, CMatrix)> {
    let n_dim = draw_dim(seed, dim_range);
    let phi = draw_map(seed, n_dim, dim_range.1, false)?;
    let n = ensemble::normal_matrix(n_dim, sub_seed(seed, 0x6e));
    Ok((phi, n))
}

/// Execute one trial of `theorem` from its reproducing seed. Identical
/// (theorem, dims, grid, seed) inputs give bit-identical results, which is
/// what makes failure seeds replayable.
pub fn run_trial_seeded(
    theorem: TheoremId,
    dim_range: (usize, usize),
    beta_grid: &[f64],
    tol: Tolerance,
    seed: u64,
) -> Result<TrialResult> {
    let mut certs: Vec<InequalityCertificate> = Vec::new();
    let mut margin = f64::INFINITY;
    let mut accepted = true;

    let mut push = |c: InequalityCertificate, margin: &mut f64, accepted: &mut bool| {
        *margin = margin.min(c.normalized_margin());
        *accepted = *accepted && c.accepted;
        certs.push(c);
    };

    match theorem {
        TheoremId::ThmBH => {
            let n_dim = draw_dim(seed, dim_range);
            let phi = draw_map(seed, n_dim, dim_range.1, false)?;
            let n = ensemble::normal_matrix(n_dim, sub_seed(seed, 0x6e));
            push(certify_normal_geo(&phi, &n, tol)?, &mut margin, &mut accepted);
        }
        TheoremId::BetaFamily => {
            let n_dim = draw_dim(seed, dim_range);
            let phi = draw_map(seed, n_dim, dim_range.1, false)?;
            let n = ensemble::normal_matrix(n_dim, sub_seed(seed, 0x6e));
            for &beta in beta_grid {
                push(certify_normal_beta(&phi, &n, beta, tol)?, &mut margin, &mut accepted);
            }
        }
        TheoremId::CorCons2Plus | TheoremId::CorCons2Minus => {
            let n_dim = draw_dim(seed, dim_range);
            let phi = draw_map(seed, n_dim, dim_range.1, false)?;
            let x = ensemble::ginibre(n_dim, n_dim, sub_seed(seed, 0x78));
            let sign = if theorem == TheoremId::CorCons2Plus { Sign::Plus } else { Sign::Minus };
            for form in [SplitForm::Mean, SplitForm::Quarter] {
                push(
                    certify_hermitian_parts(&phi, &x, sign, form, tol)?,
                    &mut margin,
                    &mut accepted,
                );
            }
        }
        TheoremId::CorRD1 | TheoremId::RussoDyeNorm => {
            let n_dim = draw_dim(seed, dim_range);
            let phi = draw_map(seed, n_dim, dim_range.1, false)?;
            let z = ensemble::contraction(n_dim, 0.9, sub_seed(seed, 0x7a));
            let form = if theorem == TheoremId::CorRD1 {
                ContractionForm::Geo
            } else {
                ContractionForm::Arithmetic
            };
            push(certify_contraction(&phi, &z, form, tol)?, &mut margin, &mut accepted);
            // classical scalar comparison rides along
            let unit = phi.unit_image(tol)?;
            let phi_z = phi.apply(&z)?;
            if op_norm(&phi_z) > unit.max_eigenvalue() + 1e-8 {
                accepted = false;
            }
        }
        TheoremId::ThmSemi => {
            let n_dim = draw_dim(seed, dim_range);
            let phi = draw_map(seed, n_dim, dim_range.1, false)?;
            let m = 1 + (sub_seed(seed, 0x6d31) % 4) as usize;
            let terms: Vec<CMatrix> = (0..m)
                .map(|k| ensemble::normal_matrix(n_dim, sub_seed(seed, 0x5330 + k as u64)))
                .collect();
            let out = certify_sum_normals(&phi, &terms, tol)?;
            if out.y_sigma_max > 1.0 + 1e-8 {
                accepted = false;
            }
            push(out.certificate, &mut margin, &mut accepted);
        }
        TheoremId::CorGeo1 => {
            let n_dim = draw_dim(seed, dim_range);
            let phi = draw_map(seed, n_dim, dim_range.1, false)?;
            let z = ensemble::ginibre(n_dim, n_dim, sub_seed(seed, 0x7a32));
            push(certify_cartesian(&phi, &z, tol)?, &mut margin, &mut accepted);
        }
        TheoremId::SchurProduct => {
            let n_dim = draw_dim(seed, dim_range);
            let a = ensemble::normal_matrix(n_dim, sub_seed(seed, 0x61));
            let b = ensemble::normal_matrix(n_dim, sub_seed(seed, 0x62));
            push(certify_schur_product(&a, &b, tol)?, &mut margin, &mut accepted);
        }
        TheoremId::EigSchur => {
            let lo = dim_range.0.max(3);
            let n_dim = draw_dim(seed, (lo, dim_range.1.max(lo)));
            let s = PsdMatrix::from_matrix(&ensemble::psd_gram(n_dim, sub_seed(seed, 0x73)), tol)?;
            let z = ensemble::contraction(n_dim, 0.9, sub_seed(seed, 0x7a));
            let out = check_eig_schur(&s, &z, tol)?;
            margin = (out.rhs - out.lhs) / s.max_eigenvalue().max(1.0);
            accepted = out.pass;
        }
        TheoremId::NuBound => {
            let n_dim = draw_dim(seed, dim_range);
            let mut draw = sub_seed(seed, 0x41);
            let a = loop {
                let cand = ensemble::ginibre(n_dim, n_dim, draw);
                let sv = cand.singular_values();
                if sv.min() > 1e-3 * sv.max() {
                    break cand;
                }
                draw = splitmix64(draw);
            };
            let out = nu_bound(&a, tol)?;
            if !out.square_accepted {
                accepted = false;
            }
            margin = margin.min(out.square_margin / (1.0 + out.nu * out.nu));
            push(out.certificate, &mut margin, &mut accepted);
        }
        TheoremId::MuDoubling => {
            let n_dim = draw_dim(seed, dim_range);
            let phi = draw_map(seed, n_dim, dim_range.1, true)?;
            let z = ensemble::contraction(n_dim, 0.9, sub_seed(seed, 0x7a33));
            let grid: Vec<f64> = (0..16).map(|j| (2 * j + 1) as f64 / 64.0).collect();
            let out = mu_doubling_check(&phi, &z, &grid, tol)?;
            margin = out.worst_gap;
            accepted = out.pass;
        }
    }
    Ok(TrialResult { seed, margin, accepted, certificates: certs })
}

fn aggregate(theorem: TheoremId, results: &[TrialResult]) -> TheoremStats {
    let mut stats = TheoremStats {
        theorem,
        trials: results.len(),
        accepted: 0,
        min_margin: f64::INFINITY,
        argmin_seed: 0,
        failure_seeds: Vec::new(),
    };
    for r in results {
        if r.accepted {
            stats.accepted += 1;
        } else {
            stats.failure_seeds.push(r.seed);
        }
        if r.margin < stats.min_margin {
            stats.min_margin = r.margin;
            stats.argmin_seed = r.seed;
        }
    }
    stats
}

fn run_theorem(config: &SuiteConfig, theorem: TheoremId, parallel: bool) -> Result<TheoremStats> {
    let run_one = |i: usize| -> Result<TrialResult> {
        let seed = trial_seed(config.master_seed, theorem, i);
        run_trial_seeded(theorem, config.dim_range, &config.beta_grid, config.tolerance, seed)
    };
    let results: Result<Vec<TrialResult>> = if parallel {
        (0..config.trials).into_par_iter().map(run_one).collect()
    } else {
        (0..config.trials).map(run_one).collect()
    };
    Ok(aggregate(theorem, &results?))
}

/// Run every selected theorem. Trials are independent and executed in
/// parallel; per-trial seeds depend only on (master_seed, theorem, index),
/// so the report is identical to a sequential run.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    run_suite_inner(config, true)
}

/// Sequential twin of `run_suite`, kept callable so determinism across
/// execution modes stays testable.
pub fn run_suite_sequential(config: &SuiteConfig) -> Result<SuiteReport> {
    run_suite_inner(config, false)
}

fn run_suite_inner(config: &SuiteConfig, parallel: bool) -> Result<SuiteReport> {
    config.validate()?;
    let start = Instant::now();
    let mut rows = Vec::with_capacity(config.theorems.len());
    for &theorem in &config.theorems {
        rows.push(run_theorem(config, theorem, parallel)?);
    }
    let all_accepted = rows.iter().all(|r| r.accepted == r.trials);
    Ok(SuiteReport {
        rows,
        environment: EnvironmentStamp::default(),
        elapsed_seconds: start.elapsed().as_secs_f64(),
        all_accepted,
    })
}

fn sci17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Line-delimited report: one JSON record per line; only the trailing
/// summary line carries the elapsed time.
pub fn report_to_ndjson(config: &SuiteConfig, report: &SuiteReport) -> String {
    let mut out = String::new();
    let theorems: Vec<String> =
        config.theorems.iter().map(|t| format!("\"{}\"", t.as_str())).collect();
    let betas: Vec<String> = config.beta_grid.iter().map(|b| sci17(*b)).collect();
    writeln!(
        out,
        "{{\"record\": \"config\", \"master_seed\": {}, \"trials\": {}, \"dim_range\": [{}, {}], \"beta_grid\": [{}], \"theorems\": [{}]}}",
        config.master_seed,
        config.trials,
        config.dim_range.0,
        config.dim_range.1,
        betas.join(", "),
        theorems.join(", ")
    )
    .unwrap();
    writeln!(
        out,
        "{{\"record\": \"environment\", \"f64_epsilon\": {}, \"version\": \"{}\"}}",
        sci17(report.environment.f64_epsilon),
        report.environment.version
    )
    .unwrap();
    for row in &report.rows {
        let failures: Vec<String> = row.failure_seeds.iter().map(|s| s.to_string()).collect();
        writeln!(
            out,
            "{{\"record\": \"theorem\", \"theorem\": \"{}\", \"trials\": {}, \"accepted\": {}, \"min_margin\": {}, \"argmin_seed\": {}, \"failure_seeds\": [{}]}}",
            row.theorem.as_str(),
            row.trials,
            row.accepted,
            sci17(row.min_margin),
            row.argmin_seed,
            failures.join(", ")
        )
        .unwrap();
    }
    writeln!(
        out,
        "{{\"record\": \"summary\", \"all_accepted\": {}, \"elapsed_seconds\": {}}}",
        report.all_accepted,
        sci17(report.elapsed_seconds)
    )
    .unwrap();
    out
}

/// Logarithmic N schedule (1, 2, 5 ladder) for the divergence experiment,
/// always ending at `n_blocks`.
pub fn log_schedule(n_blocks: usize) -> Vec<usize> {
    let mut points = Vec::new();
    let mut base = 1usize;
    'outer: loop {
        for mult in [1usize, 2, 5] {
            let p = base.saturating_mul(mult);
            if p >= n_blocks {
                break 'outer;
            }
            points.push(p);
        }
        base = base.saturating_mul(10);
        if base == 0 {
            break;
        }
    }
    points.push(n_blocks);
    points
}

/// Rows (N, sum 1/n^2, sum 1/n, ratio) of the divergence experiment along
/// the logarithmic schedule.
pub fn schur_divergence_table(n_blocks: usize) -> Result<Vec<(usize, f64, f64, f64)>> {
    let mut rows = Vec::new();
    for n in log_schedule(n_blocks) {
        let (abs_sum, raw_sum) = crate::posmaps::schur_block_counterexample(n)?;
        rows.push((n, abs_sum, raw_sum, raw_sum / abs_sum));
    }
    Ok(rows)
}

/// CSV projection of the divergence table.
pub fn divergence_table_csv(rows: &[(usize, f64, f64, f64)]) -> String {
    let mut out = String::from("blocks,trace_norm_abs,trace_norm_raw_lower,ratio\n");
    for (n, a, r, q) in rows {
        writeln!(out, "{},{},{},{}", n, sci17(*a), sci17(*r), sci17(*q)).unwrap();
    }
    out
}
