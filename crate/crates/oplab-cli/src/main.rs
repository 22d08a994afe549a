//! Command-line front end: seeded verification suites, single-certificate
//! runs, the trace-class divergence experiment, and spectral dominance
//! checks on matrix files.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use oplab_core::certify::{
    self, ContractionForm, InequalityCertificate, Sign, SplitForm, TheoremId,
};
use oplab_core::error::Error;
use oplab_core::io as fmt_io;
use oplab_core::linalg::{PsdMatrix, Tolerance};
use oplab_core::spectral::{self, TraceMode};
use oplab_core::suite::{self, SuiteConfig};

#[derive(Parser)]
#[command(name = "oplab", about = "Operator-inequality laboratory", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded per-theorem verification suites from a config file.
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Produce one certificate from an input file or a replayed trial seed.
    Certify {
        /// Theorem tag, e.g. thm-bh, beta-family, cor-rd1, schur-product.
        #[arg(long)]
        theorem: String,
        /// Input document with the map and operand(s).
        #[arg(long)]
        input: Option<PathBuf>,
        /// Beta for the beta-family bound.
        #[arg(long)]
        beta: Option<f64>,
        /// Bound form where a theorem has several: geo, arith, mean, quarter.
        #[arg(long)]
        form: Option<String>,
        /// Write the certificate document here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replay a suite trial from its reproducing seed instead of a file.
        #[arg(long)]
        from_seed: Option<u64>,
        /// Dim range for seed replay, as min,max.
        #[arg(long, value_delimiter = ',')]
        dim_range: Option<Vec<usize>>,
    },
    /// Long-running numerical experiments.
    Experiment {
        #[command(subcommand)]
        which: ExperimentCmd,
    },
    /// Spectral-scale utilities.
    Spectral {
        #[command(subcommand)]
        which: SpectralCmd,
    },
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Trace norms of the two direct-sum truncations whose ratio diverges.
    SchurDivergence {
        #[arg(long)]
        blocks: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum SpectralCmd {
    /// Check lambda_t(A) <= lambda_t(B) for all t and print the certificate.
    Dominance {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value = "normalized")]
        mode: String,
    },
}

fn env_tolerance() -> Result<Tolerance, Error> {
    let mut tol = Tolerance::default();
    if let Ok(v) = std::env::var("OPLAB_TOL_REL") {
        tol.rel = v
            .parse()
            .map_err(|_| Error::ConfigInvalid(format!("OPLAB_TOL_REL={v} is not a number")))?;
    }
    if let Ok(v) = std::env::var("OPLAB_TOL_ABS") {
        tol.abs = v
            .parse()
            .map_err(|_| Error::ConfigInvalid(format!("OPLAB_TOL_ABS={v} is not a number")))?;
    }
    Tolerance::new(tol.rel, tol.abs)
}

fn read_text(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(Error::Io)
}

fn parse_suite_config(text: &str, tol: Tolerance) -> Result<SuiteConfig, Error> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let master_seed = v
        .get("master_seed")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("config needs integer \"master_seed\"".into()))?;
    let trials = v
        .get("trials")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("config needs integer \"trials\"".into()))?
        as usize;
    let range = v
        .get("dim_range")
        .and_then(Value::as_array)
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::Parse("config needs \"dim_range\": [min, max]".into()))?;
    let lo = range[0].as_u64().ok_or_else(|| Error::Parse("dim_range entries must be integers".into()))? as usize;
    let hi = range[1].as_u64().ok_or_else(|| Error::Parse("dim_range entries must be integers".into()))? as usize;

    let mut config = SuiteConfig::new(master_seed, trials, (lo, hi));
    config.tolerance = tol;
    if let Some(bg) = v.get("beta_grid") {
        let arr = bg.as_array().ok_or_else(|| Error::Parse("beta_grid must be an array".into()))?;
        config.beta_grid = arr
            .iter()
            .map(|b| b.as_f64().ok_or_else(|| Error::Parse("beta_grid entries must be numbers".into())))
            .collect::<Result<Vec<_>, _>>()?;
    }
    if let Some(tv) = v.get("tolerance") {
        let rel = tv.get("rel").and_then(Value::as_f64).unwrap_or(tol.rel);
        let abs = tv.get("abs").and_then(Value::as_f64).unwrap_or(tol.abs);
        config.tolerance = Tolerance::new(rel, abs)?;
    }
    match v.get("theorems") {
        None => {}
        Some(Value::String(s)) if s == "all" => {}
        Some(Value::Array(list)) => {
            let mut theorems = Vec::new();
            for item in list {
                let tag = item
                    .as_str()
                    .ok_or_else(|| Error::Parse("theorem entries must be strings".into()))?;
                theorems.push(
                    TheoremId::from_str_tag(tag)
                        .ok_or_else(|| Error::Parse(format!("unknown theorem \"{tag}\"")))?,
                );
            }
            config.theorems = theorems;
        }
        Some(other) => {
            return Err(Error::Parse(format!("\"theorems\" must be \"all\" or a list, got {other}")));
        }
    }
    Ok(config)
}

fn cmd_verify(config_path: &Path, tol: Tolerance) -> Result<bool, Error> {
    let text = read_text(config_path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    let config = parse_suite_config(&text, tol)?;
    let report = suite::run_suite(&config)?;
    let ndjson = suite::report_to_ndjson(&config, &report);
    if let Some(path) = v.get("output_path").and_then(Value::as_str) {
        std::fs::write(path, &ndjson)?;
    }
    for row in &report.rows {
        println!(
            "{}: {}/{} accepted, min margin {:.3e} (seed {})",
            row.theorem.as_str(),
            row.accepted,
            row.trials,
            row.min_margin,
            row.argmin_seed
        );
        for seed in &row.failure_seeds {
            println!("  rejected trial seed {seed}");
        }
    }
    println!(
        "suite {} in {:.2}s",
        if report.all_accepted { "accepted" } else { "REJECTED" },
        report.elapsed_seconds
    );
    Ok(report.all_accepted)
}

fn split_form(form: &Option<String>) -> Result<SplitForm, Error> {
    match form.as_deref() {
        None | Some("mean") | Some("arith") => Ok(SplitForm::Mean),
        Some("quarter") => Ok(SplitForm::Quarter),
        Some(other) => Err(Error::Parse(format!("form \"{other}\" not valid here (mean|quarter)"))),
    }
}

fn contraction_form(form: &Option<String>) -> Result<ContractionForm, Error> {
    match form.as_deref() {
        None | Some("geo") => Ok(ContractionForm::Geo),
        Some("arith") => Ok(ContractionForm::Arithmetic),
        Some(other) => Err(Error::Parse(format!("form \"{other}\" not valid here (geo|arith)"))),
    }
}

struct CertifyArgs<'a> {
    theorem: &'a str,
    input: Option<&'a Path>,
    beta: Option<f64>,
    form: &'a Option<String>,
    out: Option<&'a Path>,
    from_seed: Option<u64>,
    dim_range: Option<(usize, usize)>,
}

fn cmd_certify(args: CertifyArgs, tol: Tolerance) -> Result<bool, Error> {
    let theorem = TheoremId::from_str_tag(args.theorem)
        .ok_or_else(|| Error::Parse(format!("unknown theorem \"{}\"", args.theorem)))?;

    if let Some(seed) = args.from_seed {
        let dim_range = args.dim_range.unwrap_or((2, 10));
        let grid = SuiteConfig::default_beta_grid();
        let result = suite::run_trial_seeded(theorem, dim_range, &grid, tol, seed)?;
        println!("margin {:.16e}", result.margin);
        println!("accepted {}", result.accepted);
        if let (Some(path), Some(cert)) = (args.out, result.certificates.first()) {
            std::fs::write(path, fmt_io::certificate_to_json(cert))?;
        }
        return Ok(result.accepted);
    }

    let input_path = args
        .input
        .ok_or_else(|| Error::Parse("certify needs --input FILE or --from-seed N".into()))?;
    let input = fmt_io::certify_input_from_json(&read_text(input_path)?)?;
    let need_map = |input: &fmt_io::CertifyInput| {
        input.map.clone().ok_or_else(|| Error::Parse("input file needs a \"map\"".into()))
    };
    let need_operand = |input: &fmt_io::CertifyInput| {
        input.operand.clone().ok_or_else(|| Error::Parse("input file needs an \"operand\"".into()))
    };

    let cert: InequalityCertificate = match theorem {
        TheoremId::ThmBH => {
            certify::certify_normal_geo(&need_map(&input)?, &need_operand(&input)?, tol)?
        }
        TheoremId::BetaFamily => certify::certify_normal_beta(
            &need_map(&input)?,
            &need_operand(&input)?,
            args.beta.unwrap_or(1.0),
            tol,
        )?,
        TheoremId::CorCons2Plus => certify::certify_hermitian_parts(
            &need_map(&input)?,
            &need_operand(&input)?,
            Sign::Plus,
            split_form(args.form)?,
            tol,
        )?,
        TheoremId::CorCons2Minus => certify::certify_hermitian_parts(
            &need_map(&input)?,
            &need_operand(&input)?,
            Sign::Minus,
            split_form(args.form)?,
            tol,
        )?,
        TheoremId::CorRD1 | TheoremId::RussoDyeNorm => {
            let form = if theorem == TheoremId::RussoDyeNorm {
                ContractionForm::Arithmetic
            } else {
                contraction_form(args.form)?
            };
            certify::certify_contraction(&need_map(&input)?, &need_operand(&input)?, form, tol)?
        }
        TheoremId::ThmSemi => {
            let terms = if input.operands.is_empty() {
                vec![need_operand(&input)?]
            } else {
                input.operands.clone()
            };
            certify::certify_sum_normals(&need_map(&input)?, &terms, tol)?.certificate
        }
        TheoremId::CorGeo1 => {
            certify::certify_cartesian(&need_map(&input)?, &need_operand(&input)?, tol)?
        }
        TheoremId::SchurProduct => {
            let a = need_operand(&input)?;
            let b = input
                .second
                .clone()
                .ok_or_else(|| Error::Parse("schur-product needs \"second\"".into()))?;
            certify::certify_schur_product(&a, &b, tol)?
        }
        TheoremId::EigSchur => {
            let s = PsdMatrix::from_matrix(&need_operand(&input)?, tol)?;
            let z = input
                .second
                .clone()
                .ok_or_else(|| Error::Parse("eig-schur needs \"second\"".into()))?;
            let out = certify::check_eig_schur(&s, &z, tol)?;
            println!("lambda_3 {:.16e}", out.lhs);
            println!("delta_2 {:.16e}", out.rhs);
            println!("margin {:.16e}", out.rhs - out.lhs);
            println!("accepted {}", out.pass);
            if let Some(path) = args.out {
                std::fs::write(
                    path,
                    format!(
                        "{{\"theorem_id\": \"eig-schur\", \"lhs\": {:.16e}, \"rhs\": {:.16e}, \"pass\": {}}}\n",
                        out.lhs, out.rhs, out.pass
                    ),
                )?;
            }
            return Ok(out.pass);
        }
        TheoremId::NuBound => {
            let out = certify::nu_bound(&need_operand(&input)?, tol)?;
            println!("nu {:.16e}", out.nu);
            println!("square_margin {:.16e}", out.square_margin);
            let ok = out.certificate.accepted && out.square_accepted;
            println!("margin {:.16e}", out.certificate.margin);
            println!("accepted {ok}");
            if let Some(path) = args.out {
                std::fs::write(path, fmt_io::certificate_to_json(&out.certificate))?;
            }
            return Ok(ok);
        }
        TheoremId::MuDoubling => {
            let grid: Vec<f64> = (0..16).map(|j| (2 * j + 1) as f64 / 64.0).collect();
            let out =
                spectral::mu_doubling_check(&need_map(&input)?, &need_operand(&input)?, &grid, tol)?;
            println!("margin {:.16e}", out.worst_gap);
            println!("accepted {}", out.pass);
            return Ok(out.pass);
        }
    };

    println!("margin {:.16e}", cert.margin);
    println!("accepted {}", cert.accepted);
    if let Some(path) = args.out {
        std::fs::write(path, fmt_io::certificate_to_json(&cert))?;
    }
    Ok(cert.accepted)
}

fn cmd_schur_divergence(blocks: usize, out: &Path) -> Result<bool, Error> {
    let rows = suite::schur_divergence_table(blocks)?;
    std::fs::write(out, suite::divergence_table_csv(&rows))?;
    let last = rows.last().expect("schedule is never empty");
    println!(
        "N = {}: trace_norm_abs {:.6}, trace_norm_raw_lower {:.6}, ratio {:.4}",
        last.0, last.1, last.2, last.3
    );
    Ok(true)
}

fn cmd_dominance(a_path: &Path, b_path: &Path, mode: &str, tol: Tolerance) -> Result<bool, Error> {
    let a = fmt_io::matrix_from_json(&read_text(a_path)?)?;
    let b = fmt_io::matrix_from_json(&read_text(b_path)?)?;
    let mode = match mode {
        "normalized" => TraceMode::Normalized,
        "unnormalized" => TraceMode::Unnormalized,
        other => return Err(Error::Parse(format!("unknown trace mode \"{other}\""))),
    };
    let out = spectral::dominance_check(&a, &b, mode, tol)?;
    if out.dominated {
        println!("dominated true");
        println!("certificate_margin {:.16e}", out.certificate_margin.unwrap_or(0.0));
    } else {
        let (t, la, lb) = out.violation.expect("non-dominated outcome carries a witness");
        println!("dominated false");
        println!("witness t {:.6} lambda_a {:.16e} lambda_b {:.16e}", t, la, lb);
    }
    Ok(out.dominated)
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_)
        | Error::Io(_)
        | Error::ConfigInvalid(_)
        | Error::InvalidDims(_)
        | Error::InvalidMap(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = match env_tolerance() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = match &cli.command {
        Command::Verify { config } => cmd_verify(config, tol),
        Command::Certify { theorem, input, beta, form, out, from_seed, dim_range } => {
            let range = match dim_range {
                Some(v) if v.len() == 2 => Some((v[0], v[1])),
                Some(_) => {
                    eprintln!("error: --dim-range takes exactly min,max");
                    return ExitCode::from(2);
                }
                None => None,
            };
            cmd_certify(
                CertifyArgs {
                    theorem,
                    input: input.as_deref(),
                    beta: *beta,
                    form,
                    out: out.as_deref(),
                    from_seed: *from_seed,
                    dim_range: range,
                },
                tol,
            )
        }
        Command::Experiment { which } => match which {
            ExperimentCmd::SchurDivergence { blocks, out } => cmd_schur_divergence(*blocks, out),
        },
        Command::Spectral { which } => match which {
            SpectralCmd::Dominance { a, b, mode } => cmd_dominance(a, b, mode, tol),
        },
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}
