//! Command-line front end: seeded instance generation, family evaluation on
//! lambda-grids, verification suites, integral-representation extraction, and
//! boundary limits. All commands are deterministic for a fixed seed and
//! configuration.

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use stieltjes_core::families::{
    form_domain_constancy, kernel_check, resolvent_limits, rs_function_for_construction,
    sector_check, transform_equivalences, FamilyHandle, FamilyKind, StieltjesConstruction,
};
use stieltjes_core::grid::{default_lambda_grid, disk_grid, parse_grid};
use stieltjes_core::integral::{
    evaluate_rep, inverse_stieltjes_rep, moment_sums, stieltjes_rep,
};
use stieltjes_core::json;
use stieltjes_core::numerics::{op_norm, CMatrix};
use stieltjes_core::rs::{rs_membership, RsFunction};
use stieltjes_core::{seeded, Error};

const EXIT_PASS: i32 = 0;
const EXIT_VIOLATION: i32 = 1;
const EXIT_INPUT: i32 = 2;
const EXIT_NUMERICAL: i32 = 3;

/// Exit code for a library error: malformed input vs violated property vs
/// numerical breakdown.
fn exit_for(err: &Error) -> i32 {
    match err {
        Error::Parse(_)
        | Error::DimensionMismatch(_)
        | Error::ShapeMismatch(_)
        | Error::GridDegenerate(_)
        | Error::BadPoint(_)
        | Error::EmptyDomain => EXIT_INPUT,
        Error::MembershipViolated(_)
        | Error::SignViolation(_)
        | Error::BoundViolated(_)
        | Error::NotSectorial(_)
        | Error::HypothesisViolated(_)
        | Error::NotContraction(_)
        | Error::NotNonnegativeSelfadjoint
        | Error::NotHermitian(_)
        | Error::NotPsd(_) => EXIT_VIOLATION,
        _ => EXIT_NUMERICAL,
    }
}

#[derive(Parser)]
#[command(
    name = "stieltjes",
    about = "Generate, evaluate, and verify Stieltjes / inverse Stieltjes family instances"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Rs,
    Sector,
    Kernel,
    Equiv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Stieltjes,
    InverseStieltjes,
}

impl From<Kind> for FamilyKind {
    fn from(k: Kind) -> FamilyKind {
        match k {
            Kind::Stieltjes => FamilyKind::Stieltjes,
            Kind::InverseStieltjes => FamilyKind::InverseStieltjes,
        }
    }
}

#[derive(clap::Args)]
struct InstanceArgs {
    /// Family instance JSON; omitted means a seeded construction instance.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    dim_m: usize,
    #[arg(long, default_value_t = 3)]
    dim_k: usize,
    #[arg(long, value_enum, default_value_t = Kind::Stieltjes)]
    kind: Kind,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a seeded passive selfadjoint system and construction as JSON.
    Gen {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        dim_m: usize,
        #[arg(long, default_value_t = 3)]
        dim_k: usize,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Evaluate a family instance over a lambda-grid.
    Eval {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value = "default")]
        grid: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite; exit 0 iff no violation beyond the tolerance.
    Check {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value = "default")]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extract the integral representation of a construction instance.
    Rep {
        /// Construction JSON; omitted means a seeded instance.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        dim_m: usize,
        #[arg(long, default_value_t = 3)]
        dim_k: usize,
        #[arg(long, value_enum, default_value_t = Kind::Stieltjes)]
        kind: Kind,
        /// Representation output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Boundary limits of the family at 0- and -infinity as relations.
    Limits {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every verification suite on a seeded instance.
    VerifyAll {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        dim_m: usize,
        #[arg(long, default_value_t = 3)]
        dim_k: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn seeded_construction(seed: u64, dim_m: usize, dim_k: usize) -> StieltjesConstruction {
    // Nontrivial multivalued parts with probability 0.3 to exercise the
    // relation code paths.
    seeded::random_construction(&mut seeded::rng(seed), dim_m, dim_k, 0.3, false)
}

fn load_family(args: &InstanceArgs) -> Result<FamilyHandle, Error> {
    match &args.input {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
            let parsed: json::JsonFamily = serde_json::from_str(&text)
                .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            json::family_from_json(&parsed)
        }
        None => FamilyHandle::from_construction(
            args.kind.into(),
            seeded_construction(args.seed, args.dim_m, args.dim_k),
        ),
    }
}

fn load_construction(
    input: &Option<PathBuf>,
    seed: u64,
    dim_m: usize,
    dim_k: usize,
) -> Result<StieltjesConstruction, Error> {
    match input {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
            let parsed: json::JsonConstruction = serde_json::from_str(&text)
                .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            json::construction_from_json(&parsed)
        }
        None => {
            let cons = seeded_construction(seed, dim_m, dim_k);
            cons.validate()?;
            Ok(cons)
        }
    }
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            std::io::stdout().flush().ok();
            Ok(())
        }
    }
}

fn write_json_file(path: &Path, value: &impl serde::Serialize) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Parse(format!("serialization: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))
}

fn cmd_gen(seed: u64, dim_m: usize, dim_k: usize, out: &Path) -> Result<i32, Error> {
    if dim_m == 0 || dim_k == 0 {
        return Err(Error::Parse("dims must be at least 1".into()));
    }
    std::fs::create_dir_all(out)
        .map_err(|e| Error::Parse(format!("cannot create {}: {e}", out.display())))?;
    let system = seeded::random_passive_system(&mut seeded::rng(seed), dim_m, dim_k);
    let cons = seeded_construction(seed, dim_m, dim_k);
    let system_path = out.join(format!("system-{seed}.json"));
    let cons_path = out.join(format!("construction-{seed}.json"));
    write_json_file(&system_path, &json::system_to_json(&system))?;
    write_json_file(&cons_path, &json::construction_to_json(&cons))?;
    println!("wrote {}", system_path.display());
    println!("wrote {}", cons_path.display());
    Ok(EXIT_PASS)
}

fn complex_json(v: Complex64) -> serde_json::Value {
    serde_json::json!({ "re": v.re, "im": v.im })
}

fn eval_rows(
    family: &FamilyHandle,
    grid: &[Complex64],
) -> Vec<(Complex64, Result<CMatrix, Error>)> {
    // Parallel evaluation; assembly preserves grid order, so reports stay
    // deterministic.
    grid.par_iter()
        .map(|&lambda| (lambda, family.eval_bounded(lambda)))
        .collect()
}

fn cmd_eval(
    instance: &InstanceArgs,
    grid_spec: &str,
    format: Format,
    out: &Option<PathBuf>,
) -> Result<i32, Error> {
    let family = load_family(instance)?;
    let grid = parse_grid(grid_spec)?;
    let rows = eval_rows(&family, &grid);
    let mut text = String::new();
    match format {
        Format::Json => {
            let mut json_rows = Vec::new();
            for (lambda, value) in &rows {
                let value = value.as_ref().map_err(Error::clone)?;
                json_rows.push(serde_json::json!({
                    "lambda": complex_json(*lambda),
                    "value": json::matrix_to_json(value),
                    "norm": op_norm(value),
                }));
            }
            text = serde_json::to_string_pretty(&serde_json::json!({ "rows": json_rows }))
                .expect("serializable report");
            text.push('\n');
        }
        Format::Csv => {
            let dim = family.dim();
            text.push_str("lambda_re,lambda_im");
            for i in 0..dim {
                for j in 0..dim {
                    text.push_str(&format!(",v_{i}_{j}_re,v_{i}_{j}_im"));
                }
            }
            text.push_str(",norm\n");
            for (lambda, value) in &rows {
                let value = value.as_ref().map_err(Error::clone)?;
                text.push_str(&format!("{},{}", lambda.re, lambda.im));
                for i in 0..dim {
                    for j in 0..dim {
                        text.push_str(&format!(",{},{}", value[(i, j)].re, value[(i, j)].im));
                    }
                }
                text.push_str(&format!(",{}\n", op_norm(value)));
            }
        }
    }
    write_output(out, &text)?;
    Ok(EXIT_PASS)
}

struct SuiteOutcome {
    name: &'static str,
    worst: f64,
    pass: bool,
    detail: String,
}

fn rs_function_for_family(family: &FamilyHandle) -> Result<RsFunction, Error> {
    match &family.origin {
        stieltjes_core::families::FamilyOrigin::Rs(f) => Ok(f.clone()),
        stieltjes_core::families::FamilyOrigin::Construction(cons) => {
            rs_function_for_construction(cons)
        }
        stieltjes_core::families::FamilyOrigin::NegHOverLambda(_) => Err(Error::Parse(
            "the rs suite needs a system or construction instance".into(),
        )),
    }
}

fn run_suite(
    family: &FamilyHandle,
    suite: Suite,
    tol: f64,
    grid_spec: &str,
    seed: u64,
) -> Result<SuiteOutcome, Error> {
    match suite {
        Suite::Rs => {
            let f = rs_function_for_family(family)?;
            let rep = rs_membership(&f, &disk_grid(30), tol)?;
            let worst = rep
                .worst_inequality
                .min(rep.worst_kernel)
                .min(rep.worst_real);
            Ok(SuiteOutcome {
                name: "rs",
                worst,
                pass: rep.pass,
                detail: if rep.violations.is_empty() {
                    "no violations".into()
                } else {
                    rep.violations.join("; ")
                },
            })
        }
        Suite::Sector => {
            let grid = parse_grid(grid_spec)?;
            let mut rng = seeded::rng(seed);
            let mut worst = f64::INFINITY;
            let mut margin = f64::INFINITY;
            for &lambda in &grid {
                let rep = sector_check(family, lambda, 64, &mut rng)?;
                worst = worst.min(rep.worst_violation);
                margin = margin.min(rep.sector_margin);
            }
            Ok(SuiteOutcome {
                name: "sector",
                worst,
                pass: worst >= -tol,
                detail: format!("sector margin {margin:.3e}"),
            })
        }
        Suite::Kernel => {
            let grid = parse_grid(grid_spec)?;
            let rep = kernel_check(family, &grid, tol)?;
            Ok(SuiteOutcome {
                name: "kernel",
                worst: rep.margin,
                pass: rep.pass,
                detail: format!("signed kernel margin {:.3e}", rep.margin),
            })
        }
        Suite::Equiv => {
            let grid = parse_grid(grid_spec)?;
            let mut rng = seeded::rng(seed);
            let rep = transform_equivalences(family, &grid, 32, &mut rng)?;
            Ok(SuiteOutcome {
                name: "equiv",
                worst: rep.worst,
                pass: rep.worst >= -tol,
                detail: "numerical-range margins of M, -M^{-1}, -M(1/.)".into(),
            })
        }
    }
}

fn suite_report_text(outcomes: &[SuiteOutcome]) -> String {
    let mut text = String::new();
    for o in outcomes {
        text.push_str(&format!(
            "{}: {} worst {:+.3e} ({})\n",
            o.name,
            if o.pass { "pass" } else { "FAIL" },
            o.worst,
            o.detail
        ));
    }
    text
}

fn cmd_check(
    instance: &InstanceArgs,
    suite: Suite,
    tol: f64,
    grid_spec: &str,
    out: &Option<PathBuf>,
) -> Result<i32, Error> {
    let family = load_family(instance)?;
    let outcome = run_suite(&family, suite, tol, grid_spec, instance.seed)?;
    let pass = outcome.pass;
    write_output(out, &suite_report_text(&[outcome]))?;
    Ok(if pass { EXIT_PASS } else { EXIT_VIOLATION })
}

fn cmd_rep(
    input: &Option<PathBuf>,
    seed: u64,
    dim_m: usize,
    dim_k: usize,
    kind: Kind,
    out: &Option<PathBuf>,
) -> Result<i32, Error> {
    let cons = load_construction(input, seed, dim_m, dim_k)?;
    let kind: FamilyKind = kind.into();
    let rep = match kind {
        FamilyKind::Stieltjes => stieltjes_rep(&cons)?,
        FamilyKind::InverseStieltjes => inverse_stieltjes_rep(&cons)?,
    };
    // Reconstruction target: Z* Q0 Z for the Stieltjes kind; the inverse kind
    // represents the family of the inverse relation, so compare against
    // Z* R0 Z built from A_hat^{-1}.
    let direct_cons = match kind {
        FamilyKind::Stieltjes => cons.clone(),
        FamilyKind::InverseStieltjes => StieltjesConstruction {
            a_hat: cons.a_hat.inverse(),
            ..cons.clone()
        },
    };
    let mut max_err = 0.0f64;
    for &lambda in &default_lambda_grid(20) {
        let direct = match kind {
            FamilyKind::Stieltjes => {
                let q = stieltjes_core::families::q0(&direct_cons, lambda)?;
                cons.z.adjoint() * q * &cons.z
            }
            FamilyKind::InverseStieltjes => {
                let r = stieltjes_core::families::r0(&direct_cons, lambda)?;
                cons.z.adjoint() * r * &cons.z
            }
        };
        let recon = evaluate_rep(&rep, lambda)?;
        max_err = max_err.max(op_norm(&(direct - recon)));
    }
    let moments = moment_sums(&rep);
    let report = serde_json::json!({
        "representation": json::representation_to_json(&rep),
        "max_reconstruction_error": max_err,
        "moment_sums": moments,
    });
    let mut text = serde_json::to_string_pretty(&report).expect("serializable report");
    text.push('\n');
    write_output(out, &text)?;
    eprintln!("max reconstruction error {max_err:.3e}");
    Ok(EXIT_PASS)
}

fn cmd_limits(instance: &InstanceArgs, out: &Option<PathBuf>) -> Result<i32, Error> {
    let family = load_family(instance)?;
    let (at_zero, at_inf) = resolvent_limits(&family)?;
    let ordered = ordering_holds(&family, &at_zero, &at_inf)?;
    let report = serde_json::json!({
        "at_zero": json::relation_to_json(&at_zero),
        "at_minus_infinity": json::relation_to_json(&at_inf),
        "selfadjoint": [at_zero.is_selfadjoint(1e-6), at_inf.is_selfadjoint(1e-6)],
        "form_order_confirmed": ordered,
    });
    let mut text = serde_json::to_string_pretty(&report).expect("serializable report");
    text.push('\n');
    write_output(out, &text)?;
    Ok(EXIT_PASS)
}

/// Samples the form order M(-inf) <= M(x) <= M(-0) on the negative ray;
/// points where a resolvent does not exist are skipped.
fn ordering_holds(
    family: &FamilyHandle,
    at_zero: &stieltjes_core::linrel::LinearRelation,
    at_inf: &stieltjes_core::linrel::LinearRelation,
) -> Result<bool, Error> {
    use stieltjes_core::families::form_order_le;
    use stieltjes_core::numerics::cr;
    for x in [-8.0, -1.0, -0.1] {
        let value = family.eval(cr(x))?;
        if !form_order_le(at_inf, &value, 1e-7)? || !form_order_le(&value, at_zero, 1e-7)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn cmd_verify_all(
    seed: u64,
    dim_m: usize,
    dim_k: usize,
    tol: f64,
    out: &Option<PathBuf>,
) -> Result<i32, Error> {
    let cons = seeded_construction(seed, dim_m, dim_k);
    let family = FamilyHandle::from_construction(FamilyKind::Stieltjes, cons.clone())?;
    let mut outcomes = Vec::new();
    for suite in [Suite::Rs, Suite::Sector, Suite::Kernel, Suite::Equiv] {
        outcomes.push(run_suite(&family, suite, tol, "default", seed)?);
    }
    // Form-domain constancy and holomorphy over a short grid.
    let fd = form_domain_constancy(&family, &default_lambda_grid(12))?;
    outcomes.push(SuiteOutcome {
        name: "form-domain",
        worst: -fd.worst_cr_residual,
        pass: fd.all_equal && fd.worst_cr_residual < 1e-5,
        detail: format!("constant domain {}", fd.all_equal),
    });
    // Integral representation reconstruction.
    let rep = stieltjes_rep(&cons)?;
    let mut max_err = 0.0f64;
    for &lambda in &default_lambda_grid(20) {
        let direct =
            cons.z.adjoint() * stieltjes_core::families::q0(&cons, lambda)? * &cons.z;
        max_err = max_err.max(op_norm(&(direct - evaluate_rep(&rep, lambda)?)));
    }
    outcomes.push(SuiteOutcome {
        name: "integral-rep",
        worst: -max_err,
        pass: max_err < 1e-9,
        detail: format!("max reconstruction error {max_err:.3e}"),
    });
    // Boundary limits and form order.
    let (at_zero, at_inf) = resolvent_limits(&family)?;
    let ordered = ordering_holds(&family, &at_zero, &at_inf)?;
    outcomes.push(SuiteOutcome {
        name: "limits",
        worst: if ordered { 0.0 } else { -1.0 },
        pass: ordered && at_zero.is_selfadjoint(1e-6) && at_inf.is_selfadjoint(1e-6),
        detail: "selfadjoint limits with sampled form order".into(),
    });
    let all_pass = outcomes.iter().all(|o| o.pass);
    write_output(out, &suite_report_text(&outcomes))?;
    Ok(if all_pass { EXIT_PASS } else { EXIT_VIOLATION })
}

fn main() {
    let cli = Cli::parse();
    let outcome = match &cli.cmd {
        Cmd::Gen {
            seed,
            dim_m,
            dim_k,
            out,
        } => cmd_gen(*seed, *dim_m, *dim_k, out),
        Cmd::Eval {
            instance,
            grid,
            format,
            out,
        } => cmd_eval(instance, grid, *format, out),
        Cmd::Check {
            instance,
            suite,
            tol,
            grid,
            out,
        } => cmd_check(instance, *suite, *tol, grid, out),
        Cmd::Rep {
            input,
            seed,
            dim_m,
            dim_k,
            kind,
            out,
        } => cmd_rep(input, *seed, *dim_m, *dim_k, *kind, out),
        Cmd::Limits { instance, out } => cmd_limits(instance, out),
        Cmd::VerifyAll {
            seed,
            dim_m,
            dim_k,
            tol,
            out,
        } => cmd_verify_all(*seed, *dim_m, *dim_k, *tol, out),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(exit_for(&err));
        }
    }
}
