//! `svw` — exact symbolic calculator for the principal SUSY W-algebra of
//! gl(n+1|n): free generators, lambda brackets, the BRST differential, the
//! Miura comparison, and the verification suites.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parse error.

use clap::{Parser, Subcommand, ValueEnum};
use std::process::ExitCode;
use svw_core::brst::{complex, identity_suite};
use svw_core::engine::{axiom_suite, Algebra};
use svw_core::exprio;
use svw_core::lca::current_table;
use svw_core::liesuper::{principal_data, FormMode};
use svw_core::wgen::{strip_off_diagonal, w_context, w_table, walgebra_suite};
use svw_core::{Error, Expression, Family, RawTerm, Report};

#[derive(Parser)]
#[command(
    name = "svw",
    version,
    about = "Exact SUSY W-algebra engine for gl(n+1|n)",
    max_term_width = 100
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, ValueEnum)]
enum FormModeArg {
    /// Normalize the invariant form so that (e|f) = 1.
    Rescaled,
    /// Use the plain supertrace form (unit dual normalization).
    Supertrace,
}

impl From<FormModeArg> for FormMode {
    fn from(m: FormModeArg) -> FormMode {
        match m {
            FormModeArg::Rescaled => FormMode::Rescaled,
            FormModeArg::Supertrace => FormMode::Supertrace,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Copy, Clone, PartialEq, ValueEnum)]
enum SuiteArg {
    /// Lambda-bracket axioms (skew-symmetry, Jacobi, Wick, confluence, ...).
    Axioms,
    /// BRST identities (d brackets, Q^2 = 0, dressed currents).
    Brst,
    /// W-generator suite (extraction, closedness, structure, Miura).
    Walgebra,
    /// Everything above.
    All,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the free generators W_0 ... W_{2n+1}.
    Gens {
        /// Rank parameter of gl(n+1|n).
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=20))]
        n: u32,
        /// Output format.
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        /// Also verify the generators (closedness, leading terms, weights);
        /// the check table goes to stderr and failures set exit code 1.
        #[arg(long)]
        check: bool,
        /// Normalization of the invariant bilinear form.
        #[arg(long, value_enum, default_value_t = FormModeArg::Rescaled)]
        form_mode: FormModeArg,
    },
    /// Run a verification suite and print its pass/fail table.
    Verify {
        /// Rank parameter of gl(n+1|n).
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=20))]
        n: u32,
        /// Which suite to run.
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        /// Seed for the randomized check families.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Size of each randomized check family.
        #[arg(long, default_value_t = 40)]
        trials: u32,
        /// Normalization of the invariant bilinear form.
        #[arg(long, value_enum, default_value_t = FormModeArg::Rescaled)]
        form_mode: FormModeArg,
    },
    /// Evaluate the lambda bracket [left_L right] of two expressions.
    Bracket {
        /// Rank parameter of gl(n+1|n).
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=20))]
        n: u32,
        #[arg(long, help = "Left argument, e.g. \"Cur[1,1]\" or \"J[2,1]S(J[3,3])\"")]
        left: String,
        #[arg(long, help = "Right argument")]
        right: String,
        /// Normalization of the invariant bilinear form.
        #[arg(long, value_enum, default_value_t = FormModeArg::Rescaled)]
        form_mode: FormModeArg,
    },
    /// Apply the differential Q to an expression.
    Q {
        /// Rank parameter of gl(n+1|n).
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=20))]
        n: u32,
        #[arg(long, help = "The argument, e.g. \"J[1,1]\" or \"NO(Cur[1,1], Phi[1,2])\"")]
        expr: String,
        /// Normalization of the invariant bilinear form.
        #[arg(long, value_enum, default_value_t = FormModeArg::Rescaled)]
        form_mode: FormModeArg,
    },
    /// Compare the diagonal part of every W_p with the Miura coefficients.
    Miura {
        /// Rank parameter of gl(n+1|n).
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=20))]
        n: u32,
        /// Normalization of the invariant bilinear form.
        #[arg(long, value_enum, default_value_t = FormModeArg::Rescaled)]
        form_mode: FormModeArg,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Gens {
            n,
            format,
            check,
            form_mode,
        } => cmd_gens(n, format, check, form_mode.into()),
        Cmd::Verify {
            n,
            suite,
            seed,
            trials,
            form_mode,
        } => cmd_verify(n, suite, seed, trials, form_mode.into()),
        Cmd::Bracket {
            n,
            left,
            right,
            form_mode,
        } => cmd_bracket(n, &left, &right, form_mode.into()),
        Cmd::Q { n, expr, form_mode } => cmd_q(n, &expr, form_mode.into()),
        Cmd::Miura { n, form_mode } => cmd_miura(n, form_mode.into()),
    }
}

/// Exit 2: the invocation itself was unusable (bad expression, bad mix).
fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

/// Exit 1: the computation ran but an identity or validation failed.
fn verification_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

fn error_exit(e: &Error) -> ExitCode {
    match e {
        Error::Parse { .. } | Error::Sector(_) | Error::BadIndex { .. } => {
            usage_error(&e.to_string())
        }
        _ => verification_error(&e.to_string()),
    }
}

// ---------------------------------------------------------------------------
// gens
// ---------------------------------------------------------------------------

fn cmd_gens(n: u32, format: FormatArg, check: bool, mode: FormMode) -> ExitCode {
    let ctx = match w_context(n, mode) {
        Ok(ctx) => ctx,
        Err(e) => return error_exit(&e),
    };
    let ws = match ctx.generators() {
        Ok(ws) => ws,
        Err(e) => return error_exit(&e),
    };
    match format {
        FormatArg::Text => {
            for (p, w) in ws.iter().enumerate() {
                println!("W_{p} = {}", exprio::print(w));
            }
        }
        FormatArg::Json => {
            let pairs: Vec<(u8, Expression)> = ws
                .iter()
                .enumerate()
                .map(|(p, w)| (p as u8, w.clone()))
                .collect();
            let doc = exprio::wset_json(n as u8, &pairs);
            match serde_json::to_string_pretty(&doc) {
                Ok(s) => println!("{s}"),
                Err(e) => return verification_error(&e.to_string()),
            }
        }
    }
    if !check {
        return ExitCode::SUCCESS;
    }
    // The generators themselves are independent of the form normalization;
    // their closedness is a property of the unit-scale (supertrace)
    // differential, so the check suite always runs in that normalization.
    eprintln!("checks (supertrace form; the generators do not depend on the mode):");
    let report = walgebra_suite(n, FormMode::Supertrace);
    print_report(&report, "  ", &mut std::io::stderr());
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

/// Print a report's pass/fail table (no timings) to the given stream and
/// its timings to stderr.
fn print_report(report: &Report, indent: &str, out: &mut dyn std::io::Write) {
    for item in &report.items {
        let status = if item.pass { "pass" } else { "FAIL" };
        let detail = item
            .detail
            .as_deref()
            .map(|d| format!(": {d}"))
            .unwrap_or_default();
        let _ = writeln!(out, "{indent}[{status}] {}{detail}", item.name);
    }
}

fn print_timings(report: &Report) {
    for item in &report.items {
        eprintln!("    {} took {} ms", item.name, item.millis);
    }
}

fn cmd_verify(n: u32, suite: SuiteArg, seed: u64, trials: u32, mode: FormMode) -> ExitCode {
    let mut sections: Vec<(String, Report)> = Vec::new();
    let mode_name = match mode {
        FormMode::Rescaled => "rescaled",
        FormMode::Supertrace => "supertrace",
    };

    if matches!(suite, SuiteArg::Axioms | SuiteArg::All) {
        let pd = match principal_data(n, mode) {
            Ok(pd) => pd,
            Err(e) => return error_exit(&e),
        };
        let alg = Algebra::new(current_table(&pd));
        sections.push(("axioms: complex sector".into(), axiom_suite(&alg, seed, trials)));
        let cx = match complex(n, mode) {
            Ok(cx) => cx,
            Err(e) => return error_exit(&e),
        };
        let table = match w_table(&cx) {
            Ok(t) => t,
            Err(e) => return error_exit(&e),
        };
        let alg = Algebra::new(table);
        sections.push((
            "axioms: w-algebra sector".into(),
            axiom_suite(&alg, seed ^ 0x77, trials),
        ));
    }
    if matches!(suite, SuiteArg::Brst | SuiteArg::All) {
        sections.push((
            "brst identities".into(),
            identity_suite(n, mode, seed, trials),
        ));
    }
    if matches!(suite, SuiteArg::Walgebra | SuiteArg::All) {
        sections.push(("w-algebra generators".into(), walgebra_suite(n, mode)));
    }

    let mut checks = 0usize;
    let mut failures = 0usize;
    for (name, report) in &sections {
        println!("== {name} (n={n}, {mode_name} form, seed {seed}, trials {trials}) ==");
        print_report(report, "", &mut std::io::stdout());
        print_timings(report);
        checks += report.items.len();
        failures += report.items.iter().filter(|i| !i.pass).count();
    }
    println!("result: {checks} checks, {failures} failures");
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

// ---------------------------------------------------------------------------
// bracket / q
// ---------------------------------------------------------------------------

/// Which sector a parsed term needs: currents and lowering ghosts force the
/// complex, W-generators and the seed force the reduced sector, raising
/// ghosts and scalars are neutral.
fn collect_families(t: &RawTerm, complex_s: &mut bool, walg_s: &mut bool) {
    match t {
        RawTerm::Atom(dg) => match dg.g.fam {
            Family::Cur | Family::PhiD => *complex_s = true,
            Family::JGen | Family::Dummy => *walg_s = true,
            Family::PhiU => {}
        },
        RawTerm::Scalar(_) => {}
        RawTerm::No(a, b) => {
            collect_families(a, complex_s, walg_s);
            collect_families(b, complex_s, walg_s);
        }
        RawTerm::SDeriv(inner) => collect_families(inner, complex_s, walg_s),
        RawTerm::Sum(parts) => {
            for p in parts {
                collect_families(p, complex_s, walg_s);
            }
        }
        RawTerm::Scaled(_, inner) => collect_families(inner, complex_s, walg_s),
    }
}

/// The engine for the sector the given terms live in (complex when neutral).
fn sector_algebra(n: u32, mode: FormMode, terms: &[&RawTerm]) -> Result<Algebra, Error> {
    let mut complex_s = false;
    let mut walg_s = false;
    for t in terms {
        collect_families(t, &mut complex_s, &mut walg_s);
    }
    if complex_s && walg_s {
        return Err(Error::Sector(
            "the arguments mix current/lowering-ghost atoms with W-algebra atoms".into(),
        ));
    }
    if walg_s {
        let cx = complex(n, mode)?;
        Ok(Algebra::new(w_table(&cx)?))
    } else {
        let pd = principal_data(n, mode)?;
        Ok(Algebra::new(current_table(&pd)))
    }
}

fn cmd_bracket(n: u32, left: &str, right: &str, mode: FormMode) -> ExitCode {
    let rank = n as u8;
    let raw_l = match exprio::parse(left, rank) {
        Ok(t) => t,
        Err(e) => return error_exit(&e),
    };
    let raw_r = match exprio::parse(right, rank) {
        Ok(t) => t,
        Err(e) => return error_exit(&e),
    };
    let alg = match sector_algebra(n, mode, &[&raw_l, &raw_r]) {
        Ok(alg) => alg,
        Err(e) => return error_exit(&e),
    };
    let lhs = alg.canonicalize(&raw_l);
    let rhs = alg.canonicalize(&raw_r);
    let poly = alg.bracket(&lhs, &rhs);
    let mut printed = false;
    for (&(j0, j1), e) in poly.iter() {
        println!("({j0},{j1}): {}", exprio::print(e));
        printed = true;
    }
    if !printed {
        println!("0");
    }
    ExitCode::SUCCESS
}

fn cmd_q(n: u32, expr: &str, mode: FormMode) -> ExitCode {
    let rank = n as u8;
    let raw = match exprio::parse(expr, rank) {
        Ok(t) => t,
        Err(e) => return error_exit(&e),
    };
    let mut complex_s = false;
    let mut walg_s = false;
    collect_families(&raw, &mut complex_s, &mut walg_s);
    if complex_s && walg_s {
        return usage_error("the argument mixes current/lowering-ghost atoms with W-algebra atoms");
    }
    let image = if walg_s {
        let ctx = match w_context(n, mode) {
            Ok(ctx) => ctx,
            Err(e) => return error_exit(&e),
        };
        ctx.q_w(&ctx.alg.canonicalize(&raw))
    } else {
        let cx = match complex(n, mode) {
            Ok(cx) => cx,
            Err(e) => return error_exit(&e),
        };
        cx.q(&cx.alg.canonicalize(&raw))
    };
    println!("{}", exprio::print(&image));
    ExitCode::SUCCESS
}

// ---------------------------------------------------------------------------
// miura
// ---------------------------------------------------------------------------

fn cmd_miura(n: u32, mode: FormMode) -> ExitCode {
    let ctx = match w_context(n, mode) {
        Ok(ctx) => ctx,
        Err(e) => return error_exit(&e),
    };
    let ws = match ctx.generators() {
        Ok(ws) => ws,
        Err(e) => return error_exit(&e),
    };
    let miura = match ctx.miura_generators() {
        Ok(m) => m,
        Err(e) => return error_exit(&e),
    };
    let size = ctx.size();
    let mismatches: Vec<usize> = (0..ws.len())
        .filter(|&p| strip_off_diagonal(&ws[p]) != miura[p])
        .collect();
    if mismatches.is_empty() {
        println!("p=0..{size}: MATCH");
        ExitCode::SUCCESS
    } else {
        for p in 0..ws.len() {
            let verdict = if mismatches.contains(&p) {
                "MISMATCH"
            } else {
                "MATCH"
            };
            println!("p={p}: {verdict}");
        }
        ExitCode::from(1)
    }
}
