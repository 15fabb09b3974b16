//! Command-line front end: generate functions and matrices, compute bounds,
//! verify certificates, brute-force tiny formula sizes, and reproduce the
//! headline results table.
//!
//! Exit codes: 0 success, 1 a verification reported infeasible, 2 invalid
//! input, 3 a search budget was exhausted.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rectbound::bool_fn::BooleanFunction;
use rectbound::bound::BoundOptions;
use rectbound::brute::{brute_force_formula_size, BruteOptions, BruteOutcome};
use rectbound::builders::BuiltCertificate;
use rectbound::certificate::{verify_certificate, CertificateJson, DualCertificate};
use rectbound::error::Error;
use rectbound::matrix::{build_matrix, CommMatrix, MatrixJson, Mode, Restriction};
use rectbound::report::{
    family_certificate, family_formula, family_function, family_matrix, parse_family, report,
    run_method, to_csv, to_text, BoundReport, Method,
};
use rectbound::submatrix::Family;

#[derive(Parser)]
#[command(name = "rectbound", version, about = "Exact formula-size lower bounds via the rectangle-cover LP with clique and rank constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct FamilyArgs {
    /// family: maj | urec | brec
    #[arg(long)]
    family: String,
    /// majority parameter (arity 2l+1)
    #[arg(long)]
    l: Option<u32>,
    /// recursion height
    #[arg(long)]
    h: Option<u32>,
}

impl FamilyArgs {
    fn resolve(&self) -> Result<(Family, u32), Error> {
        let family = parse_family(&self.family)?;
        let param = match family {
            Family::Maj => self.l.ok_or_else(|| Error::Parse("majority needs --l".into()))?,
            Family::Urec | Family::Brec => {
                self.h.ok_or_else(|| Error::Parse("recursive families need --h".into()))?
            }
        };
        Ok((family, param))
    }
}

#[derive(Args, Clone)]
struct BudgetArgs {
    /// separation oracle node budget per call
    #[arg(long, default_value_t = rectbound::oracle::DEFAULT_ORACLE_BUDGET)]
    oracle_budget: usize,
    /// constraint generation round cap
    #[arg(long, default_value_t = 400)]
    rounds: usize,
}

impl BudgetArgs {
    fn options(&self) -> BoundOptions {
        BoundOptions { oracle_budget: self.oracle_budget, max_rounds: self.rounds }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Emit a family member as a function or formula JSON document
    Gen {
        #[command(flatten)]
        family: FamilyArgs,
        /// what to generate
        #[arg(long, value_enum, default_value_t = GenKind::Function)]
        kind: GenKind,
    },
    /// Build a communication matrix and print it as JSON or CSV
    Matrix {
        #[command(flatten)]
        family: FamilyArgs,
        /// use the recursive/figure submatrix instead of the plain terms matrix
        #[arg(long)]
        submatrix: bool,
        /// cell mode for the plain matrix
        #[arg(long, value_enum, default_value_t = ModeArg::General)]
        mode: ModeArg,
        /// row/col restriction for the plain matrix
        #[arg(long, value_enum, default_value_t = RestrictionArg::Terms)]
        restriction: RestrictionArg,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
    },
    /// Compute a lower bound with one method
    Bound {
        #[command(flatten)]
        family: FamilyArgs,
        /// lp | clique | cover | certificate | brute | upper
        #[arg(long)]
        method: String,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Verify a dual certificate (built-in or from files)
    Verify {
        #[command(flatten)]
        family: FamilyArgs,
        /// verify the built-in certificate of the family member
        #[arg(long, default_value_t = true)]
        builtin_cert: bool,
        /// for the balanced family: verify the geometric-weight scheme
        /// instead of the unit one
        #[arg(long)]
        tangency: bool,
        /// matrix JSON file (with --cert)
        #[arg(long)]
        matrix: Option<String>,
        /// certificate JSON file (with --matrix)
        #[arg(long)]
        cert: Option<String>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Brute-force the minimal formula size of a function JSON document
    Brute {
        /// function file ({"n": .., "table_hex": ..}); "-" for stdin
        #[arg(long)]
        function: String,
        #[arg(long)]
        monotone_only: bool,
        #[arg(long, default_value_t = 10)]
        size_cap: usize,
        /// memory budget: max distinct truth tables kept
        #[arg(long, default_value_t = 4_000_000)]
        max_tables: usize,
    },
    /// Recompute the headline results table
    Table {
        /// table name (only "paper" exists)
        name: String,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
        /// skip the multi-minute entries (the 35x35 majority certificate)
        #[arg(long)]
        skip_slow: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Function,
    Formula,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    General,
    Monotone,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RestrictionArg {
    Terms,
    Full,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::BudgetExceeded(_) | Error::MemoryBudget(_) | Error::SizeCap(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn print_reports(reports: &[BoundReport], format: OutputFormat) -> Result<(), Error> {
    let out = match format {
        OutputFormat::Text => to_text(reports),
        OutputFormat::Csv => to_csv(reports),
        OutputFormat::Json => serde_json::to_string_pretty(reports)? + "\n",
    };
    print!("{out}");
    std::io::stdout().flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Gen { family, kind } => {
            let (fam, param) = family.resolve()?;
            let doc = match kind {
                GenKind::Function => serde_json::to_string_pretty(&family_function(fam, param)?.to_json())?,
                GenKind::Formula => serde_json::to_string_pretty(&family_formula(fam, param)?.to_json())?,
            };
            println!("{doc}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Matrix { family, submatrix, mode, restriction, format } => {
            let (fam, param) = family.resolve()?;
            let m: CommMatrix = if submatrix {
                family_matrix(fam, param)?
            } else {
                let f = family_function(fam, param)?;
                let mode = match mode {
                    ModeArg::General => Mode::General,
                    ModeArg::Monotone => Mode::Monotone,
                };
                let restriction = match restriction {
                    RestrictionArg::Terms => Restriction::Terms,
                    RestrictionArg::Full => Restriction::Full,
                };
                build_matrix(&f, mode, restriction)?
            };
            match format {
                OutputFormat::Csv => print!("{}", m.to_csv()),
                _ => println!("{}", serde_json::to_string_pretty(&m.to_json())?),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bound { family, method, budget, format } => {
            let (fam, param) = family.resolve()?;
            let method = match method.as_str() {
                "lp" => Method::Lp,
                "clique" | "lp+clique" => Method::Clique,
                "cover" => Method::Cover,
                "certificate" => Method::Certificate,
                "brute" => Method::Brute,
                "upper" | "upper-formula" => Method::Upper,
                other => return Err(Error::Parse(format!("unknown method {other:?}"))),
            };
            let r = run_method(fam, param, method, &budget.options())?;
            if format == OutputFormat::Text {
                // the headline value alone, exact
                println!("{}", r.value);
            } else {
                print_reports(&[r], format)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { family, builtin_cert, tangency, matrix, cert, budget } => {
            let (m, dual): (CommMatrix, DualCertificate) = match (&matrix, &cert) {
                (Some(mpath), Some(cpath)) => {
                    let mj: MatrixJson = serde_json::from_str(&std::fs::read_to_string(mpath)?)?;
                    let cj: CertificateJson =
                        serde_json::from_str(&std::fs::read_to_string(cpath)?)?;
                    (CommMatrix::from_json(&mj)?, DualCertificate::from_json(&cj))
                }
                (None, None) if builtin_cert => {
                    let (fam, param) = family.resolve()?;
                    let built: BuiltCertificate = family_certificate(fam, param, tangency)?;
                    (built.matrix, built.cert)
                }
                _ => {
                    return Err(Error::Parse(
                        "provide either --matrix with --cert, or a family with --builtin-cert".into(),
                    ))
                }
            };
            let report = verify_certificate(&m, &dual, budget.options().oracle_budget)?;
            if report.feasible {
                println!("feasible, objective {}", report.objective);
                Ok(ExitCode::SUCCESS)
            } else {
                println!("infeasible, objective {}", report.objective);
                for v in &report.violations {
                    println!("  violation: {v}");
                }
                Ok(ExitCode::from(1))
            }
        }
        Command::Brute { function, monotone_only, size_cap, max_tables } => {
            let text = if function == "-" {
                use std::io::Read;
                let mut s = String::new();
                std::io::stdin().read_to_string(&mut s)?;
                s
            } else {
                std::fs::read_to_string(&function)?
            };
            let fj: rectbound::bool_fn::FunctionJson = serde_json::from_str(&text)?;
            let f = BooleanFunction::from_json(&fj)?;
            let out = brute_force_formula_size(
                &f,
                BruteOptions { monotone_only, size_cap, max_tables },
            )?;
            match out {
                BruteOutcome::Exact { size, witness } => {
                    println!("{size}");
                    eprintln!("witness: {witness}");
                    Ok(ExitCode::SUCCESS)
                }
                BruteOutcome::ExceedsCap => {
                    println!("exceeds cap {size_cap}");
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        Command::Table { name, format, skip_slow, budget } => {
            if name != "paper" {
                return Err(Error::Parse(format!("unknown table {name:?}")));
            }
            let reports = paper_table(skip_slow, &budget.options())?;
            print_reports(&reports, format)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// One row per headline result, every value recomputed from scratch: the
/// table is a regression suite, not a transcript.
fn paper_table(skip_slow: bool, opts: &BoundOptions) -> Result<Vec<BoundReport>, Error> {
    let mut out = Vec::new();
    // 3-bit majority: every method agrees at 5
    out.extend(report(
        Family::Maj,
        1,
        &[Method::Lp, Method::Clique, Method::Cover, Method::Certificate, Method::Brute, Method::Upper],
        opts,
    )?);
    // 5-bit majority: certificate 45/4, integral 12, beats the squared bound 9
    out.push(run_method(Family::Maj, 2, Method::Certificate, opts)?);
    if !skip_slow {
        // 7-bit majority: certificate 560/29 on the 35x35 matrix
        out.push(run_method(Family::Maj, 3, Method::Certificate, opts)?);
    }
    // unbalanced family: certificate-or-solved lower bound plus matching upper
    for h in [2u32, 3] {
        out.push(run_method(Family::Urec, h, Method::Certificate, opts)?);
        out.push(run_method(Family::Urec, h, Method::Upper, opts)?);
    }
    // balanced family at height 2: unit certificate reaches 20, upper 25
    out.push(run_method(Family::Brec, 2, Method::Certificate, opts)?);
    out.push(run_method(Family::Brec, 2, Method::Upper, opts)?);
    Ok(out)
}

