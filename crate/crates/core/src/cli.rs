//! Command-line driver. Every command produces one JSON document, written to
//! `--out` or standard output, plus a short summary on standard error.
//!
//! Exit codes: 0 when every verdict passes, 1 when a verdict fails or an
//! ordinal is aborted by the basis guard, 2 for usage, file-format,
//! precondition and I/O errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::baroracle::{compare_with_twist, BarOracle, OracleError};
use crate::dgcat::format::{CategoryFile, Construction, FormatError, TwistConstruction};
use crate::dgcat::{interval, tensor, CategoryError, FiniteDgCategory, FunctorError};
use crate::operad::{check_contractible, sweep, OperadError, Ordinal2, SweepStatus};
use crate::scalar::{Field, ScalarError};
use crate::twist::{TwistError, TwistedCategory, TwistedTensor};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VERDICT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "dgtwist",
    version,
    about = "Exact checks for twisted tensor products of dg categories"
)]
pub struct Cli {
    /// Ground field: `q`, or `fp <p>` for a prime p
    #[arg(long, global = true, default_value = "q", value_parser = parse_field)]
    pub field: Field,

    /// Write the JSON report here instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Number of worker threads (default: all cores)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Abort a construction whose hom basis exceeds this size
    #[arg(long, global = true)]
    pub guard_basis: Option<usize>,

    /// Print progress details on standard error
    #[arg(long, global = true)]
    pub verbose: bool,

    /// Record wall-clock timings (makes reports non-reproducible)
    #[arg(long, global = true)]
    pub timings: bool,

    /// Leave composition out of emitted twisted categories
    #[arg(long, global = true)]
    pub omit_composition: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the dg category axioms of a category file
    Validate { category: PathBuf },
    /// Emit the interval category I_n
    Interval { n: usize },
    /// Emit the tensor product of two category files
    Tensor { left: PathBuf, right: PathBuf },
    /// Emit the twisted tensor product I_n ⊗̃ C
    Twist { n: usize, category: PathBuf },
    /// Cohomology of one hom complex
    Cohomology {
        category: PathBuf,
        #[arg(long, num_args = 2, value_names = ["X", "Y"], required = true)]
        pair: Vec<String>,
    },
    /// Check that the projection I_n ⊗̃ C -> I_n ⊗ C is a quasi-isomorphism on every hom
    Theorem3 { n: usize, category: PathBuf },
    /// Compare hom((a,x),(b,y)) with the bar-complex oracle
    BarOracle {
        n: usize,
        category: PathBuf,
        #[arg(long, num_args = 4, value_names = ["A", "B", "X", "Y"], required = true)]
        pair: Vec<String>,
    },
    /// Contractibility certificate for one 2-ordinal, e.g. `1,1`
    Operad { ordinal: Ordinal2 },
    /// Contractibility sweep over all 2-ordinals within the bounds
    Sweep {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        #[arg(long)]
        sum: usize,
    },
}

fn parse_field(s: &str) -> Result<Field, String> {
    let lower = s.to_ascii_lowercase();
    if lower == "q" {
        return Ok(Field::Q);
    }
    let p = lower
        .strip_prefix("fp:")
        .ok_or_else(|| format!("unknown field {s:?}; use `q` or `fp <p>`"))?;
    let p: u64 = p.parse().map_err(|_| format!("invalid prime {p:?}"))?;
    Field::prime(p).map_err(|e| e.to_string())
}

/// Rewrites `--field fp <p>` to `--field=fp:<p>` so that the prime is not
/// mistaken for a positional argument.
fn normalize_args(args: Vec<OsString>) -> Vec<OsString> {
    let mut out = Vec::with_capacity(args.len());
    let mut it = args.into_iter().peekable();
    while let Some(a) = it.next() {
        if a == "--field" {
            if let Some(kind) = it
                .peek()
                .and_then(|k| k.to_str())
                .map(str::to_ascii_lowercase)
            {
                if kind == "fp" {
                    it.next();
                    let p = it
                        .next()
                        .map(|p| p.to_string_lossy().into_owned())
                        .unwrap_or_default();
                    out.push(OsString::from(format!("--field=fp:{p}")));
                    continue;
                }
            }
        }
        out.push(a);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Usage,
    Format,
    Precondition,
    Io,
    Internal,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        CliError {
            kind,
            message: message.into(),
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        let kind = match &e {
            FormatError::Twist(TwistError::Category(CategoryError::NotDirected(_))) => {
                ErrorKind::Precondition
            }
            _ => ErrorKind::Format,
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<CategoryError> for CliError {
    fn from(e: CategoryError) -> Self {
        let kind = match e {
            CategoryError::NotDirected(_) | CategoryError::InvalidInput(_) => {
                ErrorKind::Precondition
            }
            _ => ErrorKind::Internal,
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<TwistError> for CliError {
    fn from(e: TwistError) -> Self {
        match e {
            TwistError::Category(c) => c.into(),
            other => CliError::new(ErrorKind::Internal, other.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Category(c) => c.into(),
            other => CliError::new(ErrorKind::Internal, other.to_string()),
        }
    }
}

impl From<FunctorError> for CliError {
    fn from(e: FunctorError) -> Self {
        CliError::new(ErrorKind::Internal, e.to_string())
    }
}

impl From<ScalarError> for CliError {
    fn from(e: ScalarError) -> Self {
        CliError::new(ErrorKind::Precondition, e.to_string())
    }
}

impl From<OperadError> for CliError {
    fn from(e: OperadError) -> Self {
        let kind = match e {
            OperadError::Parse(_) => ErrorKind::Usage,
            _ => ErrorKind::Internal,
        };
        CliError::new(kind, e.to_string())
    }
}

/// Outcome of a command: the JSON document, a one-line summary and the exit
/// code.
pub struct Outcome {
    pub document: Value,
    pub summary: Vec<String>,
    pub code: i32,
}

impl Outcome {
    fn verdict(document: Value, passed: bool, summary: Vec<String>) -> Self {
        Outcome {
            document,
            summary,
            code: if passed { EXIT_PASS } else { EXIT_VERDICT },
        }
    }
}

fn load(path: &Path) -> Result<FiniteDgCategory, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::new(ErrorKind::Io, format!("{}: {e}", path.display())))?;
    CategoryFile::parse(&text)
        .and_then(|f| f.to_category())
        .map_err(|e| {
            let mut err = CliError::from(e);
            err.message = format!("{}: {}", path.display(), err.message);
            err
        })
}

fn load_file(path: &Path) -> Result<CategoryFile, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::new(ErrorKind::Io, format!("{}: {e}", path.display())))?;
    CategoryFile::parse(&text)
        .map_err(|e| CliError::new(ErrorKind::Format, format!("{}: {e}", path.display())))
}

fn object(c: &FiniteDgCategory, label: &str) -> Result<usize, CliError> {
    c.object_index(label)
        .ok_or_else(|| CliError::new(ErrorKind::Usage, format!("unknown object {label:?}")))
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn config(cli: &Cli) -> Value {
    json!({
        "field": cli.field,
        "guard_basis": cli.guard_basis,
        "version": env!("CARGO_PKG_VERSION"),
    })
}

fn validate_input(c: &FiniteDgCategory, what: &str) -> Result<(), CliError> {
    let report = c.validate();
    match report.first_failure() {
        None => Ok(()),
        Some(f) => Err(CliError::new(
            ErrorKind::Precondition,
            format!("{what} fails validation: {f}"),
        )),
    }
}

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let field = cli.field;
    match &cli.command {
        Command::Validate { category } => {
            let c = load(category)?;
            let report = c.validate();
            let directed = c.directedness();
            let passed = report.passed();
            let document = json!({
                "command": "validate",
                "config": config(cli),
                "input": category.display().to_string(),
                "objects": c.objects(),
                "homs": c.nonzero_pairs().iter().map(|&(x, y)| json!({
                    "src": c.object_label(x),
                    "dst": c.object_label(y),
                    "dims": c.hom(x, y).dims(),
                })).collect::<Vec<_>>(),
                "validation": report,
                "directed": directed.as_ref().ok().map(|w| w.levels().to_vec()),
                "verdict": passed,
            });
            let mut summary = vec![format!(
                "validate {}: {}",
                category.display(),
                if passed { "pass" } else { "FAIL" }
            )];
            if let Some(f) = report.first_failure() {
                summary.push(format!("  {f}"));
            }
            if let Err(e) = directed {
                summary.push(format!("  {e}"));
            }
            Ok(Outcome::verdict(document, passed, summary))
        }
        Command::Interval { n } => {
            let c = interval(*n);
            Ok(Outcome {
                document: to_value(&CategoryFile::from_category(&c, false, None)),
                summary: vec![format!("interval {n}: {} objects", c.num_objects())],
                code: EXIT_PASS,
            })
        }
        Command::Tensor { left, right } => {
            let (a, b) = (load(left)?, load(right)?);
            let c = tensor(&a, &b)?;
            Ok(Outcome {
                document: to_value(&CategoryFile::from_category(&c, false, None)),
                summary: vec![format!(
                    "tensor: {} objects, {} basis elements",
                    c.num_objects(),
                    c.total_basis_size()
                )],
                code: EXIT_PASS,
            })
        }
        Command::Twist { n, category } => {
            let base_file = load_file(category)?;
            let base = Arc::new(base_file.to_category()?);
            validate_input(&base, "input category")?;
            let w = TwistedCategory::new(*n, base)?;
            let construction = Construction {
                twist: TwistConstruction {
                    n: *n,
                    base: Box::new(base_file),
                },
            };
            let c = w.category();
            Ok(Outcome {
                document: to_value(&CategoryFile::from_category(
                    c,
                    cli.omit_composition,
                    Some(construction),
                )),
                summary: vec![format!(
                    "twist {n}: {} objects, {} basis elements",
                    c.num_objects(),
                    c.total_basis_size()
                )],
                code: EXIT_PASS,
            })
        }
        Command::Cohomology { category, pair } => {
            let c = load(category)?;
            let (x, y) = (object(&c, &pair[0])?, object(&c, &pair[1])?);
            let h = c.hom(x, y);
            let graded = h.to_chain_complex(field)?;
            let cohomology = graded
                .complex
                .cohomology()
                .map_err(|e| CliError::new(ErrorKind::Precondition, e.to_string()))?;
            let mut representatives = BTreeMap::new();
            for (d, members) in &graded.by_degree {
                if let Some(g) = cohomology.group(*d) {
                    let reps: Vec<Vec<(String, String)>> = g
                        .representatives()
                        .iter()
                        .map(|r| {
                            r.entries()
                                .iter()
                                .map(|(p, q)| (h.basis[members[*p]].label.clone(), q.to_string()))
                                .collect()
                        })
                        .collect();
                    if !reps.is_empty() {
                        representatives.insert(*d, reps);
                    }
                }
            }
            let document = json!({
                "command": "cohomology",
                "config": config(cli),
                "input": category.display().to_string(),
                "pair": pair,
                "dims": h.dims(),
                "cohomology": cohomology.dims(),
                "euler_characteristic": h.euler_characteristic(),
                "representatives": representatives,
            });
            Ok(Outcome {
                document,
                summary: vec![format!(
                    "H(hom({},{})) = {:?}",
                    pair[0],
                    pair[1],
                    cohomology.dims()
                )],
                code: EXIT_PASS,
            })
        }
        Command::Theorem3 { n, category } => {
            let base = Arc::new(load(category)?);
            validate_input(&base, "input category")?;
            let w = TwistedCategory::new(*n, base)?;
            let certificate = w.projection()?.quasi_equivalence_certificate(field)?;
            let passed = certificate.quasi_equivalence;
            let failing: Vec<String> = certificate
                .pairs
                .iter()
                .filter(|p| !p.quasi_isomorphism)
                .map(|p| {
                    format!(
                        "  not a quasi-isomorphism on hom({},{})",
                        p.source.0, p.source.1
                    )
                })
                .collect();
            let mut summary = vec![format!(
                "theorem3 {n} {}: {} hom pairs, {}",
                category.display(),
                certificate.pairs.len(),
                if passed { "pass" } else { "FAIL" }
            )];
            summary.extend(failing);
            let document = json!({
                "command": "theorem3",
                "config": config(cli),
                "n": n,
                "input": category.display().to_string(),
                "basis_size": w.category().total_basis_size(),
                "certificate": certificate,
                "verdict": passed,
            });
            Ok(Outcome::verdict(document, passed, summary))
        }
        Command::BarOracle { n, category, pair } => {
            let base = Arc::new(load(category)?);
            validate_input(&base, "input category")?;
            let level = |s: &str| -> Result<usize, CliError> {
                let i: usize = s.parse().map_err(|_| {
                    CliError::new(ErrorKind::Usage, format!("invalid interval object {s:?}"))
                })?;
                if i > *n {
                    return Err(CliError::new(
                        ErrorKind::Usage,
                        format!("interval object {i} exceeds n = {n}"),
                    ));
                }
                Ok(i)
            };
            let (a, b) = (level(&pair[0])?, level(&pair[1])?);
            let (x, y) = (object(&base, &pair[2])?, object(&base, &pair[3])?);
            let oracle = BarOracle::new(base.clone())?;
            let twist = TwistedTensor::new(*n, base)?;
            let comparison = compare_with_twist(&oracle, &twist, (a, x), (b, y), field)?;
            let acyclicity = oracle.acyclicity_report(&oracle.k_complex(a, x, b, y), field)?;
            let passed = comparison.passed() && acyclicity.passed;
            let document = json!({
                "command": "bar-oracle",
                "config": config(cli),
                "n": n,
                "input": category.display().to_string(),
                "pair": pair,
                "comparison": comparison,
                "acyclicity": acyclicity,
                "verdict": passed,
            });
            let summary = vec![format!(
                "bar-oracle {n} ({},{}) -> ({},{}): {} words, {}",
                pair[0],
                pair[2],
                pair[1],
                pair[3],
                comparison.words,
                if passed { "pass" } else { "FAIL" }
            )];
            Ok(Outcome::verdict(document, passed, summary))
        }
        Command::Operad { ordinal } => {
            match check_contractible(ordinal, field, cli.guard_basis, cli.timings) {
                Ok(certificate) => {
                    let passed = certificate.verdict;
                    let summary = vec![format!(
                        "operad {ordinal}: dims {:?}, H {:?}, {}",
                        certificate.dims,
                        certificate.cohomology,
                        if passed { "pass" } else { "FAIL" }
                    )];
                    let document = json!({
                        "command": "operad",
                        "config": config(cli),
                        "certificate": certificate,
                    });
                    Ok(Outcome::verdict(document, passed, summary))
                }
                Err(e @ OperadError::BasisGuard { .. }) => Ok(Outcome::verdict(
                    json!({
                        "command": "operad",
                        "config": config(cli),
                        "ordinal": ordinal,
                        "status": "aborted",
                        "message": e.to_string(),
                    }),
                    false,
                    vec![format!("operad {ordinal}: aborted: {e}")],
                )),
                Err(e) => Err(e.into()),
            }
        }
        Command::Sweep { k, sum } => {
            let start = Instant::now();
            let report = sweep(*k as usize, *sum, field, cli.guard_basis, cli.timings)?;
            let mut summary = vec![format!(
                "{:<16} {:>7} {:>8} {:>12}  status",
                "ordinal", "basis", "chi", "H"
            )];
            for e in &report.entries {
                let status = match e.status {
                    SweepStatus::Pass => "pass",
                    SweepStatus::Fail => "FAIL",
                    SweepStatus::Aborted => "aborted",
                };
                if cli.verbose || e.status != SweepStatus::Pass {
                    summary.push(format!(
                        "{:<16} {:>7} {:>8} {:>12}  {status}",
                        e.ordinal.to_string(),
                        e.dims.values().sum::<usize>(),
                        e.euler_characteristic,
                        format!("{:?}", e.cohomology)
                    ));
                }
            }
            summary.push(format!(
                "sweep k <= {k}, sum <= {sum} over {}: {} passed, {} failed, {} aborted",
                field.name(),
                report.passed,
                report.failed,
                report.aborted
            ));
            if report.aborted > 0 {
                summary.push("aborted ordinals carry no verdict; rerun with smaller bounds or a larger guard".into());
            }
            let mut document = json!({
                "command": "sweep",
                "config": config(cli),
                "report": report,
            });
            if cli.timings {
                document["timings"] = json!({ "millis": start.elapsed().as_millis() });
            }
            Ok(Outcome::verdict(document, report.all_passed, summary))
        }
    }
}

fn write_document(cli: &Cli, document: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(document).expect("reports serialize");
    text.push('\n');
    match &cli.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::new(ErrorKind::Io, format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Runs the command line and returns the exit code.
pub fn run<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(normalize_args(args.into_iter().collect())) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_PASS
            };
        }
    };
    let pool = {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(j) = cli.jobs {
            builder = builder.num_threads(j.max(1));
        }
        match builder.build() {
            Ok(p) => p,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_INPUT;
            }
        }
    };
    let outcome = pool.install(|| execute(&cli));
    let (document, summary, code) = match outcome {
        Ok(o) => (o.document, o.summary, o.code),
        Err(e) => {
            let document = json!({
                "status": "error",
                "error": { "kind": e.kind, "message": e.message },
            });
            (
                document,
                vec![format!(
                    "error ({}): {}",
                    to_value(&e.kind).as_str().unwrap_or(""),
                    e.message
                )],
                EXIT_INPUT,
            )
        }
    };
    if let Err(e) = write_document(&cli, &document) {
        eprintln!("error: {}", e.message);
        return EXIT_INPUT;
    }
    for line in summary {
        eprintln!("{line}");
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<OsString> {
        s.split_whitespace().map(OsString::from).collect()
    }

    #[test]
    fn field_flag_accepts_prime_as_second_word() {
        let cli = Cli::try_parse_from(normalize_args(args("dgtwist --field fp 32003 operad 1,1")))
            .unwrap();
        assert_eq!(cli.field, Field::Fp(32003));
        let cli =
            Cli::try_parse_from(normalize_args(args("dgtwist operad 1,1 --field q"))).unwrap();
        assert_eq!(cli.field, Field::Q);
    }

    #[test]
    fn composite_modulus_is_a_usage_error() {
        assert!(
            Cli::try_parse_from(normalize_args(args("dgtwist --field fp 32004 operad 1,1")))
                .is_err()
        );
    }

    #[test]
    fn operad_golden_document() {
        let cli = Cli::try_parse_from(args("dgtwist operad 1,1")).unwrap();
        let o = execute(&cli).unwrap();
        assert_eq!(o.code, EXIT_PASS);
        assert_eq!(o.document["certificate"]["dims"], json!({"-1": 1, "0": 2}));
        assert_eq!(o.document["certificate"]["verdict"], json!(true));
    }
}
