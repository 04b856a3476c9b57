//! Command-line front end: construct products, decide regularity by brute
//! force, run the criteria checkers, and sweep catalog pairs into reports.
//!
//! Exit codes: 0 = success (a verdict, even a negative one, is success);
//! 1 = a requested check found a violation or a disagreement (reports are
//! still written); 2 = input or cap error.

use clap::{Parser, Subcommand, ValueEnum};
use monoidkit::catalog::{enumerate_monoids, named, roster, CatalogEntry, CatalogError};
use monoidkit::formats::{
    pair_sidecar, parse_act, parse_mon, schutz_sidecar, variant_sidecar, write_mon, ActError,
    MonError,
};
use monoidkit::monoid::{FiniteMonoid, RegularityVerdict};
use monoidkit::products::{direct_product, semidirect_product, wreath_product, ProductError};
use monoidkit::schutz::SchutzProduct;
use monoidkit::theorems::{
    classic_criterion, compare_regularity, variant_criterion, CompareError, CriterionReport,
    ProductKind, RegularityReport,
};
use monoidkit::variant::VariantProduct;
use monoidkit::{DEFAULT_SEED, MAX_ORACLE_ORDER};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use thiserror::Error;

#[derive(Parser)]
#[command(name = "monoidkit", version, about = "Finite monoid workbench")]
struct Cli {
    /// Carrier-size cap for constructions and the brute-force oracle.
    #[arg(long, global = true, default_value_t = MAX_ORACLE_ORDER)]
    cap: usize,

    /// Seed for sampled associativity checks on large products.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Output style for verdict-producing commands.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Direct,
    Semidirect,
    Wreath,
    Schutz,
    Variant,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepKind {
    Schutz,
    Variant,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a .mon file.
    Validate { file: PathBuf },

    /// Order, identity, idempotents, regularity, and inverse sets.
    Info {
        /// A .mon path or a catalog spec such as `zn:3`.
        monoid: String,
    },

    /// Build a product and write its table plus a decoding sidecar.
    Product {
        #[arg(long, value_enum)]
        kind: KindArg,

        /// Endomorphism action file (.act), required for semidirect.
        #[arg(long)]
        action: Option<PathBuf>,

        /// Output .mon path; the sidecar lands at `<out>.decode`.
        #[arg(short, long)]
        out: PathBuf,

        /// Factor monoids as `A=<spec-or-path>` and `B=<spec-or-path>`.
        operands: Vec<String>,
    },

    /// Brute-force regularity verdict with witness.
    Regular {
        /// Check a product of A and B instead of a single monoid.
        #[arg(long, value_enum)]
        product: Option<KindArg>,

        /// Action file when `--product semidirect`.
        #[arg(long)]
        action: Option<PathBuf>,

        /// A single monoid, or `A=...` and `B=...` with --product.
        operands: Vec<String>,
    },

    /// Decide a regularity criterion with its condition breakdown.
    Theorem {
        /// 1 = the A ◇ B criterion, 2 = the A ◇v B criterion.
        #[arg(long)]
        which: u8,

        operands: Vec<String>,
    },

    /// Compare oracle and criterion over all catalog pairs up to an order.
    Sweep {
        #[arg(long)]
        max_order: usize,

        #[arg(long, value_enum, default_value_t = SweepKind::Both)]
        kind: SweepKind,

        /// Directory for per-instance reports and the summary.
        #[arg(long, default_value = "sweep-out")]
        out: PathBuf,

        /// Concurrent instances; defaults to the available parallelism.
        #[arg(long)]
        jobs: Option<usize>,
    },

    /// List or export the named and enumerated monoids.
    Catalog {
        /// Also include all monoids of this order (1..=4).
        #[arg(long)]
        enumerate: Option<usize>,

        /// Filter the enumeration to isomorphism-class representatives.
        #[arg(long)]
        up_to_iso: bool,

        /// Write .mon files plus an index instead of listing.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Mon { path: PathBuf, source: MonError },
    #[error("{path}: {source}")]
    Act { path: PathBuf, source: ActError },
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Product(#[from] ProductError),
    #[error(transparent)]
    Compare(#[from] CompareError),
    #[error("{0}")]
    Usage(String),
}

/// Verdict-level outcome of a command; errors travel separately.
enum Outcome {
    Clean,
    Violation,
}

fn main() {
    // Die quietly when a pipe reader goes away instead of panicking.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(Outcome::Clean) => 0,
        Ok(Outcome::Violation) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Validate { ref file } => cmd_validate(file),
        Command::Info { ref monoid } => cmd_info(monoid, cli.format),
        Command::Product {
            kind,
            ref action,
            ref out,
            ref operands,
        } => cmd_product(kind, action.as_deref(), out, operands, cli.cap),
        Command::Regular {
            product,
            ref action,
            ref operands,
        } => cmd_regular(product, action.as_deref(), operands, cli.cap, cli.format),
        Command::Theorem { which, ref operands } => cmd_theorem(which, operands, cli.format),
        Command::Sweep {
            max_order,
            kind,
            ref out,
            jobs,
        } => cmd_sweep(max_order, kind, out, jobs, cli.cap, cli.seed),
        Command::Catalog {
            enumerate,
            up_to_iso,
            ref emit,
        } => cmd_catalog(enumerate, up_to_iso, emit.as_deref()),
    }
}

// ---------------------------------------------------------------------------
// argument plumbing
// ---------------------------------------------------------------------------

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Atomic write: temp file in the target directory, then rename.
fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    let wrap = |source: std::io::Error| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(wrap)?;
        }
    }
    let tmp = path.with_extension(format!(
        "{}.tmp{}",
        path.extension().and_then(|e| e.to_str()).unwrap_or(""),
        std::process::id()
    ));
    std::fs::write(&tmp, contents).map_err(wrap)?;
    std::fs::rename(&tmp, path).map_err(wrap)?;
    Ok(())
}

/// A monoid argument is either a path (contains a separator or ends with
/// `.mon`) or a catalog spec.
fn resolve_monoid(arg: &str) -> Result<FiniteMonoid, CliError> {
    let looks_like_path =
        arg.contains('/') || arg.contains(std::path::MAIN_SEPARATOR) || arg.ends_with(".mon");
    if looks_like_path {
        let path = PathBuf::from(arg);
        let text = read_file(&path)?;
        let label = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("monoid")
            .to_string();
        parse_mon(&text, label).map_err(|source| CliError::Mon { path, source })
    } else {
        Ok(named(arg)?)
    }
}

fn find_operand<'a>(operands: &'a [String], key: &str) -> Option<&'a str> {
    operands
        .iter()
        .find_map(|o| o.strip_prefix(key))
}

fn resolve_pair(operands: &[String]) -> Result<(FiniteMonoid, FiniteMonoid), CliError> {
    let a = find_operand(operands, "A=")
        .ok_or_else(|| CliError::Usage("missing operand A=<spec-or-path>".to_string()))?;
    let b = find_operand(operands, "B=")
        .ok_or_else(|| CliError::Usage("missing operand B=<spec-or-path>".to_string()))?;
    Ok((resolve_monoid(a)?, resolve_monoid(b)?))
}

// ---------------------------------------------------------------------------
// commands
// ---------------------------------------------------------------------------

fn cmd_validate(file: &Path) -> Result<Outcome, CliError> {
    let text = read_file(file)?;
    let label = file
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("monoid")
        .to_string();
    match parse_mon(&text, label) {
        Ok(m) => {
            println!(
                "ok: {} — order {}, identity {}",
                m.label(),
                m.order(),
                m.identity_index()
            );
            Ok(Outcome::Clean)
        }
        Err(MonError::Table { line, source }) => {
            match line {
                Some(l) => println!("invalid (line {l}): {source}"),
                None => println!("invalid: {source}"),
            }
            Ok(Outcome::Violation)
        }
        Err(e @ MonError::Syntax { .. }) => Err(CliError::Mon {
            path: file.to_path_buf(),
            source: e,
        }),
    }
}

fn cmd_info(arg: &str, format: Format) -> Result<Outcome, CliError> {
    let m = resolve_monoid(arg)?;
    let verdict = m.is_regular();
    let idempotents: Vec<usize> = m.idempotents().iter().map(|e| e.index()).collect();
    let inverse_sets: Vec<Vec<usize>> = m
        .elems()
        .map(|a| {
            m.inverse_set(a)
                .unwrap()
                .inverses
                .iter()
                .map(|e| e.index())
                .collect()
        })
        .collect();
    if format == Format::Json {
        let doc = serde_json::json!({
            "label": m.label(),
            "order": m.order(),
            "identity": m.identity_index(),
            "idempotents": idempotents,
            "regular": verdict.is_regular(),
            "witness": match &verdict {
                RegularityVerdict::Regular => serde_json::Value::Null,
                RegularityVerdict::NonRegular { witness } => serde_json::json!(witness),
            },
            "inverse_sets": inverse_sets,
        });
        println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        return Ok(Outcome::Clean);
    }
    println!("label:       {}", m.label());
    println!("order:       {}", m.order());
    println!("identity:    {}", m.identity_index());
    println!(
        "idempotents: {}",
        idempotents
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    );
    match verdict {
        RegularityVerdict::Regular => println!("regular:     yes"),
        RegularityVerdict::NonRegular { witness } => {
            println!("regular:     no (witness element {witness})")
        }
    }
    println!("inverse sets:");
    for (i, inv) in inverse_sets.iter().enumerate() {
        let body = if inv.is_empty() {
            "∅".to_string()
        } else {
            inv.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(" ")
        };
        println!("  {i}: {{{body}}}");
    }
    Ok(Outcome::Clean)
}

fn build_product(
    kind: KindArg,
    a: &FiniteMonoid,
    b: &FiniteMonoid,
    action: Option<&Path>,
    cap: usize,
) -> Result<(FiniteMonoid, String), CliError> {
    match kind {
        KindArg::Direct => {
            let m = direct_product(a, b, cap)?;
            let sidecar = pair_sidecar(m.order(), b.order());
            Ok((m, sidecar))
        }
        KindArg::Semidirect => {
            let path = action.ok_or_else(|| {
                CliError::Usage("--kind semidirect needs --action <file.act>".to_string())
            })?;
            let text = read_file(path)?;
            let act = parse_act(&text, a, b).map_err(|source| CliError::Act {
                path: path.to_path_buf(),
                source,
            })?;
            let m = semidirect_product(a, b, &act, cap)?;
            let sidecar = pair_sidecar(m.order(), b.order());
            Ok((m, sidecar))
        }
        KindArg::Wreath => {
            let m = wreath_product(a, b, cap)?;
            let sidecar = pair_sidecar(m.order(), b.order());
            Ok((m, sidecar))
        }
        KindArg::Schutz => {
            let prod = SchutzProduct::new(a, b, cap)?;
            let m = prod.materialize().map_err(|e| match e {
                monoidkit::schutz::SchutzError::Product(p) => CliError::Product(p),
                monoidkit::schutz::SchutzError::Table(t) => {
                    CliError::Product(ProductError::Table(t))
                }
                monoidkit::schutz::SchutzError::MixedParents => unreachable!(),
            })?;
            Ok((m, schutz_sidecar(&prod)))
        }
        KindArg::Variant => {
            let prod = VariantProduct::new(a, b, cap)?;
            let m = prod.materialize().map_err(|e| match e {
                monoidkit::variant::VariantError::Product(p) => CliError::Product(p),
                monoidkit::variant::VariantError::Table(t) => {
                    CliError::Product(ProductError::Table(t))
                }
                monoidkit::variant::VariantError::MixedParents => unreachable!(),
            })?;
            Ok((m, variant_sidecar(&prod)))
        }
    }
}

fn cmd_product(
    kind: KindArg,
    action: Option<&Path>,
    out: &Path,
    operands: &[String],
    cap: usize,
) -> Result<Outcome, CliError> {
    let (a, b) = resolve_pair(operands)?;
    let (m, sidecar) = build_product(kind, &a, &b, action, cap)?;
    write_file(out, &write_mon(&m))?;
    let decode_path = PathBuf::from(format!("{}.decode", out.display()));
    write_file(&decode_path, &sidecar)?;
    println!(
        "wrote {} (order {}) and {}",
        out.display(),
        m.order(),
        decode_path.display()
    );
    Ok(Outcome::Clean)
}

fn cmd_regular(
    product: Option<KindArg>,
    action: Option<&Path>,
    operands: &[String],
    cap: usize,
    format: Format,
) -> Result<Outcome, CliError> {
    let (verdict, witness_text, json_witness) = match product {
        None => {
            let arg = operands
                .first()
                .ok_or_else(|| CliError::Usage("missing monoid operand".to_string()))?;
            let m = resolve_monoid(arg)?;
            let v = m.is_regular();
            let (text, json) = match &v {
                RegularityVerdict::Regular => (String::new(), serde_json::Value::Null),
                RegularityVerdict::NonRegular { witness } => (
                    format!(" (witness element {witness})"),
                    serde_json::json!({ "index": witness }),
                ),
            };
            (v, text, json)
        }
        Some(kind) => {
            let (a, b) = resolve_pair(operands)?;
            match kind {
                KindArg::Schutz => {
                    let prod = SchutzProduct::new(&a, &b, cap)?;
                    let v = monoidkit::monoid::regularity_scan(&prod, |_, _| {});
                    let (text, json) = match &v {
                        RegularityVerdict::Regular => (String::new(), serde_json::Value::Null),
                        RegularityVerdict::NonRegular { witness } => {
                            let e = prod.decode(*witness);
                            (
                                format!(
                                    " (witness index {}: a={}, P={:?}, b={})",
                                    witness,
                                    e.a,
                                    prod.pairs_of(e.p),
                                    e.b
                                ),
                                serde_json::json!({
                                    "index": witness,
                                    "a": e.a,
                                    "p": prod.pairs_of(e.p),
                                    "b": e.b,
                                }),
                            )
                        }
                    };
                    (v, text, json)
                }
                KindArg::Variant => {
                    let prod = VariantProduct::new(&a, &b, cap)?;
                    let v = monoidkit::monoid::regularity_scan(&prod, |_, _| {});
                    let (text, json) = match &v {
                        RegularityVerdict::Regular => (String::new(), serde_json::Value::Null),
                        RegularityVerdict::NonRegular { witness } => {
                            let e = prod.decode(*witness);
                            (
                                format!(
                                    " (witness index {}: f={:?}, P={:?}, b={})",
                                    witness,
                                    prod.fnfin_of(e.f).values,
                                    prod.pairs_of(e.p),
                                    e.b
                                ),
                                serde_json::json!({
                                    "index": witness,
                                    "f": prod.fnfin_of(e.f).values,
                                    "p": prod.pairs_of(e.p),
                                    "b": e.b,
                                }),
                            )
                        }
                    };
                    (v, text, json)
                }
                other => {
                    let (m, _) = build_product(other, &a, &b, action, cap)?;
                    let v = m.is_regular();
                    let (text, json) = match &v {
                        RegularityVerdict::Regular => (String::new(), serde_json::Value::Null),
                        RegularityVerdict::NonRegular { witness } => (
                            format!(" (witness element {witness})"),
                            serde_json::json!({ "index": witness }),
                        ),
                    };
                    (v, text, json)
                }
            }
        }
    };
    if format == Format::Json {
        let doc = serde_json::json!({
            "verdict": if verdict.is_regular() { "regular" } else { "non_regular" },
            "witness": json_witness,
        });
        println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    } else if verdict.is_regular() {
        println!("regular");
    } else {
        println!("non-regular{witness_text}");
    }
    Ok(Outcome::Clean)
}

fn print_criterion(report: &CriterionReport, format: Format) {
    if format == Format::Json {
        let doc = serde_json::json!({
            "verdict": report.verdict,
            "reduced_mode": report.reduced_mode,
            "conditions": report.conditions,
        });
        println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        return;
    }
    println!("verdict: {}", report.verdict);
    for c in &report.conditions {
        match &c.witness {
            None => println!("  {}: holds", c.id),
            Some(w) => println!(
                "  {}: fails  witness {}",
                c.id,
                serde_json::to_string(w).unwrap()
            ),
        }
    }
    if report.reduced_mode {
        println!("  (set condition decided in reduced mode)");
    }
}

fn cmd_theorem(which: u8, operands: &[String], format: Format) -> Result<Outcome, CliError> {
    let (a, b) = resolve_pair(operands)?;
    let report = match which {
        1 => classic_criterion(&a, &b)?,
        2 => variant_criterion(&a, &b)?,
        other => {
            return Err(CliError::Usage(format!(
                "--which must be 1 or 2, got {other}"
            )))
        }
    };
    print_criterion(&report, format);
    Ok(Outcome::Clean)
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '-' })
        .collect()
}

fn cmd_sweep(
    max_order: usize,
    kind: SweepKind,
    out: &Path,
    jobs: Option<usize>,
    cap: usize,
    seed: u64,
) -> Result<Outcome, CliError> {
    let selection: Vec<CatalogEntry> = roster()
        .into_iter()
        .filter(|e| e.monoid.order() <= max_order)
        .collect();
    if selection.is_empty() {
        return Err(CliError::Usage(format!(
            "no catalog monoid has order <= {max_order}"
        )));
    }
    let kinds: &[ProductKind] = match kind {
        SweepKind::Schutz => &[ProductKind::Schutz],
        SweepKind::Variant => &[ProductKind::Variant],
        SweepKind::Both => &[ProductKind::Schutz, ProductKind::Variant],
    };
    let mut tasks = Vec::new();
    for k in kinds {
        for ea in &selection {
            for eb in &selection {
                tasks.push((*k, ea, eb));
            }
        }
    }

    let jobs = jobs
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|p| p.get())
                .unwrap_or(1)
        })
        .max(1);
    let next = AtomicUsize::new(0);
    let results: Vec<Mutex<Option<Result<RegularityReport, CompareError>>>> =
        tasks.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(tasks.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= tasks.len() {
                    break;
                }
                let (k, ea, eb) = &tasks[i];
                let report = compare_regularity(&ea.monoid, &eb.monoid, *k, cap, seed);
                *results[i].lock().unwrap() = Some(report);
            });
        }
    });

    let mut summary = String::new();
    let mut violation = false;
    let mut first_error: Option<CliError> = None;
    for (i, slot) in results.iter().enumerate() {
        let (k, ea, eb) = &tasks[i];
        match slot.lock().unwrap().take().expect("worker filled every slot") {
            Ok(report) => {
                let file = out.join(format!(
                    "{}__{}__{}.json",
                    sanitize(&ea.name),
                    sanitize(&eb.name),
                    k.as_str()
                ));
                write_file(&file, &report.to_json())?;
                let agree = match report.agree {
                    Some(true) => "true",
                    Some(false) => {
                        violation = true;
                        "false"
                    }
                    None => "na",
                };
                let line = format!(
                    "{},{},{},{},{},{},{}",
                    ea.name,
                    eb.name,
                    report.kind,
                    report.order,
                    report.brute_verdict_str(),
                    report.verdict,
                    agree
                );
                println!("{line}");
                summary.push_str(&line);
                summary.push('\n');
            }
            Err(e) => {
                let line = format!("{},{},{},error,error,error,error", ea.name, eb.name, k.as_str());
                println!("{line}");
                summary.push_str(&line);
                summary.push('\n');
                if first_error.is_none() {
                    first_error = Some(e.into());
                }
            }
        }
    }
    write_file(&out.join("summary.txt"), &summary)?;
    if let Some(e) = first_error {
        return Err(e);
    }
    Ok(if violation {
        Outcome::Violation
    } else {
        Outcome::Clean
    })
}

fn cmd_catalog(
    enumerate: Option<usize>,
    up_to_iso: bool,
    emit: Option<&Path>,
) -> Result<Outcome, CliError> {
    let mut entries = roster();
    if let Some(n) = enumerate {
        for m in enumerate_monoids(n, up_to_iso)? {
            entries.push(CatalogEntry::new(m));
        }
    }
    match emit {
        None => {
            println!(
                "{:<24} {:>5}  {:>7}  {:>5}  {:>11}  {:>11}",
                "name", "order", "regular", "group", "commutative", "idempotents"
            );
            for e in &entries {
                println!(
                    "{:<24} {:>5}  {:>7}  {:>5}  {:>11}  {:>11}",
                    e.name, e.monoid.order(), e.regular, e.group, e.commutative, e.idempotent_count
                );
            }
        }
        Some(dir) => {
            let mut index = String::new();
            for e in &entries {
                let file = dir.join(format!("{}.mon", sanitize(&e.name)));
                write_file(&file, &write_mon(&e.monoid))?;
                index.push_str(&format!("{} {} {}\n", e.name, e.monoid.order(), e.regular));
            }
            write_file(&dir.join("index.txt"), &index)?;
            println!("wrote {} entries to {}", entries.len(), dir.display());
        }
    }
    Ok(Outcome::Clean)
}
