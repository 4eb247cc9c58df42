//! `pary` — command-line front end over [`pary_core`].
//!
//! Five subcommands: `walsh` (exact spectra), `scheme` (association-scheme
//! verdicts for level-set partitions), `bent` (bentness and regularity),
//! `code` (trace codes from level sets, with closed-form table checks) and
//! `family` (cyclotomic monomial families: prediction and verification).
//!
//! Exit codes: 0 for a positive verdict, 1 for a negative one (not a
//! scheme, not bent, table mismatch), 2 for argument or input errors, 3
//! when a size budget refuses the computation, 4 when an internal
//! cross-check fails (a defect, never a property of the input).

#![forbid(unsafe_code)]

use std::collections::BTreeMap;
use std::fs;
use std::io::IsTerminal;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pary_cli::csv;
use pary_core::func::Coef;
use pary_core::numth::factorize;
use pary_core::walsh::cache::SpectrumCache;
use pary_core::{
    build_code, classify_regularity, criterion_check, decompose, end_to_end, family_new,
    level_partition, mu_level_sums, parse_expr, table_check, two_weight_flag, verify_scheme_bruteforce,
    walsh_fast, walsh_naive, BentProfile, BlockLabel, Cyc, Error, FamilyKind, FamilyParams,
    FamilySpec, FieldCtx, PFunc, Partition, Result, SchemeReport, WalshSpectrum,
};

const EXIT_NEGATIVE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_DEFECT: u8 = 4;

/// Version tag carried by every JSON document; bump on breaking changes to
/// the shapes in `schemas/`.
const SCHEMA_VERSION: u64 = 1;

const DEFAULT_MAX_Q: u64 = 1 << 20;

#[derive(Parser)]
#[command(
    name = "pary",
    version,
    about = "Exact spectral analysis of p-ary functions: Walsh spectra, association schemes, \
             bent functions, two-weight codes and cyclotomic families"
)]
struct Cli {
    /// Output format; defaults to text on a terminal and json when piped.
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,

    /// Directory for cached spectra (the PARY_CACHE_DIR environment
    /// variable overrides this flag).
    #[arg(long, global = true, value_name = "DIR")]
    cache_dir: Option<PathBuf>,

    /// Refuse fields with more than this many elements (exit 3).
    #[arg(long, global = true, value_name = "Q", default_value_t = DEFAULT_MAX_Q)]
    max_q: u64,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

/// Field and function selection shared by the function-driven subcommands.
#[derive(Args)]
struct FuncArgs {
    /// Field, as p^m or p^m/[c0,c1,…,cm] (modulus coefficients, ascending).
    #[arg(long, value_name = "FIELD")]
    field: String,

    /// Function as a trace expression, e.g. "Tr(2*x - x^5)" or
    /// "Tr(g^3*x^2 + x)".
    #[arg(long, value_name = "EXPR", conflicts_with = "table_file")]
    func: Option<String>,

    /// Function as a value-table file: a "p m q" header line, then q
    /// digits (the values at encodings 0…q−1).
    #[arg(long, value_name = "PATH")]
    table_file: Option<PathBuf>,

    /// Evaluate the transform from its definition (quadratic cost; refuses
    /// large fields).
    #[arg(long, conflicts_with = "fast")]
    naive: bool,

    /// Use the factored transform (the default).
    #[arg(long)]
    fast: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact Walsh–Hadamard spectrum, as coefficient vectors over Z[ζ_p].
    Walsh {
        #[command(flatten)]
        func: FuncArgs,
        /// Print the multiset of spectrum values instead of the full table.
        #[arg(long)]
        summary: bool,
    },
    /// Does the level-set partition carry a symmetric association scheme?
    Scheme {
        #[command(flatten)]
        func: FuncArgs,
        /// Also re-derive the verdict from the definitional convolution
        /// counts and print the intersection numbers.
        #[arg(long)]
        verify: bool,
    },
    /// Bentness, (weak) regularity, μ-signs and the dual function.
    Bent {
        #[command(flatten)]
        func: FuncArgs,
    },
    /// Linear trace code defined by a level set of the function.
    Code {
        #[command(flatten)]
        func: FuncArgs,
        /// Which level set D_{f,i} defines the code.
        #[arg(long, value_name = "I")]
        level: u64,
        /// Puncture the origin out of the defining set (D*).
        #[arg(long)]
        star: bool,
        /// Compare n, k and the weight distribution against closed-form
        /// table 1–4 (the function must be a plain monomial Tr(x^d)).
        #[arg(long, value_name = "TABLE", value_parser = clap::value_parser!(u8).range(1..=4))]
        table_check: Option<u8>,
    },
    /// Cyclotomic monomial family: predicted classes, optional end-to-end
    /// verification when the field is small enough to build.
    Family(FamilyArgs),
}

#[derive(Args)]
struct FamilyArgs {
    /// Construction: full-order | half-order | product
    /// (compact aliases: p46, p48, p410).
    #[arg(long, value_name = "KIND")]
    kind: String,

    /// The characteristic p.
    #[arg(long)]
    p: u64,

    /// Prime r with N = r^m (prime-power kinds only).
    #[arg(long)]
    r: Option<u64>,

    /// Exponent m of N = r^m, or the first exponent of the product kind.
    #[arg(long)]
    m: Option<u32>,

    /// First prime of the product kind (N = p1^m · p2^n).
    #[arg(long)]
    p1: Option<u64>,

    /// Second prime of the product kind.
    #[arg(long)]
    p2: Option<u64>,

    /// Second exponent of the product kind.
    #[arg(long)]
    n: Option<u32>,

    /// Materialize the function and verify the predicted scheme.
    #[arg(long)]
    verify: bool,
}

/// One fully rendered command result; `main` picks the representation.
struct Rendered {
    json: Value,
    text: String,
    csv: String,
    exit: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format.unwrap_or_else(|| {
        if std::io::stdout().is_terminal() {
            Format::Text
        } else {
            Format::Json
        }
    });
    match run(&cli) {
        Ok(out) => {
            let body = match format {
                Format::Text => out.text,
                Format::Csv => out.csv,
                Format::Json => {
                    let mut doc = serde_json::to_string_pretty(&out.json)
                        .expect("serializable document");
                    doc.push('\n');
                    doc
                }
            };
            // A reader that stops early (e.g. `pary … | head`) closes the
            // pipe; treat that as a normal end of output.
            use std::io::Write;
            if let Err(e) = std::io::stdout().write_all(body.as_bytes()) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_USAGE);
                }
            }
            ExitCode::from(out.exit)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_for(&err))
        }
    }
}

/// Maps library errors onto the documented exit classes.
fn exit_for(err: &Error) -> u8 {
    match err {
        Error::BudgetExceeded { .. } | Error::FieldTooLarge { .. } => EXIT_BUDGET,
        Error::InternalMismatch { .. }
        | Error::PredictionMismatch { .. }
        | Error::NoCandidateMatch { .. }
        | Error::CacheCorrupt { .. } => EXIT_DEFECT,
        _ => EXIT_USAGE,
    }
}

fn run(cli: &Cli) -> Result<Rendered> {
    let cache = open_cache(cli.cache_dir.as_ref())?;
    match &cli.command {
        Cmd::Walsh { func, summary } => cmd_walsh(func, *summary, cli.max_q, cache.as_ref()),
        Cmd::Scheme { func, verify } => cmd_scheme(func, *verify, cli.max_q, cache.as_ref()),
        Cmd::Bent { func } => cmd_bent(func, cli.max_q, cache.as_ref()),
        Cmd::Code { func, level, star, table_check } => {
            cmd_code(func, *level, *star, *table_check, cli.max_q)
        }
        Cmd::Family(args) => cmd_family(args),
    }
}

/// Opens the spectrum cache named by PARY_CACHE_DIR or --cache-dir (the
/// environment variable wins); no cache when neither is set.
fn open_cache(flag: Option<&PathBuf>) -> Result<Option<SpectrumCache>> {
    let dir = std::env::var_os("PARY_CACHE_DIR")
        .map(PathBuf::from)
        .or_else(|| flag.cloned());
    dir.map(SpectrumCache::new).transpose()
}

/// Resolves a [`FuncArgs`] pair into a live function, enforcing --max-q.
fn load_function(args: &FuncArgs, max_q: u64) -> Result<(Arc<FieldCtx>, PFunc, Value)> {
    let ctx = Arc::new(FieldCtx::from_spec(&args.field)?);
    if ctx.q() > max_q {
        return Err(Error::BudgetExceeded {
            what: "field order (--max-q)",
            size: ctx.q(),
            budget: max_q,
        });
    }
    let (f, source) = match (&args.func, &args.table_file) {
        (Some(expr), None) => {
            let f = parse_expr(expr, &ctx)?.evaluate(&ctx);
            (f, json!({"kind": "expression", "text": expr}))
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path)?;
            let f = PFunc::from_table_str(Arc::clone(&ctx), &text)?;
            (f, json!({"kind": "table", "text": path.display().to_string()}))
        }
        _ => {
            return Err(Error::InvalidArgument {
                reason: "exactly one of --func or --table-file is required".to_string(),
            })
        }
    };
    let mut source = source;
    source["hash"] = Value::String(f.hash_hex());
    Ok((ctx, f, source))
}

/// Cache-aware spectrum: load on hit, otherwise compute and store. A
/// `writer.lock` file in the cache directory keeps writers exclusive;
/// when another process holds it the store is skipped (the spectrum is
/// still returned) rather than risking concurrent writes.
fn spectrum_for(
    f: &PFunc,
    naive: bool,
    cache: Option<&SpectrumCache>,
) -> Result<(WalshSpectrum, &'static str)> {
    if let Some(c) = cache {
        if let Some(spec) = c.load(f.ctx(), &f.hash_hex())? {
            return Ok((spec, "cached"));
        }
    }
    let (spec, how) = if naive {
        (walsh_naive(f)?, "naive")
    } else {
        (walsh_fast(f)?, "fast")
    };
    if let Some(c) = cache {
        let lock = c.dir().join("writer.lock");
        match fs::OpenOptions::new().write(true).create_new(true).open(&lock) {
            Ok(_) => {
                let stored = c.store(&spec).map(|_| ());
                let _ = fs::remove_file(&lock);
                stored?;
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {}
            Err(e) => return Err(Error::from(e)),
        }
    }
    Ok((spec, how))
}

fn envelope(command: &str, field: &str, function: Option<&Value>) -> Value {
    let mut doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "field": field,
    });
    if let Some(src) = function {
        doc["function"] = src.clone();
    }
    doc
}

// ---------------------------------------------------------------------------
// walsh
// ---------------------------------------------------------------------------

fn cmd_walsh(
    args: &FuncArgs,
    summary: bool,
    max_q: u64,
    cache: Option<&SpectrumCache>,
) -> Result<Rendered> {
    let (ctx, f, source) = load_function(args, max_q)?;
    let (spec, transform) = spectrum_for(&f, args.naive, cache)?;
    if !spec.parseval_check() {
        return Err(Error::InternalMismatch {
            what: "computed spectrum violates the Parseval identity".to_string(),
        });
    }

    let mut doc = envelope("walsh", &ctx.spec_string(), Some(&source));
    doc["transform"] = json!(transform);
    doc["summary"] = json!(summary);
    doc["parseval_ok"] = json!(true);
    if summary {
        let mut counts: BTreeMap<&Cyc, u64> = BTreeMap::new();
        for w in spec.values() {
            *counts.entry(w).or_insert(0) += 1;
        }
        doc["spectrum"] = Value::Null;
        doc["values"] = Value::Array(
            counts
                .iter()
                .map(|(w, n)| json!({"value": w, "count": n}))
                .collect(),
        );
    } else {
        doc["spectrum"] = Value::Array(
            spec.values()
                .iter()
                .enumerate()
                .map(|(b, w)| json!({"beta": b as u64, "value": w}))
                .collect(),
        );
        doc["values"] = Value::Null;
    }

    let mut text = format!(
        "field: {}\nfunction: {}\ntransform: {transform}\nparseval: ok\n",
        ctx.spec_string(),
        describe_source(&source),
    );
    if summary {
        let mut counts: BTreeMap<&Cyc, u64> = BTreeMap::new();
        for w in spec.values() {
            *counts.entry(w).or_insert(0) += 1;
        }
        text.push_str("spectrum values (multiset over all beta):\n");
        for (w, n) in counts {
            text.push_str(&format!("  {w} \u{00d7}{n}\n"));
        }
    } else {
        for (b, w) in spec.values().iter().enumerate() {
            text.push_str(&format!("W[{b}] = {w}\n"));
        }
    }

    let csv_rows = spec.values().iter().enumerate().map(|(b, w)| {
        (
            b as u64,
            w.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        )
    });
    let csv = csv::render_walsh(ctx.p(), csv_rows);

    Ok(Rendered { json: doc, text, csv, exit: 0 })
}

fn describe_source(source: &Value) -> String {
    let kind = source["kind"].as_str().unwrap_or("?");
    let text = source["text"].as_str().unwrap_or("?");
    match kind {
        "expression" => text.to_string(),
        _ => format!("table file {text}"),
    }
}

// ---------------------------------------------------------------------------
// scheme
// ---------------------------------------------------------------------------

fn cmd_scheme(
    args: &FuncArgs,
    verify: bool,
    max_q: u64,
    cache: Option<&SpectrumCache>,
) -> Result<Rendered> {
    let (ctx, f, source) = load_function(args, max_q)?;
    let partition = level_partition(&f)?;
    let (spec, _) = spectrum_for(&f, args.naive, cache)?;
    let report = criterion_check(&f, &spec)?;

    let brute = if verify {
        let b = verify_scheme_bruteforce(&partition)?;
        if b.is_scheme != report.is_scheme {
            return Err(Error::InternalMismatch {
                what: format!(
                    "criterion verdict {} disagrees with definitional verdict {}",
                    report.is_scheme, b.is_scheme
                ),
            });
        }
        Some(b)
    } else {
        None
    };

    let mut doc = envelope("scheme", &ctx.spec_string(), Some(&source));
    doc["classes"] = classes_json(&partition);
    doc["report"] = serde_json::to_value(&report).expect("serializable report");
    doc["bruteforce"] = match &brute {
        Some(b) => serde_json::to_value(b).expect("serializable report"),
        None => Value::Null,
    };

    let mut text = format!(
        "field: {}\nfunction: {}\nclasses: {}\n",
        ctx.spec_string(),
        describe_source(&source),
        report.class_count,
    );
    for (label, block) in partition.labels().iter().zip(partition.blocks()) {
        text.push_str(&format!("  {label}: {} elements\n", block.len()));
    }
    text.push_str(&criterion_line(&report));
    if let Some(b) = &brute {
        if b.is_scheme {
            text.push_str("bruteforce: confirmed (symmetric, all convolution counts constant)\n");
        } else {
            text.push_str(&format!("bruteforce: confirmed negative ({:?})\n", b.violation));
        }
        if let Some(tensor) = &b.intersection_numbers {
            text.push_str(&tensor_text(&b.block_labels, tensor));
        }
    }
    text.push_str(if report.is_scheme {
        "verdict: scheme\n"
    } else {
        "verdict: not a scheme\n"
    });

    let csv = csv::render_two_col(
        ("class", "size"),
        partition
            .labels()
            .iter()
            .zip(partition.blocks())
            .map(|(label, block)| (label.to_string(), block.len().to_string())),
    );

    let exit = if report.is_scheme { 0 } else { EXIT_NEGATIVE };
    Ok(Rendered { json: doc, text, csv, exit })
}

fn classes_json(partition: &Partition) -> Value {
    Value::Array(
        partition
            .labels()
            .iter()
            .zip(partition.blocks())
            .map(|(label, block)| json!({"label": label.to_string(), "size": block.len()}))
            .collect(),
    )
}

/// One line naming the criterion's reason, mirroring its definition: the
/// verdict is positive iff |I| = |V-set| and the level sets are symmetric.
fn criterion_line(report: &SchemeReport) -> String {
    let Some(c) = &report.criterion else {
        return String::new();
    };
    if c.image_size != c.vset_size {
        return format!(
            "criterion: V-set size {} \u{2260} |I| = {} \u{2192} not a scheme\n",
            c.vset_size, c.image_size
        );
    }
    match report.symmetry_ok {
        Some(false) => format!(
            "criterion: |I| = |V-set| = {} but the level sets are not symmetric \u{2192} not a scheme\n",
            c.image_size
        ),
        _ => format!(
            "criterion: |I| = |V-set| = {}, level sets symmetric \u{2192} scheme\n",
            c.image_size
        ),
    }
}

fn tensor_text(labels: &[BlockLabel], tensor: &[Vec<Vec<u64>>]) -> String {
    let mut out = String::from("intersection numbers p^k_ij (rows i, columns j):\n");
    for (k, label) in labels.iter().enumerate() {
        out.push_str(&format!("  k = {label}:\n"));
        for row in &tensor[k] {
            let cells: Vec<String> = row.iter().map(u64::to_string).collect();
            out.push_str(&format!("    {}\n", cells.join(" ")));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// bent
// ---------------------------------------------------------------------------

fn cmd_bent(args: &FuncArgs, max_q: u64, cache: Option<&SpectrumCache>) -> Result<Rendered> {
    let (ctx, f, source) = load_function(args, max_q)?;
    let (spec, _) = spectrum_for(&f, args.naive, cache)?;

    let profile = match decompose(&spec, &f) {
        Ok(raw) => Some(classify_regularity(raw)?),
        Err(Error::NotBent) => None,
        Err(e) => return Err(e),
    };

    let mut doc = envelope("bent", &ctx.spec_string(), Some(&source));
    let mut text = format!(
        "field: {}\nfunction: {}\n",
        ctx.spec_string(),
        describe_source(&source)
    );
    let mut csv = String::from("beta,mu,g\n");
    let exit;

    match &profile {
        None => {
            doc["profile"] = json!({"field": ctx.spec_string(), "is_bent": false});
            doc["level_sums"] = Value::Null;
            text.push_str("bent: no\n");
            exit = EXIT_NEGATIVE;
        }
        Some(p) => {
            doc["profile"] = serde_json::to_value(p).expect("serializable profile");
            let sums = if ctx.p() > 2 { Some(mu_level_sums(p)?) } else { None };
            doc["level_sums"] = match &sums {
                Some(s) => serde_json::to_value(s).expect("serializable checks"),
                None => Value::Null,
            };
            text.push_str(&bent_text(p, sums.as_deref()));
            for (beta, (&mu, &g)) in p.mu.iter().zip(p.g.values()).enumerate() {
                csv.push_str(&format!("{beta},{mu},{g}\n"));
            }
            exit = 0;
        }
    }

    Ok(Rendered { json: doc, text, csv, exit })
}

fn bent_text(p: &BentProfile, sums: Option<&[pary_core::bent::LevelSumCheck]>) -> String {
    let mut out = String::from("bent: yes\n");
    if p.weakly_regular {
        let eps = p.epsilon.expect("weakly regular profiles carry epsilon");
        let unit = p.unit.expect("weakly regular profiles carry a unit");
        out.push_str(&format!(
            "weakly regular: yes (\u{03bc} \u{2261} {eps:+}, unit {unit}{})\n",
            if p.regular { ", regular" } else { "" }
        ));
        out.push_str("dual: defined (g is the dual function)\n");
    } else {
        let plus = p.mu.iter().filter(|&&m| m == 1).count();
        let minus = p.mu.len() - plus;
        out.push_str(&format!(
            "weakly regular: no (\u{03bc} takes +1 at {plus} points, \u{2212}1 at {minus})\n"
        ));
    }
    let digits: Vec<String> = p.g.values().iter().map(|v| v.to_string()).collect();
    let sep = if p.g.ctx().p() <= 9 { "" } else { "," };
    out.push_str(&format!("g: {}\n", digits.join(sep)));
    if let Some(checks) = sums {
        let all = checks.iter().all(|c| c.pass);
        out.push_str(&format!(
            "\u{03bc}-mass identities: {}\n",
            if all { "pass" } else { "FAIL" }
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// code
// ---------------------------------------------------------------------------

fn cmd_code(
    args: &FuncArgs,
    level: u64,
    star: bool,
    check_table: Option<u8>,
    max_q: u64,
) -> Result<Rendered> {
    let (ctx, f, source) = load_function(args, max_q)?;
    let set = if star { f.level_set_star(level) } else { f.level_set(level) };
    let code = build_code(&ctx, &set)?;
    let two_weight = two_weight_flag(&code);

    let table_report = match check_table {
        None => None,
        Some(which) => {
            let expr = args.func.as_deref().ok_or_else(|| Error::InvalidArgument {
                reason: "--table-check needs the function as --func \"Tr(x^d)\"".to_string(),
            })?;
            let fam = infer_full_order_family(expr, &ctx)?;
            let report = table_check(&fam, which)?;
            if report.level != level {
                return Err(Error::InvalidArgument {
                    reason: format!(
                        "table {which} describes the level-{} code for these parameters, \
                         but --level {level} was given",
                        report.level
                    ),
                });
            }
            // The report rebuilt the same code independently (from the
            // family's own function, possibly under another modulus); the
            // parameters must agree exactly.
            if report.n != code.n()
                || report.k != code.k()
                || &report.weights != code.weight_distribution()
            {
                return Err(Error::InternalMismatch {
                    what: "table-check code disagrees with the directly built code".to_string(),
                });
            }
            Some(report)
        }
    };

    let mut doc = envelope("code", &ctx.spec_string(), Some(&source));
    doc["level"] = json!(level);
    doc["star"] = json!(star);
    doc["code"] = serde_json::to_value(&code).expect("serializable code");
    doc["table_check"] = match &table_report {
        Some(r) => serde_json::to_value(r).expect("serializable report"),
        None => Value::Null,
    };

    let weights_line = code
        .weight_distribution()
        .iter()
        .map(|(w, n)| format!("{w}:{n}"))
        .collect::<Vec<_>>()
        .join(", ");
    let mut text = format!(
        "field: {}\nfunction: {}\ndefining set: level {level}{} ({} elements)\n\
         code: [{},{}] over F_{}\nweights: {weights_line}\ntwo-weight: {}\n",
        ctx.spec_string(),
        describe_source(&source),
        if star { " (punctured at 0)" } else { "" },
        code.n(),
        code.n(),
        code.k(),
        ctx.p(),
        if two_weight { "yes" } else { "no" },
    );
    let mut exit = 0;
    if let Some(report) = &table_report {
        text.push_str(&format!("table {} check:\n", report.table));
        for cell in &report.cells {
            text.push_str(&format!(
                "  {}: predicted {} vs actual {} {}\n",
                cell.name,
                cell.predicted,
                cell.actual,
                if cell.matches { "ok" } else { "MISMATCH" }
            ));
        }
        if report.all_match {
            text.push_str("verdict: MATCH\n");
        } else {
            text.push_str("verdict: MISMATCH\n");
            exit = EXIT_NEGATIVE;
        }
    }

    let csv = csv::render_two_col(
        ("weight", "frequency"),
        code.weight_distribution()
            .iter()
            .map(|(w, n)| (w.to_string(), n.to_string())),
    );

    Ok(Rendered { json: doc, text, csv, exit })
}

/// Recognizes `Tr(x^d)` with d = (q−1)/r^m and rebuilds the matching
/// full-order family so the closed-form tables can be consulted.
fn infer_full_order_family(expr_src: &str, ctx: &Arc<FieldCtx>) -> Result<FamilySpec> {
    let expr = parse_expr(expr_src, ctx)?;
    let d = match expr.terms() {
        [t] if !t.neg && t.coef == Coef::Int(1) && t.exp > 0 => t.exp,
        _ => {
            return Err(Error::InvalidArgument {
                reason: "--table-check needs a plain monomial Tr(x^d)".to_string(),
            })
        }
    };
    let q = ctx.q();
    if (q - 1) % d != 0 {
        return Err(Error::InvalidArgument {
            reason: format!("exponent {d} does not divide q - 1 = {}", q - 1),
        });
    }
    let n = (q - 1) / d;
    let factors = factorize(n)?;
    let [(r, m)] = factors[..] else {
        return Err(Error::InvalidArgument {
            reason: format!("(q-1)/d = {n} is not a prime power, so no table applies"),
        });
    };
    let fam = family_new(
        FamilyKind::FullOrderPrimePower,
        FamilyParams { p: ctx.p(), r1: r, m1: m, r2: None, m2: None },
    )?;
    if fam.degree != u64::from(ctx.m()) {
        return Err(Error::HypothesisViolated {
            clause: format!(
                "ord_{n}({}) = {} does not match the field degree {}",
                ctx.p(),
                fam.degree,
                ctx.m()
            ),
        });
    }
    Ok(fam)
}

// ---------------------------------------------------------------------------
// family
// ---------------------------------------------------------------------------

fn cmd_family(args: &FamilyArgs) -> Result<Rendered> {
    let kind = parse_kind(&args.kind)?;
    let spec = match kind {
        FamilyKind::FullOrderPrimePower | FamilyKind::HalfOrderPrimePower => {
            if args.p1.is_some() || args.p2.is_some() || args.n.is_some() {
                return Err(Error::InvalidArgument {
                    reason: "--p1/--p2/--n belong to the product kind; use --r and --m".to_string(),
                });
            }
            let r = require(args.r, "--r")?;
            let m = require(args.m, "--m")?;
            family_new(kind, FamilyParams { p: args.p, r1: r, m1: m, r2: None, m2: None })?
        }
        FamilyKind::CommonRootProduct => {
            if args.r.is_some() {
                return Err(Error::InvalidArgument {
                    reason: "--r belongs to the prime-power kinds; use --p1/--p2/--m/--n"
                        .to_string(),
                });
            }
            let p1 = require(args.p1, "--p1")?;
            let p2 = require(args.p2, "--p2")?;
            let m = require(args.m, "--m")?;
            let n = require(args.n, "--n")?;
            family_new(
                kind,
                FamilyParams { p: args.p, r1: p1, m1: m, r2: Some(p2), m2: Some(n) },
            )?
        }
    };

    let verified = if args.verify { Some(end_to_end(&spec)?) } else { None };

    let mut doc = envelope("family", &format!("{}^{}", spec.p, spec.degree), None);
    doc["spec"] = serde_json::to_value(&spec).expect("serializable family");
    doc["verified"] = match &verified {
        Some(rep) => serde_json::to_value(rep).expect("serializable report"),
        None => Value::Null,
    };

    let mut text = format!(
        "family: {} (p = {}, N = {})\ndegree: {} \u{2192} q = {}^{} = {}\nexponent: d = {}\n",
        spec.kind, spec.p, spec.n_divisor, spec.degree, spec.p, spec.degree, spec.q, spec.d,
    );
    text.push_str("predicted image (value: frequency):\n");
    for (value, freq) in &spec.image {
        text.push_str(&format!("  {value}: {freq}\n"));
    }
    text.push_str(&format!("predicted classes: {}\n", spec.class_count));
    text.push_str(&format!(
        "materializable: {}\n",
        if spec.materializable { "yes" } else { "no" }
    ));
    let mut exit = 0;
    if let Some(rep) = &verified {
        if rep.is_scheme {
            text.push_str(&format!(
                "verified: scheme with {} classes (criterion and definitional check agree)\n",
                rep.class_count
            ));
        } else {
            text.push_str("verified: not a scheme\n");
            exit = EXIT_NEGATIVE;
        }
    }

    let csv = csv::render_two_col(
        ("value", "frequency"),
        spec.image.iter().map(|(v, n)| (v.to_string(), n.to_string())),
    );

    Ok(Rendered { json: doc, text, csv, exit })
}

fn parse_kind(token: &str) -> Result<FamilyKind> {
    match token.to_ascii_lowercase().as_str() {
        "full-order" | "full-order-prime-power" | "full" | "p46" => {
            Ok(FamilyKind::FullOrderPrimePower)
        }
        "half-order" | "half-order-prime-power" | "half" | "p48" => {
            Ok(FamilyKind::HalfOrderPrimePower)
        }
        "product" | "common-root-product" | "p410" => Ok(FamilyKind::CommonRootProduct),
        other => Err(Error::InvalidArgument {
            reason: format!(
                "unknown family kind {other:?} (expected full-order, half-order or product)"
            ),
        }),
    }
}

fn require<T: Copy>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidArgument {
        reason: format!("{flag} is required for this family kind"),
    })
}
