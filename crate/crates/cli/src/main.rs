//! Command-line front end. Every subcommand is a thin adapter over the
//! library: enumeration listings, word and tree codecs, flag and
//! decomposition exploration, series arithmetic on JSON files, and the
//! self-check suites.
//!
//! Data goes to stdout and errors to stderr; exit code 1 marks a domain
//! error (valid input outside an operation's domain), 2 a usage error.
//! JSON output is byte-deterministic for fixed inputs and seed.

use std::path::PathBuf;
use std::process::ExitCode;
use std::{fmt, fs};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use planar_lagrange::flags::{
    decomposition_to_flag, encode_flag, enumerate_decompositions, enumerate_flags,
    flag_to_decomposition, Flag,
};
use planar_lagrange::luk::{
    decode_pt, encode_pt, format_nat_word, format_tree_word, parse_nat_word, parse_tree_word,
    NatLetter, TreeLetter, Word,
};
use planar_lagrange::series::{
    compositional_check, solve_inversion_gamma, solve_inversion_iterate,
    solve_inversion_recurrence, TreeSeries,
};
use planar_lagrange::tree::{
    enumerate_prt_with_cap, enumerate_pt_with_cap, enumerate_right_sided_with_cap, parse_tree,
    PlanarTree, TreeFormat, DEFAULT_ENUM_CAP,
};
use planar_lagrange::verify::{run_verify, VerifySuite};

const SIZE_ENV: &str = "PLANAR_LAGRANGE_MAX_SIZE";

#[derive(Parser)]
#[command(
    name = "planar-lagrange",
    version,
    about = "Planar-tree enumeration, Lukasiewicz codecs, flags, and Lagrange inversion"
)]
struct Cli {
    /// Output mode for data on stdout.
    #[arg(long, global = true, value_enum, default_value_t = OutputMode::Text)]
    output: OutputMode,

    /// Raise the enumeration size cap; overrides PLANAR_LAGRANGE_MAX_SIZE.
    #[arg(long, global = true, value_name = "N")]
    unsafe_size: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputMode {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate trees of one size in canonical order.
    Trees {
        #[arg(long, value_enum)]
        kind: TreeKind,
        /// Vertex count for pt, degree (leaf count) for prt and right-sided.
        #[arg(long)]
        size: usize,
        #[arg(long, value_enum, default_value_t = FormatArg::Literal)]
        format: FormatArg,
    },
    /// Lukasiewicz word operations.
    Luk {
        #[command(subcommand)]
        action: LukAction,
    },
    /// List the flags of a right-sided tree with their decomposition partners.
    Flags {
        /// Tree literal, e.g. "(x (x x))".
        tree: String,
    },
    /// List the right-sided decompositions of a tree with their flag partners.
    Decomps {
        /// Tree literal, e.g. "(x (x x))".
        tree: String,
    },
    /// Print the word encoding one flag of a tree (0-based index).
    FlagWord {
        /// Tree literal, e.g. "(x (x x))".
        tree: String,
        /// Index into the `flags` listing for the same tree.
        index: usize,
    },
    /// Tree-series arithmetic on JSON series files.
    Series {
        #[command(subcommand)]
        action: SeriesAction,
    },
    /// Run a self-check suite; nonzero exit if any check fails.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        /// Size bound for trees and series truncation in the checks.
        #[arg(long, default_value_t = 6)]
        max_degree: usize,
        /// Seed for the randomized series checks.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TreeKind {
    /// Planar rooted trees by vertex count.
    Pt,
    /// Reduced trees (no arity-1 vertex) by degree.
    Prt,
    /// Right-sided trees by degree.
    RightSided,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    /// Parseable parenthesized form.
    Literal,
    /// Preorder arity sequence.
    ArityWord,
    /// Graphviz digraph, one graph per tree.
    Dot,
}

impl From<FormatArg> for TreeFormat {
    fn from(f: FormatArg) -> TreeFormat {
        match f {
            FormatArg::Literal => TreeFormat::Literal,
            FormatArg::ArityWord => TreeFormat::ArityWord,
            FormatArg::Dot => TreeFormat::Dot,
        }
    }
}

#[derive(Subcommand)]
enum LukAction {
    /// Report weight, language membership, and product membership.
    Check {
        /// Natural-number word, e.g. "2 0 0".
        #[arg(long)]
        nat: Option<String>,
        /// Tree-letter word, e.g. "x; x; 1" ("1" is the empty tree).
        #[arg(long)]
        tree: Option<String>,
    },
    /// Split a product of Lukasiewicz words into its unique factors.
    Factor {
        #[arg(long)]
        nat: Option<String>,
        #[arg(long)]
        tree: Option<String>,
    },
    /// Height of a Lukasiewicz word.
    Height {
        #[arg(long)]
        nat: Option<String>,
        #[arg(long)]
        tree: Option<String>,
    },
    /// Encode a tree as its preorder arity word.
    EncodeTree {
        /// Tree literal, e.g. "(x (x x))".
        tree: String,
    },
    /// Decode a natural-number Lukasiewicz word back to a tree.
    DecodeWord {
        #[arg(long)]
        nat: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Recurrence,
    Gamma,
    Iterate,
}

#[derive(Subcommand)]
enum SeriesAction {
    /// Solve g = x * f(g) for the series in a file.
    Invert {
        #[arg(long)]
        f: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Recurrence)]
        method: Method,
        /// Re-solve with the other two methods and verify the fixed-point
        /// and compositional identities, failing on any mismatch.
        #[arg(long)]
        check: bool,
        /// Write the result here instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Right reciprocal: mul(f, result) = 1.
    Recip {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Substitute g into f.
    Subst {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Product of two series.
    Mul {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coefficient sums by degree.
    Abelianize {
        #[arg(long)]
        f: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    All,
    Luk,
    Bijections,
    Inversion,
}

impl From<SuiteArg> for VerifySuite {
    fn from(s: SuiteArg) -> VerifySuite {
        match s {
            SuiteArg::All => VerifySuite::All,
            SuiteArg::Luk => VerifySuite::Luk,
            SuiteArg::Bijections => VerifySuite::Bijections,
            SuiteArg::Inversion => VerifySuite::Inversion,
        }
    }
}

enum CliError {
    /// Malformed input, missing files, bad formats: exit 2.
    Usage(String),
    /// Valid input outside an operation's domain, or failed checks: exit 1.
    Domain(String),
}

fn usage(e: impl fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn domain(e: impl fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

/// Dying silently on a closed pipe (`trees ... | head`) beats the default
/// panic in the standard library's print machinery.
fn reset_sigpipe() {
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

fn main() -> ExitCode {
    reset_sigpipe();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Domain(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cap = enumeration_cap(cli.unsafe_size)?;
    let mode = cli.output;
    match cli.command {
        Command::Trees { kind, size, format } => cmd_trees(kind, size, format, cap, mode),
        Command::Luk { action } => cmd_luk(action, mode),
        Command::Flags { tree } => cmd_flags(&tree, cap, mode),
        Command::Decomps { tree } => cmd_decomps(&tree, cap, mode),
        Command::FlagWord { tree, index } => cmd_flag_word(&tree, index, cap, mode),
        Command::Series { action } => cmd_series(action, mode),
        Command::Verify { suite, max_degree, seed } => cmd_verify(suite, max_degree, seed, mode),
    }
}

/// Effective enumeration cap: `--unsafe-size`, then the environment
/// variable, then the library default.
fn enumeration_cap(unsafe_size: Option<usize>) -> Result<usize, CliError> {
    if let Some(n) = unsafe_size {
        return Ok(n);
    }
    match std::env::var(SIZE_ENV) {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SIZE_ENV} is not a size: {text:?}"))),
        Err(_) => Ok(DEFAULT_ENUM_CAP),
    }
}

fn parse_tree_arg(text: &str) -> Result<PlanarTree, CliError> {
    parse_tree(text).map_err(usage)
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("valid json"));
}

fn cmd_trees(
    kind: TreeKind,
    size: usize,
    format: FormatArg,
    cap: usize,
    mode: OutputMode,
) -> Result<(), CliError> {
    let trees = match kind {
        TreeKind::Pt => enumerate_pt_with_cap(size, cap),
        TreeKind::Prt => enumerate_prt_with_cap(size, cap),
        TreeKind::RightSided => enumerate_right_sided_with_cap(size, cap),
    }
    .map_err(domain)?;
    let rendered: Vec<String> = trees
        .iter()
        .map(|t| planar_lagrange::tree::render_tree(t, format.into()))
        .collect();
    match mode {
        OutputMode::Text => {
            println!("count: {}", trees.len());
            for item in &rendered {
                if format == FormatArg::Dot {
                    print!("{item}");
                } else {
                    println!("{item}");
                }
            }
        }
        OutputMode::Json => print_json(&json!({
            "count": rendered.len(),
            "items": rendered,
        })),
    }
    Ok(())
}

/// A word argument in either alphabet; exactly one of `--nat`/`--tree`.
enum EitherWord {
    Nat(Word<NatLetter>),
    Tree(Word<TreeLetter>),
}

fn parse_word_arg(nat: Option<&str>, tree: Option<&str>) -> Result<EitherWord, CliError> {
    match (nat, tree) {
        (Some(text), None) => parse_nat_word(text).map(EitherWord::Nat).map_err(usage),
        (None, Some(text)) => parse_tree_word(text).map(EitherWord::Tree).map_err(usage),
        _ => Err(CliError::Usage(
            "give exactly one of --nat or --tree".to_string(),
        )),
    }
}

fn cmd_luk(action: LukAction, mode: OutputMode) -> Result<(), CliError> {
    match action {
        LukAction::Check { nat, tree } => {
            let word = parse_word_arg(nat.as_deref(), tree.as_deref())?;
            let (delta, luk, product) = match &word {
                EitherWord::Nat(w) => (w.delta(), w.is_luk(), w.is_product_of_luk()),
                EitherWord::Tree(w) => (w.delta(), w.is_luk(), w.is_product_of_luk()),
            };
            match mode {
                OutputMode::Text => {
                    println!("delta: {delta}");
                    println!("luk: {luk}");
                    match product {
                        Some(r) => println!("product_of_luk: {r}"),
                        None => println!("product_of_luk: none"),
                    }
                }
                OutputMode::Json => print_json(&json!({
                    "delta": delta,
                    "luk": luk,
                    "product_of_luk": product,
                })),
            }
            Ok(())
        }
        LukAction::Factor { nat, tree } => {
            let word = parse_word_arg(nat.as_deref(), tree.as_deref())?;
            let parts: Vec<String> = match &word {
                EitherWord::Nat(w) => w
                    .factor()
                    .map_err(domain)?
                    .iter()
                    .map(format_nat_word)
                    .collect(),
                EitherWord::Tree(w) => w
                    .factor()
                    .map_err(domain)?
                    .iter()
                    .map(format_tree_word)
                    .collect(),
            };
            match mode {
                OutputMode::Text => {
                    println!("factors: {}", parts.len());
                    for part in &parts {
                        println!("{part}");
                    }
                }
                OutputMode::Json => print_json(&json!({ "factors": parts })),
            }
            Ok(())
        }
        LukAction::Height { nat, tree } => {
            let word = parse_word_arg(nat.as_deref(), tree.as_deref())?;
            let height = match &word {
                EitherWord::Nat(w) => w.height(),
                EitherWord::Tree(w) => w.height(),
            }
            .map_err(domain)?;
            match mode {
                OutputMode::Text => println!("height: {height}"),
                OutputMode::Json => print_json(&json!({ "height": height })),
            }
            Ok(())
        }
        LukAction::EncodeTree { tree } => {
            let t = parse_tree_arg(&tree)?;
            let word = encode_pt(&t).map_err(domain)?;
            match mode {
                OutputMode::Text => println!("{}", format_nat_word(&word)),
                OutputMode::Json => print_json(&json!({ "word": format_nat_word(&word) })),
            }
            Ok(())
        }
        LukAction::DecodeWord { nat } => {
            let word = parse_nat_word(&nat).map_err(usage)?;
            let t = decode_pt(&word).map_err(domain)?;
            match mode {
                OutputMode::Text => println!("{t}"),
                OutputMode::Json => print_json(&json!({ "tree": t.to_string() })),
            }
            Ok(())
        }
    }
}

/// The enumeration cap bounds the degree of hosts accepted by the flag
/// and decomposition listings.
fn check_host_cap(host: &PlanarTree, cap: usize) -> Result<(), CliError> {
    if host.degree() > cap {
        return Err(CliError::Domain(format!(
            "tree degree {} exceeds the enumeration cap {cap}; raise it with --unsafe-size",
            host.degree()
        )));
    }
    Ok(())
}

fn flags_with_partners(host: &PlanarTree) -> Result<Vec<(Flag, String, serde_json::Value)>, CliError> {
    let flags = enumerate_flags(host).map_err(domain)?;
    let mut rows = Vec::with_capacity(flags.len());
    for flag in flags {
        let word = encode_flag(&flag).map_err(domain)?;
        let partner = flag_to_decomposition(&flag).map_err(domain)?;
        let row = json!({
            "stages": flag.stage_position_strings(),
            "word": format_tree_word(&word),
            "decomposition": partner.piece_position_strings(),
        });
        let text = format!(
            "stages: {flag} | word: {} | pieces: {partner}",
            format_tree_word(&word)
        );
        rows.push((flag, text, row));
    }
    Ok(rows)
}

fn cmd_flags(tree: &str, cap: usize, mode: OutputMode) -> Result<(), CliError> {
    let host = parse_tree_arg(tree)?;
    check_host_cap(&host, cap)?;
    let rows = flags_with_partners(&host)?;
    match mode {
        OutputMode::Text => {
            println!("host: {host}");
            println!("count: {}", rows.len());
            for (i, (_, text, _)) in rows.iter().enumerate() {
                println!("[{i}] {text}");
            }
        }
        OutputMode::Json => {
            let items: Vec<&serde_json::Value> = rows.iter().map(|(_, _, v)| v).collect();
            print_json(&json!({
                "host": host.to_string(),
                "count": items.len(),
                "flags": items,
            }));
        }
    }
    Ok(())
}

fn cmd_decomps(tree: &str, cap: usize, mode: OutputMode) -> Result<(), CliError> {
    let host = parse_tree_arg(tree)?;
    check_host_cap(&host, cap)?;
    let decomps = enumerate_decompositions(&host).map_err(domain)?;
    let mut texts = Vec::new();
    let mut items = Vec::new();
    for q in &decomps {
        let partner = decomposition_to_flag(q).map_err(domain)?;
        let word = encode_flag(&partner).map_err(domain)?;
        texts.push(format!(
            "pieces: {q} | flag: {partner} | word: {}",
            format_tree_word(&word)
        ));
        items.push(json!({
            "pieces": q.piece_position_strings(),
            "flag": partner.stage_position_strings(),
            "word": format_tree_word(&word),
        }));
    }
    match mode {
        OutputMode::Text => {
            println!("host: {host}");
            println!("count: {}", decomps.len());
            for (i, text) in texts.iter().enumerate() {
                println!("[{i}] {text}");
            }
        }
        OutputMode::Json => print_json(&json!({
            "host": host.to_string(),
            "count": items.len(),
            "decompositions": items,
        })),
    }
    Ok(())
}

fn cmd_flag_word(tree: &str, index: usize, cap: usize, mode: OutputMode) -> Result<(), CliError> {
    let host = parse_tree_arg(tree)?;
    check_host_cap(&host, cap)?;
    let flags = enumerate_flags(&host).map_err(domain)?;
    let flag = flags.get(index).ok_or_else(|| {
        CliError::Domain(format!(
            "flag index {index} out of range: {} flags on {host}",
            flags.len()
        ))
    })?;
    let word = encode_flag(flag).map_err(domain)?;
    match mode {
        OutputMode::Text => println!("{}", format_tree_word(&word)),
        OutputMode::Json => print_json(&json!({
            "index": index,
            "stages": flag.stage_position_strings(),
            "word": format_tree_word(&word),
        })),
    }
    Ok(())
}

fn load_series(path: &PathBuf) -> Result<TreeSeries, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    TreeSeries::from_json(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Writes the result to `--out` as canonical JSON, or prints it to stdout
/// in the selected output mode.
fn emit_series(
    series: &TreeSeries,
    out: Option<&PathBuf>,
    mode: OutputMode,
) -> Result<(), CliError> {
    let rendered = series.to_json();
    if let Some(path) = out {
        fs::write(path, rendered.as_bytes())
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        match mode {
            OutputMode::Text => println!("wrote {}", path.display()),
            OutputMode::Json => print_json(&json!({ "wrote": path.display().to_string() })),
        }
        return Ok(());
    }
    match mode {
        OutputMode::Json => println!("{rendered}"),
        OutputMode::Text => {
            println!("max_degree: {}", series.max_degree());
            for (tree, value) in series.iter() {
                println!("{tree}: {value}");
            }
        }
    }
    Ok(())
}

fn solve_with(method: Method, f: &TreeSeries) -> Result<TreeSeries, CliError> {
    match method {
        Method::Recurrence => solve_inversion_recurrence(f),
        Method::Gamma => solve_inversion_gamma(f),
        Method::Iterate => solve_inversion_iterate(f),
    }
    .map_err(domain)
}

fn cmd_series(action: SeriesAction, mode: OutputMode) -> Result<(), CliError> {
    match action {
        SeriesAction::Invert { f, method, check, out } => {
            let f = load_series(&f)?;
            let g = solve_with(method, &f)?;
            if check {
                for other in [Method::Recurrence, Method::Gamma, Method::Iterate] {
                    if other != method && solve_with(other, &f)? != g {
                        return Err(CliError::Domain(
                            "cross-check failed: solver disagreement".to_string(),
                        ));
                    }
                }
                let rebuilt = TreeSeries::x(f.max_degree())
                    .and_then(|x| Ok(x.mul(&f.substitute(&g)?)?))
                    .map_err(domain)?;
                if rebuilt != g {
                    return Err(CliError::Domain(
                        "cross-check failed: fixed-point identity".to_string(),
                    ));
                }
                if !compositional_check(&f, &g).map_err(domain)? {
                    return Err(CliError::Domain(
                        "cross-check failed: compositional identity".to_string(),
                    ));
                }
            }
            emit_series(&g, out.as_ref(), mode)
        }
        SeriesAction::Recip { f, out } => {
            let f = load_series(&f)?;
            let gamma = f.reciprocal().map_err(domain)?;
            emit_series(&gamma, out.as_ref(), mode)
        }
        SeriesAction::Subst { f, g, out } => {
            let f = load_series(&f)?;
            let g = load_series(&g)?;
            let result = f.substitute(&g).map_err(domain)?;
            emit_series(&result, out.as_ref(), mode)
        }
        SeriesAction::Mul { f, g, out } => {
            let f = load_series(&f)?;
            let g = load_series(&g)?;
            let result = f.mul(&g).map_err(domain)?;
            emit_series(&result, out.as_ref(), mode)
        }
        SeriesAction::Abelianize { f } => {
            let f = load_series(&f)?;
            let sums: Vec<String> = f.abelianize().iter().map(|v| v.to_string()).collect();
            match mode {
                OutputMode::Text => println!("[{}]", sums.join(", ")),
                OutputMode::Json => print_json(&json!({ "coefficients": sums })),
            }
            Ok(())
        }
    }
}

fn cmd_verify(
    suite: SuiteArg,
    max_degree: usize,
    seed: u64,
    mode: OutputMode,
) -> Result<(), CliError> {
    let outcomes = run_verify(suite.into(), max_degree, seed);
    let failures = outcomes.iter().filter(|o| !o.passed).count();
    match mode {
        OutputMode::Text => {
            for outcome in &outcomes {
                println!(
                    "{} {}: {}",
                    if outcome.passed { "ok  " } else { "FAIL" },
                    outcome.name,
                    outcome.detail
                );
            }
            println!("{} checks, {failures} failures", outcomes.len());
        }
        OutputMode::Json => {
            let checks: Vec<serde_json::Value> = outcomes
                .iter()
                .map(|o| {
                    json!({
                        "name": o.name,
                        "passed": o.passed,
                        "detail": o.detail,
                    })
                })
                .collect();
            print_json(&json!({
                "max_degree": max_degree,
                "seed": seed,
                "checks": checks,
                "failures": failures,
            }));
        }
    }
    if failures > 0 {
        return Err(CliError::Domain(format!(
            "{failures} verification checks failed"
        )));
    }
    Ok(())
}
