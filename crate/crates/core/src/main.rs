//! Batch front end: catalog generation, amplitude evaluation, descendent
//! tables, Kasteleyn reports, and the verification suites.

use clap::{Args, Parser, Subcommand, ValueEnum};
use openribbon::amplitude::{extract_descendents, total_amplitude, AmplitudeError};
use openribbon::closed::{cached_closed_catalog, string_equation_check};
use openribbon::enumerate::{EnumError, EnumLimits, Signature};
use openribbon::io::{catalog_from_jsonl, catalog_to_jsonl, CatalogCache};
use openribbon::kasteleyn;
use openribbon::nodal::OddCatalogSource;
use openribbon::verify::{
    angular_identity, catalan_identities, open_kdv_check, open_master, string_dilaton_check,
    KdvOptions, Report,
};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "openribbon",
    about = "exact open/closed intersection numbers from trivalent ribbon graph sums",
    version
)]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Directory for persistent catalog caches (or OPENRIBBON_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Output format where a choice exists.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Catalog size cap.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_entries: usize,
    /// Search node cap for the graph generators.
    #[arg(long, global = true, default_value_t = 500_000_000)]
    max_nodes: u64,
    /// Offset into the sample-point sequence for the evaluation route.
    #[arg(long, global = true, default_value_t = 0)]
    seed: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

/// Validated run-wide configuration.
struct RunConfig {
    limits: EnumLimits,
    cache_dir: Option<PathBuf>,
    format: Format,
    seed: usize,
}

impl RunConfig {
    fn from_args(args: &RunArgs) -> Result<Self, String> {
        if args.max_entries == 0 || args.max_nodes == 0 {
            return Err("resource caps must be positive".into());
        }
        let cache_dir = args
            .cache_dir
            .clone()
            .or_else(|| std::env::var_os("OPENRIBBON_CACHE_DIR").map(PathBuf::from));
        Ok(RunConfig {
            limits: EnumLimits {
                max_entries: args.max_entries,
                max_search_nodes: args.max_nodes,
            },
            cache_dir,
            format: args.format,
            seed: args.seed,
        })
    }

    fn source(&self) -> OddCatalogSource {
        match &self.cache_dir {
            Some(dir) => OddCatalogSource::with_cache(self.limits, dir.clone()),
            None => OddCatalogSource::new(self.limits),
        }
    }

    fn cache(&self) -> Option<CatalogCache> {
        self.cache_dir.clone().map(CatalogCache::new)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate a smooth open catalog (g k l), a nodal catalog with --m,
    /// or a closed catalog with --closed g n. Emits JSON lines.
    Enumerate {
        #[arg(num_args = 0..=3)]
        signature: Vec<usize>,
        /// Node count: enumerate the nodal catalog instead.
        #[arg(long)]
        m: Option<usize>,
        /// Closed catalog (g n) instead of an open signature.
        #[arg(long, num_args = 2)]
        closed: Option<Vec<usize>>,
        /// Keep only graphs whose boundary circles all carry an odd number
        /// of marked points.
        #[arg(long)]
        odd: bool,
    },
    /// Reduced total amplitude for an open signature.
    Amplitude { g: usize, k: usize, l: usize },
    /// Open descendent rows for a signature, both extraction routes.
    Descendents { g: usize, k: usize, l: usize },
    /// Per-graph orientation-class report over the odd catalog.
    Kasteleyn { g: usize, k: usize, l: usize },
    /// Identity suites; exit 1 when any instance fails.
    Verify {
        /// string | dilaton | kdv | catalan | angular (default: all)
        #[arg(long)]
        suite: Option<String>,
        /// Dimension budget for the open master table.
        #[arg(long, default_value_t = 4)]
        dim_cap: i64,
    },
    /// Export or re-import catalogs as JSON lines.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// Write the catalog for (g k l) or --closed (g n) to a file.
    Export {
        #[arg(num_args = 0..=3)]
        signature: Vec<usize>,
        #[arg(long, num_args = 2)]
        closed: Option<Vec<usize>>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Read a catalog back, validate every graph, and report counts.
    Import {
        file: PathBuf,
        #[arg(num_args = 0..=3)]
        signature: Vec<usize>,
        #[arg(long, num_args = 2)]
        closed: Option<Vec<usize>>,
    },
}

fn enum_exit(e: &EnumError) -> ExitCode {
    match e {
        EnumError::ResourceCap { .. } => ExitCode::from(EXIT_RESOURCE),
        EnumError::Unstable => ExitCode::from(EXIT_USAGE),
    }
}

fn amp_exit(e: &AmplitudeError) -> ExitCode {
    match e {
        AmplitudeError::Enumeration(inner) => enum_exit(inner),
        AmplitudeError::OutOfScope => ExitCode::from(EXIT_USAGE),
        _ => ExitCode::from(EXIT_VERIFY_FAILED),
    }
}

fn parse_signature(signature: &[usize], closed: &Option<Vec<usize>>) -> Result<Signature, String> {
    match (signature.len(), closed) {
        (0, Some(gn)) => Ok(Signature::Closed { g: gn[0], n: gn[1] }),
        (3, None) => Ok(Signature::Open {
            g: signature[0],
            k: signature[1],
            l: signature[2],
            odd: false,
        }),
        _ => Err("expected either `g k l` or `--closed g n`".into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match RunConfig::from_args(&cli.run) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(cli.command, &config) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(command: Command, config: &RunConfig) -> Result<ExitCode, String> {
    match command {
        Command::Enumerate { signature, m, closed, odd } => {
            let sig = parse_signature(&signature, &closed)?;
            match (sig, m) {
                (Signature::Closed { g, n }, None) => {
                    let cat = cached_closed_catalog(g, n, &config.limits, config.cache().as_ref())
                        .map_err(|e| e.to_string())?;
                    print!("{}", catalog_to_jsonl(&cat));
                    Ok(ExitCode::SUCCESS)
                }
                (Signature::Closed { .. }, Some(_)) => {
                    Err("--m applies only to open signatures".into())
                }
                (Signature::Open { g, k, l, .. }, None) => {
                    let mut source = config.source();
                    let cat = if odd {
                        source.odd(g, k, l).map(|c| c.clone())
                    } else {
                        source.full(g, k, l)
                    };
                    match cat {
                        Ok(c) => {
                            print!("{}", catalog_to_jsonl(&c));
                            Ok(ExitCode::SUCCESS)
                        }
                        Err(e) => {
                            eprintln!("error: {e}");
                            Ok(enum_exit(&e))
                        }
                    }
                }
                (Signature::Open { g, k, l, .. }, Some(m)) => {
                    let mut source = config.source();
                    match openribbon::nodal::enumerate_nodal(g, k, l, m, &mut source, &config.limits)
                    {
                        Ok(cat) => {
                            for e in &cat.entries {
                                let json = openribbon::io::NodalJson::from_nodal(&e.graph);
                                let line = serde_json::json!({ "nodal": json, "aut": e.aut });
                                println!("{line}");
                            }
                            Ok(ExitCode::SUCCESS)
                        }
                        Err(e) => {
                            eprintln!("error: {e}");
                            Ok(enum_exit(&e))
                        }
                    }
                }
            }
        }
        Command::Amplitude { g, k, l } => {
            let mut source = config.source();
            match total_amplitude(g, k, l, &mut source, &config.limits) {
                Ok(b) => {
                    match config.format {
                        Format::Json => {
                            let strata: Vec<_> = b
                                .strata
                                .iter()
                                .map(|s| {
                                    serde_json::json!({
                                        "m": s.m,
                                        "classes": s.classes,
                                        "amplitude": s.amplitude.canonical_string(),
                                    })
                                })
                                .collect();
                            let doc = serde_json::json!({
                                "g": g, "k": k, "l": l,
                                "total": b.total.canonical_string(),
                                "strata": strata,
                            });
                            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
                        }
                        _ => {
                            println!("{}", b.total.canonical_string());
                            for s in &b.strata {
                                println!(
                                    "  m={}: {} classes, {}",
                                    s.m,
                                    s.classes,
                                    s.amplitude.canonical_string()
                                );
                            }
                        }
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(AmplitudeError::OutOfScope) => {
                    println!("out of theorem scope: g+k-1 must be even");
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    Ok(amp_exit(&e))
                }
            }
        }
        Command::Descendents { g, k, l } => {
            let mut source = config.source();
            match total_amplitude(g, k, l, &mut source, &config.limits) {
                Ok(b) => match extract_descendents(&b, config.seed) {
                    Ok(table) => {
                        match config.format {
                            Format::Csv => print!("{}", table.to_csv()),
                            Format::Json => {
                                println!("{}", serde_json::to_string_pretty(&table.rows()).unwrap())
                            }
                            Format::Text => {
                                for row in table.rows() {
                                    let taus: Vec<String> =
                                        row.exponents.iter().map(|a| format!("τ{a}")).collect();
                                    println!(
                                        "<{}σ^{}>_{} = {}",
                                        taus.join(""),
                                        row.k,
                                        row.g,
                                        row.value
                                    );
                                }
                            }
                        }
                        Ok(ExitCode::SUCCESS)
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        Ok(amp_exit(&e))
                    }
                },
                Err(AmplitudeError::OutOfScope) => {
                    println!("out of theorem scope: g+k-1 must be even; table is empty");
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    Ok(amp_exit(&e))
                }
            }
        }
        Command::Kasteleyn { g, k, l } => {
            let mut source = config.source();
            let cat = match source.odd(g, k, l) {
                Ok(c) => c.clone(),
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(enum_exit(&e));
                }
            };
            let mut all_match = true;
            for e in &cat.entries {
                let report = kasteleyn::report(&e.graph).map_err(|e| e.to_string())?;
                all_match &= report.matches;
                println!("{}", serde_json::to_string(&report).unwrap());
            }
            if all_match {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(EXIT_VERIFY_FAILED))
            }
        }
        Command::Verify { suite, dim_cap } => run_verify(suite.as_deref(), dim_cap, config),
        Command::Catalog { action } => match action {
            CatalogAction::Export { signature, closed, out } => {
                let sig = parse_signature(&signature, &closed)?;
                let cat = match sig {
                    Signature::Closed { g, n } => {
                        cached_closed_catalog(g, n, &config.limits, config.cache().as_ref())
                            .map_err(|e| e.to_string())?
                    }
                    Signature::Open { g, k, l, .. } => {
                        config.source().full(g, k, l).map_err(|e| e.to_string())?
                    }
                };
                openribbon::io::write_atomically(&out, &catalog_to_jsonl(&cat))
                    .map_err(|e| e.to_string())?;
                println!("wrote {} graphs", cat.len());
                Ok(ExitCode::SUCCESS)
            }
            CatalogAction::Import { file, signature, closed } => {
                let sig = parse_signature(&signature, &closed)?;
                let text = std::fs::read_to_string(&file).map_err(|e| e.to_string())?;
                let cat = catalog_from_jsonl(sig, &text).map_err(|e| e.to_string())?;
                println!("imported {} graphs, all valid", cat.len());
                Ok(ExitCode::SUCCESS)
            }
        },
    }
}

fn print_report(report: &Report, format: Format) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(report).unwrap()),
        _ => {
            for i in &report.instances {
                println!(
                    "[{}] {}: {}  lhs={} rhs={}",
                    if i.pass { "pass" } else { "FAIL" },
                    report.suite,
                    i.instance,
                    i.lhs,
                    i.rhs
                );
            }
        }
    }
}

fn run_verify(suite: Option<&str>, dim_cap: i64, config: &RunConfig) -> Result<ExitCode, String> {
    let mut reports: Vec<Report> = Vec::new();
    let wants = |name: &str| suite.map_or(true, |s| s == name);
    if wants("catalan") {
        reports.push(catalan_identities(10));
    }
    if wants("angular") {
        for n in 1..=3 {
            reports.push(angular_identity(n));
        }
    }
    if wants("string") || wants("dilaton") || wants("kdv") {
        let mut source = config.source();
        let master = open_master(dim_cap, &mut source, &config.limits, config.seed)
            .map_err(|e| e.to_string())?;
        if wants("string") || wants("dilaton") {
            reports.push(string_dilaton_check(&master));
        }
        if wants("kdv") {
            let mut closed = openribbon::closed::ClosedTable::default();
            let cache = config.cache();
            for gg in 0..=1usize {
                for n in 1..=4usize {
                    if 2 * gg + n <= 2 || 3 * (gg as i64) - 3 + (n as i64) < 0 {
                        continue;
                    }
                    let part = openribbon::closed::extract_closed_cached(
                        gg,
                        n,
                        &config.limits,
                        cache.as_ref(),
                    )
                    .map_err(|e| e.to_string())?;
                    for ((g2, a), v) in part.entries {
                        closed.insert(g2, a, v);
                    }
                }
            }
            let (checked, failures) = string_equation_check(&closed);
            reports.push(Report {
                suite: "closed-string".into(),
                instances: vec![openribbon::verify::Instance {
                    instance: format!("{checked} instances"),
                    lhs: format!("{} failures", failures.len()),
                    rhs: "0 failures".into(),
                    pass: failures.is_empty(),
                }],
            });
            for n in [1usize, 2] {
                reports.push(open_kdv_check(n, &master, &closed, KdvOptions::default(), false));
            }
        }
    }
    let mut all = true;
    for r in &reports {
        print_report(r, config.format);
        all &= r.pass();
    }
    if all {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(EXIT_VERIFY_FAILED))
    }
}
