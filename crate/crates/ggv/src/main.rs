use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ggv_core::check::CheckReport;
use ggv_core::harness::report::{render_jsonl, render_text};
use ggv_core::harness::{
    export_structure, fixture, fixture_names, fixtures, load_structure_file, run_suites, Structure,
    Suite, SuiteOptions,
};
use ggv_core::Error;

/// Numerical certification of generalized complex and generalized Kähler
/// structures on coordinate charts.
#[derive(Parser)]
#[command(name = "ggv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a check suite on a built-in fixture or a structure file.
    Check(CheckArgs),
    /// List the built-in fixtures with their expected verdicts.
    Fixtures,
    /// Parse a structure file and report what it contains.
    ParseCheck { path: PathBuf },
    /// Print a built-in fixture in the structure-file format.
    Export {
        #[arg(long)]
        fixture: String,
    },
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    target: Target,
    #[arg(long, value_parser = parse_suite)]
    suite: Suite,
    #[arg(long, default_value_t = ggv_core::harness::suites::DEFAULT_POINTS)]
    points: usize,
    /// Decimal or `0x`-prefixed hexadecimal.
    #[arg(long, value_parser = parse_seed, default_value = "0x5EEDC0DE")]
    seed: u64,
    #[arg(long, default_value_t = ggv_core::harness::suites::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    report: ReportFormat,
    /// Worker threads for point-parallel evaluation (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Target {
    #[arg(long)]
    fixture: Option<String>,
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Jsonl,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed `{s}`: {e}"))
}

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_)
        | Error::SingularMetric
        | Error::RankDeficient { .. }
        | Error::AlgebraViolation(_)
        | Error::SamplingExhausted { .. } => EXIT_DOMAIN,
        Error::Usage(_)
        | Error::Parse { .. }
        | Error::Format { .. }
        | Error::DimensionMismatch(_)
        | Error::Io(_) => EXIT_USAGE,
    }
}

fn load_target(t: &Target) -> Result<Structure, Error> {
    match (&t.fixture, &t.file) {
        (Some(name), _) => fixture(name).map(|f| f.structure).ok_or_else(|| {
            Error::Usage(format!(
                "unknown fixture `{name}`; available: {}",
                fixture_names().join(", ")
            ))
        }),
        (None, Some(path)) => load_structure_file(path),
        (None, None) => Err(Error::Usage("pass --fixture or --file".into())),
    }
}

/// A failing report whose coverage was lost to pointwise numeric errors
/// counts as a domain failure rather than a check failure.
fn report_code(reports: &[CheckReport]) -> u8 {
    if reports.iter().all(|r| r.verdict.is_pass()) {
        0
    } else if reports
        .iter()
        .any(|r| !r.coverage_ok() && r.first_error.is_some())
    {
        EXIT_DOMAIN
    } else {
        EXIT_FAIL
    }
}

fn check(args: &CheckArgs) -> Result<u8, Error> {
    let structure = load_target(&args.target)?;
    let opts = SuiteOptions {
        points: args.points,
        seed: args.seed,
        tol: args.tol,
    };
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::Usage("--tol must be positive".into()));
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.workers {
        if n == 0 {
            return Err(Error::Usage("--workers must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::Usage(format!("cannot start worker pool: {e}")))?;
    let reports = pool.install(|| run_suites(&structure, args.suite, &opts))?;
    let mut out = String::new();
    for r in &reports {
        out.push_str(&match args.report {
            ReportFormat::Text => render_text(r),
            ReportFormat::Jsonl => render_jsonl(r),
        });
    }
    print!("{out}");
    Ok(report_code(&reports))
}

fn list_fixtures() {
    for f in fixtures() {
        let expectations: Vec<String> = f
            .expectations
            .iter()
            .map(|(s, v)| format!("{s}={v}"))
            .collect();
        println!("{:<24} {}", f.name, f.summary);
        println!("{:<24} expects {}", "", expectations.join(" "));
    }
}

fn parse_check(path: &PathBuf) -> Result<u8, Error> {
    let s = load_structure_file(path)?;
    let mut parts = vec![format!("dim {}", s.dim())];
    for (present, label) in [
        (s.phi.is_some(), "structure"),
        (s.metric.is_some(), "metric"),
        (s.lee.is_some(), "lee"),
        (s.hypersurface.is_some(), "hypersurface"),
    ] {
        if present {
            parts.push(label.to_string());
        }
    }
    println!("ok: {}", parts.join(", "));
    Ok(0)
}

fn export(name: &str) -> Result<u8, Error> {
    let f = fixture(name).ok_or_else(|| Error::Usage(format!("unknown fixture `{name}`")))?;
    println!("# {}: {}", f.name, f.summary);
    print!("{}", export_structure(&f.structure));
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check(args) => check(args),
        Command::Fixtures => {
            list_fixtures();
            Ok(0)
        }
        Command::ParseCheck { path } => parse_check(path),
        Command::Export { fixture } => export(fixture),
    };
    let _ = std::io::stdout().flush();
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}
