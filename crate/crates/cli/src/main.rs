//! Command-line front end: run verification suites and render reports.
//!
//! Exit codes: 0 when every check passes, 1 when some check fails,
//! 2 when a fixture or configuration is invalid.

use clap::{Args, Parser, Subcommand, ValueEnum};
use ks_core::fixture;
use ks_core::report::VerificationReport;
use ks_core::suite::{run_suite, LocalSide, RunOptions, Selection};
use std::path::PathBuf;
use std::process::ExitCode;

const DIGITS_ENV: &str = "KS_VERIFY_DIGITS";

#[derive(Parser)]
#[command(
    name = "ks-verify",
    version,
    about = "Verify period-lattice, Riemann-form and metric identities exactly or against stated tolerances"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a verification suite and emit a report.
    Verify {
        #[command(subcommand)]
        suite: SuiteCmd,
    },
    /// Render a previously saved JSON report.
    Report {
        /// Path of the report to read.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    /// Seed of the deterministic sample streams.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Embedding precision in decimal digits (default from KS_VERIFY_DIGITS
    /// or 40).
    #[arg(long)]
    digits: Option<u32>,
    /// Sample count per sweep check.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand)]
enum SuiteCmd {
    /// Metric comparison over the Siegel family.
    Siegel {
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, default_value_t = 1)]
        g: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Quaternionic period lattices from a fixture.
    Twisted {
        /// Built-in fixture name (split-q, division-q, real-quadratic) or a
        /// path to a fixture JSON file.
        #[arg(long)]
        fixture: String,
        #[command(flatten)]
        common: Common,
    },
    /// Good/bad-prime module lemmas over truncated local rings.
    Local {
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        k: u32,
        /// Run only the good-prime case.
        #[arg(long, conflicts_with = "bad")]
        good: bool,
        /// Run only the bad-prime case.
        #[arg(long)]
        bad: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Antilinear-part identity of Riemann-form slices.
    LemmaApp {
        #[command(flatten)]
        common: Common,
    },
    /// Exact symmetry pattern of the period pairing.
    KsPairing {
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Cocycle identities on admissible torus covers.
    Cech {
        #[arg(long, default_value_t = 3)]
        grid: i64,
        #[command(flatten)]
        common: Common,
    },
    /// Everything, at the default parameter grid.
    All {
        #[command(flatten)]
        common: Common,
    },
}

fn default_digits() -> u32 {
    std::env::var(DIGITS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(ks_core::number_field::DEFAULT_DIGITS)
}

fn resolve_fixture(arg: &str) -> Result<Selection, String> {
    if fixture::builtin_source(arg).is_some() {
        return Ok(Selection::TwistedBuiltin { name: arg.to_string() });
    }
    let source = std::fs::read_to_string(arg)
        .map_err(|e| format!("cannot read fixture {arg:?}: {e}"))?;
    Ok(Selection::TwistedSource { source })
}

fn run_verify(suite: SuiteCmd) -> ExitCode {
    let (selections, common) = match suite {
        SuiteCmd::Siegel { r, g, common } => (vec![Selection::Siegel { r, g }], common),
        SuiteCmd::Twisted { fixture, common } => match resolve_fixture(&fixture) {
            Ok(sel) => (vec![sel], common),
            Err(msg) => {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
        },
        SuiteCmd::Local { p, k, good, bad, common } => {
            let side = match (good, bad) {
                (true, false) => LocalSide::Good,
                (false, true) => LocalSide::Bad,
                _ => LocalSide::Both,
            };
            (vec![Selection::Local { p, k, side }], common)
        }
        SuiteCmd::LemmaApp { common } => (vec![Selection::LemmaApp], common),
        SuiteCmd::KsPairing { r, common } => (vec![Selection::KsPairing { r }], common),
        SuiteCmd::Cech { grid, common } => (vec![Selection::Cech { grid }], common),
        SuiteCmd::All { common } => (vec![Selection::All], common),
    };
    let opts = RunOptions {
        seed: common.seed,
        digits: common.digits.unwrap_or_else(default_digits),
        samples: common.samples,
    };
    let report = match run_suite(&selections, opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(path) = &common.out {
        if let Err(e) = std::fs::write(path, report.to_json()) {
            eprintln!("error: cannot write report to {path:?}: {e}");
            return ExitCode::from(2);
        }
    }
    match common.format {
        Format::Text => print!("{}", report.to_text_table()),
        Format::Json => print!("{}", report.to_json()),
    }
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run_report(input: PathBuf, format: Format) -> ExitCode {
    let src = match std::fs::read_to_string(&input) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot read report {input:?}: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match VerificationReport::from_json(&src) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: malformed report: {e}");
            return ExitCode::from(2);
        }
    };
    match format {
        Format::Text => print!("{}", report.to_text_table()),
        Format::Json => print!("{}", report.to_json()),
    }
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::Verify { suite } => run_verify(suite),
        Cmd::Report { input, format } => run_report(input, format),
    }
}
