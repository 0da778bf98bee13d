//! Command-line front end wiring the library together: searches with
//! checkpoints, verification against the bundled tables, analysis
//! reports, family scans, and the Pell check.
//!
//! Exit statuses: 0 on success, 1 when a verification found a mismatch,
//! 2 on usage errors (argument parsing and invalid flag combinations),
//! 3 on runtime failures (I/O, factoring caps).  Diagnostics go to
//! standard error; data goes to the requested file or standard output.
//!
//! Range flags are inclusive at both ends and accept exact scientific
//! shorthand: `--hi 1.5e10` means 15000000000.  The shorthand never
//! rounds; `1.55e1` is rejected rather than truncated.

use std::borrow::Cow;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{
    self, write_plot_series, write_repeat_pairs_csv, DEFAULT_BAND_LOWER, DEFAULT_BAND_UPPER,
    DEFAULT_EPS_THRESHOLD_N,
};
use crate::arith::ArithError;
use crate::exec::Executor;
use crate::families::{self, FamilyForm};
use crate::fixtures::{self, FixtureError};
use crate::pell::{self, PellVerdict};
use crate::search::{
    self, CheckpointingSink, CsvSink, JsonlSink, SearchError, SearchOptions, Solution,
};

/// Environment variable redirecting implicit checkpoint files into a
/// directory of its own.  An explicit --checkpoint always wins.
pub const ENV_CHECKPOINT_DIR: &str = "SIGMA_HUNT_CHECKPOINT_DIR";

/// The range the bundled solution table covers, used when verify has to
/// recompute and no --hi was given.
pub const FULL_RANGE_HI: u64 = 15_000_000_000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Analysis(#[from] analysis::AnalysisError),
    #[error(transparent)]
    Fixture(#[from] FixtureError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    /// The process exit status this error maps to.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 3,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses a decimal magnitude to an exact integer.  Plain digits,
/// optional fraction, and optional e/E exponent are accepted as long as
/// the value comes out integral: 1.5e10, 1e2, 300.  Anything that would
/// need rounding is an error.
pub fn parse_magnitude_big(s: &str) -> Result<BigUint, String> {
    let s = s.trim();
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let e = e.strip_prefix('+').unwrap_or(e);
            let exp: i32 = e
                .parse()
                .map_err(|_| format!("bad exponent {e:?} in {s:?}"))?;
            if exp.abs() > 10_000 {
                return Err(format!("exponent out of range in {s:?}"));
            }
            (m, exp)
        }
        None => (s, 0),
    };
    let (digits, frac_len) = match mantissa.split_once('.') {
        Some((int, frac)) => (format!("{int}{frac}"), frac.len() as i32),
        None => (mantissa.to_string(), 0),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("{s:?} is not an unsigned decimal number"));
    }
    let value: BigUint = digits.parse().expect("all digits");
    let scale = exp - frac_len;
    if scale >= 0 {
        Ok(value * BigUint::from(10u32).pow(scale as u32))
    } else {
        let divisor = BigUint::from(10u32).pow((-scale) as u32);
        if (&value % &divisor) != BigUint::from(0u32) {
            return Err(format!("{s:?} does not scale to an integer"));
        }
        Ok(value / divisor)
    }
}

/// parse_magnitude_big constrained to 64 bits.
pub fn parse_magnitude(s: &str) -> Result<u64, String> {
    parse_magnitude_big(s)?
        .to_u64()
        .ok_or_else(|| format!("{s:?} exceeds 64 bits"))
}

#[derive(Debug, Parser)]
#[command(
    name = "sigma-hunt",
    version,
    about = "Search for consecutive integers with equal divisor sums and reproduce the analyses built on them"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search [lo, hi] for n with sigma(n) = sigma(n+1)
    Search(SearchArgs),
    /// Continue an interrupted search from its checkpoint file
    Resume(ResumeArgs),
    /// Compare solutions against a bundled reference table
    Verify(VerifyArgs),
    /// Emit the full analysis report as JSON
    Analyze(AnalyzeArgs),
    /// List pairs of solutions sharing one sigma value
    Repeats(RepeatsArgs),
    /// Scan the two parametric families for members
    Guyshanks(GuyshanksArgs),
    /// Enumerate Pell pairs and check the odd-sigma case
    Pell(PellArgs),
    /// Fit the cube-root growth law to a solution set
    Fit(FitArgs),
    /// Print a plain-text summary of every computed result
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct PerfArgs {
    /// Numbers sieved per segment
    #[arg(long, default_value_t = search::DEFAULT_SEGMENT_WIDTH, value_parser = parse_magnitude)]
    pub segment_width: u64,
    /// Worker threads
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

impl PerfArgs {
    fn options(&self) -> Result<SearchOptions, CliError> {
        if self.segment_width == 0 {
            return Err(usage("--segment-width must be at least 1"));
        }
        if self.workers == 0 {
            return Err(usage("--workers must be at least 1"));
        }
        Ok(SearchOptions {
            segment_width: self.segment_width,
            workers: self.workers,
            start_index: 0,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StreamFormat {
    Csv,
    Jsonl,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Lower end of the range, inclusive
    #[arg(long, default_value = "1", value_parser = parse_magnitude)]
    pub lo: u64,
    /// Upper end of the range, inclusive; accepts 1.5e10 shorthand
    #[arg(long, value_parser = parse_magnitude)]
    pub hi: u64,
    /// Write solutions to this CSV file (enables checkpointing)
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Also mirror solutions to this JSONL file; requires --output
    #[arg(long)]
    pub jsonl: Option<PathBuf>,
    /// Stream format on standard output when --output is absent
    #[arg(long, value_enum, default_value_t = StreamFormat::Csv)]
    pub format: StreamFormat,
    /// Checkpoint file; defaults to <output>.checkpoint beside the output
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    #[command(flatten)]
    pub perf: PerfArgs,
}

#[derive(Debug, Args)]
pub struct ResumeArgs {
    /// Checkpoint file of the interrupted run
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// New inclusive upper end of the range
    #[arg(long, value_parser = parse_magnitude)]
    pub hi: u64,
    /// Append newly found solutions to this JSONL file as well
    #[arg(long)]
    pub jsonl: Option<PathBuf>,
    #[command(flatten)]
    pub perf: PerfArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Bundled table to compare against: appendix_d or appendix_c
    #[arg(long = "fixtures")]
    pub fixtures: String,
    /// Compare only rows with n <= hi
    #[arg(long, value_parser = parse_magnitude)]
    pub hi: Option<u64>,
    /// Solutions CSV to check; a fresh search computes them when absent
    #[arg(long)]
    pub solutions: Option<PathBuf>,
    #[command(flatten)]
    pub perf: PerfArgs,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Solutions CSV to analyze; the bundled table when absent
    #[arg(long)]
    pub solutions: Option<PathBuf>,
    /// n from which the relative-residual check applies
    #[arg(long, default_value_t = DEFAULT_EPS_THRESHOLD_N, value_parser = parse_magnitude)]
    pub eps_threshold: u64,
    /// Write the JSON report here instead of standard output
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RepeatsArgs {
    /// Solutions CSV to scan; the bundled table when absent
    #[arg(long)]
    pub solutions: Option<PathBuf>,
    /// Write the pair table here instead of standard output
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GuyshanksArgs {
    /// Largest exponent m to scan
    #[arg(long, default_value_t = 300)]
    pub max_m: u32,
    /// Restrict the scan to form 1 or form 2; both when absent
    #[arg(long)]
    pub form: Option<u8>,
    /// Worker threads
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Write the hit table here instead of standard output
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PellArgs {
    /// Largest n to check; accepts 1e26 shorthand
    #[arg(long, default_value = "1e26", value_parser = parse_magnitude_big)]
    pub bound: BigUint,
    /// Worker threads
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Write the per-pair table here instead of standard output
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Solutions CSV to fit; the bundled table when absent
    #[arg(long)]
    pub solutions: Option<PathBuf>,
    /// n from which the relative-residual check applies
    #[arg(long, default_value_t = DEFAULT_EPS_THRESHOLD_N, value_parser = parse_magnitude)]
    pub eps_threshold: u64,
    /// Evaluate the fitted counting function at these points (repeatable)
    #[arg(long = "estimate")]
    pub estimates: Vec<f64>,
    /// Write the plot series (n,count,y1,y2,y_adj,epsilon) to this CSV
    #[arg(long)]
    pub series: Option<PathBuf>,
    /// Write the fit JSON here instead of standard output
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Solutions CSV to summarize; the bundled table when absent
    #[arg(long)]
    pub solutions: Option<PathBuf>,
    /// n from which the relative-residual check applies
    #[arg(long, default_value_t = DEFAULT_EPS_THRESHOLD_N, value_parser = parse_magnitude)]
    pub eps_threshold: u64,
    /// Write the summary here instead of standard output
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// Runs one parsed command to completion.  Ok carries the exit status for
/// outcomes that are not errors (0, or 1 for verification mismatches);
/// Err carries usage and runtime failures.
pub fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Search(a) => cmd_search(a),
        Command::Resume(a) => cmd_resume(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Repeats(a) => cmd_repeats(a),
        Command::Guyshanks(a) => cmd_guyshanks(a),
        Command::Pell(a) => cmd_pell(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Report(a) => cmd_report(a),
    }
}

/// An owned writer for either a freshly created file or standard output.
fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

/// The rows to operate on: a CSV file when given, the bundled table
/// otherwise.
fn load_rows(path: Option<&Path>) -> Result<Cow<'static, [Solution]>, CliError> {
    Ok(match path {
        Some(p) => Cow::Owned(search::read_solution_csv(p)?),
        None => Cow::Borrowed(fixtures::appendix_d()),
    })
}

/// Inclusive CLI bound to the half-open upper end the library takes.
fn exclusive_hi(hi: u64) -> Result<u64, CliError> {
    hi.checked_add(1)
        .ok_or_else(|| usage(format!("--hi {hi} is too large")))
}

/// Where the checkpoint of a file-backed search lives when no explicit
/// path was given: <output>.checkpoint beside the output, or under
/// SIGMA_HUNT_CHECKPOINT_DIR when that is set.
fn default_checkpoint_path(output: &Path) -> PathBuf {
    let mut name = output
        .file_name()
        .map(OsString::from)
        .unwrap_or_else(|| OsString::from("search"));
    name.push(".checkpoint");
    match std::env::var_os(ENV_CHECKPOINT_DIR) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(name),
        _ => output.with_file_name(name),
    }
}

fn cmd_search(a: SearchArgs) -> Result<i32, CliError> {
    let opts = a.perf.options()?;
    let hi_excl = exclusive_hi(a.hi)?;
    let summary = match &a.output {
        Some(out) => {
            let checkpoint = a
                .checkpoint
                .clone()
                .unwrap_or_else(|| default_checkpoint_path(out));
            let mut sink = CheckpointingSink::create(out, a.jsonl.as_deref(), &checkpoint, a.lo)?;
            let summary = search::search_range(a.lo, hi_excl, &opts, &mut sink)?;
            eprintln!(
                "{} solutions in [{}, {}]; rows in {}, checkpoint at {}",
                summary.found,
                a.lo,
                a.hi,
                out.display(),
                checkpoint.display()
            );
            summary
        }
        None => {
            if a.jsonl.is_some() {
                return Err(usage("--jsonl requires --output"));
            }
            if a.checkpoint.is_some() {
                return Err(usage("--checkpoint requires --output"));
            }
            let stdout = BufWriter::new(io::stdout());
            let summary = match a.format {
                StreamFormat::Csv => {
                    let mut sink = CsvSink::from_writer(stdout)?;
                    let s = search::search_range(a.lo, hi_excl, &opts, &mut sink)?;
                    sink.flush()?;
                    s
                }
                StreamFormat::Jsonl => {
                    let mut sink = JsonlSink::from_writer(stdout);
                    let s = search::search_range(a.lo, hi_excl, &opts, &mut sink)?;
                    sink.flush()?;
                    s
                }
            };
            eprintln!("{} solutions in [{}, {}]", summary.found, a.lo, a.hi);
            summary
        }
    };
    let _ = summary;
    Ok(0)
}

fn cmd_resume(a: ResumeArgs) -> Result<i32, CliError> {
    let opts = a.perf.options()?;
    let hi_excl = exclusive_hi(a.hi)?;
    let summary = search::resume(&a.checkpoint, hi_excl, a.jsonl.as_deref(), &opts)?;
    eprintln!(
        "{} new solutions; {} total up to {}",
        summary.found, summary.total_index, a.hi
    );
    Ok(0)
}

fn cmd_verify(a: VerifyArgs) -> Result<i32, CliError> {
    let opts = a.perf.options()?;
    let rows: Vec<Solution> = match &a.solutions {
        Some(p) => search::read_solution_csv(p)?,
        None => {
            let hi = a.hi.unwrap_or(FULL_RANGE_HI);
            search::collect_solutions(1, exclusive_hi(hi)?, &opts)?
        }
    };
    let report = fixtures::verify_against_fixture(&rows, &a.fixtures, a.hi)?;
    println!("{report}");
    Ok(if report.is_match() { 0 } else { 1 })
}

fn cmd_analyze(a: AnalyzeArgs) -> Result<i32, CliError> {
    let rows = load_rows(a.solutions.as_deref())?;
    let report = analysis::analyze(&rows, a.eps_threshold)?;
    let mut w = open_output(a.output.as_deref())?;
    serde_json::to_writer_pretty(&mut w, &report)
        .map_err(|e| CliError::Runtime(format!("serializing report: {e}")))?;
    writeln!(w)?;
    w.flush()?;
    Ok(0)
}

fn cmd_repeats(a: RepeatsArgs) -> Result<i32, CliError> {
    let rows = load_rows(a.solutions.as_deref())?;
    let groups = analysis::find_repeats(&rows);
    let pairs = analysis::repeat_pairs(&groups);
    let mut w = open_output(a.output.as_deref())?;
    write_repeat_pairs_csv(&mut w, &pairs)?;
    w.flush()?;
    eprintln!(
        "{} repeated sigma values, {} pairs",
        groups.len(),
        pairs.len()
    );
    Ok(0)
}

fn cmd_guyshanks(a: GuyshanksArgs) -> Result<i32, CliError> {
    if a.workers == 0 {
        return Err(usage("--workers must be at least 1"));
    }
    let exec = Executor::new(a.workers);
    let hits = match a.form {
        None => families::scan_all(a.max_m, &exec),
        Some(1) => families::scan_family(FamilyForm::One, a.max_m, &exec),
        Some(2) => families::scan_family(FamilyForm::Two, a.max_m, &exec),
        Some(other) => return Err(usage(format!("--form must be 1 or 2, not {other}"))),
    };
    for h in &hits {
        if !families::verify_hit(h) {
            return Err(CliError::Runtime(format!(
                "hit form {} m {} failed re-verification",
                h.form, h.m
            )));
        }
    }
    let mut w = open_output(a.output.as_deref())?;
    families::write_hits_csv(&mut w, &hits)?;
    w.flush()?;
    eprintln!("{} family members with m <= {}", hits.len(), a.max_m);
    Ok(0)
}

fn cmd_pell(a: PellArgs) -> Result<i32, CliError> {
    if a.workers == 0 {
        return Err(usage("--workers must be at least 1"));
    }
    let exec = Executor::new(a.workers);
    let checks = pell::check_pairs(&a.bound, &exec);
    let mut w = open_output(a.output.as_deref())?;
    writeln!(w, "x,y,sign,n,sigma_n,sigma_n_plus_1,verdict")?;
    let mut violations = 0usize;
    let mut unresolved = 0usize;
    for c in &checks {
        let sign = if c.pair.sign < 0 { "-1" } else { "+1" };
        match &c.verdict {
            PellVerdict::Distinct {
                sigma_n,
                sigma_n_plus_1,
            } => writeln!(
                w,
                "{},{},{},{},{},{},ok",
                c.pair.x, c.pair.y, sign, c.n, sigma_n, sigma_n_plus_1
            )?,
            PellVerdict::Violation { sigma } => {
                violations += 1;
                writeln!(
                    w,
                    "{},{},{},{},{},{},violation",
                    c.pair.x, c.pair.y, sign, c.n, sigma, sigma
                )?;
            }
            PellVerdict::Unresolved { error } => {
                unresolved += 1;
                writeln!(w, "{},{},{},{},,,unresolved", c.pair.x, c.pair.y, sign, c.n)?;
                eprintln!("pair at n = {} unresolved: {error}", c.n);
            }
        }
    }
    w.flush()?;
    eprintln!(
        "{} pairs checked up to {}; {} violations, {} unresolved",
        checks.len(),
        a.bound,
        violations,
        unresolved
    );
    if violations > 0 {
        Ok(1)
    } else if unresolved > 0 {
        Err(CliError::Runtime(format!(
            "{unresolved} pairs exceeded the factoring cap"
        )))
    } else {
        Ok(0)
    }
}

#[derive(Debug, Serialize)]
struct FitOutput {
    slope: f64,
    intercept: f64,
    sample_count: u64,
    eps_threshold_n: u64,
    max_abs_eps_beyond_threshold: Option<f64>,
    max_eps_at_n: Option<u64>,
    estimates: Vec<EstimatePoint>,
}

#[derive(Debug, Serialize)]
struct EstimatePoint {
    x: f64,
    count: f64,
}

fn cmd_fit(a: FitArgs) -> Result<i32, CliError> {
    let rows = load_rows(a.solutions.as_deref())?;
    let fit = analysis::fit_growth(&rows)?;
    let residual = analysis::max_residual(&rows, &fit, a.eps_threshold);
    if let Some(series) = &a.series {
        let mut w = BufWriter::new(File::create(series)?);
        write_plot_series(&mut w, &rows, &fit, DEFAULT_BAND_LOWER, DEFAULT_BAND_UPPER)?;
        w.flush()?;
    }
    let out = FitOutput {
        slope: fit.slope,
        intercept: fit.intercept,
        sample_count: rows.len() as u64,
        eps_threshold_n: a.eps_threshold,
        max_abs_eps_beyond_threshold: residual.map(|r| r.max_abs_eps),
        max_eps_at_n: residual.map(|r| r.at_n),
        estimates: a
            .estimates
            .iter()
            .map(|&x| EstimatePoint {
                x,
                count: analysis::estimate_count(x, &fit),
            })
            .collect(),
    };
    let mut w = open_output(a.output.as_deref())?;
    serde_json::to_writer_pretty(&mut w, &out)
        .map_err(|e| CliError::Runtime(format!("serializing fit: {e}")))?;
    writeln!(w)?;
    w.flush()?;
    Ok(0)
}

fn list_or_none(values: &[u64]) -> String {
    if values.is_empty() {
        "none".to_string()
    } else {
        values
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    }
}

fn cmd_report(a: ReportArgs) -> Result<i32, CliError> {
    let rows = load_rows(a.solutions.as_deref())?;
    let report = analysis::analyze(&rows, a.eps_threshold)?;
    let pairs = analysis::repeat_pairs(&report.repeats);
    let mut w = open_output(a.output.as_deref())?;

    let last = rows.last().expect("analyze rejects empty input");
    writeln!(
        w,
        "solutions: {} with n up to {}",
        report.properties.total_solutions, last.n
    )?;
    writeln!(
        w,
        "sigma not divisible by 6: {}",
        list_or_none(&report.properties.not_div_by_6)
    )?;
    writeln!(
        w,
        "sigma not divisible by 4: {}",
        list_or_none(&report.properties.not_div_by_4)
    )?;
    writeln!(
        w,
        "sigma not divisible by 8: {}",
        list_or_none(&report.properties.not_div_by_8)
    )?;
    if report.properties.pow23_hits.is_empty() {
        writeln!(w, "sigma of the form 2^a 3^b: none")?;
    } else {
        let hits: Vec<String> = report
            .properties
            .pow23_hits
            .iter()
            .map(|h| format!("n={} (sigma {} = 2^{} 3^{})", h.n, h.sigma, h.a, h.b))
            .collect();
        writeln!(w, "sigma of the form 2^a 3^b: {}", hits.join(", "))?;
    }
    writeln!(
        w,
        "repeated sigma values: {} ({} pairs)",
        report.repeats.len(),
        pairs.len()
    )?;
    if let Some(p) = pairs.iter().min_by_key(|p| p.k) {
        writeln!(
            w,
            "smallest gap between equal sigmas: k={} at sigma={} (n={} and {})",
            p.k, p.sigma, p.n, p.n_plus_k
        )?;
    }
    writeln!(
        w,
        "growth fit: index ~ {:.6} n^(1/3) + {:.6}",
        report.fit.slope, report.fit.intercept
    )?;
    match (
        report.fit.max_abs_eps_beyond_threshold,
        report.fit.max_eps_at_n,
    ) {
        (Some(eps), Some(at)) => writeln!(
            w,
            "largest relative residual for n >= {}: {:.4} at n={}",
            report.fit.eps_threshold_n, eps, at
        )?,
        _ => writeln!(
            w,
            "no solutions at or beyond n = {} to bound the residual",
            report.fit.eps_threshold_n
        )?,
    }
    match report.band.last_n_below_lower {
        Some(n) => writeln!(
            w,
            "last index below {:.2} n^(1/3): n={}",
            report.band.lower_coefficient, n
        )?,
        None => writeln!(
            w,
            "no index ever falls below {:.2} n^(1/3)",
            report.band.lower_coefficient
        )?,
    }
    match report.band.last_n_above_upper {
        Some(n) => writeln!(
            w,
            "last index above {:.2} n^(1/3): n={}",
            report.band.upper_coefficient, n
        )?,
        None => writeln!(
            w,
            "no index ever rises above {:.2} n^(1/3)",
            report.band.upper_coefficient
        )?,
    }
    let fit = analysis::FitCoefficients {
        slope: report.fit.slope,
        intercept: report.fit.intercept,
    };
    writeln!(
        w,
        "fitted count at n = {}: {:.1} (actual {})",
        last.n,
        analysis::estimate_count(last.n as f64, &fit),
        report.properties.total_solutions
    )?;
    w.flush()?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn magnitudes_parse_exactly() {
        assert_eq!(parse_magnitude("300"), Ok(300));
        assert_eq!(parse_magnitude("1e2"), Ok(100));
        assert_eq!(parse_magnitude("1.5e10"), Ok(15_000_000_000));
        assert_eq!(parse_magnitude("4.25e9"), Ok(4_250_000_000));
        assert_eq!(parse_magnitude("2.5E1"), Ok(25));
        assert_eq!(parse_magnitude("1500e-2"), Ok(15));
        assert_eq!(parse_magnitude("0"), Ok(0));
        assert_eq!(parse_magnitude(" 42 "), Ok(42));
    }

    #[test]
    fn magnitudes_reject_rounding_and_junk() {
        assert!(parse_magnitude("1.55e1").is_err());
        assert!(parse_magnitude("0.5").is_err());
        assert!(parse_magnitude("15e-1").is_err());
        assert!(parse_magnitude("-3").is_err());
        assert!(parse_magnitude("").is_err());
        assert!(parse_magnitude("e5").is_err());
        assert!(parse_magnitude("1e").is_err());
        assert!(parse_magnitude("2e64").is_err());
        assert!(parse_magnitude("1e20000").is_err());
        assert!(parse_magnitude("12a").is_err());
        assert!(parse_magnitude("1.2.3").is_err());
    }

    #[test]
    fn big_magnitudes_go_past_64_bits() {
        let b = parse_magnitude_big("1e26").unwrap();
        assert_eq!(b.to_string(), format!("1{}", "0".repeat(26)));
        assert_eq!(
            parse_magnitude_big("1.25e2").unwrap(),
            BigUint::from(125u32)
        );
    }

    #[test]
    fn checkpoint_path_beside_output() {
        // The env override is exercised at the binary level, where it
        // cannot race other tests in this process.
        std::env::remove_var(ENV_CHECKPOINT_DIR);
        assert_eq!(
            default_checkpoint_path(Path::new("/tmp/run/sols.csv")),
            PathBuf::from("/tmp/run/sols.csv.checkpoint")
        );
    }

    #[test]
    fn cli_parses_and_rejects() {
        use clap::error::ErrorKind;
        let cli = Cli::try_parse_from(["sigma-hunt", "search", "--hi", "3e3"]).unwrap();
        match cli.command {
            Command::Search(a) => {
                assert_eq!(a.lo, 1);
                assert_eq!(a.hi, 3000);
                assert_eq!(a.perf.workers, 1);
            }
            other => panic!("wrong command {other:?}"),
        }

        let err = Cli::try_parse_from(["sigma-hunt", "search", "--hi", "1.55e1"]).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::ValueValidation);
        let err = Cli::try_parse_from(["sigma-hunt", "search"]).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::MissingRequiredArgument);
        let err = Cli::try_parse_from(["sigma-hunt", "search", "--hi", "10", "--bogus"]);
        assert!(err.is_err());
    }

    #[test]
    fn usage_errors_exit_two_and_runtime_three() {
        assert_eq!(usage("x").exit_code(), 2);
        assert_eq!(CliError::Runtime("x".into()).exit_code(), 3);
        let io: CliError = io::Error::new(io::ErrorKind::NotFound, "gone").into();
        assert_eq!(io.exit_code(), 3);
    }

    #[test]
    fn search_rejects_bad_combinations() {
        let cli = Cli::try_parse_from([
            "sigma-hunt",
            "search",
            "--hi",
            "100",
            "--jsonl",
            "/tmp/x.jsonl",
        ])
        .unwrap();
        match run(cli) {
            Err(CliError::Usage(msg)) => assert!(msg.contains("--jsonl")),
            other => panic!("expected usage error, got {other:?}"),
        }

        let cli = Cli::try_parse_from([
            "sigma-hunt",
            "search",
            "--hi",
            "100",
            "--segment-width",
            "0",
        ])
        .unwrap();
        match run(cli) {
            Err(CliError::Usage(msg)) => assert!(msg.contains("--segment-width")),
            other => panic!("expected usage error, got {other:?}"),
        }
    }
}
