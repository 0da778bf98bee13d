//! Driving the sieve across a big range: segmentation, worker batches,
//! pair detection, streaming output, checkpointing, resume.
//!
//! Solutions are the n with sigma(n) = sigma(n+1).  The driver hands
//! segments to the sieve in batches (one per worker), then scans the
//! results strictly in order, carrying the last (n, sigma) of each segment
//! into the next so pairs straddling a boundary are never missed.  Output
//! is therefore identical for every segment width and worker count, which
//! is what makes checkpoint/resume byte-exact.

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::arith::{self, ArithError};
use crate::exec::Executor;
use crate::sieve::{self, SieveError};

pub const DEFAULT_SEGMENT_WIDTH: u64 = 1 << 22;

pub const CSV_HEADER: &str = "n,n_plus_1,sigma";

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid search range [{lo}, {hi}); need 1 <= lo < hi")]
    InvalidRange { lo: u64, hi: u64 },
    #[error("segment width must be positive")]
    ZeroSegmentWidth,
    #[error(transparent)]
    Sieve(#[from] SieveError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("{path}:{line}: {reason}")]
    MalformedSolutions {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("checkpoint {path}:{line}: {reason}")]
    CheckpointParse {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("checkpoint does not match {path}: {reason}")]
    CheckpointMismatch { path: PathBuf, reason: String },
}

/// One solution: sigma(n) = sigma(n + 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Solution {
    pub n: u64,
    pub sigma: u64,
    /// 1-based ordinal among all solutions counted from n = 1.
    pub index: u64,
}

/// Progress of a search, reported after every completed segment.
#[derive(Debug, Clone, Copy)]
pub struct Progress {
    /// Every pair (n, n+1) with n up to this value has been decided.
    pub decided_up_to: u64,
    /// Solutions seen so far, including any carried-in start index.
    pub count: u64,
}

pub trait SolutionSink {
    fn emit(&mut self, s: &Solution) -> Result<(), SearchError>;

    /// Called once per finished segment, in range order.
    fn segment_done(&mut self, progress: &Progress) -> Result<(), SearchError> {
        let _ = progress;
        Ok(())
    }
}

impl SolutionSink for Vec<Solution> {
    fn emit(&mut self, s: &Solution) -> Result<(), SearchError> {
        self.push(*s);
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub segment_width: u64,
    pub workers: usize,
    /// Solutions already accounted for below the range start; indices of
    /// newly found solutions continue from here.
    pub start_index: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            segment_width: DEFAULT_SEGMENT_WIDTH,
            workers: 1,
            start_index: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchSummary {
    /// Solutions emitted by this run.
    pub found: u64,
    /// start_index plus found.
    pub total_index: u64,
    /// Last n whose pair was decided: hi - 1.
    pub last_decided: u64,
}

/// Finds every n in [lo, hi) with sigma(n) = sigma(n+1), in order.
/// Sigma is evaluated on [lo, hi], so hi itself may close the last pair.
pub fn search_range(
    lo: u64,
    hi: u64,
    opts: &SearchOptions,
    sink: &mut dyn SolutionSink,
) -> Result<SearchSummary, SearchError> {
    if lo < 1 || lo >= hi {
        return Err(SearchError::InvalidRange { lo, hi });
    }
    if opts.segment_width == 0 {
        return Err(SearchError::ZeroSegmentWidth);
    }
    let sieve_hi = hi
        .checked_add(1)
        .ok_or(SearchError::InvalidRange { lo, hi })?;
    let root = hi.isqrt();
    let table = sieve::small_primes(root.max(2))?;
    let exec = Executor::new(opts.workers);
    let batch = exec.workers();

    let mut count = opts.start_index;
    let mut found = 0u64;
    let mut prev: Option<(u64, u64)> = None;
    let mut next_lo = lo;
    while next_lo < sieve_hi {
        let mut ranges = Vec::with_capacity(batch);
        while ranges.len() < batch && next_lo < sieve_hi {
            let s_hi = next_lo.saturating_add(opts.segment_width).min(sieve_hi);
            ranges.push((next_lo, s_hi));
            next_lo = s_hi;
        }
        let segments = exec.try_map(ranges, |(a, b)| sieve::sieve_segment(a, b, &table))?;
        for seg in &segments {
            for (n, s) in seg.iter() {
                if let Some((pn, ps)) = prev {
                    if ps == s {
                        count += 1;
                        found += 1;
                        sink.emit(&Solution {
                            n: pn,
                            sigma: ps,
                            index: count,
                        })?;
                    }
                }
                prev = Some((n, s));
            }
            sink.segment_done(&Progress {
                decided_up_to: seg.hi().saturating_sub(2),
                count,
            })?;
        }
    }
    Ok(SearchSummary {
        found,
        total_index: count,
        last_decided: hi - 1,
    })
}

/// Solutions of [lo, hi) collected into memory.
pub fn collect_solutions(
    lo: u64,
    hi: u64,
    opts: &SearchOptions,
) -> Result<Vec<Solution>, SearchError> {
    let mut out = Vec::new();
    search_range(lo, hi, opts, &mut out)?;
    Ok(out)
}

/// How many n <= x solve sigma(n) = sigma(n+1).
pub fn count_up_to(x: u64, opts: &SearchOptions) -> Result<u64, SearchError> {
    if x < 1 {
        return Ok(0);
    }
    struct Counter;
    impl SolutionSink for Counter {
        fn emit(&mut self, _: &Solution) -> Result<(), SearchError> {
            Ok(())
        }
    }
    Ok(search_range(1, x + 1, opts, &mut Counter)?.found)
}

/// Streaming CSV writer in the solution-file format.
pub struct CsvSink<W: Write> {
    w: W,
}

impl CsvSink<BufWriter<File>> {
    /// Creates (or truncates) the file and writes the header.
    pub fn create(path: &Path) -> Result<Self, SearchError> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "{CSV_HEADER}")?;
        Ok(CsvSink { w })
    }

    /// Opens an existing file for appending; no header.
    pub fn append(path: &Path) -> Result<Self, SearchError> {
        let w = BufWriter::new(OpenOptions::new().append(true).open(path)?);
        Ok(CsvSink { w })
    }
}

impl<W: Write> CsvSink<W> {
    /// Wraps a writer, emitting the header first.
    pub fn from_writer(mut w: W) -> Result<Self, SearchError> {
        writeln!(w, "{CSV_HEADER}")?;
        Ok(CsvSink { w })
    }

    pub fn flush(&mut self) -> Result<(), SearchError> {
        self.w.flush()?;
        Ok(())
    }
}

impl<W: Write> SolutionSink for CsvSink<W> {
    fn emit(&mut self, s: &Solution) -> Result<(), SearchError> {
        writeln!(self.w, "{},{},{}", s.n, s.n + 1, s.sigma)?;
        Ok(())
    }

    fn segment_done(&mut self, _: &Progress) -> Result<(), SearchError> {
        self.flush()
    }
}

/// Streaming JSON-lines writer; one object per solution with keys
/// n, sigma, index.
pub struct JsonlSink<W: Write> {
    w: W,
}

impl JsonlSink<BufWriter<File>> {
    pub fn create(path: &Path) -> Result<Self, SearchError> {
        Ok(JsonlSink {
            w: BufWriter::new(File::create(path)?),
        })
    }
}

impl<W: Write> JsonlSink<W> {
    pub fn from_writer(w: W) -> Self {
        JsonlSink { w }
    }

    pub fn flush(&mut self) -> Result<(), SearchError> {
        self.w.flush()?;
        Ok(())
    }
}

impl<W: Write> SolutionSink for JsonlSink<W> {
    fn emit(&mut self, s: &Solution) -> Result<(), SearchError> {
        let line = serde_json::to_string(s).expect("solution serializes");
        writeln!(self.w, "{line}")?;
        Ok(())
    }

    fn segment_done(&mut self, _: &Progress) -> Result<(), SearchError> {
        self.flush()
    }
}

/// Reads a solution CSV back, checking the header, the n+1 column, and
/// that n strictly increases.  Indices are assigned by row order starting
/// from 1; callers with a different base adjust afterwards.
pub fn read_solution_csv(path: &Path) -> Result<Vec<Solution>, SearchError> {
    let malformed = |line: usize, reason: String| SearchError::MalformedSolutions {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let reader = BufReader::new(File::open(path)?);
    let mut out: Vec<Solution> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if i == 0 {
            if line != CSV_HEADER {
                return Err(malformed(1, format!("expected header {CSV_HEADER:?}")));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let mut next_u64 = |name: &str| -> Result<u64, SearchError> {
            fields
                .next()
                .ok_or_else(|| malformed(i + 1, format!("missing {name}")))?
                .parse::<u64>()
                .map_err(|e| malformed(i + 1, format!("bad {name}: {e}")))
        };
        let n = next_u64("n")?;
        let n_plus_1 = next_u64("n_plus_1")?;
        let sigma = next_u64("sigma")?;
        if n_plus_1 != n + 1 {
            return Err(malformed(
                i + 1,
                format!("n_plus_1 = {n_plus_1} but n = {n}"),
            ));
        }
        if let Some(last) = out.last() {
            if last.n >= n {
                return Err(malformed(i + 1, format!("n = {n} does not increase")));
            }
        }
        out.push(Solution {
            n,
            sigma,
            index: out.len() as u64 + 1,
        });
    }
    Ok(out)
}

/// State needed to continue an interrupted file-backed search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub range_lo: u64,
    /// Every pair (n, n+1) with n up to here is decided and durably in the
    /// output file.
    pub last_completed_n: u64,
    pub solutions_so_far: u64,
    pub output: PathBuf,
}

impl Checkpoint {
    pub fn render(&self) -> String {
        format!(
            "version=1\nrange_lo={}\nlast_completed_n={}\nsolutions_so_far={}\noutput={}\n",
            self.range_lo,
            self.last_completed_n,
            self.solutions_so_far,
            self.output.display()
        )
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self, SearchError> {
        let bad = |line: usize, reason: String| SearchError::CheckpointParse {
            path: path.to_path_buf(),
            line,
            reason,
        };
        let mut lines = text.lines();
        let mut field = |line: usize, key: &str| -> Result<String, SearchError> {
            let raw = lines
                .next()
                .ok_or_else(|| bad(line, format!("missing {key} line")))?;
            raw.strip_prefix(key)
                .and_then(|r| r.strip_prefix('='))
                .map(str::to_string)
                .ok_or_else(|| bad(line, format!("expected {key}=..., got {raw:?}")))
        };
        let version = field(1, "version")?;
        if version != "1" {
            return Err(bad(1, format!("unsupported version {version:?}")));
        }
        let parse_u64 = |line: usize, key: &str, v: String| -> Result<u64, SearchError> {
            v.parse::<u64>()
                .map_err(|e| bad(line, format!("bad {key}: {e}")))
        };
        let range_lo = parse_u64(2, "range_lo", field(2, "range_lo")?)?;
        let last_completed_n = parse_u64(3, "last_completed_n", field(3, "last_completed_n")?)?;
        let solutions_so_far = parse_u64(4, "solutions_so_far", field(4, "solutions_so_far")?)?;
        let output = PathBuf::from(field(5, "output")?);
        // last_completed_n = range_lo - 1 is legal: no pair decided yet.
        if range_lo == 0 || last_completed_n + 1 < range_lo {
            return Err(bad(
                3,
                format!("inconsistent range_lo={range_lo}, last_completed_n={last_completed_n}"),
            ));
        }
        Ok(Checkpoint {
            range_lo,
            last_completed_n,
            solutions_so_far,
            output,
        })
    }

    pub fn load(path: &Path) -> Result<Self, SearchError> {
        Self::parse(&fs::read_to_string(path)?, path)
    }

    /// Writes atomically: a sibling temp file, then a rename over the
    /// target, so an interruption never leaves a half-written checkpoint.
    pub fn store(&self, path: &Path) -> Result<(), SearchError> {
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, self.render())?;
        fs::rename(&tmp, path)?;
        Ok(())
    }
}

/// CSV sink that maintains a checkpoint file.  Rows are held back until
/// their segment completes, then written and flushed before the checkpoint
/// is rewritten: the file never trails the checkpoint, and an interruption
/// between segments loses only work the checkpoint never claimed.
pub struct CheckpointingSink {
    csv: CsvSink<BufWriter<File>>,
    jsonl: Option<JsonlSink<BufWriter<File>>>,
    pending: Vec<Solution>,
    checkpoint_path: PathBuf,
    range_lo: u64,
    output: PathBuf,
}

impl CheckpointingSink {
    pub fn create(
        output: &Path,
        jsonl: Option<&Path>,
        checkpoint_path: &Path,
        range_lo: u64,
    ) -> Result<Self, SearchError> {
        Ok(CheckpointingSink {
            csv: CsvSink::create(output)?,
            jsonl: jsonl.map(JsonlSink::create).transpose()?,
            pending: Vec::new(),
            checkpoint_path: checkpoint_path.to_path_buf(),
            range_lo,
            output: output.to_path_buf(),
        })
    }

    fn resume_from(
        cp: &Checkpoint,
        checkpoint_path: &Path,
        jsonl: Option<&Path>,
    ) -> Result<Self, SearchError> {
        Ok(CheckpointingSink {
            csv: CsvSink::append(&cp.output)?,
            jsonl: jsonl
                .map(|p| -> Result<_, SearchError> {
                    Ok(JsonlSink {
                        w: BufWriter::new(OpenOptions::new().append(true).open(p)?),
                    })
                })
                .transpose()?,
            pending: Vec::new(),
            checkpoint_path: checkpoint_path.to_path_buf(),
            range_lo: cp.range_lo,
            output: cp.output.clone(),
        })
    }
}

impl SolutionSink for CheckpointingSink {
    fn emit(&mut self, s: &Solution) -> Result<(), SearchError> {
        self.pending.push(*s);
        Ok(())
    }

    fn segment_done(&mut self, progress: &Progress) -> Result<(), SearchError> {
        for s in std::mem::take(&mut self.pending) {
            self.csv.emit(&s)?;
            if let Some(j) = &mut self.jsonl {
                j.emit(&s)?;
            }
        }
        self.csv.flush()?;
        if let Some(j) = &mut self.jsonl {
            j.flush()?;
        }
        Checkpoint {
            range_lo: self.range_lo,
            last_completed_n: progress.decided_up_to,
            solutions_so_far: progress.count,
            output: self.output.clone(),
        }
        .store(&self.checkpoint_path)
    }
}

/// Continues a checkpointed search up to `hi`.  The existing output file
/// is audited first: row count against the checkpoint, every row a genuine
/// solution, nothing past last_completed_n.  On success the file is
/// extended in place and ends up byte-identical to an uninterrupted run.
/// A checkpoint whose hi is already covered is a no-op.
pub fn resume(
    checkpoint_path: &Path,
    hi: u64,
    jsonl: Option<&Path>,
    opts: &SearchOptions,
) -> Result<SearchSummary, SearchError> {
    let cp = Checkpoint::load(checkpoint_path)?;
    let mismatch = |reason: String| SearchError::CheckpointMismatch {
        path: cp.output.clone(),
        reason,
    };
    let rows = read_solution_csv(&cp.output)?;
    if rows.len() as u64 != cp.solutions_so_far {
        return Err(mismatch(format!(
            "checkpoint says {} solutions, file has {}",
            cp.solutions_so_far,
            rows.len()
        )));
    }
    for row in &rows {
        if row.n > cp.last_completed_n {
            return Err(mismatch(format!(
                "row n = {} lies past last_completed_n = {}",
                row.n, cp.last_completed_n
            )));
        }
        if row.n < cp.range_lo {
            return Err(mismatch(format!(
                "row n = {} lies before range_lo = {}",
                row.n, cp.range_lo
            )));
        }
        let s0 = arith::sigma(row.n)?;
        let s1 = arith::sigma(row.n + 1)?;
        if s0 != s1 || s0 != row.sigma {
            return Err(mismatch(format!(
                "row n = {} is not a solution with sigma = {}",
                row.n, row.sigma
            )));
        }
    }
    if hi <= cp.last_completed_n + 1 {
        return Ok(SearchSummary {
            found: 0,
            total_index: cp.solutions_so_far,
            last_decided: cp.last_completed_n,
        });
    }
    let mut sink = CheckpointingSink::resume_from(&cp, checkpoint_path, jsonl)?;
    let run_opts = SearchOptions {
        start_index: cp.solutions_so_far,
        ..opts.clone()
    };
    search_range(cp.last_completed_n + 1, hi, &run_opts, &mut sink)
}
