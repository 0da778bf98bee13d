//! Bundled reference tables and comparison against them.
//!
//! Two CSV files ship inside the binary: the full solution table up to
//! 1.5e10 (1268 rows of n, n+1, sigma) and the 22-row table of repeated
//! sigma values.  Both are compiled in with include_str, parsed once on
//! first use, and cross-validated by the tests in this module: every
//! solution row's sigma is re-derived from scratch, and every repeat row
//! must point back at consistent solution rows.

use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::analysis::{find_repeats, repeat_pairs, RepeatPair, REPEAT_CSV_HEADER};
use crate::search::Solution;

static APPENDIX_D_CSV: &str = include_str!("../fixtures/appendix_d.csv");
static APPENDIX_C_CSV: &str = include_str!("../fixtures/appendix_c.csv");

/// Names under which the bundled tables are addressable (CLI flag values).
pub const FIXTURE_NAMES: [&str; 2] = ["appendix_d", "appendix_c"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixtureError {
    #[error("unknown fixture {name:?}; available: appendix_d, appendix_c")]
    UnknownFixture { name: String },
}

fn parse_u64_row<const N: usize>(line: &str, line_no: usize, source: &str) -> [u64; N] {
    let mut out = [0u64; N];
    let mut fields = line.split(',');
    for slot in out.iter_mut() {
        let field = fields
            .next()
            .unwrap_or_else(|| panic!("{source} line {line_no}: too few fields"));
        *slot = field
            .parse()
            .unwrap_or_else(|e| panic!("{source} line {line_no}: bad integer {field:?}: {e}"));
    }
    assert!(
        fields.next().is_none(),
        "{source} line {line_no}: too many fields"
    );
    out
}

/// The bundled solution table: all solutions with n <= 1.5e10, index
/// ascending from 1.  Panics on a malformed bundle, which a test would
/// catch long before shipping.
pub fn appendix_d() -> &'static [Solution] {
    static CACHE: OnceLock<Vec<Solution>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let mut lines = APPENDIX_D_CSV.lines().enumerate();
        let (_, header) = lines.next().expect("appendix_d: empty");
        assert_eq!(header, "n,n_plus_1,sigma", "appendix_d: bad header");
        lines
            .map(|(i, line)| {
                let [n, n_plus_1, sigma] = parse_u64_row(line, i + 1, "appendix_d");
                assert_eq!(n_plus_1, n + 1, "appendix_d line {}: n+1 mismatch", i + 1);
                Solution {
                    n,
                    sigma,
                    index: i as u64,
                }
            })
            .collect()
    })
}

/// The bundled repeated-sigma table: 22 pairs ascending in sigma.
pub fn appendix_c() -> &'static [RepeatPair] {
    static CACHE: OnceLock<Vec<RepeatPair>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let mut lines = APPENDIX_C_CSV.lines().enumerate();
        let (_, header) = lines.next().expect("appendix_c: empty");
        assert_eq!(header, REPEAT_CSV_HEADER, "appendix_c: bad header");
        lines
            .map(|(i, line)| {
                let [sigma, n, index_n, n_plus_k, index_n_plus_k, k] =
                    parse_u64_row(line, i + 1, "appendix_c");
                assert_eq!(n + k, n_plus_k, "appendix_c line {}: k mismatch", i + 1);
                RepeatPair {
                    sigma,
                    n,
                    index_n,
                    n_plus_k,
                    index_n_plus_k,
                    k,
                }
            })
            .collect()
    })
}

/// The solution rows of the bundled table with n <= hi.
pub fn appendix_d_up_to(hi: u64) -> &'static [Solution] {
    let rows = appendix_d();
    let cut = rows.partition_point(|s| s.n <= hi);
    &rows[..cut]
}

/// One line of detail about a row, used when reporting a divergence.
pub trait RowSummary {
    fn summary(&self) -> String;
}

impl RowSummary for Solution {
    fn summary(&self) -> String {
        format!("n={} sigma={}", self.n, self.sigma)
    }
}

impl RowSummary for RepeatPair {
    fn summary(&self) -> String {
        format!(
            "sigma={} n={} n_plus_k={}",
            self.sigma, self.n, self.n_plus_k
        )
    }
}

/// Row-by-row comparison of a candidate table against reference rows.
/// Rows pair up by ordinal; comparison stops at the first ordinal where
/// the two sides disagree or one side runs out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchReport<R> {
    pub reference_rows: usize,
    pub candidate_rows: usize,
    /// Leading ordinals on which both sides agree.
    pub matched: usize,
    pub divergence: Option<Divergence<R>>,
}

/// The first disagreement, 1-based.  A side that ran out of rows reports
/// None for its value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence<R> {
    pub ordinal: usize,
    pub reference: Option<R>,
    pub candidate: Option<R>,
}

impl<R> MatchReport<R> {
    pub fn is_match(&self) -> bool {
        self.divergence.is_none()
    }
}

impl<R: RowSummary> fmt::Display for MatchReport<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.divergence {
            None => write!(f, "{}/{} rows match", self.matched, self.reference_rows),
            Some(d) => {
                write!(
                    f,
                    "{}/{} rows match; divergence at ordinal {}: ",
                    self.matched, self.reference_rows, d.ordinal
                )?;
                match &d.reference {
                    Some(r) => write!(f, "expected {}", r.summary())?,
                    None => write!(f, "expected no further rows")?,
                }
                match &d.candidate {
                    Some(r) => write!(f, ", found {}", r.summary()),
                    None => write!(f, ", found none"),
                }
            }
        }
    }
}

/// Ordinal-by-ordinal equality comparison of two row tables.
pub fn compare_rows<R: PartialEq + Clone>(candidate: &[R], reference: &[R]) -> MatchReport<R> {
    let mut matched = 0;
    let mut divergence = None;
    for i in 0..candidate.len().max(reference.len()) {
        match (candidate.get(i), reference.get(i)) {
            (Some(c), Some(r)) if c == r => matched += 1,
            (c, r) => {
                divergence = Some(Divergence {
                    ordinal: i + 1,
                    reference: r.cloned(),
                    candidate: c.cloned(),
                });
                break;
            }
        }
    }
    MatchReport {
        reference_rows: reference.len(),
        candidate_rows: candidate.len(),
        matched,
        divergence,
    }
}

/// Solution rows compare on (n, sigma); the index is positional and a
/// plain re-numbering should not read as a divergence.
fn compare_solution_rows(candidate: &[Solution], reference: &[Solution]) -> MatchReport<Solution> {
    let strip = |rows: &[Solution]| -> Vec<Solution> {
        rows.iter()
            .map(|s| Solution {
                n: s.n,
                sigma: s.sigma,
                index: 0,
            })
            .collect()
    };
    let mut report = compare_rows(&strip(candidate), &strip(reference));
    // Put the original rows back into the divergence detail.
    if let Some(d) = &mut report.divergence {
        d.reference = reference.get(d.ordinal - 1).copied();
        d.candidate = candidate.get(d.ordinal - 1).copied();
    }
    report
}

/// The verdict of comparing a solution set against one named fixture.
#[derive(Debug, Clone, PartialEq)]
pub enum FixtureReport {
    Solutions(MatchReport<Solution>),
    Repeats(MatchReport<RepeatPair>),
}

impl FixtureReport {
    pub fn is_match(&self) -> bool {
        match self {
            FixtureReport::Solutions(r) => r.is_match(),
            FixtureReport::Repeats(r) => r.is_match(),
        }
    }
}

impl fmt::Display for FixtureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixtureReport::Solutions(r) => r.fmt(f),
            FixtureReport::Repeats(r) => r.fmt(f),
        }
    }
}

/// Compares candidate solutions against a named bundled fixture,
/// optionally capped at n <= hi on both sides.
///
/// Against `appendix_d` the solution rows compare directly.  Against
/// `appendix_c` the candidate's repeated-sigma pairs are derived first
/// and a pair is in scope when its larger member is <= hi.
pub fn verify_against_fixture(
    candidate: &[Solution],
    fixture_name: &str,
    hi: Option<u64>,
) -> Result<FixtureReport, FixtureError> {
    match fixture_name {
        "appendix_d" => {
            let reference = match hi {
                Some(hi) => appendix_d_up_to(hi),
                None => appendix_d(),
            };
            let cut = match hi {
                Some(hi) => candidate.partition_point(|s| s.n <= hi),
                None => candidate.len(),
            };
            Ok(FixtureReport::Solutions(compare_solution_rows(
                &candidate[..cut],
                reference,
            )))
        }
        "appendix_c" => {
            let cut = match hi {
                Some(hi) => candidate.partition_point(|s| s.n <= hi),
                None => candidate.len(),
            };
            let derived = repeat_pairs(&find_repeats(&candidate[..cut]));
            let reference: Vec<RepeatPair> = appendix_c()
                .iter()
                .filter(|r| hi.is_none_or(|hi| r.n_plus_k <= hi))
                .copied()
                .collect();
            Ok(FixtureReport::Repeats(compare_rows(&derived, &reference)))
        }
        other => Err(FixtureError::UnknownFixture {
            name: other.to_string(),
        }),
    }
}
