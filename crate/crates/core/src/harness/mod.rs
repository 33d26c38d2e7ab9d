//! Verification pipelines over the catalog: cohomology tables, action
//! formulas, extension regeneration, representative counts, pairwise
//! distinction, isomorphism notes, property suites and finite-field census.

mod actions;
mod counts;
mod distinguish;
mod extensions;
pub mod instance;
mod notes;
mod properties;
mod tables;

use std::cmp::Ordering;
use std::fmt::{self, Write as _};

pub use actions::verify_actions;
pub use counts::{count_theorem_a, tally, ArityTally, THEOREM_A_TALLY};
pub use distinguish::distinguish_all;
pub use extensions::{check_extension, extension_at, extension_on, regenerate_extensions, theta_zero_control, ExtensionCheck};
pub use notes::{perturbed_note, verify_iso_notes, verify_note, NoteRow, NoteStatus, NOTE_BUDGET};
pub use properties::{
    census_agreement, prop_coboundaries_are_cocycles, prop_dim_b2_equals_dim_a2, prop_fingerprint_invariance,
    prop_noncocycle_breaks_identity, prop_parse_serialize,
};
pub use tables::verify_h2_tables;

use crate::algebra::AlgebraError;
use crate::arith::ArithError;
use crate::catalog::{CatalogError, EvalError};
use crate::cohomology::CohomologyError;
use crate::linalg::LinalgError;
use crate::symmetry::SymmetryError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error("{0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail(String),
    Skip(String),
}

impl Status {
    pub fn word(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail(_) => "fail",
            Status::Skip(_) => "skip",
        }
    }

    pub fn reason(&self) -> Option<&str> {
        match self {
            Status::Pass => None,
            Status::Fail(r) | Status::Skip(r) => Some(r),
        }
    }
}

/// One checked unit, e.g. a catalog entry or a representative at a sample.
#[derive(Debug, Clone)]
pub struct Item {
    pub name: String,
    pub status: Status,
    pub details: Vec<(String, String)>,
}

impl Item {
    pub fn new(name: impl Into<String>, status: Status) -> Self {
        Item { name: name.into(), status, details: Vec::new() }
    }

    pub fn with(mut self, key: impl Into<String>, value: impl fmt::Display) -> Self {
        self.details.push((key.into(), value.to_string()));
        self
    }

    pub fn detail(&self, key: &str) -> Option<&str> {
        self.details.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// Outcome of one suite; items are kept in natural name order.
#[derive(Debug, Clone)]
pub struct Report {
    pub suite: String,
    pub items: Vec<Item>,
    /// Suite-level `key=value` facts.
    pub summary: Vec<(String, String)>,
}

impl Report {
    pub fn new(suite: impl Into<String>) -> Self {
        Report { suite: suite.into(), items: Vec::new(), summary: Vec::new() }
    }

    pub fn push(&mut self, item: Item) {
        self.items.push(item);
    }

    pub fn extend(&mut self, items: impl IntoIterator<Item = Item>) {
        self.items.extend(items);
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl fmt::Display) {
        self.summary.push((key.into(), value.to_string()));
    }

    /// Sorts items by natural name order; stable for equal names.
    pub fn finish(mut self) -> Self {
        self.items.sort_by(|a, b| natural_cmp(&a.name, &b.name));
        self
    }

    pub fn item(&self, name: &str) -> Option<&Item> {
        self.items.iter().find(|i| i.name == name)
    }

    pub fn count(&self, word: &str) -> usize {
        self.items.iter().filter(|i| i.status.word() == word).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &Item> {
        self.items.iter().filter(|i| matches!(i.status, Status::Fail(_)))
    }

    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    /// `suite.item.key=value` lines, then suite totals.
    pub fn porcelain(&self) -> String {
        let mut s = String::new();
        let key = |name: &str| name.replace(char::is_whitespace, "_");
        for it in &self.items {
            let k = key(&it.name);
            writeln!(s, "{}.{k}.status={}", self.suite, it.status.word()).unwrap();
            if let Some(r) = it.status.reason() {
                writeln!(s, "{}.{k}.reason={r}", self.suite).unwrap();
            }
            for (dk, dv) in &it.details {
                writeln!(s, "{}.{k}.{dk}={dv}", self.suite).unwrap();
            }
        }
        for (k, v) in &self.summary {
            writeln!(s, "{}.{k}={v}", self.suite).unwrap();
        }
        writeln!(s, "{}.pass={}", self.suite, self.count("pass")).unwrap();
        writeln!(s, "{}.fail={}", self.suite, self.count("fail")).unwrap();
        writeln!(s, "{}.skip={}", self.suite, self.count("skip")).unwrap();
        s
    }

    /// Human-readable listing with one line per item.
    pub fn human(&self) -> String {
        let mut s = String::new();
        writeln!(s, "== {}", self.suite).unwrap();
        for it in &self.items {
            write!(s, "[{}] {}", it.status.word().to_uppercase(), it.name).unwrap();
            if let Some(r) = it.status.reason() {
                write!(s, ": {r}").unwrap();
            }
            if !it.details.is_empty() {
                let d: Vec<String> = it.details.iter().map(|(k, v)| format!("{k}={v}")).collect();
                write!(s, " ({})", d.join(", ")).unwrap();
            }
            s.push('\n');
        }
        for (k, v) in &self.summary {
            writeln!(s, "{k}: {v}").unwrap();
        }
        writeln!(s, "{}: {} pass, {} fail, {} skip", self.suite, self.count("pass"), self.count("fail"), self.count("skip")).unwrap();
        s
    }
}

/// Compares names with embedded numbers numerically: `B9 < B10`.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    fn chunks(s: &str) -> Vec<(bool, &str)> {
        let mut out = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 1..=bytes.len() {
            if i == bytes.len() || bytes[i].is_ascii_digit() != bytes[start].is_ascii_digit() {
                out.push((bytes[start].is_ascii_digit(), &s[start..i]));
                start = i;
            }
        }
        out
    }
    if a.is_empty() || b.is_empty() {
        return a.cmp(b);
    }
    let (ca, cb) = (chunks(a), chunks(b));
    for ((da, xa), (db, xb)) in ca.iter().zip(&cb) {
        let o = match (da, db) {
            (true, true) => {
                let (ta, tb) = (xa.trim_start_matches('0'), xb.trim_start_matches('0'));
                ta.len().cmp(&tb.len()).then(ta.cmp(tb)).then(xa.len().cmp(&xb.len()))
            }
            _ => xa.cmp(xb),
        };
        if o != Ordering::Equal {
            return o;
        }
    }
    ca.len().cmp(&cb.len())
}

/// Exit status over several reports: 0 when none failed, 1 otherwise.
pub fn combined_exit_code(reports: &[Report]) -> i32 {
    if reports.iter().all(Report::passed) {
        0
    } else {
        1
    }
}
