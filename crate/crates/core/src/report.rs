//! Plain-data results of the verification checks. Serialization lives in
//! the CLI crate.

use alloc::string::String;
use alloc::vec::Vec;

use crate::linalg::Matrix;
use crate::qcore::ExactScalar;

/// One failed instance of an identity, located by the indices that apply.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub what: String,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub x: Option<usize>,
    /// Matrix coordinates `(row, col)` for matrix identities.
    pub entry: Option<(usize, usize)>,
    pub residual: ExactScalar,
}

impl Violation {
    pub fn new(what: impl Into<String>, residual: ExactScalar) -> Self {
        Violation { what: what.into(), n: None, m: None, x: None, entry: None, residual }
    }

    pub fn at_n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn at_m(mut self, m: usize) -> Self {
        self.m = Some(m);
        self
    }

    pub fn at_x(mut self, x: usize) -> Self {
        self.x = Some(x);
        self
    }

    pub fn at_entry(mut self, row: usize, col: usize) -> Self {
        self.entry = Some((row, col));
        self
    }
}

/// A closed-form constant that disagrees with the value recovered from the
/// matrix realization (or an alternate form that is known to fail).
#[derive(Clone, Debug, PartialEq)]
pub struct Discrepancy {
    pub name: String,
    pub formula: ExactScalar,
    pub solved: ExactScalar,
}

/// Auxiliary measured quantity attached to a report.
#[derive(Clone, Debug, PartialEq)]
pub enum Metric {
    Exact(ExactScalar),
    ExactList(Vec<ExactScalar>),
    Float(f64),
    FloatList(Vec<f64>),
    Flag(bool),
    Text(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub check: String,
    pub violations: Vec<Violation>,
    pub discrepancies: Vec<Discrepancy>,
    pub metrics: Vec<(String, Metric)>,
    /// Set when the check could not be evaluated for this instance.
    pub skipped: Option<String>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>) -> Self {
        CheckReport {
            check: check.into(),
            violations: Vec::new(),
            discrepancies: Vec::new(),
            metrics: Vec::new(),
            skipped: None,
        }
    }

    pub fn skip(check: impl Into<String>, reason: impl Into<String>) -> Self {
        let mut r = CheckReport::new(check);
        r.skipped = Some(reason.into());
        r
    }

    pub fn passed(&self) -> bool {
        self.skipped.is_none() && self.violations.is_empty()
    }

    pub fn is_skipped(&self) -> bool {
        self.skipped.is_some()
    }

    pub fn fail(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn metric(&mut self, name: impl Into<String>, m: Metric) {
        self.metrics.push((name.into(), m));
    }

    /// Records the first nonzero entry of a residual matrix, if any.
    pub fn expect_zero_matrix(&mut self, what: &str, residual: &Matrix) {
        if let Some((i, j, v)) = residual.first_nonzero() {
            self.fail(Violation::new(what, v.clone()).at_entry(i, j));
        }
    }
}
