//! Check reports with exact residuals.
//!
//! Every verifier returns a [`Report`] instead of failing: a named list of
//! checks, each carrying the nonzero residual sections it found.

use std::fmt;

use serde::Serialize;

use crate::geometry::VectorBundle;
use crate::symexpr::ScalarExpr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        })
    }
}

/// A nonzero residual: where it was evaluated and what it came out as.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Residual {
    pub at: String,
    pub value: String,
    #[serde(skip)]
    pub components: Vec<ScalarExpr>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub residuals: Vec<Residual>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Number of frame tuples evaluated.
    pub evaluated: usize,
}

impl Check {
    pub fn skipped(name: impl Into<String>, note: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: Status::Skipped,
            residuals: Vec::new(),
            note: Some(note.into()),
            evaluated: 0,
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Accumulates residuals for one named check. Zero residuals are dropped,
/// so the check passes iff nothing was recorded.
pub struct CheckBuilder<'a> {
    name: String,
    bundle: &'a VectorBundle,
    residuals: Vec<Residual>,
    evaluated: usize,
}

impl<'a> CheckBuilder<'a> {
    /// `bundle` names the frame used to print residual sections.
    pub fn new(name: impl Into<String>, bundle: &'a VectorBundle) -> Self {
        CheckBuilder {
            name: name.into(),
            bundle,
            residuals: Vec::new(),
            evaluated: 0,
        }
    }

    pub fn record(&mut self, at: impl FnOnce() -> String, value: Vec<ScalarExpr>) {
        self.evaluated += 1;
        if value.iter().all(ScalarExpr::is_zero) {
            return;
        }
        self.residuals.push(Residual {
            at: at(),
            value: self.bundle.render_components(&value),
            components: value,
        });
    }

    pub fn finish(self) -> Check {
        Check {
            status: if self.residuals.is_empty() {
                Status::Pass
            } else {
                Status::Fail
            },
            name: self.name,
            residuals: self.residuals,
            note: None,
            evaluated: self.evaluated,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub subject: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(subject: impl Into<String>) -> Self {
        Report {
            subject: subject.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn with(mut self, check: Check) -> Self {
        self.checks.push(check);
        self
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    /// No check failed (skipped checks do not count as failures).
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| c.status == Status::Fail)
            .map(|c| c.name.as_str())
            .collect()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.subject)?;
        for c in &self.checks {
            write!(f, "  [{}] {}", c.status, c.name)?;
            if let Some(note) = &c.note {
                write!(f, " ({note})")?;
            }
            writeln!(f)?;
            for r in &c.residuals {
                writeln!(f, "      at {}: {}", r.at, r.value)?;
            }
        }
        Ok(())
    }
}
