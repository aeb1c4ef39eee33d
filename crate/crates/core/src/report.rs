use std::fmt;

use geolin_expr::{is_zero, Expr, Verdict, ZeroTestConfig};
use rayon::prelude::*;

/// One named residual and its zero-test verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionRecord {
    pub id: String,
    pub residual: Expr,
    pub verdict: Verdict,
}

/// Aggregate over a report's verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Undecided,
}

impl Outcome {
    pub fn label(self) -> &'static str {
        match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Undecided => "UNDECIDED",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// An ordered list of condition residuals for one system.
///
/// The outcome passes iff every verdict is ZERO and fails if any is NONZERO.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub kind: String,
    pub records: Vec<ConditionRecord>,
    /// Free-form findings that do not change the outcome.
    pub diagnostics: Vec<String>,
}

impl ConditionReport {
    /// Zero-tests every residual. Tests run in parallel; order is kept.
    pub fn evaluate<I>(kind: &str, items: I, cfg: &ZeroTestConfig) -> Self
    where
        I: IntoIterator<Item = (String, Expr)>,
    {
        let items: Vec<(String, Expr)> = items.into_iter().collect();
        let records = items
            .into_par_iter()
            .map(|(id, residual)| {
                let verdict = is_zero(&residual, cfg);
                ConditionRecord {
                    id,
                    residual,
                    verdict,
                }
            })
            .collect();
        ConditionReport {
            kind: kind.to_string(),
            records,
            diagnostics: Vec::new(),
        }
    }

    pub fn outcome(&self) -> Outcome {
        let mut undecided = false;
        for r in &self.records {
            match r.verdict {
                Verdict::NonZero(_) => return Outcome::Fail,
                Verdict::Undecided(_) => undecided = true,
                Verdict::Zero => {}
            }
        }
        if undecided {
            Outcome::Undecided
        } else {
            Outcome::Pass
        }
    }

    pub fn passed(&self) -> bool {
        self.outcome() == Outcome::Pass
    }

    pub fn get(&self, id: &str) -> Option<&ConditionRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    pub fn residual(&self, id: &str) -> Option<&Expr> {
        self.get(id).map(|r| &r.residual)
    }

    pub fn residuals(&self) -> Vec<Expr> {
        self.records.iter().map(|r| r.residual.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Ids of records whose verdict is not ZERO.
    pub fn failing(&self) -> Vec<&str> {
        self.records
            .iter()
            .filter(|r| !r.verdict.is_zero())
            .map(|r| r.id.as_str())
            .collect()
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.records {
            writeln!(f, "{:<28} {:<9} {}", r.id, r.verdict.label(), r.residual)?;
        }
        for d in &self.diagnostics {
            writeln!(f, "note: {d}")?;
        }
        write!(f, "{}: {}", self.kind, self.outcome())
    }
}
