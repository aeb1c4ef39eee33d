//! Report assembly and rendering.

use std::fmt::Write;
use std::time::Instant;

use geolin_core::{ConditionReport, Outcome};
use geolin_expr::{Expr, Verdict};
use serde::Serialize;

use crate::{exit_code, Command, Options, SystemDocument};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessEntry {
    pub point: Vec<(String, String)>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordEntry {
    pub id: String,
    pub residual: String,
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroTestEcho {
    pub points: usize,
    pub precision_bits: usize,
    pub tolerance: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientEntry {
    pub name: String,
    pub value: String,
}

/// Everything one invocation reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub document: String,
    pub kind: String,
    pub command: &'static str,
    pub conditions: String,
    pub records: Vec<RecordEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub coefficients: Vec<CoefficientEntry>,
    pub diagnostics: Vec<String>,
    pub verdict: &'static str,
    pub zero_test: ZeroTestEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

fn outcome_of(r: &ConditionReport) -> Outcome {
    match r.kind.as_str() {
        "rejected" => Outcome::Fail,
        "undecided" => Outcome::Undecided,
        _ => r.outcome(),
    }
}

impl Report {
    pub(crate) fn new(
        doc: &SystemDocument,
        command: Command,
        report: ConditionReport,
        coefficients: Vec<(String, Expr)>,
        opts: &Options,
        start: Instant,
    ) -> Self {
        let cfg = &opts.zero_test;
        let records = report
            .records
            .iter()
            .map(|r| RecordEntry {
                id: r.id.clone(),
                residual: r.residual.to_string(),
                verdict: r.verdict.label(),
                witness: match &r.verdict {
                    Verdict::NonZero(w) => Some(WitnessEntry {
                        point: w.point.iter().map(|(s, v)| (s.to_string(), v.to_string())).collect(),
                        value: w.value,
                    }),
                    _ => None,
                },
                reason: match &r.verdict {
                    Verdict::Undecided(why) => Some(why.clone()),
                    _ => None,
                },
            })
            .collect();
        Report {
            document: doc.name.clone(),
            kind: doc.kind.name().to_string(),
            command: command.name(),
            conditions: report.kind.clone(),
            records,
            coefficients: coefficients
                .into_iter()
                .map(|(name, e)| CoefficientEntry {
                    name,
                    value: e.to_string(),
                })
                .collect(),
            diagnostics: report.diagnostics.clone(),
            verdict: outcome_of(&report).label(),
            zero_test: ZeroTestEcho {
                points: cfg.points,
                precision_bits: cfg.precision_bits,
                tolerance: cfg.tolerance,
                seed: cfg.seed,
            },
            timing_ms: opts.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
        }
    }

    pub fn outcome(&self) -> Outcome {
        match self.verdict {
            "PASS" => Outcome::Pass,
            "FAIL" => Outcome::Fail,
            _ => Outcome::Undecided,
        }
    }

    pub fn exit_code(&self) -> i32 {
        exit_code(self.outcome())
    }

    pub fn record(&self, id: &str) -> Option<&RecordEntry> {
        self.records.iter().find(|r| r.id == id)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
                s.push('\n');
                s
            }
            Format::Text => self.text(),
        }
    }

    fn text(&self) -> String {
        let mut s = String::new();
        let z = &self.zero_test;
        let _ = writeln!(s, "document: {}", self.document);
        let _ = writeln!(s, "kind: {}", self.kind);
        let _ = writeln!(s, "command: {}", self.command);
        let _ = writeln!(
            s,
            "zero test: {} points, {} bits, tolerance {:e}, seed {}",
            z.points, z.precision_bits, z.tolerance, z.seed
        );
        if !self.conditions.is_empty() && !self.records.is_empty() {
            let _ = writeln!(s, "conditions: {}", self.conditions);
        }
        let width = self.records.iter().map(|r| r.id.len()).max().unwrap_or(0);
        for r in &self.records {
            let _ = writeln!(s, "  {:width$}  {:9}  {}", r.id, r.verdict, r.residual);
            if let Some(w) = &r.witness {
                let point: Vec<String> = w.point.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let at = if point.is_empty() { String::new() } else { format!(" at {}", point.join(", ")) };
                let _ = writeln!(s, "  {:width$}  witness {:e}{at}", "", w.value);
            }
            if let Some(why) = &r.reason {
                let _ = writeln!(s, "  {:width$}  {why}", "");
            }
        }
        if !self.coefficients.is_empty() {
            let _ = writeln!(s, "[coefficients]");
            for c in &self.coefficients {
                let _ = writeln!(s, "{} = \"{}\"", c.name, c.value);
            }
        }
        for d in &self.diagnostics {
            let _ = writeln!(s, "note: {d}");
        }
        if let Some(ms) = self.timing_ms {
            let _ = writeln!(s, "time: {ms:.1} ms");
        }
        let _ = writeln!(s, "verdict: {}", self.verdict);
        s
    }
}
