//! Front end for the `geolin` binary: documents in, condition reports out.

pub mod document;
mod output;

use std::collections::BTreeMap;

use geolin_core::criteria::{
    appendix_residuals, check_cubic2, check_linear2, check_quadratic2, lie_gauge_residuals,
    tresse_scalar,
};
use geolin_core::geometry::{geodesic2_flat_conditions, metric_pde_residuals, riemann, Christoffel};
use geolin_core::projection::{
    lift_scalar, lift_system, project_scalar, project_system, ScalarCubic, SystemCubic2,
};
use geolin_core::transform::{
    coefficients_from_transformation, general_from_equations, normal_form, normal_form_explicit,
    verify_linearizing_transformation, ExplicitSystem, NormalFormCoefficients,
};
use geolin_core::{ConditionReport, Outcome};
use geolin_expr::{parse, Expr, ZeroTestConfig};

pub use document::{christoffel_names, DocumentError, Kind, SystemDocument};
pub use output::{CoefficientEntry, Format, RecordEntry, Report, WitnessEntry, ZeroTestEcho};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Check,
    Project,
    Lift,
    VerifyTransform,
    VerifyMetric,
    Riemann,
    NormalForm,
    Appendix,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Check,
        Command::Project,
        Command::Lift,
        Command::VerifyTransform,
        Command::VerifyMetric,
        Command::Riemann,
        Command::NormalForm,
        Command::Appendix,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Project => "project",
            Command::Lift => "lift",
            Command::VerifyTransform => "verify-transform",
            Command::VerifyMetric => "verify-metric",
            Command::Riemann => "riemann",
            Command::NormalForm => "normal-form",
            Command::Appendix => "appendix",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error("`{command}` does not apply to kind {kind}")]
    Mismatch { command: &'static str, kind: Kind },
    #[error("`{command}` needs a [{block}] block")]
    MissingBlock {
        command: &'static str,
        block: &'static str,
    },
    #[error("bad --gauge `{0}`: expected name=expression")]
    GaugeFlag(String),
    #[error("--gauge {name} is not a gauge entry for kind {kind}")]
    GaugeName { name: String, kind: Kind },
    #[error("{0}")]
    Core(geolin_core::Error),
}

/// Options shared by every command.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub zero_test: ZeroTestConfig,
    /// Raw `name=expr` gauge overrides.
    pub gauge: Vec<String>,
    pub timing: bool,
}

/// Process exit status for a finished report.
pub fn exit_code(outcome: Outcome) -> i32 {
    match outcome {
        Outcome::Pass => 0,
        Outcome::Fail => 1,
        Outcome::Undecided => 2,
    }
}

/// Exit status for input errors.
pub const INPUT_ERROR: i32 = 3;

fn gauge_overrides(doc: &SystemDocument, raw: &[String]) -> Result<BTreeMap<String, Expr>, InputError> {
    let mut out = BTreeMap::new();
    for g in raw {
        let (name, src) = g.split_once('=').ok_or_else(|| InputError::GaugeFlag(g.clone()))?;
        let name = name.trim();
        if !doc.kind.gauge_names().contains(&name) {
            return Err(InputError::GaugeName {
                name: name.to_string(),
                kind: doc.kind,
            });
        }
        let e = parse(src).map_err(|e| InputError::GaugeFlag(format!("{g}: {e}")))?;
        out.insert(name.to_string(), e);
    }
    Ok(out)
}

/// Core errors that describe the mathematics rather than the input become
/// a report with no residuals.
fn settle(err: geolin_core::Error) -> Result<ConditionReport, InputError> {
    use geolin_core::Error as E;
    let mut report = ConditionReport::evaluate("", Vec::new(), &ZeroTestConfig::default());
    report.diagnostics.push(err.to_string());
    match err {
        E::DegenerateJacobian
        | E::NotTransverse
        | E::DegenerateMetric
        | E::SingularSecondDerivatives
        | E::NotPolynomialInFirstDerivatives(_) => {
            report.kind = "rejected".into();
            Ok(report)
        }
        E::UndecidedJacobian(_) | E::UndecidedDeterminant(_) => {
            report.kind = "undecided".into();
            Ok(report)
        }
        other => Err(InputError::Core(other)),
    }
}

fn merge(kind: &str, parts: Vec<ConditionReport>) -> ConditionReport {
    let mut out = ConditionReport::evaluate(kind, Vec::new(), &ZeroTestConfig::default());
    for p in parts {
        out.records.extend(p.records);
        out.diagnostics.extend(p.diagnostics);
    }
    out
}

fn riemann_report(gamma: &Christoffel, cfg: &ZeroTestConfig) -> ConditionReport {
    let r = riemann(gamma);
    let items = r.independent().into_iter().map(|((i, j, k, l), e)| {
        (format!("riemann.{}{}{}{}", i + 1, j + 1, k + 1, l + 1), e.clone())
    });
    ConditionReport::evaluate("flat connection", items, cfg)
}

fn scalar_entries(eq: &ScalarCubic) -> Vec<(String, Expr)> {
    ScalarCubic::NAMES.iter().map(|n| n.to_string()).zip(eq.to_array()).collect()
}

fn system_entries(s: &SystemCubic2) -> Vec<(String, Expr)> {
    SystemCubic2::NAMES.iter().map(|n| n.to_string()).zip(s.to_array()).collect()
}

fn christoffel_entries(g: &Christoffel) -> Vec<(String, Expr)> {
    christoffel_names(g.dimension())
        .into_iter()
        .zip(g.components().into_iter().map(|(_, e)| e.clone()))
        .collect()
}

fn normal_form_entries(c: &NormalFormCoefficients) -> Vec<(String, Expr)> {
    match c {
        NormalFormCoefficients::Scalar(eq) => scalar_entries(eq),
        NormalFormCoefficients::System(s) => system_entries(s),
    }
}

/// The connection a document stands for, lifting cubic kinds with the gauge.
fn connection(doc: &SystemDocument, gauge: &BTreeMap<String, Expr>) -> Option<Christoffel> {
    if let Some(k) = doc.geodesic2() {
        return Some(k.to_christoffel());
    }
    if let Some(g) = doc.christoffel() {
        return Some(g);
    }
    if let Some(eq) = doc.scalar_cubic() {
        return Some(lift_scalar(&eq, &doc.scalar_gauge(gauge)).to_christoffel());
    }
    doc.system_cubic()
        .map(|s| lift_system(&s, &doc.system_gauge(gauge)))
}

fn explicit(doc: &SystemDocument, cfg: &ZeroTestConfig) -> geolin_core::Result<ExplicitSystem> {
    if let Some(eq) = doc.scalar_cubic() {
        return Ok(ExplicitSystem::from_scalar_cubic(&eq));
    }
    if let Some(s) = doc.system_cubic() {
        return Ok(ExplicitSystem::from_cubic2(&s));
    }
    if let Some(k) = doc.geodesic2() {
        return Ok(ExplicitSystem::from_scalar_cubic(&project_scalar(&k.to_christoffel())));
    }
    if let Some(g) = doc.christoffel() {
        return Ok(ExplicitSystem::from_cubic2(&project_system(&g)));
    }
    let eqs = doc.implicit_equations().expect("every kind covered");
    ExplicitSystem::from_implicit(&eqs, cfg)
}

fn check_general(
    doc: &SystemDocument,
    cfg: &ZeroTestConfig,
    coefficients: &mut Vec<(String, Expr)>,
) -> Result<ConditionReport, InputError> {
    let eqs = doc.implicit_equations().expect("general kind");
    let (_, form) = general_from_equations(&eqs, cfg).map_err(InputError::Core)?;
    let solved = ExplicitSystem::from_implicit(&eqs, cfg).and_then(|sys| normal_form_explicit(&sys, cfg));
    match solved {
        Ok(nf) => {
            *coefficients = normal_form_entries(&nf.coefficients);
            let mut parts = vec![form];
            let polynomial = nf.report.outcome() == Outcome::Pass;
            parts.push(nf.report);
            if let (true, NormalFormCoefficients::System(s)) = (polynomial, &nf.coefficients) {
                parts.push(check_cubic2(s, cfg));
            }
            Ok(merge("general form, cubic form, cubic-2", parts))
        }
        Err(e) => {
            let mut r = settle(e)?;
            r.records = form.records;
            Ok(r)
        }
    }
}

/// Runs `command` on a parsed document.
pub fn run(command: Command, doc: &SystemDocument, opts: &Options) -> Result<Report, InputError> {
    let start = std::time::Instant::now();
    let cfg = &opts.zero_test;
    let gauge = gauge_overrides(doc, &opts.gauge)?;
    let mismatch = || InputError::Mismatch {
        command: command.name(),
        kind: doc.kind,
    };
    let missing = |block| InputError::MissingBlock {
        command: command.name(),
        block,
    };
    let mut coefficients = Vec::new();
    let report = match command {
        Command::Check => match doc.kind {
            Kind::ScalarCubic => tresse_scalar(&doc.scalar_cubic().unwrap(), cfg),
            Kind::Cubic2 => check_cubic2(&doc.system_cubic().unwrap(), cfg),
            Kind::Quadratic2 => {
                check_quadratic2(&doc.quadratic().unwrap(), cfg).map_err(InputError::Core)?
            }
            Kind::Linear2 => check_linear2(&doc.linear().unwrap(), cfg).map_err(InputError::Core)?,
            Kind::Geodesic2 => geodesic2_flat_conditions(&doc.geodesic2().unwrap(), cfg),
            Kind::Geodesic3 => riemann_report(&doc.christoffel().unwrap(), cfg),
            Kind::General2 => check_general(doc, cfg, &mut coefficients)?,
        },
        Command::Project => {
            if let Some(k) = doc.geodesic2() {
                coefficients = scalar_entries(&project_scalar(&k.to_christoffel()));
            } else if let Some(g) = doc.christoffel() {
                coefficients = system_entries(&project_system(&g));
            } else {
                return Err(mismatch());
            }
            ConditionReport::evaluate("projection", Vec::new(), cfg)
        }
        Command::Lift => {
            if let Some(eq) = doc.scalar_cubic() {
                let k = lift_scalar(&eq, &doc.scalar_gauge(&gauge));
                coefficients = ["a", "b", "c", "d", "e", "f"]
                    .iter()
                    .map(|n| n.to_string())
                    .zip(k.to_array())
                    .collect();
            } else if let Some(s) = doc.system_cubic() {
                coefficients = christoffel_entries(&lift_system(&s, &doc.system_gauge(&gauge)));
            } else {
                return Err(mismatch());
            }
            ConditionReport::evaluate("lift", Vec::new(), cfg)
        }
        Command::VerifyTransform => {
            let t = doc.transformation.as_ref().ok_or_else(|| missing("transformation"))?;
            let checked = explicit(doc, cfg).and_then(|sys| verify_linearizing_transformation(&sys, t, cfg));
            match checked {
                Ok(r) => r,
                Err(e) => settle(e)?,
            }
        }
        Command::VerifyMetric => {
            let g = doc.metric.as_ref().ok_or_else(|| missing("metric"))?;
            let k = match (doc.geodesic2(), doc.scalar_cubic()) {
                (Some(k), _) => k,
                (None, Some(eq)) => lift_scalar(&eq, &doc.scalar_gauge(&gauge)),
                _ => return Err(mismatch()),
            };
            let check = metric_pde_residuals(&k, g, cfg).map_err(InputError::Core)?;
            let mut r = check.report;
            let note = match &check.degeneracy {
                v if v.is_zero() => "metric is degenerate: determinant is identically zero".to_string(),
                v if v.is_nonzero() => "metric is non-degenerate".to_string(),
                v => format!("metric degeneracy undecided: {v}"),
            };
            r.diagnostics.push(format!("{note}; determinant = {}", check.determinant));
            r
        }
        Command::Riemann => riemann_report(&connection(doc, &gauge).ok_or_else(mismatch)?, cfg),
        Command::NormalForm => {
            let solved = if let Some(eqs) = doc.implicit_equations() {
                ExplicitSystem::from_implicit(&eqs, cfg).and_then(|sys| normal_form_explicit(&sys, cfg))
            } else {
                let t = doc.transformation.as_ref().ok_or_else(|| missing("transformation"))?;
                coefficients_from_transformation(t, cfg).and_then(|gs| normal_form(&gs, cfg))
            };
            match solved {
                Ok(nf) => {
                    coefficients = normal_form_entries(&nf.coefficients);
                    nf.report
                }
                Err(e) => settle(e)?,
            }
        }
        Command::Appendix => {
            if let Some(eq) = doc.scalar_cubic() {
                lie_gauge_residuals(&eq, &doc.scalar_gauge(&gauge), cfg)
            } else if let Some(s) = doc.system_cubic() {
                appendix_residuals(&s, &doc.system_gauge(&gauge), cfg)
            } else {
                return Err(mismatch());
            }
        }
    };
    Ok(Report::new(doc, command, report, coefficients, opts, start))
}

/// Parses `text` and runs `command`; returns the exit status and output.
pub fn run_text(command: Command, text: &str, opts: &Options, format: Format) -> (i32, String) {
    let result = SystemDocument::parse(text)
        .map_err(InputError::from)
        .and_then(|doc| run(command, &doc, opts));
    match result {
        Ok(report) => (report.exit_code(), report.render(format)),
        Err(e) => (INPUT_ERROR, format!("error: {e}\n")),
    }
}
