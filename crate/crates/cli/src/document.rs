//! INI-like system descriptions.
//!
//! ```text
//! # comment
//! [system]
//! name = "sys-ex3"
//! kind = "cubic-2"
//!
//! [coefficients]
//! A22 = "x/y + x/y^2"
//! ```
//!
//! Sections are `system`, `coefficients`, `transformation`, `metric` and
//! `gauge`. Omitted coefficients are zero.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use geolin_core::criteria::{Linear2, Quadratic2};
use geolin_core::geometry::{Geodesic2Coefficients, Metric};
use geolin_core::projection::{ScalarCubic, ScalarGauge, SystemCubic2, SystemGauge};
use geolin_core::transform::{is_reserved, Transformation};
use geolin_expr::{parse, Expr};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DocumentError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing [system] key `{0}`")]
    MissingKey(&'static str),
    #[error("unknown kind `{0}`")]
    UnknownKind(String),
    #[error("[{section}] has no key `{key}` for kind {kind}")]
    UnknownKey {
        section: &'static str,
        key: String,
        kind: Kind,
    },
    #[error("[{section}] must give every one of {expected}")]
    Incomplete {
        section: &'static str,
        expected: String,
    },
    #[error("{0}")]
    Invalid(String),
}

/// System families a document may describe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    ScalarCubic,
    Cubic2,
    Quadratic2,
    Linear2,
    Geodesic2,
    Geodesic3,
    General2,
}

impl Kind {
    pub const ALL: [Kind; 7] = [
        Kind::ScalarCubic,
        Kind::Cubic2,
        Kind::Quadratic2,
        Kind::Linear2,
        Kind::Geodesic2,
        Kind::Geodesic3,
        Kind::General2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::ScalarCubic => "scalar-cubic",
            Kind::Cubic2 => "cubic-2",
            Kind::Quadratic2 => "quadratic-2",
            Kind::Linear2 => "linear-2",
            Kind::Geodesic2 => "geodesic-2",
            Kind::Geodesic3 => "geodesic-3",
            Kind::General2 => "general-2",
        }
    }

    /// Number of coordinates, independent variable included.
    pub fn dimension(self) -> usize {
        match self {
            Kind::ScalarCubic | Kind::Geodesic2 => 2,
            _ => 3,
        }
    }

    pub fn coefficient_names(self) -> Vec<String> {
        let own = |names: &[&str]| names.iter().map(|s| s.to_string()).collect();
        match self {
            Kind::ScalarCubic => own(&ScalarCubic::NAMES),
            Kind::Cubic2 => own(&SystemCubic2::NAMES),
            Kind::Quadratic2 => own(&Quadratic2::NAMES),
            Kind::Linear2 => own(&Linear2::NAMES),
            Kind::Geodesic2 => own(&Geodesic2Coefficients::NAMES),
            Kind::Geodesic3 => christoffel_names(3),
            Kind::General2 => own(&["eq2", "eq3"]),
        }
    }

    pub fn gauge_names(self) -> &'static [&'static str] {
        match self {
            Kind::ScalarCubic => &["b", "e"],
            Kind::Cubic2 | Kind::Quadratic2 | Kind::Linear2 => &SystemGauge::NAMES,
            _ => &[],
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = DocumentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| DocumentError::UnknownKind(s.to_string()))
    }
}

/// `Gi_jk` with one-based indices and `j ≤ k`, in storage order.
pub fn christoffel_names(n: usize) -> Vec<String> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            for k in j..=n {
                out.push(format!("G{i}_{j}{k}"));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemDocument {
    pub name: String,
    pub kind: Kind,
    pub coefficients: BTreeMap<String, Expr>,
    pub transformation: Option<Transformation>,
    pub metric: Option<Metric>,
    pub gauge: BTreeMap<String, Expr>,
}

#[derive(Default)]
struct Raw {
    sections: BTreeMap<String, Vec<(usize, String, String)>>,
}

fn syntax(line: usize, message: impl Into<String>) -> DocumentError {
    DocumentError::Syntax {
        line,
        message: message.into(),
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn split_lines(text: &str) -> Result<Raw, DocumentError> {
    let mut raw = Raw::default();
    let mut current: Option<String> = None;
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| syntax(n, "unterminated section header"))?
                .trim();
            if !["system", "coefficients", "transformation", "metric", "gauge"].contains(&name) {
                return Err(syntax(n, format!("unknown section [{name}]")));
            }
            if raw.sections.contains_key(name) {
                return Err(syntax(n, format!("section [{name}] appears twice")));
            }
            raw.sections.insert(name.to_string(), Vec::new());
            current = Some(name.to_string());
            continue;
        }
        let section = current
            .as_ref()
            .ok_or_else(|| syntax(n, "entry before the first section"))?;
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| syntax(n, "expected `key = \"value\"`"))?;
        let key = key.trim();
        if !is_identifier(key) {
            return Err(syntax(n, format!("invalid key `{key}`")));
        }
        let value = value.trim();
        let body = value
            .strip_prefix('"')
            .ok_or_else(|| syntax(n, "value must be quoted"))?;
        let end = body
            .find('"')
            .ok_or_else(|| syntax(n, "unterminated string"))?;
        let trailing = body[end + 1..].trim();
        if !trailing.is_empty() && !trailing.starts_with('#') {
            return Err(syntax(n, format!("unexpected `{trailing}` after value")));
        }
        let entries = raw.sections.get_mut(section).expect("section exists");
        if entries.iter().any(|(_, k, _)| k == key) {
            return Err(syntax(n, format!("duplicate key `{key}`")));
        }
        entries.push((n, key.to_string(), body[..end].to_string()));
    }
    Ok(raw)
}

fn parse_expr(line: usize, src: &str, allow_derivatives: bool) -> Result<Expr, DocumentError> {
    let e = parse(src).map_err(|err| syntax(line, format!("{err}")))?;
    if !allow_derivatives {
        if let Some(s) = e.symbols().iter().find(|s| is_reserved(s.as_str())) {
            return Err(syntax(line, format!("reserved symbol `{s}` is not allowed here")));
        }
    }
    Ok(e)
}

fn keyed(
    raw: &Raw,
    section: &'static str,
    names: &[String],
    kind: Kind,
    allow_derivatives: bool,
) -> Result<Option<BTreeMap<String, Expr>>, DocumentError> {
    let Some(entries) = raw.sections.get(section) else {
        return Ok(None);
    };
    let mut out = BTreeMap::new();
    for (line, key, value) in entries {
        if !names.contains(key) {
            return Err(DocumentError::UnknownKey {
                section,
                key: key.clone(),
                kind,
            });
        }
        out.insert(key.clone(), parse_expr(*line, value, allow_derivatives)?);
    }
    Ok(Some(out))
}

fn complete(
    section: &'static str,
    names: &[String],
    mut map: BTreeMap<String, Expr>,
) -> Result<Vec<Expr>, DocumentError> {
    names
        .iter()
        .map(|n| map.remove(n))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| DocumentError::Incomplete {
            section,
            expected: names.join(", "),
        })
}

impl SystemDocument {
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let raw = split_lines(text)?;
        let system = raw
            .sections
            .get("system")
            .ok_or(DocumentError::MissingKey("kind"))?;
        let mut name = None;
        let mut kind = None;
        let mut coordinates = None;
        for (line, key, value) in system {
            match key.as_str() {
                "name" => name = Some(value.clone()),
                "kind" => kind = Some(value.parse::<Kind>()?),
                "coordinates" => coordinates = Some((*line, value.clone())),
                _ => return Err(syntax(*line, format!("unknown [system] key `{key}`"))),
            }
        }
        let name = name.ok_or(DocumentError::MissingKey("name"))?;
        let kind = kind.ok_or(DocumentError::MissingKey("kind"))?;
        let n = kind.dimension();
        let expected = ["x", "y", "z"][..n].join(", ");
        if let Some((line, c)) = coordinates {
            let given: Vec<&str> = c.split(',').map(str::trim).collect();
            if given.join(", ") != expected {
                return Err(syntax(line, format!("coordinates for {kind} must be `{expected}`")));
            }
        }

        let coefficients = keyed(
            &raw,
            "coefficients",
            &kind.coefficient_names(),
            kind,
            kind == Kind::General2,
        )?
        .unwrap_or_default();

        let x_names: Vec<String> = (1..=n).map(|i| format!("X{i}")).collect();
        let transformation = keyed(&raw, "transformation", &x_names, kind, false)?
            .map(|m| complete("transformation", &x_names, m))
            .transpose()?
            .map(|comps| Transformation::new(comps).map_err(|e| DocumentError::Invalid(e.to_string())))
            .transpose()?;

        let metric_names: Vec<String> = ["p", "q", "r"].map(String::from).to_vec();
        let metric = match raw.sections.get("metric") {
            Some(_) if n != 2 => {
                return Err(DocumentError::Invalid(format!("[metric] is not supported for {kind}")))
            }
            _ => keyed(&raw, "metric", &metric_names, kind, false)?
                .map(|m| complete("metric", &metric_names, m))
                .transpose()?
                .map(|v| {
                    let [p, q, r]: [Expr; 3] = v.try_into().expect("three entries");
                    Metric::from_pqr(p, q, r)
                }),
        };

        let gauge_names: Vec<String> = kind.gauge_names().iter().map(|s| s.to_string()).collect();
        let gauge = keyed(&raw, "gauge", &gauge_names, kind, false)?.unwrap_or_default();

        Ok(SystemDocument {
            name,
            kind,
            coefficients,
            transformation,
            metric,
            gauge,
        })
    }

    /// Coefficient `name`, zero if omitted.
    pub fn coefficient(&self, name: &str) -> Expr {
        self.coefficients.get(name).cloned().unwrap_or_else(Expr::zero)
    }

    fn ordered<const K: usize>(&self) -> [Expr; K] {
        let v: Vec<Expr> = self
            .kind
            .coefficient_names()
            .iter()
            .map(|n| self.coefficient(n))
            .collect();
        v.try_into().expect("schema length")
    }

    pub fn scalar_cubic(&self) -> Option<ScalarCubic> {
        let [e0, e1, e2, e3] = match self.kind {
            Kind::ScalarCubic => self.ordered(),
            _ => return None,
        };
        Some(ScalarCubic::new(e0, e1, e2, e3))
    }

    /// Any of the three two-equation cubic kinds, as a shared-cubic pair.
    pub fn system_cubic(&self) -> Option<SystemCubic2> {
        match self.kind {
            Kind::Cubic2 => Some(SystemCubic2::from_array(self.ordered())),
            Kind::Quadratic2 => Some(self.quadratic()?.to_system()),
            Kind::Linear2 => Some(self.linear()?.to_system()),
            _ => None,
        }
    }

    pub fn quadratic(&self) -> Option<Quadratic2> {
        (self.kind == Kind::Quadratic2).then(|| Quadratic2::from_array(self.ordered()))
    }

    pub fn linear(&self) -> Option<Linear2> {
        (self.kind == Kind::Linear2).then(|| Linear2::from_array(self.ordered()))
    }

    pub fn geodesic2(&self) -> Option<Geodesic2Coefficients> {
        (self.kind == Kind::Geodesic2).then(|| Geodesic2Coefficients::from_array(self.ordered()))
    }

    pub fn christoffel(&self) -> Option<geolin_core::geometry::Christoffel> {
        if self.kind != Kind::Geodesic3 {
            return None;
        }
        let mut values = self.ordered::<18>().into_iter();
        geolin_core::geometry::Christoffel::from_fn(3, |_, _, _| values.next().expect("18 entries")).ok()
    }

    pub fn implicit_equations(&self) -> Option<Vec<Expr>> {
        (self.kind == Kind::General2).then(|| vec![self.coefficient("eq2"), self.coefficient("eq3")])
    }

    /// Gauge entry `name` from `overrides`, then the gauge block, then zero.
    fn gauge_value(&self, overrides: &BTreeMap<String, Expr>, name: &str) -> Expr {
        overrides
            .get(name)
            .or_else(|| self.gauge.get(name))
            .cloned()
            .unwrap_or_else(Expr::zero)
    }

    pub fn scalar_gauge(&self, overrides: &BTreeMap<String, Expr>) -> ScalarGauge {
        ScalarGauge {
            b: self.gauge_value(overrides, "b"),
            e: self.gauge_value(overrides, "e"),
        }
    }

    pub fn system_gauge(&self, overrides: &BTreeMap<String, Expr>) -> SystemGauge {
        SystemGauge {
            gamma1_12: self.gauge_value(overrides, "G1_12"),
            gamma2_12: self.gauge_value(overrides, "G2_12"),
            gamma3_33: self.gauge_value(overrides, "G3_33"),
        }
    }
}
