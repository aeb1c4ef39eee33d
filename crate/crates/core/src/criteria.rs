//! Linearizability conditions on equation coefficients, evaluated as exact
//! residuals.
//!
//! Long condition lists are stored as expression templates in which a
//! coefficient name followed by `_x`, `_y`, `_z` (or several of them)
//! denotes a partial derivative, e.g. `C3_2_x` for `∂C³₂/∂x`.

use std::collections::BTreeMap;

use geolin_expr::{ex, is_zero, Expr, Symbol, ZeroTestConfig};

use crate::geometry::{flat_residuals, geodesic2_flat_conditions, Geodesic2Coefficients};
use crate::projection::{lift_scalar, ScalarCubic, ScalarGauge, SystemCubic2, SystemGauge};
use crate::{ConditionReport, Error, Result};

/// Instantiates a template, resolving `name` and `name_<vars>` against
/// `values`. Panics on a symbol it cannot resolve; templates are fixed.
fn instantiate(template: &str, values: &BTreeMap<&str, Expr>) -> Expr {
    let t = ex(template);
    let mut map = BTreeMap::new();
    for s in t.symbols() {
        map.insert(s.clone(), resolve(s.as_str(), values));
    }
    t.substitute(&map)
}

fn resolve(name: &str, values: &BTreeMap<&str, Expr>) -> Expr {
    if let Some(v) = values.get(name) {
        return v.clone();
    }
    let (base, vars) = name
        .rsplit_once('_')
        .filter(|(_, v)| !v.is_empty() && v.chars().all(|c| matches!(c, 'x' | 'y' | 'z')))
        .unwrap_or_else(|| panic!("unresolved template symbol {name}"));
    let mut e = values
        .get(base)
        .unwrap_or_else(|| panic!("unresolved template symbol {name}"))
        .clone();
    for c in vars.chars() {
        e = e.diff(&Symbol::new(&c.to_string()));
    }
    e
}

fn system_values(s: &SystemCubic2) -> BTreeMap<&'static str, Expr> {
    SystemCubic2::NAMES.into_iter().zip(s.to_array()).collect()
}

/// The two relative invariants of a scalar cubic equation:
///
/// ```text
/// 3(E1E3)_x − E1_yy + 2E2_xy − 3(E0E3)_y + E2E1_y − 2E2E2_x − 3E3_xx − 3E3E0_y
/// 3(E0E3)_x + 2E1_xy − 3E0_yy − E2_xx − E1E2_x + 2E1E1_y − 3(E0E2)_y + 3E0E3_x
/// ```
pub fn tresse_residuals(eq: &ScalarCubic) -> [Expr; 2] {
    let x = Symbol::new("x");
    let y = Symbol::new("y");
    let (e0, e1, e2, e3) = (&eq.e0, &eq.e1, &eq.e2, &eq.e3);
    let dx = |e: &Expr| e.diff(&x);
    let dy = |e: &Expr| e.diff(&y);
    let three = Expr::int(3);
    let two = Expr::int(2);
    let r1 = &three * &dx(&(e1 * e3)) - dy(&dy(e1)) + &two * &dy(&dx(e2))
        - &three * &dy(&(e0 * e3))
        + e2 * &dy(e1)
        - &two * &(e2 * &dx(e2))
        - &three * &dx(&dx(e3))
        - &three * &(e3 * &dy(e0));
    let r2 = &three * &dx(&(e0 * e3)) + &two * &dy(&dx(e1)) - &three * &dy(&dy(e0))
        - dx(&dx(e2))
        - e1 * &dx(e2)
        + &two * &(e1 * &dy(e1))
        - &three * &dy(&(e0 * e2))
        + &three * &(e0 * &dx(e3));
    [r1, r2]
}

pub fn tresse_scalar(eq: &ScalarCubic, cfg: &ZeroTestConfig) -> ConditionReport {
    let [r1, r2] = tresse_residuals(eq);
    ConditionReport::evaluate(
        "scalar-cubic invariants",
        [("tresse.1".to_string(), r1), ("tresse.2".to_string(), r2)],
        cfg,
    )
}

/// Flatness of the lift of `eq` under the given `b, e`. Passing shows the
/// gauge witnesses linearizability.
pub fn lie_gauge_residuals(
    eq: &ScalarCubic,
    gauge: &ScalarGauge,
    cfg: &ZeroTestConfig,
) -> ConditionReport {
    let mut r = geodesic2_flat_conditions(&lift_scalar(eq, gauge), cfg);
    r.kind = "scalar-cubic lift flatness".to_string();
    r
}

const CUBIC2: [&str; 15] = [
    "1/2*C3_2_x - D3_y + 1/4*C3_3*C3_2 + 1/4*C2_2*C3_2 - D2*B3_22 - D3*B3_23",
    "B3_22_x - 1/2*C3_2_y - A22*D3 + 1/2*C3_2*B2_22 + 1/2*C3_3*B3_22 - 1/2*C2_2*B3_22 - 1/2*B3_23*C3_2",
    "B3_23_x - 1/3*B2_22_x + 1/6*C2_2_y - 4/3*D3*A23 - 2/3*B3_22*C2_3 + 2/3*B2_23*C3_2 - 1/2*C3_3_y",
    "1/2*C2_3_x - D2_z + 1/4*C2_3*C3_3 + 1/4*C2_3*C2_2 - B2_23*D2 - B2_33*D3",
    "B2_33_x - 1/2*C2_3_z - D2*A33 + 1/2*C2_3*B3_33 - 1/2*B2_23*C2_3 - 1/2*B2_33*C3_3 + 1/2*B2_33*C2_2",
    "-A23_y + A22_z - A22*B2_23 - A23*B3_23 + A23*B2_22 + A33*B3_22",
    "-A33_y + A23_z - A22*B2_33 - A23*B3_33 + A23*B2_23 + A33*B3_23",
    "-A23_x + 5/6*A23*C2_2 + 1/3*A33*C3_2 - 1/3*B3_23_z + B2_33*B3_22 + 1/6*C3_3*A23 - B2_23*B3_23 \
     - 2/3*B2_23_y + 1/3*B3_33_y + 2/3*B2_22_z - 1/3*C2_3*A22",
    "-A33_x + 1/2*C2_2*A33 + 1/2*A33*C3_3 - B2_33_y + B2_23_z - B2_22*B2_33 + B2_23*B2_23 \
     - B2_23*B3_33 + B2_33*B3_23",
    "-2/3*B2_22_x + 1/3*C2_2_y - 1/2*C3_2*B3_33 + D2*A22 - 2/3*D3*A23 - 1/3*C2_3*B3_22 \
     + 5/6*B2_23*C3_2 + B3_23_x - 1/2*C3_2_z + 1/2*C3_3*B3_23 - 1/2*C2_2*B3_23",
    "-A22_x + 1/2*C2_2*A22 - B3_22*B3_33 + B3_23_y - B3_22_z + B3_22*B2_23 + B3_23*B3_23 \
     + 1/2*C3_3*A22 - B3_23*B2_22",
    "D2_y + B2_22*D2 + D3*B2_23 - D3*B3_33 + 1/2*C3_3_x - 1/2*C2_2_x - D3_z + 1/4*C3_3*C3_3 \
     - 1/4*C2_2*C2_2 - B3_23*D2",
    "-2*A23_x + 4/3*B3_33_y + 1/3*A23*C2_2 + 5/3*A23*C3_3 + 2/3*C2_3*A22 - 4/3*B3_23_z \
     - 2/3*C3_2*A33 + 2*B3_22*B2_33 - 2*B3_23*B2_23 - 2/3*B2_23_y + 2/3*B2_22_z",
    "B2_23_x + 1/2*C2_3_y - 2*D2*A23 + 1/2*C2_3*B3_23 + 1/2*C2_3*B2_22 + 1/2*C3_3*B2_23 \
     - 1/2*B2_23*C2_2 - B2_33*C3_2 - C2_2_z - D3*A33",
    "-B2_23_x + B3_33_x + C2_3_y - C2_3*B3_23 + C2_3*B2_22 + B2_23*C3_3 - B2_23*C2_2 \
     - 1/2*C3_3_z - 1/2*C2_2_z - 2*D3*A33",
];

/// The fifteen residuals of the shared-cubic pair, `cubic.1` … `cubic.15`.
pub fn cubic2_residuals(s: &SystemCubic2) -> Vec<Expr> {
    let v = system_values(s);
    CUBIC2.iter().map(|t| instantiate(t, &v)).collect()
}

pub fn check_cubic2(s: &SystemCubic2, cfg: &ZeroTestConfig) -> ConditionReport {
    let items = cubic2_residuals(s)
        .into_iter()
        .enumerate()
        .map(|(i, r)| (format!("cubic.{}", i + 1), r));
    ConditionReport::evaluate("cubic-2", items, cfg)
}

fn require_independent(name: &str, e: &Expr, vars: &[&str], cfg: &ZeroTestConfig) -> Result<()> {
    for v in vars {
        if !is_zero(&e.diff(&Symbol::new(v)), cfg).is_zero() {
            return Err(Error::ForbiddenDependence {
                name: name.to_string(),
                var: v.to_string(),
            });
        }
    }
    Ok(())
}

/// `y'' + B²(y', z') = 0`, `z'' + B³(y', z') = 0` with coefficients in `(y, z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic2 {
    pub b2_22: Expr,
    pub b2_23: Expr,
    pub b2_33: Expr,
    pub b3_22: Expr,
    pub b3_23: Expr,
    pub b3_33: Expr,
}

impl Quadratic2 {
    pub const NAMES: [&'static str; 6] = ["B2_22", "B2_23", "B2_33", "B3_22", "B3_23", "B3_33"];

    pub fn from_array([b2_22, b2_23, b2_33, b3_22, b3_23, b3_33]: [Expr; 6]) -> Self {
        Quadratic2 {
            b2_22,
            b2_23,
            b2_33,
            b3_22,
            b3_23,
            b3_33,
        }
    }

    pub fn to_array(&self) -> [Expr; 6] {
        [
            self.b2_22.clone(),
            self.b2_23.clone(),
            self.b2_33.clone(),
            self.b3_22.clone(),
            self.b3_23.clone(),
            self.b3_33.clone(),
        ]
    }

    pub fn to_system(&self) -> SystemCubic2 {
        SystemCubic2 {
            b2_22: self.b2_22.clone(),
            b2_23: self.b2_23.clone(),
            b2_33: self.b2_33.clone(),
            b3_22: self.b3_22.clone(),
            b3_23: self.b3_23.clone(),
            b3_33: self.b3_33.clone(),
            ..SystemCubic2::zero()
        }
    }

    /// Fails if any coefficient depends on `x`.
    pub fn validate(&self, cfg: &ZeroTestConfig) -> Result<()> {
        for (n, e) in Self::NAMES.iter().zip(self.to_array()) {
            require_independent(n, &e, &["x"], cfg)?;
        }
        Ok(())
    }
}

const QUADRATIC2: [&str; 4] = [
    "-B3_22*B3_33 + B3_23_y - B3_22_z + B3_22*B2_23 + B3_23*B3_23 - B3_23*B2_22",
    "4/3*B3_33_y - 4/3*B3_23_z + 2*B3_22*B2_33 - 2*B3_23*B2_23 - 2/3*B2_23_y + 2/3*B2_22_z",
    "-1/3*B3_23_z + B2_33*B3_22 - B2_23*B3_23 - 2/3*B2_23_y + 1/3*B3_33_y + 2/3*B2_22_z",
    "-B2_33_y + B2_23_z - B2_22*B2_33 + B2_23*B2_23 - B2_23*B3_33 + B2_33*B3_23",
];

/// The four residuals of the quadratic pair, without input validation.
pub fn quadratic2_residuals(q: &Quadratic2) -> [Expr; 4] {
    let v: BTreeMap<&str, Expr> = Quadratic2::NAMES.into_iter().zip(q.to_array()).collect();
    QUADRATIC2.map(|t| instantiate(t, &v))
}

pub fn check_quadratic2(q: &Quadratic2, cfg: &ZeroTestConfig) -> Result<ConditionReport> {
    q.validate(cfg)?;
    let items = quadratic2_residuals(q)
        .into_iter()
        .enumerate()
        .map(|(i, r)| (format!("quadratic.{}", i + 1), r));
    Ok(ConditionReport::evaluate("quadratic-2", items, cfg))
}

/// `y'' + C²₂y' + C²₃z' + D² = 0`, `z'' + C³₂y' + C³₃z' + D³ = 0` with the
/// `C` depending on `x` only.
#[derive(Debug, Clone, PartialEq)]
pub struct Linear2 {
    pub c2_2: Expr,
    pub c2_3: Expr,
    pub c3_2: Expr,
    pub c3_3: Expr,
    pub d2: Expr,
    pub d3: Expr,
}

impl Linear2 {
    pub const NAMES: [&'static str; 6] = ["C2_2", "C2_3", "C3_2", "C3_3", "D2", "D3"];

    pub fn from_array([c2_2, c2_3, c3_2, c3_3, d2, d3]: [Expr; 6]) -> Self {
        Linear2 {
            c2_2,
            c2_3,
            c3_2,
            c3_3,
            d2,
            d3,
        }
    }

    pub fn to_array(&self) -> [Expr; 6] {
        [
            self.c2_2.clone(),
            self.c2_3.clone(),
            self.c3_2.clone(),
            self.c3_3.clone(),
            self.d2.clone(),
            self.d3.clone(),
        ]
    }

    pub fn to_system(&self) -> SystemCubic2 {
        SystemCubic2 {
            c2_2: self.c2_2.clone(),
            c2_3: self.c2_3.clone(),
            c3_2: self.c3_2.clone(),
            c3_3: self.c3_3.clone(),
            d2: self.d2.clone(),
            d3: self.d3.clone(),
            ..SystemCubic2::zero()
        }
    }

    /// Fails if any `C` depends on `y` or `z`.
    pub fn validate(&self, cfg: &ZeroTestConfig) -> Result<()> {
        for (n, e) in Self::NAMES.iter().zip(self.to_array()).take(4) {
            require_independent(n, &e, &["y", "z"], cfg)?;
        }
        Ok(())
    }
}

const LINEAR2: [&str; 3] = [
    "1/2*C3_2_x + 1/4*C3_3*C3_2 + 1/4*C2_2*C3_2 - D3_y",
    "1/2*C2_3_x + 1/4*C2_3*C3_3 + 1/4*C2_3*C2_2 - D2_z",
    "1/2*C3_3_x - 1/2*C2_2_x + 1/4*C3_3*C3_3 - 1/4*C2_2*C2_2 - (D3_z - D2_y)",
];

/// The three residuals of the linear pair as `lhs − rhs`.
pub fn linear2_residuals(l: &Linear2) -> [Expr; 3] {
    let v: BTreeMap<&str, Expr> = Linear2::NAMES.into_iter().zip(l.to_array()).collect();
    LINEAR2.map(|t| instantiate(t, &v))
}

pub fn check_linear2(l: &Linear2, cfg: &ZeroTestConfig) -> Result<ConditionReport> {
    l.validate(cfg)?;
    let items = linear2_residuals(l)
        .into_iter()
        .enumerate()
        .map(|(i, r)| (format!("linear.{}", i + 1), r));
    Ok(ConditionReport::evaluate("linear-2", items, cfg))
}

/// Flatness of a three-dimensional lift written out: seven lines free of
/// the gauge and seventeen that give a first derivative of
/// `G1_12 = Γ¹₁₂`, `G2_12 = Γ²₁₂` or `G3_33 = Γ³₃₃`, each as
/// `derivative − expression`. Ids name the derivative; repeated
/// derivatives carry a running index.
const LIFT_FLATNESS: [(&str, &str); 24] = [
    ("coefficient.1", "1/2*C3_2_x - D3_y + 1/4*C3_3*C3_2 + 1/4*C2_2*C3_2 - D2*B3_22 - D3*B3_23"),
    ("coefficient.2", "B3_22_x - 1/2*C3_2_y - A22*D3 + 1/2*C3_2*B2_22 + 1/2*C3_3*B3_22 - 1/2*C2_2*B3_22 - 1/2*B3_23*C3_2"),
    ("G1_12_y.1", "G1_12_y - (-A22_x - A22*G2_12 + C2_2*A22 + G1_12*B2_22 + G1_12*G1_12 + 1/2*B3_22*G3_33 - 1/2*B3_22*B3_33 + 1/2*C3_2*A23)"),
    ("G2_12_x.1", "G2_12_x - (D2_y + D2*G1_12 + G2_12*G2_12 - 1/4*C2_3*C3_2 - G2_12*C2_2 + B2_22*D2 + D3*B2_23 - 1/2*D3*B3_33 + 1/2*D3*G3_33)"),
    ("G2_12_y", "G2_12_y - (-1/3*B2_22_x + 2/3*C2_2_y + G1_12*G2_12 + 1/4*C3_2*G3_33 - 1/4*C3_2*B3_33 + D2*A22 + 2/3*D3*A23 - 1/6*C2_3*B3_22 + 1/6*B2_23*C3_2)"),
    ("G1_12_x.1", "G1_12_x - (-2/3*B2_22_x + 1/3*C2_2_y + G1_12*G2_12 + 1/4*C3_2*G3_33 - 1/4*C3_2*B3_33 + D2*A22 + 1/3*D3*A23 - 1/3*C2_3*B3_22 + 1/3*B2_23*C3_2)"),
    ("coefficient.3", "B3_23_x - 1/3*B2_22_x + 1/6*C2_2_y - 4/3*D3*A23 - 2/3*B3_22*C2_3 + 2/3*B2_23*C3_2 - 1/2*C3_3_y"),
    ("G3_33_y.1", "G3_33_y - (-2*A23_x + B3_33_y - 2*G2_12*A23 + A23*C2_2 + 2*G1_12*B2_23 + G1_12*G3_33 - G1_12*B3_33 + G3_33*B3_23 - B3_33*B3_23 + A22*C2_3 + A23*C3_3)"),
    ("G3_33_x.1", "G3_33_x - (-2*B2_23_x + B3_33_x + C2_3_y + 2*D2*A23 - C2_3*B3_23 + C2_3*G1_12 - G2_12*B3_33 + C2_3*B2_22 + B2_23*C3_3 - B2_23*C2_2 - 1/2*C3_3*B3_33 + 1/2*B3_33*C2_2 + 1/2*C3_3*G3_33 - 1/2*C2_2*G3_33 + G3_33*G2_12)"),
    ("G1_12_x.2", "G1_12_x - (-B3_23_x + 1/2*C3_2_z + D3*A23 - 1/2*C3_2*B2_23 + 1/4*C3_2*B3_33 + 1/4*C3_2*G3_33 - 1/2*C3_3*B3_23 + 1/2*C2_2*B3_23 + G2_12*G1_12)"),
    ("G1_12_z.1", "G1_12_z - (-A23_x - A23*G2_12 + A23*C2_2 + G1_12*B2_23 + 1/2*G3_33*B3_23 + 1/2*G3_33*G1_12 - 1/2*B3_33*B3_23 - 1/2*B3_33*G1_12 + 1/2*A33*C3_2)"),
    ("G2_12_x.2", "G2_12_x - (-1/2*C3_3_x + 1/2*C2_2_x + D3_z + 1/2*G3_33*D3 + 1/2*D3*B3_33 - 1/4*C3_2*C2_3 - 1/4*C3_3*C3_3 + 1/4*C2_2*C2_2 + G2_12*G2_12 - C2_2*G2_12 + B2_23*D2 + G1_12*D2)"),
    ("G2_12_z", "G2_12_z - (-B2_23_x + 2*A23*D2 - 1/2*C2_3*B3_23 + 1/2*B2_33*C3_2 + C2_2_z + 1/2*C2_3*G1_12 + 1/4*C3_3*G3_33 - 1/4*C2_2*G3_33 + 1/2*G3_33*G2_12 - 1/4*B3_33*C3_3 + 1/4*C2_2*B3_33 - 1/2*B3_33*G2_12 + A33*D3)"),
    ("coefficient.4", "1/2*C2_3_x - D2_z + 1/4*C2_3*C3_3 + 1/4*C2_3*C2_2 - B2_23*D2 - B2_33*D3"),
    ("coefficient.5", "B2_33_x - 1/2*C2_3_z - D2*A33 + 1/2*C2_3*B3_33 - 1/2*B2_23*C2_3 - 1/2*B2_33*C3_3 + 1/2*B2_33*C2_2"),
    ("G3_33_x.2", "G3_33_x - (B3_33_x - 4*B2_23_x + 6*A23*D2 - 2*C2_3*B3_23 + 2*B2_33*C3_2 + 2*C2_2_z + C2_3*G1_12 + 1/2*C3_3*G3_33 - 1/2*C2_2*G3_33 + G3_33*G2_12 - 1/2*B3_33*C3_3 + 1/2*C2_2*B3_33 - B3_33*G2_12 + 2*A33*D3)"),
    ("G3_33_x.3", "G3_33_x - (1/2*C3_3_z + 1/2*C2_2_z - B2_23_x + 2*A23*D2 + C2_3*G1_12 + 1/2*C3_3*G3_33 - 1/2*C2_2*G3_33 + G2_12*G3_33 - 1/2*C3_3*B3_33 + 1/2*C2_2*B3_33 - B3_33*G2_12 + 2*A33*D3)"),
    ("G3_33_z.1", "G3_33_z - (-2*A33_x + B3_33_z - 2*A33*G2_12 + C2_2*A33 + 2*G1_12*B2_33 + 1/2*G3_33*G3_33 - 1/2*B3_33*B3_33 + A23*C2_3 + A33*C3_3)"),
    ("G1_12_y.2", "G1_12_y - (-B3_23_y + B3_22_z + 1/2*C3_2*A23 - B3_22*B2_23 + 1/2*B3_22*B3_33 + 1/2*B3_22*G3_33 - B3_23*B3_23 + G1_12*G1_12 - 1/2*C3_3*A22 + 1/2*C2_2*A22 - A22*G2_12 + B3_23*B2_22 + B2_22*G1_12)"),
    ("G1_12_z.2", "G1_12_z - (1/3*B3_23_z + 1/6*C3_2*A33 - B2_33*B3_22 - 1/6*C3_3*A23 + 1/6*C2_2*A23 - A23*G2_12 + B2_23*B3_23 - 1/2*B3_23*B3_33 + 1/2*B3_23*G3_33 + B2_23*G1_12 - 1/2*B3_33*G1_12 + 1/2*G1_12*G3_33 + 2/3*B2_23_y - 1/3*B3_33_y - 2/3*B2_22_z + 1/3*C2_3*A22)"),
    ("G3_33_y.2", "G3_33_y - (4/3*B3_23_z + 2/3*C3_2*A33 - 2*B2_33*B3_22 - 2/3*C3_3*A23 + 2/3*C2_2*A23 - 2*A23*G2_12 + 2*B3_23*B2_23 - B3_23*B3_33 + B3_23*G3_33 + 2*B2_23*G1_12 - B3_33*G1_12 + G1_12*G3_33 + 2/3*B2_23_y - 1/3*B3_33_y - 2/3*B2_22_z + 1/3*C2_3*A22)"),
    ("G3_33_z.2", "G3_33_z - (2*B2_33_y - 2*B2_23_z + B3_33_z - 2*A33*G2_12 + 2*B2_22*B2_33 + 2*B2_33*G1_12 + 1/2*G3_33*G3_33 + C2_3*A23 - 2*B2_23*B2_23 + 2*B2_23*B3_33 - 1/2*B3_33*B3_33 - 2*B2_33*B3_23)"),
    ("coefficient.6", "-A23_y + A22_z - A22*B2_23 - A23*B3_23 + A23*B2_22 + A33*B3_22"),
    ("coefficient.7", "-A33_y + A23_z - A22*B2_33 - A23*B3_33 + A23*B2_23 + A33*B3_23"),
];

/// Pairs of lines giving the same derivative. Their difference is free of
/// the derivative; the third field is the multiple of the `cubic.k`
/// residual (`(k, m)`) that difference is expected to equal.
const CONSISTENCY: [(&str, &str, (usize, i64)); 8] = [
    ("G1_12_y.1", "G1_12_y.2", (11, 1)),
    ("G2_12_x.1", "G2_12_x.2", (12, 1)),
    ("G1_12_x.1", "G1_12_x.2", (10, 1)),
    ("G3_33_y.1", "G3_33_y.2", (13, 1)),
    ("G3_33_x.1", "G3_33_x.2", (14, 2)),
    ("G3_33_x.1", "G3_33_x.3", (15, 1)),
    ("G1_12_z.1", "G1_12_z.2", (8, 1)),
    ("G3_33_z.1", "G3_33_z.2", (9, 2)),
];

/// Evaluates every flatness line of the lift with the supplied gauge, then
/// one consistency residual per pair of lines giving the same derivative.
///
/// Each consistency residual is also compared with the matching multiple of
/// a `cubic.k` residual; mismatches become diagnostics.
pub fn appendix_residuals(
    s: &SystemCubic2,
    gauge: &SystemGauge,
    cfg: &ZeroTestConfig,
) -> ConditionReport {
    let mut v = system_values(s);
    v.insert("G1_12", gauge.gamma1_12.clone());
    v.insert("G2_12", gauge.gamma2_12.clone());
    v.insert("G3_33", gauge.gamma3_33.clone());
    let lines: Vec<(String, Expr)> = LIFT_FLATNESS
        .iter()
        .map(|(id, t)| (id.to_string(), instantiate(t, &v)))
        .collect();
    let line = |id: &str| &lines.iter().find(|(i, _)| i == id).unwrap().1;
    let cubic = cubic2_residuals(s);
    let mut items = lines.clone();
    let mut diagnostics = Vec::new();
    for (first, second, (k, m)) in CONSISTENCY {
        let r = line(second) - line(first);
        let base = first.split('.').next().unwrap();
        let id = if base == "G3_33_x" {
            format!("consistency.{base}.{}{}", &first[first.len() - 1..], &second[second.len() - 1..])
        } else {
            format!("consistency.{base}")
        };
        let gap = &r - &(Expr::int(m) * &cubic[k - 1]);
        if !is_zero(&gap, cfg).is_zero() {
            let mult = if m == 1 { String::new() } else { format!("{m}*") };
            diagnostics.push(format!(
                "{id} differs from {mult}cubic.{k} by {gap}; the two condition lists disagree here"
            ));
        }
        items.push((id, r));
    }
    let mut report = ConditionReport::evaluate("cubic-2 lift flatness", items, cfg);
    report.diagnostics = diagnostics;
    report
}

/// Residuals of the quadratic-pair conditions after renaming
/// `B²₂₂=−a, B²₂₃=−b, B²₃₃=−c, B³₂₂=−d, B³₂₃=−e, B³₃₃=−f` and `(y, z) → (x, y)`,
/// paired with the two-dimensional flatness residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct RemarkComparison {
    /// `quadratic.k − flat.k` for each `k`.
    pub literal: ConditionReport,
    /// Each renamed quadratic residual minus the combination of flatness
    /// residuals it equals.
    pub combination: ConditionReport,
}

/// [`remark_mapping_with_signs`] with all signs `−1`.
pub fn remark_mapping(k: &Geodesic2Coefficients, cfg: &ZeroTestConfig) -> RemarkComparison {
    remark_mapping_with_signs(k, [-1; 6], cfg)
}

/// Renames with `B = sign·coefficient` for each of `a … f`.
pub fn remark_mapping_with_signs(
    k: &Geodesic2Coefficients,
    signs: [i64; 6],
    cfg: &ZeroTestConfig,
) -> RemarkComparison {
    let mut up = BTreeMap::new();
    up.insert(Symbol::new("x"), Expr::var("y"));
    up.insert(Symbol::new("y"), Expr::var("z"));
    let mut down = BTreeMap::new();
    down.insert(Symbol::new("y"), Expr::var("x"));
    down.insert(Symbol::new("z"), Expr::var("y"));
    let mut it = k.to_array().into_iter().zip(signs);
    let q = Quadratic2::from_array(std::array::from_fn(|_| {
        let (e, s) = it.next().unwrap();
        Expr::int(s) * e.substitute(&up)
    }));
    let quad = quadratic2_residuals(&q).map(|r| r.substitute(&down));
    let flat = flat_residuals(k);
    let literal = ConditionReport::evaluate(
        "quadratic-2 renamed vs geodesic-2 flatness",
        (0..4).map(|i| (format!("remark.{}", i + 1), &quad[i] - &flat[i])),
        cfg,
    );
    let third = Expr::frac(1, 3);
    let combos = [
        &quad[0] - &flat[2],
        &quad[1] + &(Expr::int(2) * &flat[0]) + Expr::frac(4, 3) * &flat[3],
        &quad[2] + &flat[0] + &third * &flat[3],
        &quad[3] + &flat[1],
    ];
    let combination = ConditionReport::evaluate(
        "quadratic-2 renamed as combination of geodesic-2 flatness",
        combos
            .into_iter()
            .enumerate()
            .map(|(i, r)| (format!("remark.combination.{}", i + 1), r)),
        cfg,
    );
    RemarkComparison {
        literal,
        combination,
    }
}
