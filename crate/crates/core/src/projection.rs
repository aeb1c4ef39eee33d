//! Projection of geodesic systems onto equations with `x` as independent
//! variable, and lifts back with an explicit choice of the lost components.
//!
//! Writing `x^a' = dx^a/dx` for `a ≥ 2`, the geodesic equations become
//!
//! ```text
//! x^a'' + A_bc x^a' x^b' x^c' + B^a_bc x^b' x^c' + C^a_b x^b' + D^a = 0
//! A_bc = −Γ¹_bc
//! B^a_bc = Γ^a_bc − δ^a_c Γ¹_b1 − δ^a_b Γ¹_c1
//! C^a_b = 2Γ^a_1b − δ^a_b Γ¹_11
//! D^a = Γ^a_11
//! ```

use std::collections::BTreeMap;

use geolin_expr::{Expr, Symbol};

use crate::geometry::{Christoffel, Geodesic2Coefficients};
use crate::{Error, Result};

/// `y'' + E3 y'³ + E2 y'² + E1 y' + E0 = 0` with coefficients in `(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarCubic {
    pub e0: Expr,
    pub e1: Expr,
    pub e2: Expr,
    pub e3: Expr,
}

impl ScalarCubic {
    pub const NAMES: [&'static str; 4] = ["E0", "E1", "E2", "E3"];

    pub fn new(e0: Expr, e1: Expr, e2: Expr, e3: Expr) -> Self {
        ScalarCubic { e0, e1, e2, e3 }
    }

    pub fn zero() -> Self {
        Self::new(Expr::zero(), Expr::zero(), Expr::zero(), Expr::zero())
    }

    pub fn to_array(&self) -> [Expr; 4] {
        [self.e0.clone(), self.e1.clone(), self.e2.clone(), self.e3.clone()]
    }

    /// The equation's left-hand side with `dy` standing for `y'`, without
    /// the `y''` term.
    pub fn polynomial_in(&self, dy: &Expr) -> Expr {
        &self.e3 * &dy.pow(3) + &self.e2 * &dy.pow(2) + &self.e1 * dy + self.e0.clone()
    }

    /// The same equation with `y` as independent variable and `x` as
    /// unknown: `E3 ↔ −E0`, `E2 ↔ −E1`, `x ↔ y`.
    pub fn swap_axes(&self) -> Self {
        let mut m = BTreeMap::new();
        m.insert(Symbol::new("x"), Expr::var("y"));
        m.insert(Symbol::new("y"), Expr::var("x"));
        let s = |e: &Expr| -e.substitute(&m);
        ScalarCubic {
            e0: s(&self.e3),
            e1: s(&self.e2),
            e2: s(&self.e1),
            e3: s(&self.e0),
        }
    }
}

/// Two equations in `y(x), z(x)` sharing their cubic part:
///
/// ```text
/// y'' + y'·A(y',z') + B²(y',z') + C²₂y' + C²₃z' + D² = 0
/// z'' + z'·A(y',z') + B³(y',z') + C³₂y' + C³₃z' + D³ = 0
/// A  = A22 y'² + 2A23 y'z' + A33 z'²
/// Bᵃ = Bᵃ_22 y'² + 2Bᵃ_23 y'z' + Bᵃ_33 z'²
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct SystemCubic2 {
    pub a22: Expr,
    pub a23: Expr,
    pub a33: Expr,
    pub b2_22: Expr,
    pub b2_23: Expr,
    pub b2_33: Expr,
    pub b3_22: Expr,
    pub b3_23: Expr,
    pub b3_33: Expr,
    pub c2_2: Expr,
    pub c2_3: Expr,
    pub c3_2: Expr,
    pub c3_3: Expr,
    pub d2: Expr,
    pub d3: Expr,
}

impl SystemCubic2 {
    pub const NAMES: [&'static str; 15] = [
        "A22", "A23", "A33", "B2_22", "B2_23", "B2_33", "B3_22", "B3_23", "B3_33", "C2_2", "C2_3",
        "C3_2", "C3_3", "D2", "D3",
    ];

    pub fn zero() -> Self {
        Self::from_array(std::array::from_fn(|_| Expr::zero()))
    }

    pub fn from_array(v: [Expr; 15]) -> Self {
        let [a22, a23, a33, b2_22, b2_23, b2_33, b3_22, b3_23, b3_33, c2_2, c2_3, c3_2, c3_3, d2, d3] =
            v;
        SystemCubic2 {
            a22,
            a23,
            a33,
            b2_22,
            b2_23,
            b2_33,
            b3_22,
            b3_23,
            b3_33,
            c2_2,
            c2_3,
            c3_2,
            c3_3,
            d2,
            d3,
        }
    }

    pub fn to_array(&self) -> [Expr; 15] {
        [
            self.a22.clone(),
            self.a23.clone(),
            self.a33.clone(),
            self.b2_22.clone(),
            self.b2_23.clone(),
            self.b2_33.clone(),
            self.b3_22.clone(),
            self.b3_23.clone(),
            self.b3_33.clone(),
            self.c2_2.clone(),
            self.c2_3.clone(),
            self.c3_2.clone(),
            self.c3_3.clone(),
            self.d2.clone(),
            self.d3.clone(),
        ]
    }

    /// Builds from named entries; absent names are zero.
    pub fn from_named<'a, I>(entries: I) -> std::result::Result<Self, String>
    where
        I: IntoIterator<Item = (&'a str, Expr)>,
    {
        let mut v: [Expr; 15] = std::array::from_fn(|_| Expr::zero());
        for (name, e) in entries {
            let i = Self::NAMES
                .iter()
                .position(|n| *n == name)
                .ok_or_else(|| name.to_string())?;
            v[i] = e;
        }
        Ok(Self::from_array(v))
    }

    pub fn get(&self, name: &str) -> Option<Expr> {
        let i = Self::NAMES.iter().position(|n| *n == name)?;
        Some(self.to_array()[i].clone())
    }

    /// Left-hand sides without the second derivatives, with `p = (y', z')`.
    pub fn polynomials_in(&self, p2: &Expr, p3: &Expr) -> [Expr; 2] {
        let two = Expr::int(2);
        let quad = |c22: &Expr, c23: &Expr, c33: &Expr| {
            c22 * &p2.pow(2) + &(&two * c23) * &(p2 * p3) + c33 * &p3.pow(2)
        };
        let a = quad(&self.a22, &self.a23, &self.a33);
        [
            p2 * &a
                + quad(&self.b2_22, &self.b2_23, &self.b2_33)
                + &self.c2_2 * p2
                + &self.c2_3 * p3
                + self.d2.clone(),
            p3 * &a
                + quad(&self.b3_22, &self.b3_23, &self.b3_33)
                + &self.c3_2 * p2
                + &self.c3_3 * p3
                + self.d3.clone(),
        ]
    }
}

/// The lost components for a scalar lift: `b = −Γ¹₁₂`, `e = −Γ²₁₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGauge {
    pub b: Expr,
    pub e: Expr,
}

impl ScalarGauge {
    pub fn zero() -> Self {
        ScalarGauge {
            b: Expr::zero(),
            e: Expr::zero(),
        }
    }
}

/// The lost components for a system lift: `Γ¹₁₂`, `Γ²₁₂`, `Γ³₃₃`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemGauge {
    pub gamma1_12: Expr,
    pub gamma2_12: Expr,
    pub gamma3_33: Expr,
}

impl SystemGauge {
    pub const NAMES: [&'static str; 3] = ["G1_12", "G2_12", "G3_33"];

    pub fn zero() -> Self {
        SystemGauge {
            gamma1_12: Expr::zero(),
            gamma2_12: Expr::zero(),
            gamma3_33: Expr::zero(),
        }
    }

    /// Reads the gauge off a full connection.
    pub fn of(gamma: &Christoffel) -> Self {
        SystemGauge {
            gamma1_12: gamma.get(0, 0, 1).clone(),
            gamma2_12: gamma.get(1, 0, 1).clone(),
            gamma3_33: gamma.get(2, 2, 2).clone(),
        }
    }
}

/// Result of [`project`].
#[derive(Debug, Clone, PartialEq)]
pub enum Projected {
    Scalar(ScalarCubic),
    System(SystemCubic2),
}

pub fn project(gamma: &Christoffel) -> Result<Projected> {
    match gamma.dimension() {
        2 => Ok(Projected::Scalar(project_scalar(gamma))),
        3 => Ok(Projected::System(project_system(gamma))),
        n => Err(Error::UnsupportedDimension(n)),
    }
}

/// Two-dimensional projection: `E3 = −Γ¹₂₂`, `E2 = Γ²₂₂ − 2Γ¹₁₂`,
/// `E1 = 2Γ²₁₂ − Γ¹₁₁`, `E0 = Γ²₁₁`.
///
/// Panics unless `gamma` is two-dimensional.
pub fn project_scalar(gamma: &Christoffel) -> ScalarCubic {
    assert_eq!(gamma.dimension(), 2);
    let g = |i, j, k| gamma.get(i, j, k);
    ScalarCubic {
        e3: -g(0, 1, 1),
        e2: g(1, 1, 1) - &(Expr::int(2) * g(0, 0, 1)),
        e1: Expr::int(2) * g(1, 0, 1) - g(0, 0, 0),
        e0: g(1, 0, 0).clone(),
    }
}

/// Three-dimensional projection. Panics unless `gamma` is three-dimensional.
pub fn project_system(gamma: &Christoffel) -> SystemCubic2 {
    assert_eq!(gamma.dimension(), 3);
    let g = |i, j, k| gamma.get(i, j, k).clone();
    let delta = |a: usize, b: usize| if a == b { Expr::one() } else { Expr::zero() };
    let bb = |a, b, c| g(a, b, c) - delta(a, c) * g(0, b, 0) - delta(a, b) * g(0, c, 0);
    let cc = |a, b| Expr::int(2) * g(a, 0, b) - delta(a, b) * g(0, 0, 0);
    SystemCubic2 {
        a22: -g(0, 1, 1),
        a23: -g(0, 1, 2),
        a33: -g(0, 2, 2),
        b2_22: bb(1, 1, 1),
        b2_23: bb(1, 1, 2),
        b2_33: bb(1, 2, 2),
        b3_22: bb(2, 1, 1),
        b3_23: bb(2, 1, 2),
        b3_33: bb(2, 2, 2),
        c2_2: cc(1, 1),
        c2_3: cc(1, 2),
        c3_2: cc(2, 1),
        c3_3: cc(2, 2),
        d2: g(1, 0, 0),
        d3: g(2, 0, 0),
    }
}

/// `a = E1 + 2e`, `c = E3`, `d = −E0`, `f = 2b − E2`, with `b, e` free.
pub fn lift_scalar(eq: &ScalarCubic, gauge: &ScalarGauge) -> Geodesic2Coefficients {
    let two = Expr::int(2);
    Geodesic2Coefficients {
        a: &eq.e1 + &(&two * &gauge.e),
        b: gauge.b.clone(),
        c: eq.e3.clone(),
        d: -&eq.e0,
        e: gauge.e.clone(),
        f: &two * &gauge.b - &eq.e2,
    }
}

/// Solves the projection formulas for all eighteen `Γ^i_jk` given the
/// fifteen coefficients and the three gauge components.
pub fn lift_system(s: &SystemCubic2, gauge: &SystemGauge) -> Christoffel {
    let half = Expr::frac(1, 2);
    let two = Expr::int(2);
    let g1_12 = gauge.gamma1_12.clone();
    let g2_12 = gauge.gamma2_12.clone();
    let g3_33 = gauge.gamma3_33.clone();
    let g1_11 = &two * &g2_12 - &s.c2_2;
    let g1_13 = &half * &(&g3_33 - &s.b3_33);
    let mut gamma = Christoffel::zero(3).unwrap();
    let entries = [
        ((0, 0, 0), g1_11),
        ((0, 0, 1), g1_12.clone()),
        ((0, 0, 2), g1_13.clone()),
        ((0, 1, 1), -&s.a22),
        ((0, 1, 2), -&s.a23),
        ((0, 2, 2), -&s.a33),
        ((1, 0, 0), s.d2.clone()),
        ((1, 0, 1), g2_12.clone()),
        ((1, 0, 2), &half * &s.c2_3),
        ((1, 1, 1), &two * &g1_12 + &s.b2_22),
        ((1, 1, 2), &s.b2_23 + &g1_13),
        ((1, 2, 2), s.b2_33.clone()),
        ((2, 0, 0), s.d3.clone()),
        ((2, 0, 1), &half * &s.c3_2),
        ((2, 0, 2), &g2_12 + &(&half * &(&s.c3_3 - &s.c2_2))),
        ((2, 1, 1), s.b3_22.clone()),
        ((2, 1, 2), &g1_12 + &s.b3_23),
        ((2, 2, 2), g3_33),
    ];
    for ((i, j, k), v) in entries {
        gamma.set(i, j, k, v);
    }
    gamma
}
