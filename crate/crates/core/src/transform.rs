//! Point transformations: the general linearizable form they produce,
//! its reduction to the shared-cubic form, verification of candidate
//! linearizing maps, and metric pullback.
//!
//! First and second derivatives with respect to `x` are the reserved
//! symbols `dy, dz` and `ddy, ddz`.

use std::collections::BTreeMap;

use geolin_expr::{is_zero, BigInt, Expr, Symbol, Verdict, ZeroTestConfig};

use crate::geometry::{adjugate, determinant, Metric};
use crate::projection::{ScalarCubic, SystemCubic2};
use crate::{coordinates, ConditionReport, Error, Result};

/// Names of `y', z'`.
pub const FIRST_DERIVATIVES: [&str; 2] = ["dy", "dz"];
/// Names of `y'', z''`.
pub const SECOND_DERIVATIVES: [&str; 2] = ["ddy", "ddz"];

pub fn is_reserved(name: &str) -> bool {
    FIRST_DERIVATIVES.contains(&name) || SECOND_DERIVATIVES.contains(&name)
}

fn first_derivatives(m: usize) -> Vec<Symbol> {
    FIRST_DERIVATIVES[..m].iter().map(|s| Symbol::new(s)).collect()
}

fn second_derivatives(m: usize) -> Vec<Symbol> {
    SECOND_DERIVATIVES[..m].iter().map(|s| Symbol::new(s)).collect()
}

fn reject_reserved(e: &Expr) -> Result<()> {
    match e.symbols().iter().find(|s| is_reserved(s.as_str())) {
        Some(s) => Err(Error::ReservedSymbol(s.to_string())),
        None => Ok(()),
    }
}

fn require_nonzero_det(det: &Expr, cfg: &ZeroTestConfig) -> Result<()> {
    match is_zero(det, cfg) {
        Verdict::NonZero(_) => Ok(()),
        Verdict::Zero => Err(Error::DegenerateJacobian),
        Verdict::Undecided(m) => Err(Error::UndecidedJacobian(m)),
    }
}

/// New coordinates `X¹ … Xⁿ` as functions of `x, y[, z]`; `X¹` is the new
/// independent variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Transformation {
    comps: Vec<Expr>,
}

impl Transformation {
    pub fn new(comps: Vec<Expr>) -> Result<Self> {
        if comps.len() != 2 && comps.len() != 3 {
            return Err(Error::UnsupportedDimension(comps.len()));
        }
        for c in &comps {
            reject_reserved(c)?;
        }
        Ok(Transformation { comps })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(coordinates(n).into_iter().map(Expr::symbol).collect())
    }

    pub fn dimension(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    /// `J[i][a] = ∂Xⁱ/∂xᵃ`.
    pub fn jacobian(&self) -> Vec<Vec<Expr>> {
        let x = coordinates(self.dimension());
        self.comps
            .iter()
            .map(|c| x.iter().map(|s| c.diff(s)).collect())
            .collect()
    }

    pub fn jacobian_determinant(&self) -> Expr {
        determinant(&self.jacobian())
    }
}

/// Verdict on the Jacobian determinant; NONZERO means invertible.
pub fn jacobian_invertibility(t: &Transformation, cfg: &ZeroTestConfig) -> Verdict {
    is_zero(&t.jacobian_determinant(), cfg)
}

/// The `n − 1` equations obtained by writing the free particle system
/// `Xⁱ'' = 0` (derivatives in `X¹`) in the old coordinates:
///
/// ```text
/// Jⁱ_j x^j'' + Gⁱ_kj x^k' x^j'' + Δⁱ_jkl x^j' x^k' x^l'
///     + Λⁱ_jk x^j' x^k' + Ωⁱ_j x^j' + Eⁱ = 0
/// ```
///
/// Indices run over the dependent variables, stored zero-based (`0` is
/// `y`). `G` is skew in its lower pair; `Δ` and `Λ` are stored symmetrized.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralSystem {
    pub n: usize,
    pub j: Vec<Vec<Expr>>,
    pub g: Vec<Vec<Vec<Expr>>>,
    pub delta: Vec<Vec<Vec<Vec<Expr>>>>,
    pub lambda: Vec<Vec<Vec<Expr>>>,
    pub omega: Vec<Vec<Expr>>,
    pub e: Vec<Expr>,
}

/// Number of coefficients of the general form in dimension `n`,
/// `n(n−1)(n²+6n−1)/6`.
pub fn general_count(n: usize) -> usize {
    n * (n - 1) * (n * n + 6 * n - 1) / 6
}

/// Number of coefficients of the shared-cubic form in dimension `n`,
/// `(n−1)n(n+2)/2`.
pub fn shared_cubic_count(n: usize) -> usize {
    (n - 1) * n * (n + 2) / 2
}

impl GeneralSystem {
    pub fn dependents(&self) -> usize {
        self.n - 1
    }

    /// Independent entries given the stored symmetries.
    pub fn independent_count(&self) -> usize {
        let m = self.dependents();
        let sym3 = m * (m + 1) * (m + 2) / 6;
        m * m + m * m * (m - 1) / 2 + m * sym3 + m * m * (m + 1) / 2 + m * m + m
    }

    /// `G` skew, `Δ` and `Λ` symmetric, as residuals that must vanish.
    pub fn symmetry_residuals(&self) -> Vec<Expr> {
        let m = self.dependents();
        let mut out = Vec::new();
        for i in 0..m {
            for k in 0..m {
                for j in 0..m {
                    out.push(&self.g[i][k][j] + &self.g[i][j][k]);
                    out.push(&self.lambda[i][k][j] - &self.lambda[i][j][k]);
                    for l in 0..m {
                        out.push(&self.delta[i][j][k][l] - &self.delta[i][k][l][j]);
                        out.push(&self.delta[i][j][k][l] - &self.delta[i][k][j][l]);
                    }
                }
            }
        }
        out
    }

    /// Left-hand sides in `x, y, z, dy, dz, ddy, ddz`.
    pub fn equations(&self) -> Vec<Expr> {
        let m = self.dependents();
        let p: Vec<Expr> = first_derivatives(m).into_iter().map(Expr::symbol).collect();
        let s: Vec<Expr> = second_derivatives(m).into_iter().map(Expr::symbol).collect();
        (0..m)
            .map(|i| {
                let mut terms = vec![self.e[i].clone()];
                for j in 0..m {
                    terms.push(&self.j[i][j] * &s[j]);
                    terms.push(&self.omega[i][j] * &p[j]);
                    for k in 0..m {
                        terms.push(&self.g[i][k][j] * &(&p[k] * &s[j]));
                        terms.push(&self.lambda[i][j][k] * &(&p[j] * &p[k]));
                        for l in 0..m {
                            terms.push(&self.delta[i][j][k][l] * &(&(&p[j] * &p[k]) * &p[l]));
                        }
                    }
                }
                terms.into_iter().sum()
            })
            .collect()
    }
}

/// Reads general-form coefficients off implicit equations in
/// `x, y, z, dy, dz, ddy, ddz` by Taylor expansion at zero derivatives.
///
/// The report holds `eqᵢ − (reconstructed eqᵢ)`, which vanishes iff the
/// equations really have the general form.
pub fn general_from_equations(
    eqs: &[Expr],
    cfg: &ZeroTestConfig,
) -> Result<(GeneralSystem, ConditionReport)> {
    let m = eqs.len();
    if m != 1 && m != 2 {
        return Err(Error::UnsupportedDimension(m + 1));
    }
    let p = first_derivatives(m);
    let s = second_derivatives(m);
    let half = Expr::frac(1, 2);
    let mut gs = GeneralSystem {
        n: m + 1,
        j: vec![vec![Expr::zero(); m]; m],
        g: vec![vec![vec![Expr::zero(); m]; m]; m],
        delta: vec![vec![vec![vec![Expr::zero(); m]; m]; m]; m],
        lambda: vec![vec![vec![Expr::zero(); m]; m]; m],
        omega: vec![vec![Expr::zero(); m]; m],
        e: vec![Expr::zero(); m],
    };
    let at_zero: BTreeMap<Symbol, Expr> =
        p.iter().chain(&s).map(|v| (v.clone(), Expr::zero())).collect();
    let taylor = |e: &Expr, by: &[&Symbol]| -> Expr {
        by.iter().fold(e.clone(), |d, v| d.diff(v)).substitute(&at_zero)
    };
    for (i, eq) in eqs.iter().enumerate() {
        gs.e[i] = taylor(eq, &[]);
        for a in 0..m {
            gs.j[i][a] = taylor(eq, &[&s[a]]);
            gs.omega[i][a] = taylor(eq, &[&p[a]]);
            for b in 0..m {
                gs.lambda[i][a][b] = &half * &taylor(eq, &[&p[a], &p[b]]);
                let mixed = taylor(eq, &[&p[a], &s[b]]) - taylor(eq, &[&p[b], &s[a]]);
                gs.g[i][a][b] = &half * &mixed;
                for c in 0..m {
                    gs.delta[i][a][b][c] = Expr::frac(1, 6) * taylor(eq, &[&p[a], &p[b], &p[c]]);
                }
            }
        }
    }
    let items = eqs
        .iter()
        .zip(gs.equations())
        .enumerate()
        .map(|(i, (eq, rebuilt))| (format!("general-form.eq{}", i + 1), eq - &rebuilt));
    let report = ConditionReport::evaluate("general form", items, cfg);
    Ok((gs, report))
}

/// Coefficients of the general form for the map `t`, requiring a nonzero
/// Jacobian determinant.
pub fn coefficients_from_transformation(
    t: &Transformation,
    cfg: &ZeroTestConfig,
) -> Result<GeneralSystem> {
    let n = t.dimension();
    require_nonzero_det(&t.jacobian_determinant(), cfg)?;
    let x = coordinates(n);
    let first: Vec<Vec<Expr>> = t.jacobian();
    let second: Vec<Vec<Vec<Expr>>> = first
        .iter()
        .map(|row| row.iter().map(|d| x.iter().map(|s| d.diff(s)).collect()).collect())
        .collect();
    let m = n - 1;
    let d1 = |c: usize, a: usize| &first[c][a];
    let d2 = |c: usize, a: usize, b: usize| &second[c][a][b];
    let two = Expr::int(2);
    // dependent index i (0-based over y, z) is coordinate i + 1
    let j = (0..m)
        .map(|i| {
            (0..m)
                .map(|jj| d1(0, 0) * d1(i + 1, jj + 1) - d1(0, jj + 1) * d1(i + 1, 0))
                .collect()
        })
        .collect();
    let g = (0..m)
        .map(|i| {
            (0..m)
                .map(|k| {
                    (0..m)
                        .map(|jj| {
                            d1(0, k + 1) * d1(i + 1, jj + 1) - d1(0, jj + 1) * d1(i + 1, k + 1)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let delta_raw = |i: usize, a: usize, b: usize, l: usize| {
        d1(0, l + 1) * d2(i + 1, a + 1, b + 1) - d2(0, a + 1, b + 1) * d1(i + 1, l + 1)
    };
    let third = Expr::frac(1, 3);
    let delta = (0..m)
        .map(|i| {
            (0..m)
                .map(|a| {
                    (0..m)
                        .map(|b| {
                            (0..m)
                                .map(|c| {
                                    &third
                                        * &(delta_raw(i, a, b, c)
                                            + delta_raw(i, b, c, a)
                                            + delta_raw(i, c, a, b))
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let lambda_raw = |i: usize, a: usize, l: usize| {
        &two * &(d1(0, l + 1) * d2(i + 1, 0, a + 1)) - &two * &(d2(0, 0, a + 1) * d1(i + 1, l + 1))
            + d1(0, 0) * d2(i + 1, a + 1, l + 1)
            - d1(i + 1, 0) * d2(0, a + 1, l + 1)
    };
    let half = Expr::frac(1, 2);
    let lambda = (0..m)
        .map(|i| {
            (0..m)
                .map(|a| {
                    (0..m)
                        .map(|l| &half * &(lambda_raw(i, a, l) + lambda_raw(i, l, a)))
                        .collect()
                })
                .collect()
        })
        .collect();
    let omega = (0..m)
        .map(|i| {
            (0..m)
                .map(|a| {
                    &two * &(d1(0, 0) * d2(i + 1, 0, a + 1))
                        - &two * &(d2(0, 0, a + 1) * d1(i + 1, 0))
                        + d1(0, a + 1) * d2(i + 1, 0, 0)
                        - d2(0, 0, 0) * d1(i + 1, a + 1)
                })
                .collect()
        })
        .collect();
    let e = (0..m)
        .map(|i| d1(0, 0) * d2(i + 1, 0, 0) - d2(0, 0, 0) * d1(i + 1, 0))
        .collect();
    Ok(GeneralSystem {
        n,
        j,
        g,
        delta,
        lambda,
        omega,
        e,
    })
}

/// Coefficient of `∏ s^k` in a polynomial in the symbols `s`.
fn coefficient(e: &Expr, powers: &[(&Symbol, u32)]) -> Expr {
    let mut d = e.clone();
    let mut fact = BigInt::from(1);
    for (s, k) in powers {
        for i in 1..=*k {
            d = d.diff(s);
            fact *= i;
        }
    }
    let zeros: BTreeMap<Symbol, Expr> = powers
        .iter()
        .map(|(s, _)| ((*s).clone(), Expr::zero()))
        .collect();
    d.substitute(&zeros) / Expr::integer(fact)
}

/// Shared-cubic coefficients of a general system.
#[derive(Debug, Clone, PartialEq)]
pub enum NormalFormCoefficients {
    Scalar(ScalarCubic),
    System(SystemCubic2),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalForm {
    pub coefficients: NormalFormCoefficients,
    /// For two equations, the cubic terms after solving for the second
    /// derivatives must be `x^a'·A(y', z')` with one quadratic `A`; each
    /// coefficient of the difference is a residual. Empty for one equation.
    pub report: ConditionReport,
}

/// Solves the general form for its second derivatives and reads off the
/// shared-cubic coefficients.
pub fn normal_form(gs: &GeneralSystem, cfg: &ZeroTestConfig) -> Result<NormalForm> {
    let m = gs.dependents();
    let det = determinant(&gs.j);
    match is_zero(&det, cfg) {
        Verdict::NonZero(_) => {}
        _ => return Err(Error::SingularSecondDerivatives),
    }
    let adj = adjugate(&gs.j);
    let inv: Vec<Vec<Expr>> = adj
        .iter()
        .map(|r| r.iter().map(|e| e / &det).collect())
        .collect();
    let apply = |v: &[Expr]| -> Vec<Expr> {
        (0..m)
            .map(|a| (0..m).map(|i| &inv[a][i] * &v[i]).sum())
            .collect()
    };
    let ps = first_derivatives(m);
    let p: Vec<Expr> = ps.iter().cloned().map(Expr::symbol).collect();
    let d = apply(&gs.e);
    // c[a][l]
    let c_cols: Vec<Vec<Expr>> = (0..m)
        .map(|l| {
            let v: Vec<Expr> = (0..m)
                .map(|i| {
                    let gd: Expr = (0..m).map(|jj| &gs.g[i][l][jj] * &d[jj]).sum();
                    &gs.omega[i][l] - &gd
                })
                .collect();
            apply(&v)
        })
        .collect();
    let c = |a: usize, l: usize| &c_cols[l][a];
    let quad = |i: usize| -> Expr {
        let mut t = Expr::zero();
        for k in 0..m {
            for l in 0..m {
                t = t + &gs.lambda[i][k][l] * &(&p[k] * &p[l]);
                for jj in 0..m {
                    t = t - &gs.g[i][k][jj] * &(&(&p[k] * &p[l]) * c(jj, l));
                }
            }
        }
        t
    };
    let b_poly = apply(&(0..m).map(quad).collect::<Vec<_>>());
    let cubic = |i: usize| -> Expr {
        let mut t = Expr::zero();
        for k in 0..m {
            for l in 0..m {
                for q in 0..m {
                    t = t + &gs.delta[i][k][l][q] * &(&(&p[k] * &p[l]) * &p[q]);
                }
            }
            for jj in 0..m {
                t = t - &gs.g[i][k][jj] * &(&p[k] * &b_poly[jj]);
            }
        }
        t
    };
    let q_poly = apply(&(0..m).map(cubic).collect::<Vec<_>>());
    if m == 1 {
        let y = &ps[0];
        let eq = ScalarCubic {
            e0: d[0].clone(),
            e1: c(0, 0).clone(),
            e2: coefficient(&b_poly[0], &[(y, 2)]),
            e3: coefficient(&q_poly[0], &[(y, 3)]),
        };
        return Ok(NormalForm {
            coefficients: NormalFormCoefficients::Scalar(eq),
            report: ConditionReport::evaluate("shared cubic", Vec::new(), cfg),
        });
    }
    let (s2, s3) = (&ps[0], &ps[1]);
    let half = Expr::frac(1, 2);
    let b = |a: usize| {
        (
            coefficient(&b_poly[a], &[(s2, 2)]),
            &half * &coefficient(&b_poly[a], &[(s2, 1), (s3, 1)]),
            coefficient(&b_poly[a], &[(s3, 2)]),
        )
    };
    let (b2_22, b2_23, b2_33) = b(0);
    let (b3_22, b3_23, b3_33) = b(1);
    let a22 = coefficient(&q_poly[0], &[(s2, 3)]);
    let a23 = &half * &coefficient(&q_poly[0], &[(s2, 2), (s3, 1)]);
    let a33 = coefficient(&q_poly[0], &[(s2, 1), (s3, 2)]);
    let a_poly = &a22 * &p[0].pow(2) + &(Expr::int(2) * &a23) * &(&p[0] * &p[1]) + &a33 * &p[1].pow(2);
    let mut items = Vec::new();
    for (a, name) in ["y", "z"].iter().enumerate() {
        let r = &q_poly[a] - &(&p[a] * &a_poly);
        for (k, mono) in ["dy^3", "dy^2*dz", "dy*dz^2", "dz^3"].iter().enumerate() {
            let powers = [(s2, 3 - k as u32), (s3, k as u32)];
            let powers: Vec<_> = powers.into_iter().filter(|(_, e)| *e > 0).collect();
            items.push((format!("shared-cubic.{name}.{mono}"), coefficient(&r, &powers)));
        }
    }
    let system = SystemCubic2 {
        a22,
        a23,
        a33,
        b2_22,
        b2_23,
        b2_33,
        b3_22,
        b3_23,
        b3_33,
        c2_2: c(0, 0).clone(),
        c2_3: c(0, 1).clone(),
        c3_2: c(1, 0).clone(),
        c3_3: c(1, 1).clone(),
        d2: d[0].clone(),
        d3: d[1].clone(),
    };
    Ok(NormalForm {
        coefficients: NormalFormCoefficients::System(system),
        report: ConditionReport::evaluate("shared cubic", items, cfg),
    })
}

/// Shared-cubic coefficients read directly off solved equations
/// `x^a'' = rhs[a]`. Each `rhs` must be polynomial in `dy, dz`.
///
/// Besides the shared-cubic residuals, the report has one `polynomial.*`
/// residual per equation: what remains of `rhs` after removing every term
/// of degree at most three in `dy, dz`.
pub fn normal_form_explicit(sys: &ExplicitSystem, cfg: &ZeroTestConfig) -> Result<NormalForm> {
    let m = sys.dependents();
    let ps = first_derivatives(m);
    let p: Vec<Expr> = ps.iter().cloned().map(Expr::symbol).collect();
    let names = ["y", "z"];
    let mut items = Vec::new();
    // terms[a][(i, j)] is the coefficient of dy^i dz^j in −rhs[a]
    let mut terms: Vec<BTreeMap<(u32, u32), Expr>> = Vec::new();
    for (a, r) in sys.rhs.iter().enumerate() {
        if ps.iter().any(|v| r.denominator().depends_on(v)) {
            return Err(Error::NotPolynomialInFirstDerivatives(a + 1));
        }
        let poly = -r.clone();
        let mut t = BTreeMap::new();
        let mut rebuilt = Expr::zero();
        for deg in 0..=3u32 {
            for j in 0..=if m == 2 { deg } else { 0 } {
                let i = deg - j;
                let mut powers = vec![(&ps[0], i)];
                if m == 2 {
                    powers.push((&ps[1], j));
                }
                let c = coefficient(&poly, &powers);
                let mono = if m == 2 { p[0].pow(i as i64) * p[1].pow(j as i64) } else { p[0].pow(i as i64) };
                rebuilt = rebuilt + &c * &mono;
                t.insert((i, j), c);
            }
        }
        items.push((format!("polynomial.{}", names[a]), &poly - &rebuilt));
        terms.push(t);
    }
    let get = |a: usize, i: u32, j: u32| terms[a][&(i, j)].clone();
    if m == 1 {
        let eq = ScalarCubic {
            e0: get(0, 0, 0),
            e1: get(0, 1, 0),
            e2: get(0, 2, 0),
            e3: get(0, 3, 0),
        };
        return Ok(NormalForm {
            coefficients: NormalFormCoefficients::Scalar(eq),
            report: ConditionReport::evaluate("cubic form", items, cfg),
        });
    }
    let half = Expr::frac(1, 2);
    let a22 = get(0, 3, 0);
    let a23 = &half * &get(0, 2, 1);
    let a33 = get(0, 1, 2);
    let [a22e, a23e, a33e] = [&a22, &(Expr::int(2) * &a23), &a33];
    // cubic part of equation a must be p_a·(A22 dy² + 2A23 dy dz + A33 dz²)
    let expected = [
        [a22e.clone(), a23e.clone(), a33e.clone(), Expr::zero()],
        [Expr::zero(), a22e.clone(), a23e.clone(), a33e.clone()],
    ];
    for a in 0..2 {
        for (k, mono) in ["dy^3", "dy^2*dz", "dy*dz^2", "dz^3"].iter().enumerate() {
            let k = k as u32;
            items.push((
                format!("shared-cubic.{}.{mono}", names[a]),
                get(a, 3 - k, k) - &expected[a][k as usize],
            ));
        }
    }
    let system = SystemCubic2 {
        a22,
        a23,
        a33,
        b2_22: get(0, 2, 0),
        b2_23: &half * &get(0, 1, 1),
        b2_33: get(0, 0, 2),
        b3_22: get(1, 2, 0),
        b3_23: &half * &get(1, 1, 1),
        b3_33: get(1, 0, 2),
        c2_2: get(0, 1, 0),
        c2_3: get(0, 0, 1),
        c3_2: get(1, 1, 0),
        c3_3: get(1, 0, 1),
        d2: get(0, 0, 0),
        d3: get(1, 0, 0),
    };
    Ok(NormalForm {
        coefficients: NormalFormCoefficients::System(system),
        report: ConditionReport::evaluate("cubic form", items, cfg),
    })
}

/// Second derivatives given explicitly: `x^a'' = rhs[a]`, with `rhs` in the
/// coordinates and `dy, dz`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitSystem {
    pub rhs: Vec<Expr>,
}

impl ExplicitSystem {
    pub fn from_scalar_cubic(eq: &ScalarCubic) -> Self {
        let dy = Expr::var("dy");
        ExplicitSystem {
            rhs: vec![-eq.polynomial_in(&dy)],
        }
    }

    pub fn from_cubic2(s: &SystemCubic2) -> Self {
        let [a, b] = s.polynomials_in(&Expr::var("dy"), &Expr::var("dz"));
        ExplicitSystem { rhs: vec![-a, -b] }
    }

    pub fn from_general(gs: &GeneralSystem, cfg: &ZeroTestConfig) -> Result<Self> {
        Self::from_implicit(&gs.equations(), cfg)
    }

    /// Solves equations linear in `ddy[, ddz]` for those derivatives.
    pub fn from_implicit(eqs: &[Expr], cfg: &ZeroTestConfig) -> Result<Self> {
        let m = eqs.len();
        if m != 1 && m != 2 {
            return Err(Error::UnsupportedDimension(m + 1));
        }
        let dd = second_derivatives(m);
        let zeros: BTreeMap<Symbol, Expr> = dd.iter().map(|s| (s.clone(), Expr::zero())).collect();
        let mut mat = Vec::with_capacity(m);
        let mut rest = Vec::with_capacity(m);
        for (i, e) in eqs.iter().enumerate() {
            let row: Vec<Expr> = dd.iter().map(|s| e.diff(s)).collect();
            for r in &row {
                for s in &dd {
                    if !is_zero(&r.diff(s), cfg).is_zero() {
                        return Err(Error::NotLinearInSecondDerivatives(i + 1));
                    }
                }
            }
            mat.push(row);
            rest.push(e.substitute(&zeros));
        }
        let det = determinant(&mat);
        if det.is_zero() || is_zero(&det, cfg).is_zero() {
            return Err(Error::SingularSecondDerivatives);
        }
        let adj = adjugate(&mat);
        let rhs = (0..m)
            .map(|a| {
                let s: Expr = (0..m).map(|i| &adj[a][i] * &rest[i]).sum();
                -(s / &det)
            })
            .collect();
        Ok(ExplicitSystem { rhs })
    }

    pub fn dependents(&self) -> usize {
        self.rhs.len()
    }

    /// `D f = f_x + Σ x^a' f_{x^a} + Σ x^a'' f_{x^a'}` with `x^a''` replaced
    /// by the right-hand sides.
    pub fn total_derivative(&self, f: &Expr) -> Expr {
        let m = self.dependents();
        let x = coordinates(m + 1);
        let p = first_derivatives(m);
        let mut out = f.diff(&x[0]);
        for a in 0..m {
            out = out + Expr::symbol(p[a].clone()) * f.diff(&x[a + 1]);
            out = out + &self.rhs[a] * &f.diff(&p[a]);
        }
        out
    }
}

/// Checks that `t` sends the system to `Xⁱ'' = 0`.
///
/// With `D` the total derivative along solutions, the second derivative of
/// `Xⁱ` with respect to `X¹` is `(D²Xⁱ·DX¹ − DXⁱ·D²X¹) / (DX¹)³`. The
/// residual reported for each `i ≥ 2` is its numerator; the map linearizes
/// the system iff every residual is identically zero in `x, y, z, dy, dz`.
pub fn verify_linearizing_transformation(
    sys: &ExplicitSystem,
    t: &Transformation,
    cfg: &ZeroTestConfig,
) -> Result<ConditionReport> {
    let n = t.dimension();
    if sys.dependents() + 1 != n {
        return Err(Error::Arity {
            expected: n - 1,
            got: sys.dependents(),
        });
    }
    for r in &sys.rhs {
        for s in r.symbols() {
            if SECOND_DERIVATIVES.contains(&s.as_str()) {
                return Err(Error::ReservedSymbol(s.to_string()));
            }
        }
    }
    require_nonzero_det(&t.jacobian_determinant(), cfg)?;
    let x1 = &t.components()[0];
    let d1 = sys.total_derivative(x1);
    if d1.is_zero() || is_zero(&d1, cfg).is_zero() {
        return Err(Error::NotTransverse);
    }
    let dd1 = sys.total_derivative(&d1);
    let names = ["u", "v", "w"];
    let items: Vec<(String, Expr)> = t.components()[1..]
        .iter()
        .enumerate()
        .map(|(i, xi)| {
            let di = sys.total_derivative(xi);
            let ddi = sys.total_derivative(&di);
            (format!("transformed.{}''", names[i + 1]), ddi * &d1 - di * &dd1)
        })
        .collect();
    Ok(ConditionReport::evaluate("free particle after transformation", items, cfg))
}

/// `g_ab = (∂uⁱ/∂xᵃ)(∂uʲ/∂xᵇ) g_ij(u)`, where `target` is written in the
/// same coordinate names and is composed with `t`.
pub fn pullback_metric(t: &Transformation, target: &Metric) -> Result<Metric> {
    let n = t.dimension();
    if target.dimension() != n {
        return Err(Error::Arity {
            expected: n,
            got: target.dimension(),
        });
    }
    let compose: BTreeMap<Symbol, Expr> = coordinates(n)
        .into_iter()
        .zip(t.components().iter().cloned())
        .collect();
    let g: Vec<Vec<Expr>> = (0..n)
        .map(|i| (0..n).map(|j| target.get(i, j).substitute(&compose)).collect())
        .collect();
    let jac = t.jacobian();
    let rows = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let mut s = Expr::zero();
                    for i in 0..n {
                        for j in 0..n {
                            s = s + &(&jac[i][a] * &jac[j][b]) * &g[i][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect();
    Metric::new(rows)
}
