//! Metrics, Christoffel symbols, curvature and the two-dimensional
//! flatness and metric-compatibility conditions.

use geolin_expr::{is_zero, Expr, Symbol, Verdict, ZeroTestConfig};

use crate::{coordinates, ConditionReport, Error, Result};

fn check_dimension(n: usize) -> Result<()> {
    if n == 2 || n == 3 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(n))
    }
}

/// Determinant by cofactor expansion along the first row.
pub fn determinant(m: &[Vec<Expr>]) -> Expr {
    match m.len() {
        0 => Expr::one(),
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        n => (0..n)
            .map(|j| {
                let t = &m[0][j] * &determinant(&minor(m, 0, j));
                if j % 2 == 0 {
                    t
                } else {
                    -t
                }
            })
            .sum(),
    }
}

fn minor(m: &[Vec<Expr>], row: usize, col: usize) -> Vec<Vec<Expr>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(j, _)| *j != col)
                .map(|(_, e)| e.clone())
                .collect()
        })
        .collect()
}

/// Transposed cofactor matrix, so that `m * adjugate(m) = det(m) * I`.
pub fn adjugate(m: &[Vec<Expr>]) -> Vec<Vec<Expr>> {
    let n = m.len();
    if n == 1 {
        return vec![vec![Expr::one()]];
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = determinant(&minor(m, j, i));
                    if (i + j) % 2 == 0 {
                        c
                    } else {
                        -c
                    }
                })
                .collect()
        })
        .collect()
}

/// A symmetric metric tensor in the coordinates `x, y[, z]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    g: Vec<Vec<Expr>>,
}

impl Metric {
    /// Rejects non-square input and entries that differ across the diagonal.
    pub fn new(rows: Vec<Vec<Expr>>) -> Result<Self> {
        let n = rows.len();
        check_dimension(n)?;
        for r in &rows {
            if r.len() != n {
                return Err(Error::Arity {
                    expected: n,
                    got: r.len(),
                });
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if !(&rows[i][j] - &rows[j][i]).is_zero() {
                    return Err(Error::AsymmetricMetric(i + 1, j + 1));
                }
            }
        }
        Ok(Metric { g: rows })
    }

    /// The two-dimensional metric `[[p, q], [q, r]]`.
    pub fn from_pqr(p: Expr, q: Expr, r: Expr) -> Self {
        Metric {
            g: vec![vec![p, q.clone()], vec![q, r]],
        }
    }

    pub fn identity(n: usize) -> Self {
        let g = (0..n)
            .map(|i| (0..n).map(|j| Expr::int((i == j) as i64)).collect())
            .collect();
        Metric { g }
    }

    pub fn dimension(&self) -> usize {
        self.g.len()
    }

    /// Zero-based component `g_ij`.
    pub fn get(&self, i: usize, j: usize) -> &Expr {
        &self.g[i][j]
    }

    pub fn rows(&self) -> &[Vec<Expr>] {
        &self.g
    }

    pub fn determinant(&self) -> Expr {
        determinant(&self.g)
    }

    /// Verdict on the determinant: ZERO means degenerate.
    pub fn degeneracy(&self, cfg: &ZeroTestConfig) -> Verdict {
        is_zero(&self.determinant(), cfg)
    }
}

/// Connection coefficients `Γ^i_jk`, stored once per unordered pair `j ≤ k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    n: usize,
    comps: Vec<Expr>,
}

/// Number of independent Christoffel symbols, `n²(n+1)/2`.
pub fn christoffel_count(n: usize) -> usize {
    n * n * (n + 1) / 2
}

fn pair_index(n: usize, j: usize, k: usize) -> usize {
    let (j, k) = if j <= k { (j, k) } else { (k, j) };
    j * n - j * (j + 1) / 2 + k
}

impl Christoffel {
    pub fn zero(n: usize) -> Result<Self> {
        Self::from_fn(n, |_, _, _| Expr::zero())
    }

    /// Builds from `f(i, j, k)`, called only with `j ≤ k`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> Expr) -> Result<Self> {
        check_dimension(n)?;
        let mut comps = Vec::with_capacity(christoffel_count(n));
        for i in 0..n {
            for j in 0..n {
                for k in j..n {
                    comps.push(f(i, j, k));
                }
            }
        }
        assert_eq!(comps.len(), christoffel_count(n));
        Ok(Christoffel { n, comps })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Zero-based `Γ^i_jk`; symmetric in `j, k`.
    pub fn get(&self, i: usize, j: usize, k: usize) -> &Expr {
        &self.comps[i * self.n * (self.n + 1) / 2 + pair_index(self.n, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, value: Expr) {
        let idx = i * self.n * (self.n + 1) / 2 + pair_index(self.n, j, k);
        self.comps[idx] = value;
    }

    /// Stored components as `((i, j, k), Γ)` with `j ≤ k`.
    pub fn components(&self) -> Vec<((usize, usize, usize), &Expr)> {
        let n = self.n;
        let mut out = Vec::with_capacity(self.comps.len());
        for i in 0..n {
            for j in 0..n {
                for k in j..n {
                    out.push(((i, j, k), self.get(i, j, k)));
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }
}

/// `Γ^i_jk = ½ g^im (g_jm,k + g_km,j − g_jk,m)` with the inverse metric
/// taken as adjugate over determinant.
pub fn christoffel_from_metric(g: &Metric, cfg: &ZeroTestConfig) -> Result<Christoffel> {
    let n = g.dimension();
    let det = g.determinant();
    match is_zero(&det, cfg) {
        Verdict::Zero => return Err(Error::DegenerateMetric),
        Verdict::Undecided(msg) => return Err(Error::UndecidedDeterminant(msg)),
        Verdict::NonZero(_) => {}
    }
    let adj = adjugate(g.rows());
    let x = coordinates(n);
    // dg[m][j][k] = ∂_m g_jk
    let dg: Vec<Vec<Vec<Expr>>> = x
        .iter()
        .map(|s| {
            (0..n)
                .map(|j| (0..n).map(|k| g.get(j, k).diff(s)).collect())
                .collect()
        })
        .collect();
    let half_over_det = Expr::frac(1, 2) / &det;
    Christoffel::from_fn(n, |i, j, k| {
        let s: Expr = (0..n)
            .map(|m| &adj[i][m] * &(&dg[k][j][m] + &dg[j][k][m] - &dg[m][j][k]))
            .sum();
        s * &half_over_det
    })
}

/// `(i, j, k, l)` of `Rⁱ_jkl`, zero-based.
pub type Index4 = (usize, usize, usize, usize);

/// Curvature tensor `R^i_jkl`, all `n⁴` components.
#[derive(Debug, Clone, PartialEq)]
pub struct Riemann {
    n: usize,
    comps: Vec<Expr>,
}

impl Riemann {
    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> &Expr {
        let n = self.n;
        &self.comps[((i * n + j) * n + k) * n + l]
    }

    /// Components with `k < l`, which determine the rest by skew symmetry.
    pub fn independent(&self) -> Vec<(Index4, &Expr)> {
        let n = self.n;
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in k + 1..n {
                        out.push(((i, j, k, l), self.get(i, j, k, l)));
                    }
                }
            }
        }
        out
    }

    /// `R^i_jkl + R^i_jlk` for every index tuple.
    pub fn skew_residuals(&self) -> Vec<Expr> {
        let n = self.n;
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        out.push(self.get(i, j, k, l) + self.get(i, j, l, k));
                    }
                }
            }
        }
        out
    }
}

/// `R^i_jkl = Γ^i_jl,k − Γ^i_jk,l + Γ^i_mk Γ^m_jl − Γ^i_ml Γ^m_jk`.
pub fn riemann(gamma: &Christoffel) -> Riemann {
    let n = gamma.dimension();
    let x = coordinates(n);
    let mut comps = Vec::with_capacity(n.pow(4));
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut r = gamma.get(i, j, l).diff(&x[k]) - gamma.get(i, j, k).diff(&x[l]);
                    for m in 0..n {
                        r = r + gamma.get(i, m, k) * gamma.get(m, j, l)
                            - gamma.get(i, m, l) * gamma.get(m, j, k);
                    }
                    comps.push(r);
                }
            }
        }
    }
    Riemann { n, comps }
}

/// Cyclic sums `R^i_jkl + R^i_klj + R^i_ljk`, one per `i` and `j < k < l`
/// together with the tuples that repeat an index.
pub fn first_bianchi_residuals(r: &Riemann) -> Vec<Expr> {
    let n = r.dimension();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    out.push(r.get(i, j, k, l) + r.get(i, k, l, j) + r.get(i, l, j, k));
                }
            }
        }
    }
    out
}

/// ZERO iff every curvature component vanishes; otherwise the verdict of
/// the first component that is witnessed nonzero.
pub fn is_flat(gamma: &Christoffel, cfg: &ZeroTestConfig) -> Verdict {
    let r = riemann(gamma);
    let mut undecided = None;
    for (_, c) in r.independent() {
        if c.is_zero() {
            continue;
        }
        match is_zero(c, cfg) {
            Verdict::Zero => {}
            v @ Verdict::NonZero(_) => return v,
            v @ Verdict::Undecided(_) => {
                undecided.get_or_insert(v);
            }
        }
    }
    undecided.unwrap_or(Verdict::Zero)
}

/// The six coefficients of a pair of geodesic equations in `(x, y)`:
/// `Γ¹₁₁=−a, Γ¹₁₂=−b, Γ¹₂₂=−c, Γ²₁₁=−d, Γ²₁₂=−e, Γ²₂₂=−f`.
#[derive(Debug, Clone, PartialEq)]
pub struct Geodesic2Coefficients {
    pub a: Expr,
    pub b: Expr,
    pub c: Expr,
    pub d: Expr,
    pub e: Expr,
    pub f: Expr,
}

impl Geodesic2Coefficients {
    pub const NAMES: [&'static str; 6] = ["a", "b", "c", "d", "e", "f"];

    pub fn zero() -> Self {
        Self::from_array(std::array::from_fn(|_| Expr::zero()))
    }

    pub fn from_array([a, b, c, d, e, f]: [Expr; 6]) -> Self {
        Geodesic2Coefficients { a, b, c, d, e, f }
    }

    pub fn to_array(&self) -> [Expr; 6] {
        [
            self.a.clone(),
            self.b.clone(),
            self.c.clone(),
            self.d.clone(),
            self.e.clone(),
            self.f.clone(),
        ]
    }

    pub fn to_christoffel(&self) -> Christoffel {
        let v = self.to_array();
        // stored order for n = 2: Γ¹₁₁ Γ¹₁₂ Γ¹₂₂ Γ²₁₁ Γ²₁₂ Γ²₂₂
        let mut it = v.into_iter().map(|e| -e);
        Christoffel::from_fn(2, |_, _, _| it.next().unwrap()).unwrap()
    }

    pub fn from_christoffel(gamma: &Christoffel) -> Result<Self> {
        if gamma.dimension() != 2 {
            return Err(Error::UnsupportedDimension(gamma.dimension()));
        }
        let g = |i, j, k| -gamma.get(i, j, k);
        Ok(Geodesic2Coefficients {
            a: g(0, 0, 0),
            b: g(0, 0, 1),
            c: g(0, 1, 1),
            d: g(1, 0, 0),
            e: g(1, 0, 1),
            f: g(1, 1, 1),
        })
    }
}

/// The four flatness residuals of a two-dimensional geodesic system:
///
/// ```text
/// a_y − b_x + be − cd
/// b_y − c_x + (ac − b²) + (bf − ce)
/// d_y − e_x − (ae − bd) − (df − e²)
/// (b + f)_x − (a + e)_y
/// ```
pub fn flat_residuals(k: &Geodesic2Coefficients) -> [Expr; 4] {
    let x = Symbol::new("x");
    let y = Symbol::new("y");
    let (a, b, c, d, e, f) = (&k.a, &k.b, &k.c, &k.d, &k.e, &k.f);
    [
        a.diff(&y) - b.diff(&x) + b * e - c * d,
        b.diff(&y) - c.diff(&x) + (a * c - b * b) + (b * f - c * e),
        d.diff(&y) - e.diff(&x) - (a * e - b * d) - (d * f - e * e),
        (b + f).diff(&x) - (a + e).diff(&y),
    ]
}

pub fn geodesic2_flat_conditions(k: &Geodesic2Coefficients, cfg: &ZeroTestConfig) -> ConditionReport {
    let items = flat_residuals(k)
        .into_iter()
        .enumerate()
        .map(|(i, r)| (format!("flat.{}", i + 1), r));
    ConditionReport::evaluate("geodesic-2 flatness", items, cfg)
}

/// Result of checking a metric against a two-dimensional connection.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricCheck {
    pub report: ConditionReport,
    pub determinant: Expr,
    /// Verdict on the determinant; ZERO means the metric is degenerate.
    pub degeneracy: Verdict,
}

impl MetricCheck {
    pub fn is_degenerate(&self) -> bool {
        self.degeneracy.is_zero()
    }
}

/// The six first-order equations that make `[[p, q], [q, r]]` compatible
/// with the connection, as `lhs − rhs`:
///
/// ```text
/// p_x + 2(ap + dq)        q_x + bp + (a + e)q + dr     r_x + 2(bq + er)
/// p_y + 2(bp + eq)        q_y + cp + (b + f)q + er     r_y + 2(cq + fr)
/// ```
pub fn metric_pde_residuals(
    k: &Geodesic2Coefficients,
    g: &Metric,
    cfg: &ZeroTestConfig,
) -> Result<MetricCheck> {
    if g.dimension() != 2 {
        return Err(Error::UnsupportedDimension(g.dimension()));
    }
    let x = Symbol::new("x");
    let y = Symbol::new("y");
    let (p, q, r) = (g.get(0, 0), g.get(0, 1), g.get(1, 1));
    let (a, b, c, d, e, f) = (&k.a, &k.b, &k.c, &k.d, &k.e, &k.f);
    let two = Expr::int(2);
    let items = [
        ("metric.p_x", p.diff(&x) + &two * &(a * p + d * q)),
        ("metric.q_x", q.diff(&x) + b * p + &(a + e) * q + d * r),
        ("metric.r_x", r.diff(&x) + &two * &(b * q + e * r)),
        ("metric.p_y", p.diff(&y) + &two * &(b * p + e * q)),
        ("metric.q_y", q.diff(&y) + c * p + &(b + f) * q + e * r),
        ("metric.r_y", r.diff(&y) + &two * &(c * q + f * r)),
    ];
    let report = ConditionReport::evaluate(
        "metric compatibility",
        items.into_iter().map(|(id, e)| (id.to_string(), e)),
        cfg,
    );
    let determinant = g.determinant();
    let degeneracy = is_zero(&determinant, cfg);
    Ok(MetricCheck {
        report,
        determinant,
        degeneracy,
    })
}
