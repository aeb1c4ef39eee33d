//! Canonical expressions: a reduced quotient of two [`Poly`] values.
//!
//! Every constructor funnels through [`normalize`], which enforces
//! - no `sqrt(a)` atom raised to a power above one,
//! - a denominator free of `sqrt` atoms,
//! - numerator and denominator coprime,
//! - a denominator whose exponential factors are shifted to start at `exp(0)`
//!   and whose leading coefficient is one.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::{Integer};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::gcd::{self, IPoly};
use crate::poly::{Atom, Func, Monomial, Poly, Symbol};

pub struct RatFunc {
    num: Poly,
    den: Poly,
    symbols: BTreeSet<Symbol>,
    depth: u32,
}

/// Immutable, cheaply clonable canonical expression.
#[derive(Clone)]
pub struct Expr(Arc<RatFunc>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.num == other.0.num && self.0.den == other.0.den)
    }
}

impl Eq for Expr {}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0
            .num
            .cmp(&other.0.num)
            .then_with(|| self.0.den.cmp(&other.0.den))
    }
}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.num.hash(state);
        self.0.den.hash(state);
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Expr {
    /// Wraps an already canonical pair.
    fn raw(num: Poly, den: Poly) -> Expr {
        let mut symbols = BTreeSet::new();
        let mut depth = 0;
        for p in [&num, &den] {
            for m in p.terms.keys() {
                for (a, _) in &m.factors {
                    match a {
                        Atom::Var(s) => {
                            symbols.insert(s.clone());
                        }
                        Atom::Apply(_, e) => {
                            symbols.extend(e.0.symbols.iter().cloned());
                            depth = depth.max(e.0.depth + 1);
                        }
                    }
                }
                if let Some(e) = &m.exp {
                    symbols.extend(e.0.symbols.iter().cloned());
                    depth = depth.max(e.0.depth + 1);
                }
            }
        }
        Expr(Arc::new(RatFunc {
            num,
            den,
            symbols,
            depth,
        }))
    }

    pub fn zero() -> Expr {
        Expr::raw(Poly::zero(), Poly::one())
    }

    pub fn one() -> Expr {
        Expr::raw(Poly::one(), Poly::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::rational(rat(n))
    }

    pub fn integer(n: BigInt) -> Expr {
        Expr::rational(BigRational::from_integer(n))
    }

    pub fn rational(c: BigRational) -> Expr {
        Expr::raw(Poly::constant(c), Poly::one())
    }

    pub fn frac(p: i64, q: i64) -> Expr {
        Expr::rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn var(name: &str) -> Expr {
        Expr::symbol(Symbol::new(name))
    }

    pub fn symbol(s: Symbol) -> Expr {
        Expr::raw(
            Poly::monomial(Monomial::atom(Atom::Var(s)), BigRational::one()),
            Poly::one(),
        )
    }

    /// Canonical form of `num / den`. Panics when `den` is the zero polynomial.
    pub fn from_polys(num: Poly, den: Poly) -> Expr {
        normalize(num, den)
    }

    pub fn from_poly(p: Poly) -> Expr {
        normalize(p, Poly::one())
    }

    pub fn num(&self) -> &Poly {
        &self.0.num
    }

    pub fn den(&self) -> &Poly {
        &self.0.den
    }

    pub fn numerator(&self) -> Expr {
        Expr::raw(self.0.num.clone(), Poly::one())
    }

    pub fn denominator(&self) -> Expr {
        Expr::raw(self.0.den.clone(), Poly::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.num.is_one() && self.0.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.0.den.is_one()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.0.den.is_one() {
            self.0.num.as_constant()
        } else {
            None
        }
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational().filter(|c| c.is_integer()).map(|c| c.to_integer())
    }

    pub fn as_symbol(&self) -> Option<&Symbol> {
        if !self.0.den.is_one() || self.0.num.len() != 1 {
            return None;
        }
        let (m, c) = self.0.num.terms.iter().next().unwrap();
        if !c.is_one() || m.exp.is_some() || m.factors.len() != 1 || m.factors[0].1 != 1 {
            return None;
        }
        m.factors[0].0.as_var()
    }

    pub fn symbols(&self) -> &BTreeSet<Symbol> {
        &self.0.symbols
    }

    pub fn depends_on(&self, s: &Symbol) -> bool {
        self.0.symbols.contains(s)
    }

    /// Identity of the shared node, stable while the value is alive.
    pub(crate) fn id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    /// Nesting depth of function kernels.
    pub fn depth(&self) -> u32 {
        self.0.depth
    }

    /// Number of terms in numerator and denominator.
    pub fn size(&self) -> usize {
        self.0.num.len() + self.0.den.len()
    }

    pub fn checked_div(&self, other: &Expr) -> Option<Expr> {
        if other.is_zero() {
            return None;
        }
        Some(normalize(
            self.0.num.mul(&other.0.den),
            self.0.den.mul(&other.0.num),
        ))
    }

    pub fn recip(&self) -> Option<Expr> {
        Expr::one().checked_div(self)
    }

    pub fn pow(&self, n: i64) -> Expr {
        if n == 0 {
            return Expr::one();
        }
        let k = n.unsigned_abs() as u32;
        let p = if k == 1 {
            self.clone()
        } else if self.0.den.is_one() && !has_sqrt(&self.0.num) {
            Expr::raw(self.0.num.pow(k), Poly::one())
        } else {
            normalize(self.0.num.pow(k), self.0.den.pow(k))
        };
        if n < 0 {
            p.recip().expect("negative power of zero")
        } else {
            p
        }
    }

    pub fn exp(&self) -> Expr {
        if let Some((c, inner)) = self.single_kernel(Func::Ln) {
            if c.is_integer() {
                if let Some(k) = c.to_integer().to_i64() {
                    return inner.pow(k);
                }
            }
        }
        Expr::raw(
            Poly::monomial(Monomial::from_exp(self.clone()), BigRational::one()),
            Poly::one(),
        )
    }

    pub fn ln(&self) -> Expr {
        if self.is_one() {
            return Expr::zero();
        }
        if let Some(e) = self.single_exp() {
            return e.clone();
        }
        kernel(Func::Ln, self.clone())
    }

    pub fn sin(&self) -> Expr {
        if self.is_zero() {
            return Expr::zero();
        }
        if self.0.num.has_negative_leading() {
            return -kernel(Func::Sin, -self);
        }
        kernel(Func::Sin, self.clone())
    }

    pub fn cos(&self) -> Expr {
        if self.is_zero() {
            return Expr::one();
        }
        if self.0.num.has_negative_leading() {
            return kernel(Func::Cos, -self);
        }
        kernel(Func::Cos, self.clone())
    }

    pub fn sqrt(&self) -> Expr {
        if self.is_zero() {
            return Expr::zero();
        }
        if let Some(c) = self.as_rational() {
            return sqrt_rational(&c);
        }
        // Pull the positive rational content out of the radicand.
        let content = rational_content(&self.0.num);
        let inner = self.div_rational(&content);
        let root = match inner.single_exp() {
            Some(e) => (e * &Expr::frac(1, 2)).exp(),
            None => kernel(Func::Sqrt, inner),
        };
        if content.is_one() {
            root
        } else {
            &sqrt_rational(&content) * &root
        }
    }

    /// `E` when the expression is exactly `exp(E)`.
    fn single_exp(&self) -> Option<&Expr> {
        if !self.0.den.is_one() || self.0.num.len() != 1 {
            return None;
        }
        let (m, c) = self.0.num.terms.iter().next().unwrap();
        if c.is_one() && m.factors.is_empty() {
            m.exp.as_ref()
        } else {
            None
        }
    }

    /// Applies `f` by name; `None` for unknown names.
    pub fn apply(name: &str, arg: &Expr) -> Option<Expr> {
        Some(match name {
            "exp" => arg.exp(),
            "ln" => arg.ln(),
            "sin" => arg.sin(),
            "cos" => arg.cos(),
            "sqrt" => arg.sqrt(),
            _ => return None,
        })
    }

    fn div_rational(&self, c: &BigRational) -> Expr {
        Expr::raw(self.0.num.scale(&c.recip()), self.0.den.clone())
    }

    fn scale(&self, c: &BigRational) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr::raw(self.0.num.scale(c), self.0.den.clone())
    }

    /// `c * f(inner)` when the expression is exactly one kernel with a
    /// rational coefficient.
    fn single_kernel(&self, f: Func) -> Option<(BigRational, Expr)> {
        if !self.0.den.is_one() || self.0.num.len() != 1 {
            return None;
        }
        let (m, c) = self.0.num.terms.iter().next().unwrap();
        match (m.factors.as_slice(), &m.exp) {
            ([(Atom::Apply(g, inner), 1)], None) if *g == f => Some((c.clone(), inner.clone())),
            _ => None,
        }
    }

    /// Partial derivative with respect to `s`.
    pub fn diff(&self, s: &Symbol) -> Expr {
        if !self.depends_on(s) {
            return Expr::zero();
        }
        let dn = diff_poly(&self.0.num, s);
        if self.0.den.is_one() {
            return dn;
        }
        let dd = diff_poly(&self.0.den, s);
        let den = self.denominator();
        let num = self.numerator();
        // (n' d - n d') / d^2
        (&(&dn * &den) - &(&num * &dd))
            .checked_div(&(&den * &den))
            .expect("canonical denominator is nonzero")
    }

    pub fn diff_var(&self, name: &str) -> Expr {
        self.diff(&Symbol::new(name))
    }

    /// Simultaneous substitution of symbols.
    pub fn substitute(&self, map: &BTreeMap<Symbol, Expr>) -> Expr {
        if map.is_empty() || !self.0.symbols.iter().any(|s| map.contains_key(s)) {
            return self.clone();
        }
        self.rebuild(
            &mut |a: &Atom| match a {
                Atom::Var(s) => map.get(s).cloned().unwrap_or_else(|| Expr::symbol(s.clone())),
                Atom::Apply(f, e) => apply_func(*f, &e.substitute(map)),
            },
            &|e| e.substitute(map),
        )
    }

    pub fn substitute_one(&self, s: &Symbol, value: &Expr) -> Expr {
        let mut map = BTreeMap::new();
        map.insert(s.clone(), value.clone());
        self.substitute(&map)
    }

    /// Applies the switchable rewrite rules recursively.
    pub fn apply_rules(&self, rules: &RuleSet) -> Expr {
        if !rules.pythagorean || !contains_cos(self) {
            return self.clone();
        }
        let num = pythagorean_poly(&self.0.num, rules);
        let den = pythagorean_poly(&self.0.den, rules);
        num.checked_div(&den).expect("rewrite preserves a nonzero denominator")
    }

    /// Rebuilds from atoms mapped through `atom_map`, with exponential
    /// arguments mapped through `exp_map`.
    fn rebuild(&self, atom_map: &mut dyn FnMut(&Atom) -> Expr, exp_map: &dyn Fn(&Expr) -> Expr) -> Expr {
        let mut cache: HashMap<Atom, Expr> = HashMap::new();
        let num = rebuild_poly(&self.0.num, atom_map, &mut cache, exp_map);
        if self.0.den.is_one() {
            return num;
        }
        let den = rebuild_poly(&self.0.den, atom_map, &mut cache, exp_map);
        num.checked_div(&den)
            .expect("substitution made a denominator vanish identically")
    }

    /// Atoms occurring anywhere at top level.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut s = self.0.num.atoms();
        s.extend(self.0.den.atoms());
        s
    }
}

/// Switchable rewrite rules applied on request, never by construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RuleSet {
    /// `cos(a)^2 -> 1 - sin(a)^2`
    pub pythagorean: bool,
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet { pythagorean: true }
    }
}

impl RuleSet {
    pub fn none() -> Self {
        RuleSet { pythagorean: false }
    }
}

fn contains_cos(e: &Expr) -> bool {
    [&e.0.num, &e.0.den].iter().any(|p| {
        p.terms.keys().any(|m| {
            m.factors.iter().any(|(a, _)| match a {
                Atom::Apply(Func::Cos, _) => true,
                Atom::Apply(_, inner) => contains_cos(inner),
                Atom::Var(_) => false,
            }) || m.exp.as_ref().is_some_and(contains_cos)
        })
    })
}

fn pythagorean_poly(p: &Poly, rules: &RuleSet) -> Expr {
    let mut acc = Expr::zero();
    for (m, c) in &p.terms {
        let mut t = Expr::rational(c.clone());
        for (a, k) in &m.factors {
            let f = match a {
                Atom::Var(s) => Expr::symbol(s.clone()).pow(*k as i64),
                Atom::Apply(Func::Cos, inner) => {
                    let inner = inner.apply_rules(rules);
                    let s2 = inner.sin().pow(2);
                    let half = (&Expr::one() - &s2).pow((*k / 2) as i64);
                    if k % 2 == 1 {
                        &half * &inner.cos()
                    } else {
                        half
                    }
                }
                Atom::Apply(f, inner) => apply_func(*f, &inner.apply_rules(rules)).pow(*k as i64),
            };
            t = &t * &f;
        }
        if let Some(e) = &m.exp {
            t = &t * &e.apply_rules(rules).exp();
        }
        acc = &acc + &t;
    }
    acc
}

fn apply_func(f: Func, e: &Expr) -> Expr {
    match f {
        Func::Ln => e.ln(),
        Func::Sin => e.sin(),
        Func::Cos => e.cos(),
        Func::Sqrt => e.sqrt(),
    }
}

fn rebuild_poly(
    p: &Poly,
    atom_map: &mut dyn FnMut(&Atom) -> Expr,
    cache: &mut HashMap<Atom, Expr>,
    inner: &dyn Fn(&Expr) -> Expr,
) -> Expr {
    for m in p.terms.keys() {
        for (a, _) in &m.factors {
            if !cache.contains_key(a) {
                let v = atom_map(a);
                cache.insert(a.clone(), v);
            }
        }
    }
    let images = &*cache;
    let polynomial_images = p
        .terms
        .keys()
        .all(|m| m.factors.iter().all(|(a, _)| images[a].0.den.is_one()));
    if polynomial_images {
        let mut out = Poly::zero();
        let mut powers: HashMap<(Atom, u32), Poly> = HashMap::new();
        for (m, c) in &p.terms {
            let mut t = Poly::constant(c.clone());
            for (a, k) in &m.factors {
                let f = powers
                    .entry((a.clone(), *k))
                    .or_insert_with(|| images[a].0.num.pow(*k))
                    .clone();
                t = t.mul(&f);
            }
            if let Some(e) = &m.exp {
                t = t.mul_monomial(&Monomial::from_exp(inner(e)));
            }
            out = out.add(&t);
        }
        return normalize(out, Poly::one());
    }
    let mut acc = Expr::zero();
    for (m, c) in &p.terms {
        let mut t = Expr::rational(c.clone());
        for (a, k) in &m.factors {
            t = &t * &images[a].pow(*k as i64);
        }
        if let Some(e) = &m.exp {
            t = &t * &inner(e).exp();
        }
        acc = &acc + &t;
    }
    acc
}

fn diff_atom(a: &Atom, s: &Symbol) -> Expr {
    match a {
        Atom::Var(v) => {
            if v == s {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Atom::Apply(f, e) => {
            let de = e.diff(s);
            if de.is_zero() {
                return Expr::zero();
            }
            let outer = match f {
                Func::Ln => e.recip().expect("ln of zero"),
                Func::Sin => e.cos(),
                Func::Cos => -e.sin(),
                Func::Sqrt => (&Expr::int(2) * &e.sqrt()).recip().expect("sqrt of zero"),
            };
            &outer * &de
        }
    }
}

/// Derivative of a polynomial via its formal partials in each dependent atom
/// and in the exponential factor.
fn diff_poly(p: &Poly, s: &Symbol) -> Expr {
    let mut partials: BTreeMap<Atom, Poly> = BTreeMap::new();
    let mut exp_part: BTreeMap<Expr, Poly> = BTreeMap::new();
    let mut dep_cache: HashMap<Atom, bool> = HashMap::new();
    for (m, c) in &p.terms {
        for (a, k) in &m.factors {
            let dep = *dep_cache.entry(a.clone()).or_insert_with(|| match a {
                Atom::Var(v) => v == s,
                Atom::Apply(_, e) => e.depends_on(s),
            });
            if !dep {
                continue;
            }
            let coeff = c * rat(*k as i64);
            partials
                .entry(a.clone())
                .or_default()
                .add_term(m.without_one(a), coeff);
        }
        if let Some(e) = &m.exp {
            if e.depends_on(s) {
                exp_part
                    .entry(e.clone())
                    .or_default()
                    .add_term(m.clone(), c.clone());
            }
        }
    }
    let mut polys = Poly::zero();
    let mut acc = Expr::zero();
    for (a, q) in partials {
        let da = diff_atom(&a, s);
        if da.is_one() {
            polys = polys.add(&q);
        } else if !da.is_zero() {
            acc = &acc + &(&Expr::from_poly(q) * &da);
        }
    }
    for (e, q) in exp_part {
        let de = e.diff(s);
        if de.0.den.is_one() {
            polys = polys.add(&q.mul(&de.0.num));
        } else {
            acc = &acc + &(&Expr::from_poly(q) * &de);
        }
    }
    &Expr::from_poly(polys) + &acc
}

fn kernel(f: Func, arg: Expr) -> Expr {
    Expr::raw(
        Poly::monomial(Monomial::atom(Atom::Apply(f, arg)), BigRational::one()),
        Poly::one(),
    )
}

fn rational_content(p: &Poly) -> BigRational {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for c in p.terms.values() {
        num = num.gcd(c.numer());
        den = den.lcm(c.denom());
    }
    BigRational::new(num, den)
}

/// `sqrt(c)` as `k * sqrt(m)` with `m` square-free up to trial division.
fn sqrt_rational(c: &BigRational) -> Expr {
    if c.is_zero() {
        return Expr::zero();
    }
    let n = c.numer() * c.denom();
    let negative = n.is_negative();
    let mut rest = n.abs();
    let mut k = BigInt::one();
    let mut f = BigInt::from(2u32);
    let limit = BigInt::from(100_000u32);
    while &f * &f <= rest && f <= limit {
        let sq = &f * &f;
        while (&rest % &sq).is_zero() {
            rest /= &sq;
            k *= &f;
        }
        f += 1u32;
    }
    let r = rest.sqrt();
    if &r * &r == rest {
        k *= &r;
        rest = BigInt::one();
    }
    let outer = BigRational::new(k, c.denom().clone());
    if rest.is_one() && !negative {
        return Expr::rational(outer);
    }
    let radicand = if negative { -rest } else { rest };
    kernel(Func::Sqrt, Expr::integer(radicand)).scale(&outer)
}

fn has_sqrt(p: &Poly) -> bool {
    p.terms
        .keys()
        .any(|m| m.factors.iter().any(|(a, _)| matches!(a, Atom::Apply(Func::Sqrt, _))))
}

/// Rewrites `sqrt(a)^k` with `k >= 2`; returns `p = num / den`.
fn reduce_sqrt(p: &Poly) -> Option<(Poly, Poly)> {
    let target = p.terms.keys().find_map(|m| {
        m.factors
            .iter()
            .find(|(a, k)| *k >= 2 && matches!(a, Atom::Apply(Func::Sqrt, _)))
            .map(|(a, _)| a.clone())
    })?;
    let Atom::Apply(_, radicand) = &target else {
        unreachable!()
    };
    let mut by_half: BTreeMap<u32, Poly> = BTreeMap::new();
    for (m, c) in &p.terms {
        let k = m.power_of(&target);
        let mut factors: Vec<(Atom, u32)> = m
            .factors
            .iter()
            .filter(|(a, _)| *a != target)
            .cloned()
            .collect();
        if k % 2 == 1 {
            factors.push((target.clone(), 1));
        }
        let reduced = Monomial::from_factors(factors, m.exp.clone());
        by_half.entry(k / 2).or_default().add_term(reduced, c.clone());
    }
    let top = *by_half.keys().next_back().unwrap();
    let an = &radicand.0.num;
    let ad = &radicand.0.den;
    let mut num = Poly::zero();
    for (q, part) in by_half {
        num = num.add(&part.mul(&an.pow(q)).mul(&ad.pow(top - q)));
    }
    let den = ad.pow(top);
    let (num, den) = match reduce_sqrt(&num) {
        Some((n2, d2)) => (n2, den.mul(&d2)),
        None => (num, den),
    };
    Some((num, den))
}

/// The deepest `sqrt` atom of `p`, if any.
fn deepest_sqrt(p: &Poly) -> Option<Atom> {
    p.atoms()
        .into_iter()
        .filter(|a| matches!(a, Atom::Apply(Func::Sqrt, _)))
        .max_by(|a, b| {
            let da = match a {
                Atom::Apply(_, e) => e.depth(),
                _ => 0,
            };
            let db = match b {
                Atom::Apply(_, e) => e.depth(),
                _ => 0,
            };
            da.cmp(&db).then_with(|| a.cmp(b))
        })
}

fn normalize(mut num: Poly, mut den: Poly) -> Expr {
    assert!(!den.is_zero(), "zero denominator");
    if num.is_zero() {
        return Expr::zero();
    }
    loop {
        if let Some((n, q)) = reduce_sqrt(&num) {
            num = n;
            den = den.mul(&q);
        }
        if let Some((d, q)) = reduce_sqrt(&den) {
            den = d;
            num = num.mul(&q);
        }
        if num.is_zero() {
            return Expr::zero();
        }
        let Some(s) = deepest_sqrt(&den) else { break };
        // Multiply through by the conjugate with respect to `s`.
        let mut with_s = Poly::zero();
        for (m, c) in &den.terms {
            if m.power_of(&s) > 0 {
                with_s.add_term(m.clone(), c.clone());
            }
        }
        let conj = den.sub(&with_s).sub(&with_s);
        num = num.mul(&conj);
        den = den.mul(&conj);
    }
    if let Some(c) = den.as_constant() {
        return Expr::raw(num.scale(&c.recip()), Poly::one());
    }
    cancel(num, den)
}

/// Decomposition of an exponential argument into `sum c_k * key_k`, one key
/// per numerator term over the shared denominator.
fn exp_keys(e: &Expr) -> Vec<(Expr, BigRational)> {
    let den = &e.0.den;
    let mut out: Vec<(Expr, BigRational)> = Vec::new();
    for (m, c) in &e.0.num.terms {
        let part = if den.is_one() {
            Expr::raw(Poly::monomial(m.clone(), BigRational::one()), Poly::one())
        } else {
            normalize(Poly::monomial(m.clone(), BigRational::one()), den.clone())
        };
        let (pm, pc) = part
            .0
            .num
            .terms
            .iter()
            .next()
            .map(|(m, c)| (m.clone(), c.clone()))
            .expect("nonzero key");
        debug_assert_eq!(part.0.num.len(), 1);
        let key = Expr::raw(Poly::monomial(pm, BigRational::one()), part.0.den.clone());
        out.push((key, c * pc));
    }
    out
}

/// Cancels the gcd of `num` and `den` and normalizes the denominator.
fn cancel(num: Poly, den: Poly) -> Expr {
    let mut atoms: BTreeSet<Atom> = num.atoms();
    atoms.extend(den.atoms());
    let atoms: Vec<Atom> = atoms.into_iter().collect();
    let atom_index: HashMap<&Atom, usize> = atoms.iter().enumerate().map(|(i, a)| (a, i)).collect();

    let mut decomp: HashMap<Expr, Vec<(Expr, BigRational)>> = HashMap::new();
    for p in [&num, &den] {
        for m in p.terms.keys() {
            if let Some(e) = &m.exp {
                if !decomp.contains_key(e) {
                    decomp.insert(e.clone(), exp_keys(e));
                }
            }
        }
    }
    let keys: Vec<Expr> = decomp
        .values()
        .flat_map(|v| v.iter().map(|(k, _)| k.clone()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let key_index: HashMap<&Expr, usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let na = atoms.len();
    let nk = keys.len();
    let nvars = na + nk;

    // Per-key integer scale and shift so exponents become naturals.
    let mut scale = vec![BigInt::one(); nk];
    for v in decomp.values() {
        for (k, c) in v {
            let i = key_index[k];
            scale[i] = scale[i].lcm(c.denom());
        }
    }
    let key_exponents = |e: &Expr| -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); nk];
        for (k, c) in &decomp[e] {
            let i = key_index[k];
            out[i] += (c * BigRational::from_integer(scale[i].clone())).to_integer();
        }
        out
    };
    let mut shift = vec![BigInt::zero(); nk];
    for p in [&num, &den] {
        for m in p.terms.keys() {
            if let Some(e) = &m.exp {
                for (i, x) in key_exponents(e).into_iter().enumerate() {
                    if x < shift[i] {
                        shift[i] = x;
                    }
                }
            }
        }
    }

    let to_ipoly = |p: &Poly| -> (IPoly, BigInt) {
        let mut l = BigInt::one();
        for c in p.terms.values() {
            l = l.lcm(c.denom());
        }
        let lr = BigRational::from_integer(l.clone());
        let mut terms = Vec::with_capacity(p.len());
        for (m, c) in &p.terms {
            let mut e = vec![0u32; nvars];
            for (a, k) in &m.factors {
                e[atom_index[a]] = *k;
            }
            let kx = match &m.exp {
                Some(x) => key_exponents(x),
                None => vec![BigInt::zero(); nk],
            };
            for i in 0..nk {
                e[na + i] = (&kx[i] - &shift[i]).to_u32().expect("exponent range");
            }
            terms.push((e, (c * &lr).to_integer()));
        }
        (IPoly::from_terms(nvars, terms), l)
    };
    let (ni, sn) = to_ipoly(&num);
    let (di, sd) = to_ipoly(&den);
    let g = gcd::gcd(&ni, &di);
    let trivial = g.is_constant();
    if trivial && nk == 0 {
        return finish(num, den);
    }
    let (qn, qd) = if trivial {
        (ni, di)
    } else {
        (
            ni.div_exact(&g).expect("gcd divides numerator"),
            di.div_exact(&g).expect("gcd divides denominator"),
        )
    };
    // Offsets that bring the denominator's exponentials down to exp(0).
    let mut offset = vec![u32::MAX; nk];
    for (e, _) in &qd.terms {
        for i in 0..nk {
            offset[i] = offset[i].min(e[na + i]);
        }
    }
    let mut arg_cache: HashMap<Vec<i64>, Option<Expr>> = HashMap::new();
    let mut from_ipoly = |p: &IPoly| -> Poly {
        let mut out = Poly::zero();
        for (e, c) in &p.terms {
            let factors: Vec<(Atom, u32)> = (0..na)
                .filter(|&i| e[i] > 0)
                .map(|i| (atoms[i].clone(), e[i]))
                .collect();
            let rel: Vec<i64> = (0..nk)
                .map(|i| e[na + i] as i64 - offset[i] as i64)
                .collect();
            let arg = arg_cache
                .entry(rel.clone())
                .or_insert_with(|| {
                    let mut acc = Expr::zero();
                    for (i, r) in rel.iter().enumerate() {
                        if *r != 0 {
                            let coef = BigRational::new(BigInt::from(*r), scale[i].clone());
                            acc = &acc + &keys[i].scale(&coef);
                        }
                    }
                    (!acc.is_zero()).then_some(acc)
                })
                .clone();
            out.add_term(
                Monomial::from_factors(factors, arg),
                BigRational::from_integer(c.clone()),
            );
        }
        out
    };
    let n2 = from_ipoly(&qn).scale(&BigRational::new(sd, BigInt::one()));
    let d2 = from_ipoly(&qd).scale(&BigRational::new(sn, BigInt::one()));
    finish(n2, d2)
}

/// Makes the denominator monic; the pair must already be coprime.
fn finish(num: Poly, den: Poly) -> Expr {
    if let Some(c) = den.as_constant() {
        return Expr::raw(num.scale(&c.recip()), Poly::one());
    }
    let lc = den.leading_coefficient().unwrap().clone();
    if lc.is_one() {
        return Expr::raw(num, den);
    }
    let inv = lc.recip();
    Expr::raw(num.scale(&inv), den.scale(&inv))
}

impl Add for &Expr {
    type Output = Expr;

    fn add(self, rhs: &Expr) -> Expr {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let (a, b) = (&self.0, &rhs.0);
        if a.den.is_one() && b.den.is_one() {
            return Expr::raw(a.num.add(&b.num), Poly::one());
        }
        // A polynomial summand cannot create common factors with the other
        // denominator.
        if b.den.is_one() {
            return Expr::raw(a.num.add(&b.num.mul(&a.den)), a.den.clone());
        }
        if a.den.is_one() {
            return Expr::raw(b.num.add(&a.num.mul(&b.den)), b.den.clone());
        }
        if a.den == b.den {
            return normalize(a.num.add(&b.num), a.den.clone());
        }
        normalize(
            a.num.mul(&b.den).add(&b.num.mul(&a.den)),
            a.den.mul(&b.den),
        )
    }
}

impl Sub for &Expr {
    type Output = Expr;

    fn sub(self, rhs: &Expr) -> Expr {
        self + &(-rhs)
    }
}

impl Mul for &Expr {
    type Output = Expr;

    fn mul(self, rhs: &Expr) -> Expr {
        if self.is_zero() || rhs.is_zero() {
            return Expr::zero();
        }
        if let Some(c) = self.as_rational() {
            return rhs.scale(&c);
        }
        if let Some(c) = rhs.as_rational() {
            return self.scale(&c);
        }
        let (a, b) = (&self.0, &rhs.0);
        if a.den.is_one() && b.den.is_one() {
            let p = a.num.mul(&b.num);
            if has_sqrt(&p) {
                return normalize(p, Poly::one());
            }
            return Expr::raw(p, Poly::one());
        }
        normalize(a.num.mul(&b.num), a.den.mul(&b.den))
    }
}

impl Div for &Expr {
    type Output = Expr;

    /// Panics on division by the zero expression; see [`Expr::checked_div`].
    fn div(self, rhs: &Expr) -> Expr {
        self.checked_div(rhs).expect("division by zero expression")
    }
}

impl Neg for &Expr {
    type Output = Expr;

    fn neg(self) -> Expr {
        Expr::raw(self.0.num.neg(), self.0.den.clone())
    }
}

impl Neg for Expr {
    type Output = Expr;

    fn neg(self) -> Expr {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                (&self).$m(rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |a, b| &a + &b)
    }
}

impl<'a> std::iter::Sum<&'a Expr> for Expr {
    fn sum<I: Iterator<Item = &'a Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |a, b| &a + b)
    }
}

impl std::iter::Product for Expr {
    fn product<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::one(), |a, b| &a * &b)
    }
}
