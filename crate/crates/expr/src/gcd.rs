//! Dense-index multivariate polynomials over the integers and their gcd.
//!
//! The gcd strips monomial and integer content, eliminates variables that occur
//! in only one operand, proves coprimality cheaply with a modular image when it
//! can, and otherwise falls back to a primitive polynomial remainder sequence.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Terms sorted by exponent vector, largest (lex) first; no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IPoly {
    pub nvars: usize,
    pub terms: Vec<(Vec<u32>, BigInt)>,
}

impl IPoly {
    pub fn zero(nvars: usize) -> Self {
        IPoly {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        if c.is_zero() {
            return IPoly::zero(nvars);
        }
        IPoly {
            nvars,
            terms: vec![(vec![0; nvars], c)],
        }
    }

    pub fn from_terms(nvars: usize, mut terms: Vec<(Vec<u32>, BigInt)>) -> Self {
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Vec<u32>, BigInt)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            match out.last_mut() {
                Some((le, lc)) if *le == e => *lc += c,
                _ => out.push((e, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        IPoly { nvars, terms: out }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.iter().all(|&e| e == 0))
    }

    fn lc(&self) -> &BigInt {
        &self.terms[0].1
    }

    pub fn neg(&self) -> IPoly {
        IPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &IPoly) -> IPoly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            match self.terms[i].0.cmp(&other.terms[j].0) {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let (e, c) = &other.terms[j];
                    out.push((e.clone(), -c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &self.terms[i].1 - &other.terms[j].1;
                    if !c.is_zero() {
                        out.push((self.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(other.terms[j..].iter().map(|(e, c)| (e.clone(), -c)));
        IPoly {
            nvars: self.nvars,
            terms: out,
        }
    }

    pub fn mul(&self, other: &IPoly) -> IPoly {
        if self.is_zero() || other.is_zero() {
            return IPoly::zero(self.nvars);
        }
        let mut acc: std::collections::BTreeMap<Vec<u32>, BigInt> = std::collections::BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_insert_with(BigInt::zero) += c1 * c2;
            }
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.reverse();
        IPoly {
            nvars: self.nvars,
            terms,
        }
    }

    fn mul_term(&self, e: &[u32], c: &BigInt) -> IPoly {
        IPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(te, tc)| (te.iter().zip(e).map(|(a, b)| a + b).collect(), tc * c))
                .collect(),
        }
    }

    fn div_int(&self, c: &BigInt) -> IPoly {
        IPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, tc)| (e.clone(), tc / c)).collect(),
        }
    }

    /// Exact quotient, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &IPoly) -> Option<IPoly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(IPoly::zero(self.nvars));
        }
        if d.is_constant() {
            let c = d.lc();
            if self.terms.iter().any(|(_, tc)| !tc.is_multiple_of(c)) {
                return None;
            }
            return Some(self.div_int(c));
        }
        let (de, dc) = &d.terms[0];
        let mut r = self.clone();
        let mut q = Vec::new();
        while !r.is_zero() {
            let (re, rc) = &r.terms[0];
            if re.iter().zip(de).any(|(a, b)| a < b) {
                return None;
            }
            let (qc, rem) = rc.div_rem(dc);
            if !rem.is_zero() {
                return None;
            }
            let qe: Vec<u32> = re.iter().zip(de).map(|(a, b)| a - b).collect();
            r = r.sub(&d.mul_term(&qe, &qc));
            q.push((qe, qc));
        }
        Some(IPoly {
            nvars: self.nvars,
            terms: q,
        })
    }

    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    fn monomial_content(&self) -> Vec<u32> {
        let mut m = match self.terms.first() {
            Some((e, _)) => e.clone(),
            None => return vec![0; self.nvars],
        };
        for (e, _) in &self.terms[1..] {
            for (a, b) in m.iter_mut().zip(e) {
                *a = (*a).min(*b);
            }
        }
        m
    }

    fn shift_down(&self, m: &[u32]) -> IPoly {
        IPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(m).map(|(a, b)| a - b).collect(), c.clone()))
                .collect(),
        }
    }

    fn uses(&self, v: usize) -> bool {
        self.terms.iter().any(|(e, _)| e[v] > 0)
    }

    fn degree_in(&self, v: usize) -> u32 {
        self.terms.iter().map(|(e, _)| e[v]).max().unwrap_or(0)
    }

    /// Coefficients of `self` seen as a polynomial in `v`, indexed by power.
    fn coeffs_in(&self, v: usize) -> Vec<IPoly> {
        let deg = self.degree_in(v) as usize;
        let mut buckets: Vec<Vec<(Vec<u32>, BigInt)>> = vec![Vec::new(); deg + 1];
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = e2[v] as usize;
            e2[v] = 0;
            buckets[k].push((e2, c.clone()));
        }
        buckets
            .into_iter()
            .map(|t| IPoly::from_terms(self.nvars, t))
            .collect()
    }

    fn from_coeffs_in(nvars: usize, v: usize, coeffs: &[IPoly]) -> IPoly {
        let mut terms = Vec::new();
        for (k, c) in coeffs.iter().enumerate() {
            for (e, tc) in &c.terms {
                let mut e2 = e.clone();
                e2[v] = k as u32;
                terms.push((e2, tc.clone()));
            }
        }
        IPoly::from_terms(nvars, terms)
    }

    fn with_positive_lead(self) -> IPoly {
        if !self.is_zero() && self.lc().sign() == Sign::Minus {
            self.neg()
        } else {
            self
        }
    }
}

/// Greatest common divisor with positive leading coefficient.
pub fn gcd(a: &IPoly, b: &IPoly) -> IPoly {
    let n = a.nvars;
    if a.is_zero() {
        return b.clone().with_positive_lead();
    }
    if b.is_zero() {
        return a.clone().with_positive_lead();
    }
    let ca = a.content();
    let cb = b.content();
    let c = ca.gcd(&cb);
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let m: Vec<u32> = ma.iter().zip(&mb).map(|(x, y)| *x.min(y)).collect();
    let a1 = a.shift_down(&ma).div_int(&ca);
    let b1 = b.shift_down(&mb).div_int(&cb);
    let core = gcd_primitive(&a1, &b1);
    debug_assert_eq!(core.nvars, n);
    core.mul_term(&m, &c).with_positive_lead()
}

/// Gcd of content-free operands without monomial content.
fn gcd_primitive(a: &IPoly, b: &IPoly) -> IPoly {
    let n = a.nvars;
    if a.is_constant() || b.is_constant() {
        return IPoly::constant(n, BigInt::one());
    }
    if a == b || *a == b.neg() {
        return a.clone().with_positive_lead();
    }
    // A variable present on one side only: the gcd lives in its coefficients.
    for v in 0..n {
        let (ua, ub) = (a.uses(v), b.uses(v));
        if ua != ub {
            let (with_v, other) = if ua { (a, b) } else { (b, a) };
            let mut g = other.clone();
            let mut coeffs = with_v.coeffs_in(v);
            coeffs.sort_by_key(|c| c.terms.len());
            for co in coeffs.iter().filter(|c| !c.is_zero()) {
                g = gcd(&g, co);
                if g.is_constant() {
                    return IPoly::constant(n, BigInt::one());
                }
            }
            return g;
        }
    }
    let shared: Vec<usize> = (0..n).filter(|&v| a.uses(v)).collect();
    if coprime_by_images(a, b, &shared) {
        return IPoly::constant(n, BigInt::one());
    }
    let v = *shared
        .iter()
        .min_by_key(|&&v| a.degree_in(v).max(b.degree_in(v)))
        .unwrap();
    prs_gcd(a, b, v)
}

fn prs_gcd(a: &IPoly, b: &IPoly, v: usize) -> IPoly {
    let n = a.nvars;
    let (cont_a, pa) = split_content(a, v);
    let (cont_b, pb) = split_content(b, v);
    let c = gcd(&cont_a, &cont_b);
    let (mut r0, mut r1) = if pa.degree_in(v) >= pb.degree_in(v) {
        (pa, pb)
    } else {
        (pb, pa)
    };
    while !r1.is_zero() {
        if r1.degree_in(v) == 0 {
            return c;
        }
        let r = pseudo_rem(&r0, &r1, v);
        r0 = r1;
        r1 = if r.is_zero() { r } else { split_content(&r, v).1 };
    }
    let g = split_content(&r0, v).1;
    let g = if c.is_constant() { g } else { g.mul(&c) };
    if g.is_zero() {
        return IPoly::constant(n, BigInt::one());
    }
    g.with_positive_lead()
}

/// Content with respect to `v` (gcd of the coefficients) and primitive part.
fn split_content(p: &IPoly, v: usize) -> (IPoly, IPoly) {
    let mut coeffs: Vec<IPoly> = p.coeffs_in(v).into_iter().filter(|c| !c.is_zero()).collect();
    coeffs.sort_by_key(|c| c.terms.len());
    let mut g = coeffs[0].clone();
    for co in &coeffs[1..] {
        if g.is_constant() {
            break;
        }
        g = gcd(&g, co);
    }
    if g.is_constant() {
        let k = p.content();
        let g = IPoly::constant(p.nvars, k.clone());
        let pp = p.div_int(&k).with_positive_lead();
        return (g, pp);
    }
    let pp = p
        .div_exact(&g)
        .expect("content divides polynomial")
        .with_positive_lead();
    (g, pp)
}

fn pseudo_rem(a: &IPoly, b: &IPoly, v: usize) -> IPoly {
    let n = a.nvars;
    let db = b.degree_in(v);
    let bc = b.coeffs_in(v);
    let lb = &bc[db as usize];
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lr = &r.coeffs_in(v)[dr as usize];
        let mut shift = vec![0u32; n];
        shift[v] = dr - db;
        let t = IPoly::from_coeffs_in(n, v, std::slice::from_ref(lr)).mul(&b.mul_term(&shift, &BigInt::one()));
        r = r.mul(lb).sub(&t);
        let k = r.content();
        if !k.is_zero() && !k.is_one() {
            r = r.div_int(&k);
        }
    }
    r
}

const P: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn powmod(mut b: u64, mut e: u32) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b);
        }
        b = mulmod(b, b);
        e >>= 1;
    }
    r
}

fn invmod(a: u64) -> u64 {
    pow_big(a, P - 2)
}

fn pow_big(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b);
        }
        b = mulmod(b, b);
        e >>= 1;
    }
    r
}

fn reduce(c: &BigInt) -> u64 {
    let m = BigInt::from(P);
    let r = c.mod_floor(&m);
    r.to_u64().unwrap()
}

/// Univariate image in `v` after evaluating every other variable at `pt`.
fn image(p: &IPoly, v: usize, pt: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; p.degree_in(v) as usize + 1];
    for (e, c) in &p.terms {
        let mut val = reduce(c);
        for (i, &k) in e.iter().enumerate() {
            if i != v && k > 0 {
                val = mulmod(val, powmod(pt[i], k));
            }
        }
        let slot = &mut out[e[v] as usize];
        *slot = (*slot + val) % P;
    }
    out
}

fn trim(p: &mut Vec<u64>) {
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
}

fn uni_gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    trim(&mut a);
    trim(&mut b);
    while !(b.len() == 1 && b[0] == 0) {
        if b.len() == 1 {
            return 0;
        }
        // a mod b
        let inv = invmod(*b.last().unwrap());
        while a.len() >= b.len() && !(a.len() == 1 && a[0] == 0) {
            let shift = a.len() - b.len();
            let f = mulmod(*a.last().unwrap(), inv);
            for (i, &bc) in b.iter().enumerate() {
                let t = mulmod(f, bc);
                a[i + shift] = (a[i + shift] + P - t) % P;
            }
            a.pop();
            trim(&mut a);
            if a.is_empty() {
                a.push(0);
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len() - 1
}

/// Proves `gcd(a, b) = 1` when, for each shared variable, a modular image
/// with non-vanishing leading coefficients has a constant gcd. A `false` is
/// inconclusive.
fn coprime_by_images(a: &IPoly, b: &IPoly, shared: &[usize]) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e37_79b9_7f4a_7c15);
    for &v in shared {
        let mut ok = false;
        for _attempt in 0..2 {
            let pt: Vec<u64> = (0..a.nvars).map(|_| rng.gen_range(2..P)).collect();
            let ia = image(a, v, &pt);
            let ib = image(b, v, &pt);
            if *ia.last().unwrap() == 0 || *ib.last().unwrap() == 0 {
                continue;
            }
            if uni_gcd_degree(ia, ib) == 0 {
                ok = true;
                break;
            }
            break;
        }
        if !ok {
            return false;
        }
    }
    true
}
