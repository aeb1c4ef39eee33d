//! Multi-precision numeric evaluation.

use std::collections::{BTreeMap, HashMap};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use thiserror::Error;

use crate::expr::Expr;
use crate::poly::{Atom, Func, Poly, Symbol};

const RM: RoundingMode = RoundingMode::ToEven;
/// Extra working bits carried above the requested precision.
const GUARD_BITS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no value bound for `{0}`")]
    Unbound(Symbol),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} of a non-positive value")]
    Domain(&'static str),
}

/// Numerator and denominator values with the largest term magnitude of each.
pub(crate) struct Parts {
    pub num: BigFloat,
    pub num_scale: BigFloat,
    pub den: BigFloat,
    pub den_scale: BigFloat,
}

pub(crate) struct Evaluator<'a> {
    point: &'a BTreeMap<Symbol, BigRational>,
    p: usize,
    cc: Consts,
    cache: HashMap<usize, BigFloat>,
}

pub(crate) fn from_bigint(n: &BigInt, p: usize) -> BigFloat {
    let (sign, digits) = n.to_u64_digits();
    let base = BigFloat::from_u64(u64::MAX, p).add(&BigFloat::from_u64(1, p), p, RM);
    let mut acc = BigFloat::from_u64(0, p);
    for d in digits.iter().rev() {
        acc = acc.mul(&base, p, RM).add(&BigFloat::from_u64(*d, p), p, RM);
    }
    if sign == Sign::Minus {
        acc = acc.neg();
    }
    acc
}

pub(crate) fn from_rational(c: &BigRational, p: usize) -> BigFloat {
    let n = from_bigint(c.numer(), p);
    if c.is_integer() {
        return n;
    }
    n.div(&from_bigint(c.denom(), p), p, RM)
}

/// Nearest `f64`, saturating to infinities outside its range.
pub fn to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let mut cc = Consts::new().expect("constants cache");
    let mut y = x.clone();
    let _ = y.set_precision(64, RM);
    y.format(Radix::Dec, RM, &mut cc)
        .ok()
        .and_then(|s| s.parse::<f64>().ok())
        .unwrap_or(f64::NAN)
}

impl<'a> Evaluator<'a> {
    pub fn new(point: &'a BTreeMap<Symbol, BigRational>, precision: usize) -> Self {
        Evaluator {
            point,
            p: precision + GUARD_BITS,
            cc: Consts::new().expect("constants cache"),
            cache: HashMap::new(),
        }
    }

    pub fn value(&mut self, e: &Expr) -> Result<BigFloat, EvalError> {
        if let Some(v) = self.cache.get(&e.id()) {
            return Ok(v.clone());
        }
        let parts = self.parts(e)?;
        if parts.den.is_zero() {
            return Err(EvalError::DivisionByZero);
        }
        let v = parts.num.div(&parts.den, self.p, RM);
        self.cache.insert(e.id(), v.clone());
        Ok(v)
    }

    pub fn parts(&mut self, e: &Expr) -> Result<Parts, EvalError> {
        let (num, num_scale) = self.poly(e.num())?;
        let (den, den_scale) = if e.den().is_one() {
            (BigFloat::from_u64(1, self.p), BigFloat::from_u64(1, self.p))
        } else {
            self.poly(e.den())?
        };
        Ok(Parts {
            num,
            num_scale,
            den,
            den_scale,
        })
    }

    fn atom(&mut self, a: &Atom) -> Result<BigFloat, EvalError> {
        let p = self.p;
        match a {
            Atom::Var(s) => self
                .point
                .get(s)
                .map(|c| from_rational(c, p))
                .ok_or_else(|| EvalError::Unbound(s.clone())),
            Atom::Apply(f, e) => {
                let x = self.value(e)?;
                let cc = &mut self.cc;
                Ok(match f {
                    Func::Ln => {
                        if !x.is_positive() || x.is_zero() {
                            return Err(EvalError::Domain("ln"));
                        }
                        x.ln(p, RM, cc)
                    }
                    Func::Sqrt => {
                        if x.is_negative() {
                            return Err(EvalError::Domain("sqrt"));
                        }
                        if x.is_zero() {
                            return Ok(x);
                        }
                        x.sqrt(p, RM)
                    }
                    Func::Sin => x.sin(p, RM, cc),
                    Func::Cos => x.cos(p, RM, cc),
                })
            }
        }
    }

    fn poly(&mut self, poly: &Poly) -> Result<(BigFloat, BigFloat), EvalError> {
        let p = self.p;
        let mut atoms: HashMap<&Atom, BigFloat> = HashMap::new();
        let mut sum = BigFloat::from_u64(0, p);
        let mut scale = BigFloat::from_u64(0, p);
        for (m, c) in poly.terms() {
            let mut t = from_rational(c, p);
            for (a, k) in m.factors() {
                let v = match atoms.get(a) {
                    Some(v) => v.clone(),
                    None => {
                        let v = self.atom(a)?;
                        atoms.insert(a, v.clone());
                        v
                    }
                };
                t = t.mul(&v.powi(*k as usize, p, RM), p, RM);
            }
            if let Some(e) = m.exp_arg() {
                let x = self.value(e)?;
                t = t.mul(&x.exp(p, RM, &mut self.cc), p, RM);
            }
            let mag = t.abs();
            if mag.cmp(&scale).is_some_and(|o| o > 0) {
                scale = mag;
            }
            sum = sum.add(&t, p, RM);
        }
        Ok((sum, scale))
    }
}

/// Evaluates `e` at `point` with `precision` bits.
pub fn eval_numeric(
    e: &Expr,
    point: &BTreeMap<Symbol, BigRational>,
    precision: usize,
) -> Result<BigFloat, EvalError> {
    let mut ev = Evaluator::new(point, precision);
    let mut v = ev.value(e)?;
    let _ = v.set_precision(precision.max(1), RM);
    Ok(v)
}
