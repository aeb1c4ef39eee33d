//! Round-trip-stable textual form: `parse(e.to_string()) == e`.

use std::fmt::{self, Write};

use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::expr::Expr;
use crate::poly::{Atom, Monomial, Poly};

fn write_monomial(out: &mut String, m: &Monomial) {
    let mut first = true;
    for (a, k) in m.factors() {
        if !first {
            out.push('*');
        }
        first = false;
        match a {
            Atom::Var(s) => out.push_str(s.as_str()),
            Atom::Apply(f, e) => {
                let _ = write!(out, "{}({})", f.name(), e);
            }
        }
        if *k != 1 {
            let _ = write!(out, "^{k}");
        }
    }
    if let Some(e) = m.exp_arg() {
        if !first {
            out.push('*');
        }
        let _ = write!(out, "exp({e})");
    }
}

fn write_rational(out: &mut String, c: &BigRational) {
    if c.is_integer() {
        let _ = write!(out, "{}", c.numer());
    } else {
        let _ = write!(out, "{}/{}", c.numer(), c.denom());
    }
}

/// Terms by descending degree, ties in ascending monomial order.
pub(crate) fn poly_to_string(p: &Poly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut terms: Vec<_> = p.terms().collect();
    terms.sort_by(|(a, _), (b, _)| b.degree().cmp(&a.degree()).then_with(|| a.cmp(b)));
    let mut out = String::new();
    for (i, (m, c)) in terms.into_iter().enumerate() {
        let mag = c.abs();
        if i == 0 {
            if c.is_negative() {
                out.push('-');
            }
        } else if c.is_negative() {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        if m.is_one() {
            write_rational(&mut out, &mag);
        } else {
            if !mag.is_one() {
                write_rational(&mut out, &mag);
                out.push('*');
            }
            write_monomial(&mut out, m);
        }
    }
    out
}

/// Whether a polynomial prints as a single factor that can follow `/`.
fn is_simple_factor(p: &Poly) -> bool {
    if p.len() != 1 {
        return false;
    }
    let (m, c) = p.terms().next().unwrap();
    if !c.is_one() {
        return m.is_one() && c.is_integer() && c.is_positive();
    }
    m.factors().len() + usize::from(m.exp_arg().is_some()) == 1
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = poly_to_string(self.num());
        if self.den().is_one() {
            return f.write_str(&num);
        }
        let den = poly_to_string(self.den());
        if self.num().len() > 1 {
            write!(f, "({num})")?;
        } else {
            f.write_str(&num)?;
        }
        if is_simple_factor(self.den()) {
            write!(f, "/{den}")
        } else {
            write!(f, "/({den})")
        }
    }
}
