//! Exact symbolic expressions.
//!
//! Expressions are kept in a canonical rational normal form whose generators
//! are variables and the kernels `ln`, `sin`, `cos`, `sqrt`; exponentials are
//! folded into monomials. Polynomial and rational identities therefore decide
//! to an exact zero, and [`is_zero`] falls back to multi-precision sampling
//! only when the canonical form is not literally zero.

mod eval;
mod expr;
mod gcd;
mod parse;
mod poly;
mod print;
mod zero;

pub use eval::{eval_numeric, to_f64, EvalError};
pub use expr::{Expr, RuleSet};
pub use parse::{parse, ParseError};
pub use poly::{Atom, Func, Monomial, Poly, Symbol};
pub use zero::{is_zero, SamplePoints, Verdict, Witness, ZeroTestConfig};

pub use astro_float::BigFloat;
pub use num_bigint::BigInt;
pub use num_rational::BigRational;

/// Parses, panicking on malformed input. Meant for literals in code and tests.
pub fn ex(src: &str) -> Expr {
    parse(src).unwrap_or_else(|e| panic!("bad expression literal {src:?}: {e}"))
}
