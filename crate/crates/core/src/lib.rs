//! Geodesic geometry and point-transformation linearization tests for
//! second-order ODEs.
//!
//! A scalar equation cubic in `y'`, or a pair cubic in `(y', z')` with a
//! shared cubic part, is the projection of a geodesic system one dimension
//! up. It is linearizable by a point transformation exactly when some lift
//! of it is flat. The modules here compute connections and curvature
//! ([`geometry`]), move between the projected and lifted forms
//! ([`projection`]), evaluate the coefficient conditions ([`criteria`]) and
//! check candidate maps by substitution ([`transform`]).
//!
//! Coordinates are fixed: `(x, y)` in two dimensions and `(x, y, z)` in
//! three, with `x` the independent variable of projected systems.

pub mod criteria;
pub mod geometry;
pub mod projection;
mod report;
pub mod transform;

pub use report::{ConditionRecord, ConditionReport, Outcome};

use geolin_expr::{Expr, Symbol};

/// Errors from building or checking geometric objects.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unsupported dimension {0}; expected 2 or 3")]
    UnsupportedDimension(usize),
    #[error("expected {expected} components, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("metric entries ({0}, {1}) and ({1}, {0}) differ")]
    AsymmetricMetric(usize, usize),
    #[error("metric is degenerate: its determinant is identically zero")]
    DegenerateMetric,
    #[error("cannot decide whether the metric determinant vanishes: {0}")]
    UndecidedDeterminant(String),
    #[error("Jacobian determinant is identically zero")]
    DegenerateJacobian,
    #[error("cannot decide whether the Jacobian determinant vanishes: {0}")]
    UndecidedJacobian(String),
    #[error("coefficient {name} must not depend on {var}")]
    ForbiddenDependence { name: String, var: String },
    #[error("the new independent variable has zero total derivative; the map is not transverse")]
    NotTransverse,
    #[error("equation {0} is not linear in the second derivatives")]
    NotLinearInSecondDerivatives(usize),
    #[error("solved equation {0} is not polynomial in the first derivatives")]
    NotPolynomialInFirstDerivatives(usize),
    #[error("the equations cannot be solved for the second derivatives")]
    SingularSecondDerivatives,
    #[error("expression uses reserved symbol {0}")]
    ReservedSymbol(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Coordinate names for dimension `n`: `x`, `y`, `z`.
pub fn coordinates(n: usize) -> Vec<Symbol> {
    ["x", "y", "z"][..n].iter().map(|s| Symbol::new(s)).collect()
}

/// A polynomial of total degree `degree` in `vars` whose coefficients are
/// fresh symbols `{prefix}_{e1}_{e2}..`, one per exponent vector.
///
/// Values and partial derivatives up to order `degree` of such a
/// polynomial are independent at every point, so an identity in a function
/// and its derivatives up to that order holds for all smooth functions iff
/// it holds for this stand-in.
pub fn generic_function(prefix: &str, vars: &[Symbol], degree: u32) -> Expr {
    let mut out = Expr::zero();
    let mut exps = vec![0u32; vars.len()];
    loop {
        let total: u32 = exps.iter().sum();
        if total <= degree {
            let name: String = std::iter::once(prefix.to_string())
                .chain(exps.iter().map(|e| e.to_string()))
                .collect::<Vec<_>>()
                .join("_");
            let mut term = Expr::var(&name);
            for (v, &e) in vars.iter().zip(&exps) {
                term = term * Expr::symbol(v.clone()).pow(e as i64);
            }
            out = out + term;
        }
        let mut i = 0;
        loop {
            if i == exps.len() {
                return out;
            }
            exps[i] += 1;
            if exps[i] <= degree {
                break;
            }
            exps[i] = 0;
            i += 1;
        }
    }
}
