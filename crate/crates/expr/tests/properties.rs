//! Algebraic identities over randomly generated expressions.

use std::collections::BTreeMap;

use geolin_expr::{eval_numeric, parse, to_f64, BigInt, BigRational, Expr, Symbol};
use proptest::prelude::*;

#[derive(Clone, Debug)]
enum Ast {
    Var(&'static str),
    Int(i64),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, u8),
    Exp(Box<Ast>),
    Sin(Box<Ast>),
    Cos(Box<Ast>),
    /// `ln(1 + a^2)`, positive on every sample.
    LnPos(Box<Ast>),
    /// `sqrt(1 + a^2)`
    SqrtPos(Box<Ast>),
}

impl Ast {
    fn source(&self) -> String {
        match self {
            Ast::Var(v) => v.to_string(),
            Ast::Int(n) => format!("({n})"),
            Ast::Add(a, b) => format!("({} + {})", a.source(), b.source()),
            Ast::Sub(a, b) => format!("({} - {})", a.source(), b.source()),
            Ast::Mul(a, b) => format!("({} * {})", a.source(), b.source()),
            Ast::Div(a, b) => format!("({} / {})", a.source(), b.source()),
            Ast::Pow(a, k) => format!("({})^{k}", a.source()),
            Ast::Exp(a) => format!("exp({})", a.source()),
            Ast::Sin(a) => format!("sin({})", a.source()),
            Ast::Cos(a) => format!("cos({})", a.source()),
            Ast::LnPos(a) => format!("ln(1 + ({})^2)", a.source()),
            Ast::SqrtPos(a) => format!("sqrt(1 + ({})^2)", a.source()),
        }
    }

    /// Builds through the operator API; `None` on a zero divisor.
    fn build(&self) -> Option<Expr> {
        Some(match self {
            Ast::Var(v) => Expr::var(v),
            Ast::Int(n) => Expr::int(*n),
            Ast::Add(a, b) => a.build()? + b.build()?,
            Ast::Sub(a, b) => a.build()? - b.build()?,
            Ast::Mul(a, b) => a.build()? * b.build()?,
            Ast::Div(a, b) => a.build()?.checked_div(&b.build()?)?,
            Ast::Pow(a, k) => a.build()?.pow(*k as i64),
            Ast::Exp(a) => a.build()?.exp(),
            Ast::Sin(a) => a.build()?.sin(),
            Ast::Cos(a) => a.build()?.cos(),
            Ast::LnPos(a) => (Expr::one() + a.build()?.pow(2)).ln(),
            Ast::SqrtPos(a) => (Expr::one() + a.build()?.pow(2)).sqrt(),
        })
    }
}

fn leaf() -> impl Strategy<Value = Ast> {
    prop_oneof![
        Just(Ast::Var("x")),
        Just(Ast::Var("y")),
        Just(Ast::Var("z")),
        (-3i64..=3).prop_map(Ast::Int),
    ]
}

fn polynomial() -> impl Strategy<Value = Ast> {
    leaf().prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ast::Add(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ast::Sub(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ast::Mul(a.into(), b.into())),
            (inner, 0u8..3).prop_map(|(a, k)| Ast::Pow(a.into(), k)),
        ]
    })
}

fn expression() -> impl Strategy<Value = Ast> {
    leaf().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ast::Add(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ast::Sub(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ast::Mul(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ast::Div(a.into(), b.into())),
            (inner.clone(), 0u8..3).prop_map(|(a, k)| Ast::Pow(a.into(), k)),
            inner.clone().prop_map(|a| Ast::Exp(a.into())),
            inner.clone().prop_map(|a| Ast::Sin(a.into())),
            inner.clone().prop_map(|a| Ast::Cos(a.into())),
            inner.clone().prop_map(|a| Ast::LnPos(a.into())),
            inner.prop_map(|a| Ast::SqrtPos(a.into())),
        ]
    })
}

fn sample_point(seed: [i64; 3]) -> BTreeMap<Symbol, BigRational> {
    ["x", "y", "z"]
        .iter()
        .zip(seed)
        .map(|(s, k)| {
            (
                Symbol::new(s),
                BigRational::new(BigInt::from(512 + k), BigInt::from(1024)),
            )
        })
        .collect()
}

fn eval(e: &Expr, pt: &BTreeMap<Symbol, BigRational>) -> Option<f64> {
    eval_numeric(e, pt, 160).ok().map(|v| to_f64(&v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn product_commutes_and_obeys_leibniz(f in polynomial(), g in polynomial()) {
        let (f, g) = (f.build().unwrap(), g.build().unwrap());
        prop_assert!((&f * &g - &g * &f).is_zero());
        let x = Symbol::new("x");
        let lhs = (&f * &g).diff(&x);
        let rhs = &f.diff(&x) * &g + &f * &g.diff(&x);
        prop_assert!((lhs - rhs).is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn parser_agrees_with_operator_api(a in expression()) {
        if let Some(built) = a.build() {
            let parsed = parse(&a.source()).unwrap();
            prop_assert_eq!(parsed, built);
        }
    }

    #[test]
    fn print_then_parse_is_identity(a in expression()) {
        if let Some(e) = a.build() {
            let once = parse(&e.to_string()).unwrap();
            prop_assert_eq!(&once, &e);
            prop_assert_eq!(parse(&once.to_string()).unwrap(), once);
        }
    }

    #[test]
    fn canonicalization_is_idempotent(a in expression()) {
        if let Some(e) = a.build() {
            let again = Expr::from_polys(e.num().clone(), e.den().clone());
            prop_assert_eq!(again, e);
        }
    }

    #[test]
    fn canonical_form_preserves_value(a in expression(), s in prop::array::uniform3(0i64..1024)) {
        if let Some(e) = a.build() {
            let pt = sample_point(s);
            let mut env = BTreeMap::new();
            for (k, v) in &pt {
                env.insert(k.as_str().to_string(), v.clone());
            }
            if let (Some(v), Some(w)) = (eval(&e, &pt), direct(&a, &env)) {
                prop_assert!((v - w).abs() <= 1e-9 * (1.0 + w.abs()), "{v} vs {w}");
            }
        }
    }

    #[test]
    fn derivative_matches_central_differences(a in expression(), s in prop::array::uniform3(0i64..1024)) {
        let Some(e) = a.build() else { return Ok(()); };
        let x = Symbol::new("x");
        let d = e.diff(&x);
        for shift in 0..5i64 {
            let pt = sample_point([(s[0] + 97 * shift) % 1024, s[1], s[2]]);
            let h = BigRational::new(BigInt::from(1), BigInt::from(100_000_000));
            let xv = pt[&x].clone();
            let mut plus = pt.clone();
            let mut minus = pt.clone();
            plus.insert(x.clone(), &xv + &h);
            minus.insert(x.clone(), &xv - &h);
            let (Some(fp), Some(fm), Some(exact)) = (eval(&e, &plus), eval(&e, &minus), eval(&d, &pt)) else {
                continue;
            };
            let fd = (fp - fm) / 2e-8;
            let scale = exact.abs().max(fp.abs()).max(1.0);
            prop_assert!((fd - exact).abs() <= 1e-6 * scale, "{fd} vs {exact} for {e}");
        }
    }
}

/// Straight f64 evaluation of the generating tree, independent of the kernel.
fn direct(a: &Ast, env: &BTreeMap<String, BigRational>) -> Option<f64> {
    use num_traits::ToPrimitive;
    let r = match a {
        Ast::Var(v) => env[*v].to_f64()?,
        Ast::Int(n) => *n as f64,
        Ast::Add(p, q) => direct(p, env)? + direct(q, env)?,
        Ast::Sub(p, q) => direct(p, env)? - direct(q, env)?,
        Ast::Mul(p, q) => direct(p, env)? * direct(q, env)?,
        Ast::Div(p, q) => {
            let d = direct(q, env)?;
            if d.abs() < 1e-6 {
                return None;
            }
            direct(p, env)? / d
        }
        Ast::Pow(p, k) => direct(p, env)?.powi(*k as i32),
        Ast::Exp(p) => direct(p, env)?.exp(),
        Ast::Sin(p) => direct(p, env)?.sin(),
        Ast::Cos(p) => direct(p, env)?.cos(),
        Ast::LnPos(p) => (1.0 + direct(p, env)?.powi(2)).ln(),
        Ast::SqrtPos(p) => (1.0 + direct(p, env)?.powi(2)).sqrt(),
    };
    (r.is_finite() && r.abs() < 1e12).then_some(r)
}
