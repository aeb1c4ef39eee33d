//! Sound zero test: exact on canonical zero, numeric witnesses otherwise.

use std::collections::BTreeMap;
use std::fmt;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eval::{to_f64, Evaluator};
use crate::expr::{Expr, RuleSet};
use crate::poly::Symbol;

/// Resampling attempts per sample point before giving up on it.
const MAX_RESAMPLE: usize = 32;
/// Sample coordinates are `1/2 + k / 2^GRID_BITS`.
const GRID_BITS: u32 = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct ZeroTestConfig {
    pub points: usize,
    pub precision_bits: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub rules: RuleSet,
}

impl Default for ZeroTestConfig {
    fn default() -> Self {
        ZeroTestConfig {
            points: 16,
            precision_bits: 256,
            tolerance: 1e-30,
            seed: 0,
            rules: RuleSet::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub point: Vec<(Symbol, BigRational)>,
    pub value: f64,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "value {:e} at {{", self.value)?;
        for (i, (s, v)) in self.point.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}={v}")?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Zero,
    NonZero(Witness),
    Undecided(String),
}

impl Verdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, Verdict::Zero)
    }

    pub fn is_nonzero(&self) -> bool {
        matches!(self, Verdict::NonZero(_))
    }

    pub fn is_undecided(&self) -> bool {
        matches!(self, Verdict::Undecided(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Zero => "ZERO",
            Verdict::NonZero(_) => "NONZERO",
            Verdict::Undecided(_) => "UNDECIDED",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Zero => f.write_str("ZERO"),
            Verdict::NonZero(w) => write!(f, "NONZERO ({w})"),
            Verdict::Undecided(why) => write!(f, "UNDECIDED ({why})"),
        }
    }
}

fn exceeds(value: &BigFloat, scale: &BigFloat, tol: &BigFloat, p: usize) -> bool {
    let bound = scale.mul(tol, p, astro_float::RoundingMode::ToEven);
    value
        .abs()
        .cmp(&bound)
        .is_some_and(|o| o > 0)
}

/// Deterministic sample points for the symbols of an expression.
pub struct SamplePoints {
    rng: ChaCha8Rng,
    symbols: Vec<Symbol>,
}

impl SamplePoints {
    pub fn new<'a>(symbols: impl IntoIterator<Item = &'a Symbol>, seed: u64) -> Self {
        SamplePoints {
            rng: ChaCha8Rng::seed_from_u64(seed),
            symbols: symbols.into_iter().cloned().collect(),
        }
    }

    pub fn next_point(&mut self) -> BTreeMap<Symbol, BigRational> {
        let denom = BigInt::from(1u64 << (GRID_BITS + 1));
        self.symbols
            .iter()
            .map(|s| {
                let k: u64 = self.rng.gen_range(0..=(1u64 << GRID_BITS) * 2);
                let num = BigInt::from((1u64 << GRID_BITS) + k);
                (s.clone(), BigRational::new(num, denom.clone()))
            })
            .collect()
    }
}

/// Decides whether `e` vanishes identically.
pub fn is_zero(e: &Expr, cfg: &ZeroTestConfig) -> Verdict {
    let e = e.apply_rules(&cfg.rules);
    if e.is_zero() {
        return Verdict::Zero;
    }
    let p = cfg.precision_bits.max(32);
    let tol = BigFloat::from_f64(cfg.tolerance, p);
    let mut sampler = SamplePoints::new(e.symbols(), cfg.seed);
    let mut evaluated = 0usize;
    let mut last_error = String::new();
    for _ in 0..cfg.points.max(1) {
        for _ in 0..MAX_RESAMPLE {
            let point = sampler.next_point();
            let mut ev = Evaluator::new(&point, p);
            let parts = match ev.parts(&e) {
                Ok(parts) => parts,
                Err(err) => {
                    last_error = err.to_string();
                    continue;
                }
            };
            if !exceeds(&parts.den, &parts.den_scale, &tol, p) {
                last_error = "denominator vanishes".to_string();
                continue;
            }
            evaluated += 1;
            if exceeds(&parts.num, &parts.num_scale, &tol, p) {
                let value = parts.num.div(&parts.den, p, astro_float::RoundingMode::ToEven);
                return Verdict::NonZero(Witness {
                    point: point.into_iter().collect(),
                    value: to_f64(&value),
                });
            }
            break;
        }
    }
    if evaluated == 0 {
        return Verdict::Undecided(format!("evaluation failed at every sample point: {last_error}"));
    }
    Verdict::Undecided(format!(
        "not canonically zero but numerically zero at {evaluated} points"
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    #[test]
    fn exact_and_numeric_outcomes() {
        let cfg = ZeroTestConfig::default();
        assert_eq!(is_zero(&parse("exp(x)*exp(-x) - 1").unwrap(), &cfg), Verdict::Zero);
        match is_zero(&Expr::int(6), &cfg) {
            Verdict::NonZero(w) => assert_eq!(w.value, 6.0),
            v => panic!("{v}"),
        }
        let pyth = parse("sin(x)^2 + cos(x)^2 - 1").unwrap();
        assert_eq!(is_zero(&pyth, &cfg), Verdict::Zero);
        let off = ZeroTestConfig {
            rules: RuleSet::none(),
            ..cfg.clone()
        };
        assert!(is_zero(&pyth, &off).is_undecided());
    }

    #[test]
    fn always_singular_is_undecided() {
        let e = parse("ln(-1 - x^2)").unwrap();
        let v = is_zero(&e, &ZeroTestConfig::default());
        assert!(v.is_undecided(), "{v}");
    }

    #[test]
    fn sample_points_lie_in_unit_band() {
        let s = Symbol::new("x");
        let mut sp = SamplePoints::new([&s], 7);
        let lo = BigRational::new(1.into(), 2.into());
        let hi = BigRational::new(3.into(), 2.into());
        for _ in 0..100 {
            let v = &sp.next_point()[&s];
            assert!(*v >= lo && *v <= hi);
        }
    }
}
