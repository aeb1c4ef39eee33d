//! The eleven acceptance criteria, one PASS/FAIL line each.
//!
//! Run with `cargo test -p geolin-cli --test acceptance`. The process exits
//! non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use geolin_cli::{run_text, Command, Format, Options, Report, SystemDocument, INPUT_ERROR};
use geolin_core::criteria::{check_cubic2, remark_mapping};
use geolin_core::geometry::{
    christoffel_count, first_bianchi_residuals, is_flat, metric_pde_residuals, riemann,
    Christoffel, Geodesic2Coefficients, Metric,
};
use geolin_core::projection::{
    lift_scalar, lift_system, project_scalar, project_system, ScalarCubic, ScalarGauge,
    SystemCubic2, SystemGauge,
};
use geolin_core::transform::{
    coefficients_from_transformation, general_count, jacobian_invertibility, normal_form,
    pullback_metric, verify_linearizing_transformation, ExplicitSystem, NormalFormCoefficients,
    Transformation,
};
use geolin_core::{coordinates, generic_function};
use geolin_expr::{eval_numeric, ex, parse, to_f64, BigRational, Expr, SamplePoints, Symbol, ZeroTestConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TRESSE_LIMIT: Duration = Duration::from_secs(1);
const CUBIC_LIMIT: Duration = Duration::from_secs(10);
const TRANSFORM_LIMIT: Duration = Duration::from_secs(5);
const ROUND_TRIP_LIMIT: Duration = Duration::from_secs(30);
const ROUND_TRIPS: usize = 100;
const CURVATURE_SAMPLES: usize = 50;
const CLOSURE_SAMPLES: usize = 50;
const SEED: u64 = 20240617;
/// Precision for re-evaluating reported witnesses and zeros.
const RECHECK_BITS: usize = 512;
/// A witness is confirmed if its re-evaluated magnitude exceeds this.
const WITNESS_FLOOR: f64 = 1e-20;
/// A ZERO verdict is confirmed if fresh samples stay below this.
const ZERO_CEILING: f64 = 1e-40;

fn cfg() -> ZeroTestConfig {
    ZeroTestConfig {
        points: 16,
        precision_bits: 256,
        tolerance: 1e-30,
        seed: 0,
        ..ZeroTestConfig::default()
    }
}

fn corpus_path() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus(name: &str) -> String {
    std::fs::read_to_string(corpus_path().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn document(name: &str) -> SystemDocument {
    SystemDocument::parse(&corpus(name)).unwrap()
}

fn options(gauge: &[&str]) -> Options {
    Options {
        zero_test: cfg(),
        gauge: gauge.iter().map(|s| s.to_string()).collect(),
        timing: false,
    }
}

/// Runs a command on a corpus document through the front end.
fn cli(command: Command, name: &str, gauge: &[&str]) -> (Report, Duration) {
    let doc = document(name);
    let start = Instant::now();
    let report = geolin_cli::run(command, &doc, &options(gauge)).unwrap();
    (report, start.elapsed())
}

/// Sub-checks of one criterion; `detail` is shown when a check fails.
struct Criterion {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Criterion {
    fn new() -> Self {
        Criterion {
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }
}

fn exact_zeros(r: &Report) -> bool {
    !r.records.is_empty() && r.records.iter().all(|x| x.verdict == "ZERO" && x.residual == "0")
}

fn residual(r: &Report, id: &str) -> Option<Expr> {
    r.record(id).map(|x| parse(&x.residual).unwrap())
}

fn tresse_suite() -> Criterion {
    let mut c = Criterion::new();
    for name in ["lie-ex1", "lie-ex2"] {
        let (r, t) = cli(Command::Check, name, &[]);
        c.check(r.verdict == "PASS" && exact_zeros(&r), format!("{name} not exactly zero"));
        c.check(t < TRESSE_LIMIT, format!("{name} took {t:?}"));
    }
    let (r, t) = cli(Command::Check, "lie-counter", &[]);
    c.check(r.verdict == "FAIL", "y''=y^2 passed");
    c.check(residual(&r, "tresse.2") == Some(ex("6")), "second residual of y''=y^2 is not 6");
    c.check(t < TRESSE_LIMIT, format!("y''=y^2 took {t:?}"));
    c
}

fn gauge_suite() -> Criterion {
    let mut c = Criterion::new();
    for name in ["lie-ex1", "lie-ex2"] {
        let (r, _) = cli(Command::Appendix, name, &[]);
        c.check(r.verdict == "PASS" && exact_zeros(&r), format!("{name} gauge does not give a flat lift"));
    }
    let (r, _) = cli(Command::Appendix, "lie-ex1", &["b=0", "e=0"]);
    let nonzero: Vec<_> = r.records.iter().filter(|x| x.verdict == "NONZERO").collect();
    c.check(r.verdict == "FAIL", "zero gauge on example 1 passed");
    c.check(
        nonzero.len() == 1 && nonzero[0].residual == "-1",
        "zero gauge control does not fail with a single residual -1",
    );
    c
}

fn cubic_suite() -> Criterion {
    let mut c = Criterion::new();
    let (r, t) = cli(Command::Check, "sys-ex4", &[]);
    c.check(r.records.len() == 15 && exact_zeros(&r), "cubically semi-linear pair not exactly zero");
    c.check(t < CUBIC_LIMIT, format!("cubically semi-linear pair took {t:?}"));
    let (r, _) = cli(Command::Check, "sys-ex3", &[]);
    c.check(r.verdict == "PASS", "quadratic pair failed");
    let (r, _) = cli(Command::Check, "sys-ex2", &[]);
    c.check(r.verdict == "FAIL", "coupled oscillator passed");
    c.check(
        r.record("cubic.4").is_some_and(|x| x.verdict == "NONZERO"),
        "condition with the D2 derivative is not nonzero",
    );
    c
}

fn corollary_suite() -> Criterion {
    let mut c = Criterion::new();
    let (aniso, _) = cli(Command::Check, "sys-ex1", &[]);
    let (iso, _) = cli(Command::Check, "sys-ex1-isotropic", &[]);
    c.check(aniso.verdict == "FAIL" && iso.verdict == "PASS", "isotropy is not the dividing line");
    let got = residual(&aniso, "linear.3");
    c.check(
        got == Some(ex("w2 - w1")),
        format!(
            "linear-pair residual is {} rather than w2 - w1",
            got.map(|e| e.to_string()).unwrap_or_default()
        ),
    );
    let names = Geodesic2Coefficients::NAMES;
    let k = Geodesic2Coefficients::from_array(
        names.map(|n| generic_function(n, &coordinates(2)[..], 1)),
    );
    let cmp = remark_mapping(&k, &cfg());
    c.check(cmp.literal.passed(), "renamed quadratic-pair residuals are not term-identical to the flatness residuals");
    if cmp.combination.passed() {
        c.note("they agree as linear combinations");
    }
    c
}

fn transformation_suite() -> Criterion {
    let mut c = Criterion::new();
    for name in ["sys-ex3", "sys-ex4", "sys-ex5", "lie-ex1", "lie-ex2"] {
        let (r, t) = cli(Command::VerifyTransform, name, &[]);
        c.check(r.verdict == "PASS", format!("{name} map gives {}", r.verdict));
        c.check(t < TRANSFORM_LIMIT, format!("{name} took {t:?}"));
    }
    let (r, t) = cli(Command::VerifyTransform, "sys-ex5-corrected", &[]);
    if r.verdict == "PASS" && t < TRANSFORM_LIMIT {
        c.note("the implicit pair with its second equation regenerated from the map verifies");
    }
    let (r, t) = cli(Command::VerifyTransform, "sys-ex2", &[]);
    c.check(r.verdict == "FAIL", "identity map linearizes the coupled oscillator");
    c.check(t < TRANSFORM_LIMIT, format!("identity map took {t:?}"));
    c
}

fn metric_suite() -> Criterion {
    let mut c = Criterion::new();
    let cfg = cfg();
    let ex2 = document("lie-ex2");
    let k2 = lift_scalar(&ex2.scalar_cubic().unwrap(), &ex2.scalar_gauge(&BTreeMap::new()));
    let g2 = ex2.metric.clone().unwrap();
    let check = metric_pde_residuals(&k2, &g2, &cfg).unwrap();
    c.check(
        check.report.records.iter().all(|r| r.residual.is_zero()) && check.report.len() == 6,
        "example-2 metric residuals not exactly zero",
    );
    let pulled = pullback_metric(ex2.transformation.as_ref().unwrap(), &Metric::identity(2)).unwrap();
    c.check(pulled == g2, "pullback of the example-2 map differs from its metric");

    let ex1 = document("lie-ex1");
    let k1 = lift_scalar(&ex1.scalar_cubic().unwrap(), &ex1.scalar_gauge(&BTreeMap::new()));
    let g1 = ex1.metric.clone().unwrap();
    let check = metric_pde_residuals(&k1, &g1, &cfg).unwrap();
    c.check(check.report.passed(), "example-1 printed metric fails compatibility");
    c.check(check.is_degenerate() && check.determinant.is_zero(), "example-1 printed metric not degenerate");
    let pulled = pullback_metric(ex1.transformation.as_ref().unwrap(), &Metric::identity(2)).unwrap();
    let check = metric_pde_residuals(&k1, &pulled, &cfg).unwrap();
    c.check(check.report.passed(), "pullback of the example-1 map fails compatibility");
    c.check(pulled != g1, "pullback of the example-1 map equals the printed metric");
    c
}

fn random_poly(rng: &mut ChaCha8Rng, n: usize) -> Expr {
    let vars: Vec<Expr> = coordinates(n).into_iter().map(Expr::symbol).collect();
    let mut basis = vec![Expr::one()];
    basis.extend(vars.iter().cloned());
    for i in 0..n {
        for j in i..n {
            basis.push(&vars[i] * &vars[j]);
        }
    }
    basis.iter().map(|m| Expr::int(rng.gen_range(-3..=3)) * m).sum()
}

fn round_trip_property() -> Criterion {
    let mut c = Criterion::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let start = Instant::now();
    let mut bad = 0;
    for _ in 0..ROUND_TRIPS {
        let e: [Expr; 4] = std::array::from_fn(|_| random_poly(&mut rng, 2));
        let [e0, e1, e2, e3] = e;
        let eq = ScalarCubic::new(e0, e1, e2, e3);
        let gauge = ScalarGauge {
            b: random_poly(&mut rng, 2),
            e: random_poly(&mut rng, 2),
        };
        bad += usize::from(project_scalar(&lift_scalar(&eq, &gauge).to_christoffel()) != eq);
    }
    for _ in 0..ROUND_TRIPS {
        let s = SystemCubic2::from_array(std::array::from_fn(|_| random_poly(&mut rng, 3)));
        let gauge = SystemGauge {
            gamma1_12: random_poly(&mut rng, 3),
            gamma2_12: random_poly(&mut rng, 3),
            gamma3_33: random_poly(&mut rng, 3),
        };
        bad += usize::from(project_system(&lift_system(&s, &gauge)) != s);
    }
    let t = start.elapsed();
    c.check(bad == 0, format!("{bad} round trips changed the coefficients"));
    c.check(t < ROUND_TRIP_LIMIT, format!("round trips took {t:?}"));
    c
}

fn curvature_property() -> Criterion {
    let mut c = Criterion::new();
    let cfg = cfg();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut bad = 0;
    for _ in 0..CURVATURE_SAMPLES {
        let gamma = Christoffel::from_fn(3, |_, _, _| random_poly(&mut rng, 3)).unwrap();
        bad += usize::from(!first_bianchi_residuals(&riemann(&gamma)).iter().all(Expr::is_zero));
    }
    c.check(bad == 0, format!("{bad} connections violate the first Bianchi identity"));
    let ex2 = document("lie-ex2-geodesic").geodesic2().unwrap();
    let r = riemann(&ex2.to_christoffel());
    c.check(r.independent().iter().all(|(_, e)| e.is_zero()), "example-2 lift has curvature");
    let sphere = document("sphere").geodesic2().unwrap();
    c.check(is_flat(&sphere.to_christoffel(), &cfg).is_nonzero(), "sphere connection not witnessed curved");
    c
}

fn random_map(rng: &mut ChaCha8Rng) -> Transformation {
    let x: Vec<Expr> = coordinates(3).into_iter().map(Expr::symbol).collect();
    let quadratic: Vec<Expr> = (0..3)
        .flat_map(|i| (i..3).map(move |j| (i, j)))
        .map(|(i, j)| &x[i] * &x[j])
        .collect();
    let comps = x
        .iter()
        .map(|xi| {
            let mut e = xi.clone();
            for _ in 0..2 {
                let m = &quadratic[rng.gen_range(0..quadratic.len())];
                e = e + Expr::int(rng.gen_range(-2..=2)) * m;
            }
            e
        })
        .collect();
    Transformation::new(comps).unwrap()
}

fn closure_property() -> Criterion {
    let mut c = Criterion::new();
    let cfg = cfg();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let (mut verified, mut consistent, mut cubic_pass) = (0, 0, 0);
    let mut drawn = 0;
    while drawn < CLOSURE_SAMPLES {
        let t = random_map(&mut rng);
        if !jacobian_invertibility(&t, &cfg).is_nonzero() {
            continue;
        }
        drawn += 1;
        let gs = coefficients_from_transformation(&t, &cfg).unwrap();
        let sys = ExplicitSystem::from_general(&gs, &cfg).unwrap();
        verified += usize::from(verify_linearizing_transformation(&sys, &t, &cfg).is_ok_and(|r| r.passed()));
        let nf = normal_form(&gs, &cfg).unwrap();
        if nf.report.passed() {
            consistent += 1;
            if let NormalFormCoefficients::System(s) = &nf.coefficients {
                cubic_pass += usize::from(check_cubic2(s, &cfg).passed());
            }
        }
    }
    c.check(verified == drawn, format!("{verified}/{drawn} maps verified against their own systems"));
    c.check(cubic_pass == consistent, format!("{cubic_pass}/{consistent} consistent normal forms pass the cubic conditions"));
    c.note(format!("{consistent}/{drawn} normal forms consistent"));
    c
}

fn count_assertions() -> Criterion {
    let mut c = Criterion::new();
    c.check(christoffel_count(2) == 6, "n=2 Christoffel count");
    c.check(christoffel_count(3) == 18, "n=3 Christoffel count");
    c.check(SystemCubic2::NAMES.len() == 15, "shared-cubic coefficient count");
    c.check(general_count(3) == 26, "general form count at n=3");
    c.check(general_count(2) == 5, "general form count at n=2");
    let gs = coefficients_from_transformation(&Transformation::identity(3).unwrap(), &cfg()).unwrap();
    c.check(gs.independent_count() == 26, "stored general form entries");
    c
}

fn recheck(e: &Expr, point: &BTreeMap<Symbol, BigRational>) -> Option<f64> {
    eval_numeric(e, point, RECHECK_BITS).ok().map(|v| to_f64(&v))
}

fn soundness_guard() -> Criterion {
    let mut c = Criterion::new();
    let mut names: Vec<String> = std::fs::read_dir(corpus_path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    let opts = options(&[]);
    let (mut records, mut witnesses, mut zeros) = (0, 0, 0);
    for name in &names {
        let text = corpus(name);
        for command in Command::ALL {
            let (code, first) = run_text(command, &text, &opts, Format::Json);
            if code == INPUT_ERROR {
                continue;
            }
            let (_, second) = run_text(command, &text, &opts, Format::Json);
            c.check(first == second, format!("{name} {} is not deterministic", command.name()));
            let report = geolin_cli::run(command, &SystemDocument::parse(&text).unwrap(), &opts).unwrap();
            for r in &report.records {
                records += 1;
                let e = parse(&r.residual).unwrap();
                if e.is_zero() {
                    c.check(r.verdict == "ZERO", format!("{name} {}: canonical zero judged {}", r.id, r.verdict));
                }
                if let Some(w) = &r.witness {
                    let point: BTreeMap<Symbol, BigRational> = w
                        .point
                        .iter()
                        .map(|(s, v)| (Symbol::new(s), v.parse().unwrap()))
                        .collect();
                    let v = recheck(&e, &point);
                    witnesses += 1;
                    c.check(
                        v.is_some_and(|v| v.abs() > WITNESS_FLOOR),
                        format!("{name} {}: witness not confirmed", r.id),
                    );
                }
                if r.verdict == "ZERO" && !e.is_zero() {
                    zeros += 1;
                    let mut points = SamplePoints::new(e.symbols(), SEED);
                    for _ in 0..8 {
                        if let Some(v) = recheck(&e, &points.next_point()) {
                            c.check(v.abs() < ZERO_CEILING, format!("{name} {}: ZERO but sample {v:e}", r.id));
                        }
                    }
                }
            }
        }
    }
    c.note(format!("{records} records, {witnesses} witnesses, {zeros} non-canonical zeros rechecked"));
    c
}

fn main() {
    type Suite = (&'static str, fn() -> Criterion);
    let suites: [Suite; 11] = [
        ("Tresse suite", tresse_suite),
        ("gauge witness suite", gauge_suite),
        ("shared-cubic pair suite", cubic_suite),
        ("linear and quadratic pair suites", corollary_suite),
        ("transformation suite", transformation_suite),
        ("metric suite", metric_suite),
        ("round-trip property", round_trip_property),
        ("curvature properties", curvature_property),
        ("closure property", closure_property),
        ("count assertions", count_assertions),
        ("soundness guard", soundness_guard),
    ];
    let mut failed = 0;
    for (i, (title, suite)) in suites.iter().enumerate() {
        let start = Instant::now();
        let c = suite();
        let t = start.elapsed().as_secs_f64();
        let status = if c.failures.is_empty() { "PASS" } else { "FAIL" };
        let mut line = format!("criterion {:2} {title}: {status} ({t:.2} s)", i + 1);
        if !c.failures.is_empty() {
            failed += 1;
            line.push_str(&format!("; {}", c.failures.join("; ")));
        }
        if !c.notes.is_empty() {
            line.push_str(&format!(" [{}]", c.notes.join("; ")));
        }
        println!("{line}");
    }
    println!("acceptance: {} of {} criteria pass", suites.len() - failed, suites.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
