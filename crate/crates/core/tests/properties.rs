use geolin_core::criteria::{check_cubic2, tresse_scalar};
use geolin_core::geometry::{
    christoffel_from_metric, first_bianchi_residuals, flat_residuals, geodesic2_flat_conditions,
    is_flat, riemann, Christoffel, Geodesic2Coefficients, Metric,
};
use geolin_core::projection::{
    lift_scalar, lift_system, project_scalar, project_system, ScalarCubic, ScalarGauge,
    SystemCubic2, SystemGauge,
};
use geolin_core::transform::{
    coefficients_from_transformation, normal_form, verify_linearizing_transformation,
    ExplicitSystem, NormalFormCoefficients, Transformation,
};
use geolin_core::coordinates;
use geolin_expr::{Expr, ZeroTestConfig};
use proptest::prelude::*;

/// Monomials of total degree at most 2 in the first `n` coordinates.
fn monomials(n: usize) -> Vec<Expr> {
    let vars: Vec<Expr> = coordinates(n).into_iter().map(Expr::symbol).collect();
    let mut out = vec![Expr::one()];
    out.extend(vars.iter().cloned());
    for i in 0..n {
        for j in i..n {
            out.push(&vars[i] * &vars[j]);
        }
    }
    out
}

fn poly(n: usize) -> impl Strategy<Value = Expr> {
    let basis = monomials(n);
    prop::collection::vec(-2i64..=2, basis.len())
        .prop_map(move |cs| cs.iter().zip(&basis).map(|(c, m)| Expr::int(*c) * m).sum())
}

fn polys<const K: usize>(n: usize) -> impl Strategy<Value = [Expr; K]> {
    prop::collection::vec(poly(n), K).prop_map(|v| v.try_into().unwrap())
}

/// Sparse quadratic perturbation: two monomials per component.
fn near_identity(n: usize) -> impl Strategy<Value = Transformation> {
    let basis = monomials(n)[1 + n..].to_vec();
    let len = basis.len();
    prop::collection::vec((0..len, 0..len, -2i64..=2, -2i64..=2), n).prop_map(move |terms| {
        let comps = coordinates(n)
            .into_iter()
            .zip(terms)
            .map(|(x, (i, j, a, b))| Expr::symbol(x) + Expr::int(a) * &basis[i] + Expr::int(b) * &basis[j])
            .collect();
        Transformation::new(comps).unwrap()
    })
}

fn cfg() -> ZeroTestConfig {
    ZeroTestConfig { points: 8, ..ZeroTestConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn scalar_lift_round_trips(e in polys::<4>(2), g in polys::<2>(2)) {
        let eq = ScalarCubic::new(e[0].clone(), e[1].clone(), e[2].clone(), e[3].clone());
        let gauge = ScalarGauge { b: g[0].clone(), e: g[1].clone() };
        let k = lift_scalar(&eq, &gauge);
        prop_assert_eq!(project_scalar(&k.to_christoffel()), eq);
        prop_assert_eq!(&k.b, &gauge.b);
        prop_assert_eq!(&k.e, &gauge.e);
        prop_assert_eq!(Geodesic2Coefficients::from_christoffel(&k.to_christoffel()).unwrap(), k);
    }

    #[test]
    fn system_lift_round_trips(s in polys::<15>(3), g in polys::<3>(3)) {
        let s = SystemCubic2::from_array(s);
        let gauge = SystemGauge { gamma1_12: g[0].clone(), gamma2_12: g[1].clone(), gamma3_33: g[2].clone() };
        let gamma = lift_system(&s, &gauge);
        prop_assert_eq!(project_system(&gamma), s);
        prop_assert_eq!(SystemGauge::of(&gamma), gauge);
    }

    #[test]
    fn projection_forgets_only_the_gauge(c in polys::<18>(3)) {
        let mut it = c.into_iter();
        let gamma = Christoffel::from_fn(3, |_, _, _| it.next().unwrap()).unwrap();
        let again = lift_system(&project_system(&gamma), &SystemGauge::of(&gamma));
        prop_assert_eq!(again, gamma);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn curvature_symmetries(c in polys::<18>(3)) {
        let mut it = c.into_iter();
        let gamma = Christoffel::from_fn(3, |_, _, _| it.next().unwrap()).unwrap();
        let r = riemann(&gamma);
        prop_assert!(first_bianchi_residuals(&r).iter().all(Expr::is_zero));
        prop_assert!(r.skew_residuals().iter().all(Expr::is_zero));
    }

    #[test]
    fn flatness_agrees_with_the_four_conditions(c in polys::<6>(2)) {
        let k = Geodesic2Coefficients::from_array(c);
        let verdict = is_flat(&k.to_christoffel(), &cfg());
        let report = geodesic2_flat_conditions(&k, &cfg());
        prop_assert_eq!(verdict.is_zero(), report.passed());
        prop_assert_eq!(flat_residuals(&k).iter().all(Expr::is_zero), verdict.is_zero());
    }

    #[test]
    fn connection_of_a_metric_preserves_it(p in polys::<3>(2)) {
        // small perturbation of the identity keeps the determinant nonzero
        let g = Metric::from_pqr(
            Expr::int(5) + &p[0],
            p[1].clone(),
            Expr::int(7) + &p[2],
        );
        let Ok(gamma) = christoffel_from_metric(&g, &cfg()) else {
            return Ok(());
        };
        let xs = coordinates(2);
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let mut r = g.get(i, j).diff(&xs[k]);
                    for l in 0..2 {
                        r = r - gamma.get(l, k, i) * g.get(l, j);
                        r = r - gamma.get(l, k, j) * g.get(i, l);
                    }
                    prop_assert!(r.is_zero(), "nabla g at {k}{i}{j}: {r}");
                }
            }
        }
    }
}

/// Pullback of the zero connection along `t`: Γⁱ_jk = (J⁻¹)ⁱ_a ∂_j∂_k Xᵃ.
fn flat_connection(t: &Transformation) -> Option<Christoffel> {
    let n = t.dimension();
    let xs = coordinates(n);
    let jac: Vec<Vec<Expr>> = (0..n)
        .map(|a| (0..n).map(|i| t.components()[a].diff(&xs[i])).collect())
        .collect();
    let det = geolin_core::geometry::determinant(&jac);
    if det.is_zero() {
        return None;
    }
    let adj = geolin_core::geometry::adjugate(&jac);
    Christoffel::from_fn(n, |i, j, k| {
        (0..n)
            .map(|a| &adj[i][a] * t.components()[a].diff(&xs[j]).diff(&xs[k]))
            .sum::<Expr>()
            / &det
    })
    .ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn flat_connections_project_to_linearizable_equations(t in near_identity(2)) {
        let Some(gamma) = flat_connection(&t) else { return Ok(()) };
        prop_assert!(is_flat(&gamma, &cfg()).is_zero());
        let e = project_scalar(&gamma);
        prop_assert!(tresse_scalar(&e, &cfg()).passed());
        let k = Geodesic2Coefficients::from_christoffel(&gamma).unwrap();
        let relifted = lift_scalar(&e, &ScalarGauge { b: k.b.clone(), e: k.e.clone() });
        prop_assert!(geodesic2_flat_conditions(&relifted, &cfg()).passed());
    }

    #[test]
    fn maps_produce_linearizable_pairs(t in near_identity(3)) {
        let c = cfg();
        let Ok(gs) = coefficients_from_transformation(&t, &c) else { return Ok(()) };
        let nf = normal_form(&gs, &c).unwrap();
        prop_assert!(nf.report.passed(), "{}", nf.report);
        let NormalFormCoefficients::System(s) = nf.coefficients else {
            return Err(TestCaseError::fail("expected a pair"));
        };
        let report = check_cubic2(&s, &c);
        prop_assert!(report.passed(), "{t:?}\n{report}");
        let sys = ExplicitSystem::from_cubic2(&s);
        prop_assert!(verify_linearizing_transformation(&sys, &t, &c).unwrap().passed());
    }
}
