use erss_extropy::distributions::{DistributionSpec, MonotoneMap, WeightSpec};
use erss_extropy::order_checks::{
    check_exponential_characterization, check_order, check_symmetry_characterization, compare_erss,
    delta_analysis, erss_srs_ratio_bound, verify_dispersive_comparison, verify_ratio_bound,
    verify_transform_comparison, BetaIndex, OrderKind, Outcome, Verdict, DEFAULT_GRID,
};
use erss_extropy::{Engine, Error};

fn exp(rate: f64) -> DistributionSpec {
    DistributionSpec::exponential(rate).unwrap()
}

fn x() -> WeightSpec {
    WeightSpec::power(1.0).unwrap()
}

#[test]
fn exponential_rates_are_ordered_in_every_sense() {
    for order in OrderKind::ALL {
        let r = check_order(order, &exp(2.0), &exp(1.0), DEFAULT_GRID).unwrap();
        assert_eq!(r.holds, Verdict::Yes, "{}", order.name());
    }
    let back = check_order(OrderKind::St, &exp(1.0), &exp(2.0), DEFAULT_GRID).unwrap();
    assert_eq!(back.holds, Verdict::No);
    assert!(back.max_violation > back.tolerance);
    assert!(!back.witness_grid.is_empty() && back.witness_grid.len() <= 16);
    assert!(back.witness_grid.iter().all(|w| w.lhs > w.rhs));
}

#[test]
fn uniform_orders() {
    let u01 = DistributionSpec::uniform(0.0, 1.0).unwrap();
    let u02 = DistributionSpec::uniform(0.0, 2.0).unwrap();
    let shifted = DistributionSpec::uniform(0.5, 1.5).unwrap();
    assert_eq!(
        check_order(OrderKind::St, &u01, &u02, DEFAULT_GRID)
            .unwrap()
            .holds,
        Verdict::Yes
    );
    assert_eq!(
        check_order(OrderKind::Disp, &u01, &u02, DEFAULT_GRID)
            .unwrap()
            .holds,
        Verdict::Yes
    );
    assert_eq!(
        check_order(OrderKind::Disp, &u02, &u01, DEFAULT_GRID)
            .unwrap()
            .holds,
        Verdict::No
    );
    // equal spread: dispersive both ways
    assert_eq!(
        check_order(OrderKind::Disp, &u01, &shifted, DEFAULT_GRID)
            .unwrap()
            .holds,
        Verdict::Yes
    );
    assert_eq!(
        check_order(OrderKind::Disp, &shifted, &u01, DEFAULT_GRID)
            .unwrap()
            .holds,
        Verdict::Yes
    );
}

#[test]
fn shape_orders_need_nonnegative_support() {
    let sym = DistributionSpec::uniform(-1.0, 1.0).unwrap();
    for order in [
        OrderKind::Star,
        OrderKind::ConvexTransform,
        OrderKind::Superadditive,
    ] {
        assert!(matches!(
            check_order(order, &sym, &exp(1.0), 256),
            Err(Error::Domain(_))
        ));
    }
    assert!(check_order(OrderKind::St, &exp(1.0), &exp(2.0), 4).is_err());
    assert_eq!(OrderKind::parse("*").unwrap(), OrderKind::Star);
    assert_eq!(OrderKind::parse("c").unwrap(), OrderKind::ConvexTransform);
    assert_eq!(OrderKind::parse("su").unwrap(), OrderKind::Superadditive);
    assert!(OrderKind::parse("icx").is_err());
}

#[test]
fn triangular_pair_has_positive_delta() {
    let e = Engine::default();
    let (up, down) = (
        DistributionSpec::triangular_up(),
        DistributionSpec::triangular_down(),
    );
    for n in 2..=5 {
        let d =
            delta_analysis(&e, &up, &down, &x(), &x(), n, 1, 1024, BetaIndex::ErssIndex).unwrap();
        // Δ(u) = 2 − 2√(1 − u)
        for &(u, v) in d.delta.iter().step_by(97) {
            assert!((v - (2.0 - 2.0 * (1.0 - u).sqrt())).abs() < 1e-12);
        }
        assert!(d.a2.is_empty() && d.sup_phi_on_a2 == f64::NEG_INFINITY);
        assert!(d.a1_measure > 0.99);
        assert!(d.condition_holds && d.premise_holds);
        assert!((d.j_x + 0.5).abs() < 1e-9 && (d.j_y + 1.0 / 6.0).abs() < 1e-9);
    }
    assert!(delta_analysis(&e, &up, &down, &x(), &x(), 2, 1, 100, BetaIndex::ErssIndex).is_err());

    let records = compare_erss(&e, &up, &down, &x(), &x(), 3, DEFAULT_GRID).unwrap();
    let outcomes: Vec<Outcome> = records.iter().map(|r| r.outcome).collect();
    assert_eq!(
        outcomes,
        vec![
            Outcome::NotApplicable,
            Outcome::NotApplicable,
            Outcome::Pass
        ]
    );
    assert_eq!(records[2].check, "delta_comparison");
    assert!(records[2].values["j_x_erss"] <= records[2].values["j_y_erss"]);
}

#[test]
fn dispersive_comparison_gates() {
    let e = Engine::default();
    let u = DistributionSpec::uniform(0.0, 1.0).unwrap();
    let r = verify_dispersive_comparison(
        &e,
        &DistributionSpec::uniform(0.5, 1.0).unwrap(),
        &u,
        &x(),
        &x(),
        2,
        DEFAULT_GRID,
    )
    .unwrap();
    assert_eq!(r.outcome, Outcome::Pass);
    // different upper endpoints fall outside the hypotheses
    let r = verify_dispersive_comparison(
        &e,
        &DistributionSpec::uniform(0.0, 0.5).unwrap(),
        &u,
        &x(),
        &x(),
        2,
        DEFAULT_GRID,
    )
    .unwrap();
    assert_eq!(r.outcome, Outcome::NotApplicable);
    assert!(r
        .hypotheses
        .iter()
        .any(|h| h.name == "common_finite_upper_endpoint" && h.holds == Verdict::No));
}

#[test]
fn ratio_bound() {
    assert_eq!(erss_srs_ratio_bound(1), 1.0);
    assert!((erss_srs_ratio_bound(2) - 16.0).abs() < 1e-12);
    assert!((erss_srs_ratio_bound(3) - 729.0 / 4.0).abs() < 1e-9);
    let e = Engine::default();
    let rec = verify_ratio_bound(&e, &exp(1.0), &x(), 4).unwrap();
    assert_eq!(rec.outcome, Outcome::Pass);
    assert!(rec.values["ratio"] <= rec.values["bound"]);
    // w(x) = x is negative on part of (−1, 1)
    let sym = DistributionSpec::uniform(-1.0, 1.0).unwrap();
    assert_eq!(
        verify_ratio_bound(&e, &sym, &WeightSpec::identity(), 3)
            .unwrap()
            .outcome,
        Outcome::NotApplicable
    );
}

#[test]
fn characterizations() {
    let e = Engine::default();
    let w = WeightSpec::identity();
    let sym = DistributionSpec::uniform(-1.0, 1.0).unwrap();
    let rec =
        check_symmetry_characterization(&e, &sym, &w, &[1, 3, 5], 1e-8, DEFAULT_GRID).unwrap();
    assert_eq!(rec.outcome, Outcome::Pass);
    let shifted = DistributionSpec::transformed(
        DistributionSpec::triangular_up(),
        MonotoneMap::shift(-2.0 / 3.0).unwrap(),
    );
    let rec =
        check_symmetry_characterization(&e, &shifted, &w, &[1, 3, 5], 1e-8, DEFAULT_GRID).unwrap();
    assert_eq!(rec.outcome, Outcome::Pass);
    assert!(rec
        .hypotheses
        .iter()
        .any(|h| h.name == "density_quantile_reflection" && h.holds == Verdict::No));
    assert!(rec.values["j_erss_n3"].abs() >= 1e-3);
    let rec = check_symmetry_characterization(
        &e,
        &DistributionSpec::triangular_up(),
        &w,
        &[1, 3],
        1e-8,
        DEFAULT_GRID,
    )
    .unwrap();
    assert_eq!(rec.outcome, Outcome::NotApplicable);

    assert_eq!(
        check_exponential_characterization(&e, &exp(1.0), 1e-8)
            .unwrap()
            .outcome,
        Outcome::Pass
    );
    // J^w = −1/4 for the uniform; exponential(2) matches −1/8 at n = 1 but
    // leaves the standard closed-form family for m = 2
    for d in [exp(2.0), DistributionSpec::uniform(0.0, 1.0).unwrap()] {
        let rec = check_exponential_characterization(&e, &d, 1e-8).unwrap();
        assert_eq!(rec.outcome, Outcome::Fail, "{}", d.label());
    }
}

#[test]
fn transform_comparison() {
    let e = Engine::default();
    let w = WeightSpec::power(2.0).unwrap();
    for n in [2, 3] {
        let rec =
            verify_transform_comparison(&e, &exp(1.0), &w, &MonotoneMap::expm1(), n, DEFAULT_GRID)
                .unwrap();
        assert_eq!(rec.outcome, Outcome::Pass);
        assert!(rec.values["j_x_erss"] >= rec.values["j_eta_x_erss"]);
    }
    let rec =
        verify_transform_comparison(&e, &exp(1.0), &w, &MonotoneMap::identity(), 2, DEFAULT_GRID)
            .unwrap();
    assert!(rec.outcome.is_ok());
}
