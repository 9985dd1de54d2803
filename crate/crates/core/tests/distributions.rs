use approx::assert_relative_eq;
use erss_extropy::distributions::{
    beta_order_density, check_feasible, DistributionSpec, LambdaProfile, MonotoneMap,
    OrderStatDensitySpec, WeightSpec,
};
use erss_extropy::Error;
use proptest::prelude::*;

fn families() -> Vec<DistributionSpec> {
    vec![
        DistributionSpec::power(0.5).unwrap(),
        DistributionSpec::power(3.0).unwrap(),
        DistributionSpec::exponential(0.5).unwrap(),
        DistributionSpec::exponential(2.0).unwrap(),
        DistributionSpec::pareto(1.5).unwrap(),
        DistributionSpec::uniform(-1.0, 3.0).unwrap(),
        DistributionSpec::triangular_up(),
        DistributionSpec::triangular_down(),
        DistributionSpec::transformed(
            DistributionSpec::exponential(1.0).unwrap(),
            MonotoneMap::expm1(),
        ),
    ]
}

proptest! {
    #[test]
    fn quantile_inverts_cdf(u in 1e-9f64..(1.0 - 1e-9)) {
        for d in families() {
            let x = d.quantile(u).unwrap();
            prop_assert!((d.cdf(x) - u).abs() <= 1e-9, "{} at u = {}", d.label(), u);
            prop_assert!((d.cdf(x) + d.sf(x) - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn lambda_is_w_times_density_at_quantile(u in 1e-6f64..(1.0 - 1e-6), m in 0.5f64..3.0) {
        let w = WeightSpec::power(m).unwrap();
        for d in [DistributionSpec::power(2.0).unwrap(), DistributionSpec::exponential(1.5).unwrap()] {
            let x = d.quantile(u).unwrap();
            let lam = LambdaProfile::new(d.clone(), w.clone()).unwrap().eval(u).unwrap();
            prop_assert!((lam - x.powf(m) * d.pdf(x)).abs() <= 1e-12 * (1.0 + lam.abs()));
        }
    }
}

#[test]
fn closed_form_densities() {
    let p = DistributionSpec::power(3.0).unwrap();
    assert_relative_eq!(p.pdf(0.5), 3.0 * 0.25, epsilon = 1e-15);
    assert_relative_eq!(p.cdf(0.5), 0.125, epsilon = 1e-15);
    let e = DistributionSpec::exponential(2.0).unwrap();
    assert_relative_eq!(e.pdf(1.0), 2.0 * (-2.0f64).exp(), epsilon = 1e-15);
    let pa = DistributionSpec::pareto(2.0).unwrap();
    assert_relative_eq!(pa.cdf(2.0), 0.75, epsilon = 1e-15);
    assert_relative_eq!(pa.pdf(2.0), 2.0 / 8.0, epsilon = 1e-15);
    assert_eq!(pa.pdf(0.5), 0.0);
    assert_eq!(pa.support(), (1.0, f64::INFINITY));
    let t = DistributionSpec::triangular_down();
    assert_relative_eq!(t.pdf(0.25), 1.5, epsilon = 1e-15);
}

#[test]
fn parameter_domains() {
    for bad in [0.0, -1.0, f64::NAN, f64::INFINITY] {
        assert!(matches!(
            DistributionSpec::power(bad),
            Err(Error::ParameterDomain(_))
        ));
        assert!(matches!(
            DistributionSpec::exponential(bad),
            Err(Error::ParameterDomain(_))
        ));
        assert!(matches!(
            DistributionSpec::pareto(bad),
            Err(Error::ParameterDomain(_))
        ));
        assert!(WeightSpec::power(bad).is_err());
    }
    assert!(DistributionSpec::uniform(1.0, 1.0).is_err());
    assert!(DistributionSpec::exponential(1.0)
        .unwrap()
        .quantile(-0.1)
        .is_err());
}

#[test]
fn integrability_domains() {
    let x2 = WeightSpec::power(2.0).unwrap();
    // power: m + 2θ − 1 > 0
    assert!(check_feasible(
        &DistributionSpec::power(0.5).unwrap(),
        &WeightSpec::power(1.0).unwrap()
    )
    .is_ok());
    assert!(check_feasible(
        &DistributionSpec::power(0.2).unwrap(),
        &WeightSpec::power(0.5).unwrap()
    )
    .is_err());
    // pareto: 2α − m + 1 > 0
    assert!(check_feasible(&DistributionSpec::pareto(1.0).unwrap(), &x2).is_ok());
    assert!(check_feasible(&DistributionSpec::pareto(0.4).unwrap(), &x2).is_err());
    assert!(check_feasible(&DistributionSpec::pareto(0.5).unwrap(), &x2).is_err());
}

#[test]
fn order_statistic_density_matches_formula() {
    let base = DistributionSpec::exponential(1.0).unwrap();
    // f_{2:3}(x) = 6 F(x) (1 − F(x)) f(x)
    let spec = OrderStatDensitySpec::new(2, 3, base.clone()).unwrap();
    for x in [0.1, 0.7, 2.5] {
        let f = base.cdf(x);
        assert_relative_eq!(
            spec.pdf(x),
            6.0 * f * (1.0 - f) * base.pdf(x),
            max_relative = 1e-12
        );
    }
    assert!(OrderStatDensitySpec::new(4, 3, base.clone()).is_err());
    assert!(OrderStatDensitySpec::new(0, 3, base).is_err());
    // Beta(2, 2) density 6u(1 − u)
    assert_relative_eq!(
        beta_order_density(2, 3, 0.3).unwrap(),
        6.0 * 0.3 * 0.7,
        max_relative = 1e-12
    );
}

#[test]
fn tabulated_and_transformed() {
    let tab = DistributionSpec::tabulated(&[(0.0, 0.0), (0.5, 0.25), (1.0, 1.0)]).unwrap();
    assert_eq!(tab.cdf(0.0), 0.0);
    assert_eq!(tab.cdf(1.0), 1.0);
    assert_relative_eq!(tab.cdf(0.5), 0.25, epsilon = 1e-15);
    assert!(DistributionSpec::tabulated(&[(0.0, 0.0), (1.0, 0.5), (0.5, 1.0)]).is_err());

    let shifted = DistributionSpec::transformed(
        DistributionSpec::uniform(0.0, 1.0).unwrap(),
        MonotoneMap::shift(2.0).unwrap(),
    );
    assert_relative_eq!(shifted.cdf(2.25), 0.25, epsilon = 1e-15);
    assert_relative_eq!(shifted.pdf(2.5), 1.0, epsilon = 1e-15);
    let lomax = DistributionSpec::transformed(
        DistributionSpec::exponential(1.0).unwrap(),
        MonotoneMap::expm1(),
    );
    // P(e^X − 1 ≤ y) = 1 − 1/(1 + y)
    assert_relative_eq!(lomax.cdf(3.0), 0.75, epsilon = 1e-14);
    assert_relative_eq!(lomax.pdf(1.0), 0.25, epsilon = 1e-14);
}

#[test]
fn weight_metadata() {
    let x = WeightSpec::identity();
    assert!(x.is_odd && x.is_increasing);
    assert!(x.check_odd(&[-2.0, -0.5, 0.5, 2.0]));
    assert!(!WeightSpec::power(2.0).unwrap().is_odd);
    assert_eq!(WeightSpec::power(2.0).unwrap().eval(3.0), 9.0);
    assert!(WeightSpec::power(1.0)
        .unwrap()
        .is_nonnegative_on(&DistributionSpec::exponential(1.0).unwrap(), 64));
}
