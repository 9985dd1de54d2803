use approx::assert_relative_eq;
use erss_extropy::distributions::{DistributionSpec, WeightSpec};
use erss_extropy::extropy::{q_constants, Engine, Method, Scheme};
use erss_extropy::Error;

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let h = (b - a) / intervals as f64;
    let mut s = f(a) + f(b);
    for k in 1..intervals {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
    }
    s * h / 3.0
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// −½ ∏ ∫ x^m f_{r:n}(x)² dx over the ERSS ranks, for F(x) = x^θ on [0, 1].
fn power_oracle(theta: f64, m: f64, n: u32) -> f64 {
    let ranks: Vec<u32> = (1..=n)
        .map(|j| {
            if n % 2 == 1 && j == n.div_ceil(2) {
                n.div_ceil(2)
            } else if j <= n / 2 {
                1
            } else {
                n
            }
        })
        .collect();
    let mut prod = 1.0;
    for r in ranks {
        let c = r as f64 * binom(n, r);
        let f = |x: f64| {
            let big_f = x.powf(theta);
            let dens = c
                * big_f.powi(r as i32 - 1)
                * (1.0 - big_f).powi((n - r) as i32)
                * theta
                * x.powf(theta - 1.0);
            x.powf(m) * dens * dens
        };
        prod *= simpson(f, 0.0, 1.0, 20_000);
    }
    -0.5 * prod
}

#[test]
fn power_family_against_independent_oracle() {
    let e = Engine::default();
    for (theta, m) in [(2.0, 1.0), (3.0, 2.0), (1.0, 2.0)] {
        let d = DistributionSpec::power(theta).unwrap();
        let w = WeightSpec::power(m).unwrap();
        for n in 1..=5 {
            let oracle = power_oracle(theta, m, n);
            for r in [
                e.closed_form(&d, &w, n).unwrap(),
                e.gwe_erss_quantile(&d, &w, n).unwrap(),
                e.gwe_erss_direct(&d, &w, n).unwrap(),
            ] {
                assert_eq!(r.scheme, Scheme::Erss);
                assert_relative_eq!(r.value, oracle, max_relative = 1e-8);
            }
        }
    }
}

#[test]
fn method_tags() {
    let e = Engine::default();
    let d = DistributionSpec::exponential(1.0).unwrap();
    let w = WeightSpec::power(1.0).unwrap();
    assert_eq!(e.closed_form(&d, &w, 2).unwrap().method, Method::ClosedForm);
    assert_eq!(
        e.gwe_erss_quantile(&d, &w, 2).unwrap().method,
        Method::QuantileQuadrature
    );
    assert_eq!(
        e.gwe_erss_direct(&d, &w, 2).unwrap().method,
        Method::DensityQuadrature
    );
    let tri = DistributionSpec::triangular_up();
    assert!(matches!(
        e.closed_form(&tri, &w, 2),
        Err(Error::NotApplicable(_))
    ));
}

#[test]
fn single_and_srs_values() {
    let e = Engine::default();
    // J(Exp(λ)) = −λ/4, J^w with w = x: −1/8 for every λ
    for rate in [0.5, 1.0, 3.0] {
        let d = DistributionSpec::exponential(rate).unwrap();
        assert_relative_eq!(
            e.extropy(&d).unwrap().value,
            -rate / 4.0,
            max_relative = 1e-10
        );
        let w = WeightSpec::power(1.0).unwrap();
        let j = e.weighted_extropy(&d, &w).unwrap().value;
        assert_relative_eq!(j, -0.125, max_relative = 1e-10);
        for n in 1..=4 {
            let srs = e.gwe_srs(&d, &w, n).unwrap().value;
            assert_relative_eq!(srs, -0.5 * (-2.0 * j).powi(n as i32), max_relative = 1e-10);
        }
    }
    // Pareto(α) with w = x: −α/4
    let j = e.weighted_extropy(
        &DistributionSpec::pareto(2.0).unwrap(),
        &WeightSpec::power(1.0).unwrap(),
    );
    assert_relative_eq!(j.unwrap().value, -0.5, max_relative = 1e-10);
}

#[test]
fn exponential_rate_scaling() {
    let e = Engine::default();
    for m in [1.0, 2.0] {
        let w = WeightSpec::power(m).unwrap();
        for n in 1..=4 {
            let base = e.closed_form_exponential(1.0, m, n).unwrap().value;
            let scaled = e.closed_form_exponential(2.5, m, n).unwrap().value;
            assert_relative_eq!(
                scaled,
                base * 2.5f64.powf(n as f64 * (1.0 - m)),
                max_relative = 1e-10
            );
            let quad = e
                .gwe_erss_direct(&DistributionSpec::exponential(2.5).unwrap(), &w, n)
                .unwrap()
                .value;
            assert_relative_eq!(quad, scaled, max_relative = 1e-8);
        }
    }
}

#[test]
fn q_constants_values() {
    let q2 = q_constants(2).unwrap();
    assert_relative_eq!(q2.q1(), -16.0 / 9.0, max_relative = 1e-14);
    let q3 = q_constants(3).unwrap();
    assert_relative_eq!(q3.q1(), -729.0 / 125.0, max_relative = 1e-14);
    assert_relative_eq!(q3.q2(), -6.9984, max_relative = 1e-12);
    // large n stays finite in log space
    let q40 = q_constants(40).unwrap();
    assert!(q40.ln_abs_q1().is_finite() && q40.ln_abs_q2().is_finite());
    assert!(q_constants(0).is_err());
}

#[test]
fn large_n_sign_and_convergence() {
    let e = Engine::default();
    let w = WeightSpec::power(1.0).unwrap();
    for d in [
        DistributionSpec::uniform(0.0, 1.0).unwrap(),
        DistributionSpec::exponential(1.0).unwrap(),
    ] {
        for n in [7, 10, 12] {
            let r = e.gwe_erss(&d, &w, n).unwrap();
            assert!(r.converged, "{} n={n}", d.label());
            assert!(r.value < 0.0 && r.value.is_finite());
        }
    }
}

#[test]
fn infeasible_parameters_rejected() {
    let e = Engine::default();
    assert!(matches!(
        e.closed_form_pareto(0.4, 2.0, 2),
        Err(Error::ParameterDomain(_))
    ));
    assert!(e.closed_form_power(0.2, 0.5, 2).is_err());
    assert!(e
        .gwe_erss(
            &DistributionSpec::pareto(0.4).unwrap(),
            &WeightSpec::power(2.0).unwrap(),
            2
        )
        .is_err());
    assert!(e
        .gwe_erss(
            &DistributionSpec::uniform(0.0, 1.0).unwrap(),
            &WeightSpec::power(1.0).unwrap(),
            0
        )
        .is_err());
}
