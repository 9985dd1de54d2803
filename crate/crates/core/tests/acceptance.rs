//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use erss_extropy::distributions::{DistributionSpec, MonotoneMap, WeightSpec};
use erss_extropy::extropy::Engine;
use erss_extropy::mc_sim::{self, SamplingPlan, SamplingScheme};
use erss_extropy::order_checks::{self, BetaIndex, Outcome, Verdict, DEFAULT_GRID};

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Duration);

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn x() -> WeightSpec {
    WeightSpec::power(1.0).unwrap()
}

/// Composite Simpson rule on [a, b]; exact for cubics.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let h = (b - a) / intervals as f64;
    let mut s = f(a) + f(b);
    for k in 1..intervals {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + k as f64 * h);
    }
    s * h / 3.0
}

fn criterion_1() -> Check {
    let e = Engine::default();
    let dist = DistributionSpec::exponential(1.0).map_err(err)?;
    let target = -0.125;
    let closed = e.closed_form_exponential(1.0, 1.0, 1).map_err(err)?.value;
    let quant = e.gwe_erss_quantile(&dist, &x(), 1).map_err(err)?.value;
    let direct = e.gwe_erss_direct(&dist, &x(), 1).map_err(err)?.value;
    let mc = mc_sim::mc_gwe_erss(&dist, &x(), 1, 1_000_000, 2024).map_err(err)?;
    for (name, v) in [
        ("closed form", closed),
        ("quantile", quant),
        ("direct", direct),
    ] {
        ensure((v - target).abs() <= 1e-9, format!("{name}: {v}"))?;
    }
    let z = (mc.value - target) / mc.error_estimate;
    ensure(
        z.abs() <= 3.0,
        format!(
            "monte carlo {} ± {} (z = {z:.2})",
            mc.value, mc.error_estimate
        ),
    )?;
    Ok(format!(
        "closed {closed:.12}, quantile {quant:.12}, direct {direct:.12}, MC {:.6} (z = {z:.2})",
        mc.value
    ))
}

fn criterion_2() -> Check {
    let e = Engine::default();
    let mut dists = Vec::new();
    for t in [0.5, 1.0, 2.0, 3.0] {
        dists.push(DistributionSpec::power(t).map_err(err)?);
    }
    for l in [0.5, 1.0, 2.0] {
        dists.push(DistributionSpec::exponential(l).map_err(err)?);
    }
    for a in [1.0, 2.0, 3.0] {
        dists.push(DistributionSpec::pareto(a).map_err(err)?);
    }
    let mut cases = 0;
    let mut worst = 0.0f64;
    for d in &dists {
        for m in [1.0, 2.0] {
            let w = WeightSpec::power(m).map_err(err)?;
            if erss_extropy::distributions::check_feasible(d, &w).is_err() {
                continue;
            }
            for n in 1..=6 {
                let c = e.closed_form(d, &w, n).map_err(err)?.value;
                let q = e.gwe_erss_quantile(d, &w, n).map_err(err)?.value;
                let r = e.gwe_erss_direct(d, &w, n).map_err(err)?.value;
                let scale = 1f64.max(q.abs());
                let dev = ((c - q).abs()).max((q - r).abs()) / scale;
                worst = worst.max(dev);
                ensure(
                    dev <= 1e-6,
                    format!(
                        "{} m={m} n={n}: closed {c}, quantile {q}, direct {r}",
                        d.label()
                    ),
                )?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases, worst scaled deviation {worst:.2e}"))
}

fn criterion_3() -> Check {
    let e = Engine::default();
    let p1 = DistributionSpec::power(1.0).map_err(err)?;
    let q = e.gwe_erss_quantile(&p1, &x(), 2).map_err(err)?.value;
    let r = e.gwe_erss_direct(&p1, &x(), 2).map_err(err)?.value;
    // min of two uniforms has pdf 2(1−x), max has 2x
    let a = simpson(|t| t * 4.0 * (1.0 - t).powi(2), 0.0, 1.0, 1000);
    let b = simpson(|t| t * 4.0 * t * t, 0.0, 1.0, 1000);
    let oracle = -0.5 * a * b;
    ensure(
        (oracle + 1.0 / 6.0).abs() <= 1e-12,
        format!("oracle {oracle}"),
    )?;
    ensure((q - oracle).abs() <= 1e-9, format!("quantile {q}"))?;
    ensure((r - oracle).abs() <= 1e-9, format!("direct {r}"))?;
    Ok(format!(
        "quantile {q:.15}, direct {r:.15}, oracle {oracle:.15}"
    ))
}

fn criterion_4() -> Check {
    let e = Engine::default();
    let mut cases = 0;
    let mut max_fraction = 0.0f64;
    for spec in [
        "power:0.5",
        "power:1",
        "power:2",
        "power:3",
        "exponential:0.5",
        "exponential:1",
        "exponential:2",
        "pareto:1",
        "pareto:2",
        "pareto:3",
    ] {
        let d = erss_extropy::cli::parse_dist(spec).map_err(err)?;
        for m in [1.0, 2.0] {
            let w = WeightSpec::power(m).map_err(err)?;
            if erss_extropy::distributions::check_feasible(&d, &w).is_err() {
                continue;
            }
            for n in 1..=6 {
                let rec = order_checks::verify_ratio_bound(&e, &d, &w, n).map_err(err)?;
                ensure(
                    rec.outcome == Outcome::Pass,
                    format!("{spec} m={m} n={n}: {:?}", rec.values),
                )?;
                max_fraction = max_fraction.max(rec.values["ratio"] / rec.values["bound"]);
                cases += 1;
            }
        }
    }
    Ok(format!(
        "{cases} cases, zero violations, largest ratio/bound {max_fraction:.3e}"
    ))
}

fn criterion_5() -> Check {
    let e = Engine::default();
    let sym = DistributionSpec::uniform(-1.0, 1.0).map_err(err)?;
    let w = WeightSpec::identity();
    let mut worst = 0.0f64;
    for n in [1, 3, 5] {
        let j = e.gwe_erss(&sym, &w, n).map_err(err)?.value;
        ensure(j.abs() <= 1e-8, format!("uniform(-1,1) n={n}: {j}"))?;
        worst = worst.max(j.abs());
    }
    let shifted = DistributionSpec::transformed(
        DistributionSpec::triangular_up(),
        MonotoneMap::shift(-2.0 / 3.0).map_err(err)?,
    );
    ensure(
        shifted.mean.is_some_and(|m| m.abs() < 1e-12),
        "control is not mean zero",
    )?;
    let mut control = 0.0f64;
    for n in [1, 3, 5] {
        control = control.max(e.gwe_erss(&shifted, &w, n).map_err(err)?.value.abs());
    }
    ensure(
        control >= 1e-3,
        format!("asymmetric control max |J| = {control}"),
    )?;
    Ok(format!(
        "symmetric max |J| = {worst:.1e}, asymmetric control max |J| = {control:.4}"
    ))
}

fn criterion_6() -> Check {
    let tests = 2 * 2 * 9;
    let alpha = 0.01 / tests as f64;
    let mut count = 0;
    let mut worst = 0.0f64;
    let dists = [
        ("uniform", DistributionSpec::uniform(0.0, 1.0).map_err(err)?),
        (
            "exponential",
            DistributionSpec::exponential(1.0).map_err(err)?,
        ),
    ];
    for (name, d) in &dists {
        for scheme in [SamplingScheme::Erss, SamplingScheme::Rss] {
            for n in 2..=4 {
                let plan = SamplingPlan::new(scheme, n, 100_000, 1000 + n as u64).map_err(err)?;
                let s = mc_sim::draw(d, &plan);
                for p in 0..n as usize {
                    let r = mc_sim::ks_marginal_check(&s, p, d, alpha).map_err(err)?;
                    ensure(
                        r.pass,
                        format!(
                            "{name} {scheme} n={n} position {}: D = {} ≥ {}",
                            p + 1,
                            r.statistic,
                            r.critical_value
                        ),
                    )?;
                    worst = worst.max(r.statistic / r.critical_value);
                    count += 1;
                }
            }
        }
    }
    ensure(
        count == tests,
        format!("ran {count} tests, expected {tests}"),
    )?;
    // negative control: ERSS minimum of two uniforms against F(x) = x²
    let plan = SamplingPlan::new(SamplingScheme::Erss, 2, 100_000, 77).map_err(err)?;
    let s = mc_sim::draw_erss(&dists[0].1, &plan).map_err(err)?;
    let bad = mc_sim::ks_test(&s.column(0), |t| t * t, alpha).map_err(err)?;
    ensure(!bad.pass, "wrong-cdf control passed")?;
    Ok(format!(
        "{count} positions pass at α = {alpha:.2e} (max D/critical {worst:.3}); wrong cdf rejected with D = {:.3}",
        bad.statistic
    ))
}

fn criterion_7() -> Check {
    let e = Engine::default();
    let (xd, yd) = (
        DistributionSpec::triangular_up(),
        DistributionSpec::triangular_down(),
    );
    let jx = e.weighted_extropy(&xd, &x()).map_err(err)?.value;
    let jy = e.weighted_extropy(&yd, &x()).map_err(err)?.value;
    // antiderivatives: ∫x·4x² dx = 1, ∫x·4(1−x)² dx = 1/3
    ensure((jx + 0.5).abs() <= 1e-9, format!("J^w(X) = {jx}"))?;
    ensure((jy + 1.0 / 6.0).abs() <= 1e-9, format!("J^w(Y) = {jy}"))?;
    let mut values = Vec::new();
    for n in 2..=5 {
        let disp =
            order_checks::verify_dispersive_comparison(&e, &xd, &yd, &x(), &x(), n, DEFAULT_GRID)
                .map_err(err)?;
        ensure(
            disp.outcome == Outcome::NotApplicable,
            format!("n={n}: dispersive route {:?}", disp.outcome),
        )?;
        let rec = order_checks::verify_delta_comparison(
            &e,
            &xd,
            &yd,
            &x(),
            &x(),
            n,
            DEFAULT_GRID,
            BetaIndex::ErssIndex,
        )
        .map_err(err)?;
        ensure(
            rec.outcome == Outcome::Pass,
            format!("n={n}: {:?} {:?}", rec.outcome, rec.notes),
        )?;
        let (a, b) = (rec.values["j_x_erss"], rec.values["j_y_erss"]);
        ensure(a <= b, format!("n={n}: {a} > {b}"))?;
        values.push(format!("n={n}: {a:.5} ≤ {b:.5}"));
    }
    Ok(format!(
        "J^w(X) = {jx:.12}, J^w(Y) = {jy:.12}; {}",
        values.join(", ")
    ))
}

fn criterion_8() -> Check {
    let e = Engine::default();
    let dist = DistributionSpec::exponential(1.0).map_err(err)?;
    let w = WeightSpec::power(2.0).map_err(err)?;
    let eta = MonotoneMap::expm1();
    let xs: Vec<f64> = erss_extropy::distributions::unit_grid(DEFAULT_GRID)
        .into_iter()
        .map(|u| -(-u).ln_1p())
        .collect();
    let worst = xs
        .iter()
        .map(|&t| t * t - (t.exp() + (-t).exp() - 2.0))
        .fold(f64::NEG_INFINITY, f64::max);
    ensure(worst <= 1e-12, format!("e^x + e^-x − 2 < x² by {worst}"))?;
    let mut values = Vec::new();
    for n in [2, 3] {
        let rec = order_checks::verify_transform_comparison(&e, &dist, &w, &eta, n, DEFAULT_GRID)
            .map_err(err)?;
        let ge = rec
            .hypotheses
            .iter()
            .find(|h| h.name == "condition_ge")
            .map(|h| h.holds);
        ensure(ge == Some(Verdict::Yes), format!("n={n}: condition {ge:?}"))?;
        ensure(
            rec.outcome == Outcome::Pass,
            format!("n={n}: {:?}", rec.notes),
        )?;
        let (a, b) = (rec.values["j_x_erss"], rec.values["j_eta_x_erss"]);
        ensure(a >= b, format!("n={n}: {a} < {b}"))?;
        values.push(format!("n={n}: {a:.6} ≥ {b:.6}"));
    }
    Ok(values.join(", "))
}

fn criterion_9() -> Check {
    let dir = tempfile::tempdir().map_err(err)?;
    let bin = env!("CARGO_BIN_EXE_erss-extropy");
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}.csv"));
        let status = Command::new(bin)
            .args([
                "simulate", "--scheme", "erss", "--dist", "uniform", "--n", "2",
            ])
            .args(["--cycles", "100000", "--seed", "42", "--draws", "10000"])
            .arg("--out")
            .arg(&out)
            .status()
            .map_err(err)?;
        ensure(status.success(), format!("simulate exited with {status}"))?;
        outputs.push(std::fs::read(&out).map_err(err)?);
    }
    ensure(outputs[0] == outputs[1], "CSV outputs differ")?;
    ensure(outputs[0].len() > 100_000, "CSV unexpectedly small")?;
    Ok(format!("two runs, {} identical bytes", outputs[0].len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        (
            "1 exponential fingerprint −1/8",
            criterion_1,
            Duration::from_secs(5),
        ),
        (
            "2 three-way agreement matrix",
            criterion_2,
            Duration::from_secs(60),
        ),
        (
            "3 uniform reduction −1/6",
            criterion_3,
            Duration::from_secs(60),
        ),
        (
            "4 ERSS/SRS bound suite",
            criterion_4,
            Duration::from_secs(60),
        ),
        (
            "5 symmetry characterization",
            criterion_5,
            Duration::from_secs(60),
        ),
        (
            "6 Monte Carlo protocol fidelity",
            criterion_6,
            Duration::from_secs(120),
        ),
        (
            "7 stochastic comparison",
            criterion_7,
            Duration::from_secs(60),
        ),
        ("8 transform theorem", criterion_8, Duration::from_secs(60)),
        (
            "9 simulate determinism",
            criterion_9,
            Duration::from_secs(60),
        ),
    ];
    let mut failed = 0;
    for (name, f, budget) in criteria {
        let start = Instant::now();
        let mut result = f();
        let took = start.elapsed();
        if result.is_ok() && took > budget {
            result = Err(format!("runtime {took:.2?} exceeds {budget:?}"));
        }
        match result {
            Ok(detail) => println!("PASS criterion {name} [{took:.2?}]: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name} [{took:.2?}]: {detail}");
            }
        }
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
