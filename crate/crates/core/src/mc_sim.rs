//! Seeded simulation of the SRS, RSS and ERSS protocols.
//!
//! # Random streams
//!
//! Every stream is a `ChaCha8Rng` seeded with `seed_from_u64(seed)` and
//! switched to a substream with `set_stream`. Uniforms are built from the top
//! 53 bits of `next_u64` as `((x >> 11) + 0.5)·2⁻⁵³`, which never returns 0
//! or 1.
//!
//! - Sample position `p` (0-based) uses stream `p`. Each cycle draws the
//!   position's set of `n` values (one value for SRS) in order, and the
//!   measured unit is picked after sorting the set.
//! - Monte Carlo expectations use stream `(k << 32) | chunk`, with chunks of
//!   [`MC_CHUNK`] draws, each draw sorting `2n − 1` uniforms.
//!
//! Outputs therefore do not depend on the number of rayon threads.

use std::fmt;
use std::io::Write;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionSpec, LambdaProfile, OrderStatDensitySpec, WeightSpec};
use crate::error::{Error, Result};
use crate::extropy::{ErssLayout, GweResult, Method, QConstants, Scheme};
use crate::special::LogValue;

/// Draws per independent Monte Carlo substream.
pub const MC_CHUNK: usize = 1 << 16;

/// Minimum cycles accepted by [`ks_marginal_check`].
pub const MIN_KS_CYCLES: usize = 1000;

/// Minimum draws accepted by [`mc_beta_expectation`].
pub const MIN_MC_DRAWS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingScheme {
    Srs,
    Rss,
    Erss,
}

impl fmt::Display for SamplingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplingScheme::Srs => "srs",
            SamplingScheme::Rss => "rss",
            SamplingScheme::Erss => "erss",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub scheme: SamplingScheme,
    pub n: u32,
    pub cycles: usize,
    pub seed: u64,
}

impl SamplingPlan {
    pub fn new(scheme: SamplingScheme, n: u32, cycles: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("set size n must be ≥ 1".into()));
        }
        Ok(SamplingPlan {
            scheme,
            n,
            cycles,
            seed,
        })
    }

    /// Role of every measured position, in position order.
    pub fn roles(&self) -> Vec<UnitRole> {
        let n = self.n;
        match self.scheme {
            SamplingScheme::Srs => vec![UnitRole::Unranked; n as usize],
            SamplingScheme::Rss => (1..=n).map(UnitRole::Rank).collect(),
            SamplingScheme::Erss => {
                let layout = ErssLayout {
                    n,
                    extremes: n / 2,
                    median: n % 2 == 1,
                };
                let mut roles = vec![UnitRole::Min; layout.extremes as usize];
                roles.extend(std::iter::repeat_n(UnitRole::Max, layout.extremes as usize));
                if layout.median {
                    roles.push(UnitRole::Median);
                }
                roles
            }
        }
    }
}

/// Which order statistic of its set a measured unit is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitRole {
    Min,
    Max,
    Median,
    Rank(u32),
    Unranked,
}

impl UnitRole {
    /// 1-based rank within a set of `n`, or `None` for an unranked draw.
    pub fn rank(&self, n: u32) -> Option<u32> {
        match *self {
            UnitRole::Min => Some(1),
            UnitRole::Max => Some(n),
            UnitRole::Median => Some(n.div_ceil(2)),
            UnitRole::Rank(i) => Some(i),
            UnitRole::Unranked => None,
        }
    }
}

impl fmt::Display for UnitRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitRole::Min => f.write_str("min"),
            UnitRole::Max => f.write_str("max"),
            UnitRole::Median => f.write_str("median"),
            UnitRole::Rank(i) => write!(f, "rank-{i}"),
            UnitRole::Unranked => f.write_str("unranked"),
        }
    }
}

/// Simulated cycles × n matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedSample {
    pub plan: SamplingPlan,
    pub values: Vec<f64>,
    pub unit_roles: Vec<UnitRole>,
}

impl SimulatedSample {
    pub fn n(&self) -> usize {
        self.plan.n as usize
    }

    pub fn cycles(&self) -> usize {
        self.plan.cycles
    }

    pub fn get(&self, cycle: usize, position: usize) -> f64 {
        self.values[cycle * self.n() + position]
    }

    pub fn column(&self, position: usize) -> Vec<f64> {
        (0..self.cycles()).map(|c| self.get(c, position)).collect()
    }

    pub fn position_mean(&self, position: usize) -> f64 {
        self.column(position).iter().sum::<f64>() / self.cycles() as f64
    }

    /// Writes `cycle,position,role,value` rows (1-based cycle and position).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Domain(format!("csv write failed: {e}"));
        w.write_record(["cycle", "position", "role", "value"])
            .map_err(io)?;
        for c in 0..self.cycles() {
            for (p, role) in self.unit_roles.iter().enumerate() {
                w.write_record([
                    (c + 1).to_string(),
                    (p + 1).to_string(),
                    role.to_string(),
                    format!("{:.16e}", self.get(c, p)),
                ])
                .map_err(io)?;
            }
        }
        w.flush()
            .map_err(|e| Error::Domain(format!("csv write failed: {e}")))
    }
}

fn uniform01(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn sorted_uniforms(rng: &mut ChaCha8Rng, buf: &mut [f64]) {
    for v in buf.iter_mut() {
        *v = uniform01(rng);
    }
    buf.sort_unstable_by(f64::total_cmp);
}

/// Runs the protocol of `plan` regardless of its declared scheme check.
fn simulate(dist: &DistributionSpec, plan: &SamplingPlan) -> SimulatedSample {
    let n = plan.n as usize;
    let roles = plan.roles();
    let set_size = if plan.scheme == SamplingScheme::Srs {
        1
    } else {
        n
    };
    let columns: Vec<Vec<f64>> = roles
        .par_iter()
        .enumerate()
        .map(|(p, role)| {
            let mut rng = stream(plan.seed, p as u64);
            let mut set = vec![0.0; set_size];
            let pick = role.rank(plan.n).unwrap_or(1) as usize - 1;
            (0..plan.cycles)
                .map(|_| {
                    sorted_uniforms(&mut rng, &mut set);
                    // F⁻¹ is increasing, so sorting uniforms sorts the set.
                    dist.quantile_unchecked(set[pick])
                })
                .collect()
        })
        .collect();
    let mut values = vec![0.0; plan.cycles * n];
    for (p, col) in columns.iter().enumerate() {
        for (c, v) in col.iter().enumerate() {
            values[c * n + p] = *v;
        }
    }
    SimulatedSample {
        plan: *plan,
        values,
        unit_roles: roles,
    }
}

fn require_scheme(plan: &SamplingPlan, scheme: SamplingScheme) -> Result<()> {
    if plan.scheme != scheme {
        return Err(Error::Domain(format!(
            "plan scheme is {}, expected {scheme}",
            plan.scheme
        )));
    }
    Ok(())
}

/// ERSS: even n measures n/2 set minima then n/2 set maxima; odd n measures
/// (n−1)/2 of each and the median of the last set.
pub fn draw_erss(dist: &DistributionSpec, plan: &SamplingPlan) -> Result<SimulatedSample> {
    require_scheme(plan, SamplingScheme::Erss)?;
    Ok(simulate(dist, plan))
}

/// RSS: position i measures the i-th smallest unit of its own set.
pub fn draw_rss(dist: &DistributionSpec, plan: &SamplingPlan) -> Result<SimulatedSample> {
    require_scheme(plan, SamplingScheme::Rss)?;
    Ok(simulate(dist, plan))
}

/// SRS: n iid draws per cycle.
pub fn draw_srs(dist: &DistributionSpec, plan: &SamplingPlan) -> Result<SimulatedSample> {
    require_scheme(plan, SamplingScheme::Srs)?;
    Ok(simulate(dist, plan))
}

/// Dispatches on `plan.scheme`.
pub fn draw(dist: &DistributionSpec, plan: &SamplingPlan) -> SimulatedSample {
    simulate(dist, plan)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    pub statistic: f64,
    pub critical_value: f64,
    pub alpha: f64,
    pub sample_size: usize,
    pub pass: bool,
}

/// Two-sided one-sample KS statistic sup |F_N − F|.
pub fn ks_statistic<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> f64 {
    let mut xs = values.to_vec();
    xs.sort_unstable_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic critical value sqrt(−½ ln(α/2)) / √N.
pub fn ks_critical_value(alpha: f64, sample_size: usize) -> f64 {
    (-0.5 * (alpha / 2.0).ln()).sqrt() / (sample_size as f64).sqrt()
}

pub fn ks_test<F: Fn(f64) -> f64>(values: &[f64], cdf: F, alpha: f64) -> Result<KsReport> {
    if values.len() < MIN_KS_CYCLES {
        return Err(Error::InsufficientData {
            got: values.len(),
            need: MIN_KS_CYCLES,
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "KS level α = {alpha} outside (0, 1)"
        )));
    }
    let statistic = ks_statistic(values, cdf);
    let critical_value = ks_critical_value(alpha, values.len());
    Ok(KsReport {
        statistic,
        critical_value,
        alpha,
        sample_size: values.len(),
        pass: statistic < critical_value,
    })
}

/// KS test of one position against its order-statistic cdf F_{i,n}.
pub fn ks_marginal_check(
    sample: &SimulatedSample,
    position: usize,
    dist: &DistributionSpec,
    alpha: f64,
) -> Result<KsReport> {
    let role = *sample.unit_roles.get(position).ok_or_else(|| {
        Error::Domain(format!(
            "position {position} outside 0..{}",
            sample.unit_roles.len()
        ))
    })?;
    let column = sample.column(position);
    match role.rank(sample.plan.n) {
        Some(i) => {
            let spec = OrderStatDensitySpec::new(i, sample.plan.n, dist.clone())?;
            ks_test(&column, |x| spec.cdf(x), alpha)
        }
        None => ks_test(&column, |x| dist.cdf(x), alpha),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub standard_error: f64,
    pub draws: usize,
}

/// E Λ(B_{k:2n−1}) by sorting 2n−1 uniforms per draw.
pub fn mc_beta_expectation(
    dist: &DistributionSpec,
    w: &WeightSpec,
    k: u32,
    n: u32,
    draws: usize,
    seed: u64,
) -> Result<McEstimate> {
    if n == 0 {
        return Err(Error::Domain("set size n must be ≥ 1".into()));
    }
    let total = 2 * n - 1;
    if k != 1 && k != n && k != total {
        return Err(Error::Domain(format!(
            "beta index k = {k} must be 1, n = {n} or 2n−1 = {total}"
        )));
    }
    if draws < MIN_MC_DRAWS {
        return Err(Error::InsufficientData {
            got: draws,
            need: MIN_MC_DRAWS,
        });
    }
    let profile = LambdaProfile::new(dist.clone(), w.clone())?;
    let chunks = draws.div_ceil(MC_CHUNK);
    let sums: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = stream(seed, ((k as u64) << 32) | chunk as u64);
            let mut set = vec![0.0; total as usize];
            let len = MC_CHUNK.min(draws - chunk * MC_CHUNK);
            let mut s = 0.0;
            let mut s2 = 0.0;
            for _ in 0..len {
                sorted_uniforms(&mut rng, &mut set);
                let v = profile.eval_unchecked(set[k as usize - 1]);
                s += v;
                s2 += v * v;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = sums
        .iter()
        .fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    let nd = draws as f64;
    let mean = s / nd;
    let var = ((s2 - nd * mean * mean) / (nd - 1.0)).max(0.0);
    Ok(McEstimate {
        estimate: mean,
        standard_error: (var / nd).sqrt(),
        draws,
    })
}

/// ERSS GWE assembled from Monte Carlo beta expectations.
///
/// Each factor uses its own streams, so the factors are independent and the
/// error estimate is the first-order propagation of their standard errors.
pub fn mc_gwe_erss(
    dist: &DistributionSpec,
    w: &WeightSpec,
    n: u32,
    draws: usize,
    seed: u64,
) -> Result<GweResult> {
    let layout = ErssLayout::new(n)?;
    let total = 2 * n - 1;
    let mut parts: Vec<(u32, u32)> = Vec::new();
    if layout.extremes > 0 {
        parts.push((1, layout.extremes));
        parts.push((total, layout.extremes));
    }
    if layout.median {
        parts.push((n, 1));
    }
    let est = parts
        .iter()
        .map(|&(k, p)| mc_beta_expectation(dist, w, k, n, draws, seed).map(|e| (e, p)))
        .collect::<Result<Vec<_>>>()?;
    let prefactor = QConstants::new(n)?
        .erss_prefactor()
        .mul(LogValue::from_f64(0.5));
    let mut value = prefactor;
    for (e, p) in &est {
        value = value.mul(LogValue::from_f64(e.estimate).powi(*p));
    }
    let value = value.to_f64();
    let mut var = 0.0;
    for (j, (e, p)) in est.iter().enumerate() {
        // ∂/∂E_j of c·∏ E_l^{p_l}
        let mut d = prefactor
            .mul(LogValue::from_f64(*p as f64))
            .mul(LogValue::from_f64(e.estimate).powi(p - 1));
        for (l, (o, q)) in est.iter().enumerate() {
            if l != j {
                d = d.mul(LogValue::from_f64(o.estimate).powi(*q));
            }
        }
        var += (d.to_f64() * e.standard_error).powi(2);
    }
    Ok(GweResult {
        value,
        scheme: Scheme::Erss,
        n,
        method: Method::MonteCarlo,
        error_estimate: var.sqrt(),
        converged: true,
    })
}
