//! Parametric families, weight functions and the densities the GWE formulas
//! consume.
//!
//! Every evaluator here is a pure function of an immutable spec, so specs can
//! be shared freely across threads.

use std::fmt;
use std::sync::Arc;

use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};
use crate::special::ln_factorial;

/// A scalar function shared between threads.
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

// ---------------------------------------------------------------------------
// Monotone maps
// ---------------------------------------------------------------------------

/// A strictly increasing, differentiable map used to build transformed
/// distributions `V = η(X)`.
#[derive(Clone)]
pub struct MonotoneMap {
    kind: MapKind,
}

#[derive(Clone)]
enum MapKind {
    Affine {
        scale: f64,
        shift: f64,
    },
    Expm1,
    Custom {
        name: String,
        forward: RealFn,
        inverse: RealFn,
        derivative: RealFn,
    },
}

impl MonotoneMap {
    pub fn identity() -> Self {
        MonotoneMap {
            kind: MapKind::Affine {
                scale: 1.0,
                shift: 0.0,
            },
        }
    }

    /// `x ↦ scale·x + shift` with `scale > 0`.
    pub fn affine(scale: f64, shift: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite() && shift.is_finite()) {
            return Err(Error::ParameterDomain(format!(
                "affine map needs scale > 0 and finite shift, got scale={scale}, shift={shift}"
            )));
        }
        Ok(MonotoneMap {
            kind: MapKind::Affine { scale, shift },
        })
    }

    pub fn shift(by: f64) -> Result<Self> {
        Self::affine(1.0, by)
    }

    /// `x ↦ eˣ − 1`.
    pub fn expm1() -> Self {
        MonotoneMap {
            kind: MapKind::Expm1,
        }
    }

    /// A caller-supplied increasing map. The three functions must be
    /// consistent; nothing here verifies that.
    pub fn custom(
        name: impl Into<String>,
        forward: impl Fn(f64) -> f64 + Send + Sync + 'static,
        inverse: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        MonotoneMap {
            kind: MapKind::Custom {
                name: name.into(),
                forward: Arc::new(forward),
                inverse: Arc::new(inverse),
                derivative: Arc::new(derivative),
            },
        }
    }

    pub fn apply(&self, x: f64) -> f64 {
        match &self.kind {
            MapKind::Affine { scale, shift } => scale * x + shift,
            MapKind::Expm1 => x.exp_m1(),
            MapKind::Custom { forward, .. } => forward(x),
        }
    }

    pub fn inverse(&self, y: f64) -> f64 {
        match &self.kind {
            MapKind::Affine { scale, shift } => (y - shift) / scale,
            MapKind::Expm1 => y.ln_1p(),
            MapKind::Custom { inverse, .. } => inverse(y),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match &self.kind {
            MapKind::Affine { scale, .. } => *scale,
            MapKind::Expm1 => x.exp(),
            MapKind::Custom { derivative, .. } => derivative(x),
        }
    }

    pub fn name(&self) -> String {
        match &self.kind {
            MapKind::Affine { scale, shift } => format!("affine({scale},{shift})"),
            MapKind::Expm1 => "expm1".to_string(),
            MapKind::Custom { name, .. } => name.clone(),
        }
    }
}

impl fmt::Debug for MonotoneMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MonotoneMap({})", self.name())
    }
}

// ---------------------------------------------------------------------------
// Tabulated CDF
// ---------------------------------------------------------------------------

/// Monotone piecewise-cubic (PCHIP) interpolant of a tabulated CDF.
///
/// The first and last table values are pinned to exactly 0 and 1.
#[derive(Debug, Clone)]
pub struct TabulatedCdf {
    xs: Vec<f64>,
    fs: Vec<f64>,
    slopes: Vec<f64>,
}

impl TabulatedCdf {
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::ParameterDomain(
                "tabulated cdf needs at least two points".into(),
            ));
        }
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let mut fs: Vec<f64> = points.iter().map(|p| p.1).collect();
        if xs.iter().chain(fs.iter()).any(|v| !v.is_finite()) {
            return Err(Error::ParameterDomain(
                "tabulated cdf values must be finite".into(),
            ));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::ParameterDomain(
                "tabulated cdf abscissae must be strictly increasing".into(),
            ));
        }
        if fs.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::ParameterDomain(
                "tabulated cdf values must be nondecreasing".into(),
            ));
        }
        let last = fs.len() - 1;
        if fs[0].abs() > 1e-9 || (fs[last] - 1.0).abs() > 1e-9 {
            return Err(Error::ParameterDomain(format!(
                "tabulated cdf must start at 0 and end at 1, got {} and {}",
                fs[0], fs[last]
            )));
        }
        fs[0] = 0.0;
        fs[last] = 1.0;
        let slopes = pchip_slopes(&xs, &fs);
        Ok(TabulatedCdf { xs, fs, slopes })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }

    pub fn knot_probabilities(&self) -> &[f64] {
        &self.fs
    }

    fn segment(&self, x: f64) -> usize {
        let k = self.xs.partition_point(|&v| v <= x);
        k.saturating_sub(1).min(self.xs.len() - 2)
    }

    fn hermite(&self, k: usize, x: f64) -> (f64, f64) {
        let h = self.xs[k + 1] - self.xs[k];
        let t = (x - self.xs[k]) / h;
        let (y0, y1) = (self.fs[k], self.fs[k + 1]);
        let (d0, d1) = (self.slopes[k], self.slopes[k + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let value = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * h * d0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * h * d1;
        let deriv = (6.0 * t2 - 6.0 * t) * (y0 - y1) / h
            + (3.0 * t2 - 4.0 * t + 1.0) * d0
            + (3.0 * t2 - 2.0 * t) * d1;
        (value, deriv)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        self.hermite(self.segment(x), x).0.clamp(0.0, 1.0)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return 0.0;
        }
        self.hermite(self.segment(x), x).1.max(0.0)
    }

    pub fn quantile(&self, u: f64) -> f64 {
        // first segment whose right value reaches u
        let k = self
            .fs
            .partition_point(|&f| f < u)
            .saturating_sub(1)
            .min(self.xs.len() - 2);
        let (mut a, mut b) = (self.xs[k], self.xs[k + 1]);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if self.hermite(k, mid).0 < u {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    }
}

/// Fritsch–Carlson style slopes with the three-point, shape-preserving end
/// conditions used by PCHIP.
fn pchip_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (ys[k + 1] - ys[k]) / h[k]).collect();
    if n == 2 {
        return vec![delta[0], delta[0]];
    }
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] <= 0.0 {
            d[k] = 0.0;
        } else {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    let edge = |h0: f64, h1: f64, m0: f64, m1: f64| {
        let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
        if d.signum() != m0.signum() {
            0.0
        } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
            3.0 * m0
        } else {
            d
        }
    };
    d[0] = edge(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = edge(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

// ---------------------------------------------------------------------------
// Distribution families
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub enum Family {
    /// f(x) = θ x^{θ−1} on (0, 1).
    Power {
        theta: f64,
    },
    /// f(x) = λ e^{−λx} on (0, ∞).
    Exponential {
        rate: f64,
    },
    /// F(x) = 1 − x^{−α} on (1, ∞).
    Pareto {
        shape: f64,
    },
    Uniform {
        lower: f64,
        upper: f64,
    },
    /// f(x) = 2x on (0, 1).
    TriangularUp,
    /// f(x) = 2(1 − x) on (0, 1).
    TriangularDown,
    Tabulated(Arc<TabulatedCdf>),
    /// Law of η(X) for an increasing map η.
    Transformed {
        base: Box<DistributionSpec>,
        map: MonotoneMap,
    },
}

/// A validated distribution with pdf, cdf and quantile evaluators.
///
/// `mean` and `variance` are optional metadata; none of the GWE formulas
/// depend on them.
#[derive(Debug, Clone)]
pub struct DistributionSpec {
    family: Family,
    pub mean: Option<f64>,
    pub variance: Option<f64>,
}

fn positive(name: &str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::ParameterDomain(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

impl DistributionSpec {
    pub fn power(theta: f64) -> Result<Self> {
        let theta = positive("power shape θ", theta)?;
        Ok(DistributionSpec {
            family: Family::Power { theta },
            mean: Some(theta / (theta + 1.0)),
            variance: Some(theta / ((theta + 2.0) * (theta + 1.0).powi(2))),
        })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        let rate = positive("exponential rate λ", rate)?;
        Ok(DistributionSpec {
            family: Family::Exponential { rate },
            mean: Some(1.0 / rate),
            variance: Some(1.0 / (rate * rate)),
        })
    }

    pub fn pareto(shape: f64) -> Result<Self> {
        let a = positive("pareto shape α", shape)?;
        Ok(DistributionSpec {
            family: Family::Pareto { shape: a },
            mean: (a > 1.0).then(|| a / (a - 1.0)),
            variance: (a > 2.0).then(|| a / ((a - 1.0).powi(2) * (a - 2.0))),
        })
    }

    pub fn uniform(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(Error::ParameterDomain(format!(
                "uniform needs finite a < b, got a={lower}, b={upper}"
            )));
        }
        Ok(DistributionSpec {
            family: Family::Uniform { lower, upper },
            mean: Some(0.5 * (lower + upper)),
            variance: Some((upper - lower).powi(2) / 12.0),
        })
    }

    pub fn triangular_up() -> Self {
        DistributionSpec {
            family: Family::TriangularUp,
            mean: Some(2.0 / 3.0),
            variance: Some(1.0 / 18.0),
        }
    }

    pub fn triangular_down() -> Self {
        DistributionSpec {
            family: Family::TriangularDown,
            mean: Some(1.0 / 3.0),
            variance: Some(1.0 / 18.0),
        }
    }

    pub fn tabulated(points: &[(f64, f64)]) -> Result<Self> {
        Ok(DistributionSpec {
            family: Family::Tabulated(Arc::new(TabulatedCdf::new(points)?)),
            mean: None,
            variance: None,
        })
    }

    /// Law of `map(X)`.
    pub fn transformed(base: DistributionSpec, map: MonotoneMap) -> Self {
        let affine = match &map.kind {
            MapKind::Affine { scale, shift } => Some((*scale, *shift)),
            _ => None,
        };
        let mean = affine.and_then(|(s, c)| base.mean.map(|m| s * m + c));
        let variance = affine.and_then(|(s, _)| base.variance.map(|v| s * s * v));
        DistributionSpec {
            family: Family::Transformed {
                base: Box::new(base),
                map,
            },
            mean,
            variance,
        }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Short family tag as used by the CLI (`power`, `exponential`, ...).
    pub fn family_name(&self) -> &'static str {
        match &self.family {
            Family::Power { .. } => "power",
            Family::Exponential { .. } => "exponential",
            Family::Pareto { .. } => "pareto",
            Family::Uniform { .. } => "uniform",
            Family::TriangularUp => "triangular_up",
            Family::TriangularDown => "triangular_down",
            Family::Tabulated(_) => "custom_tabulated",
            Family::Transformed { .. } => "transformed",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match &self.family {
            Family::Power { theta } => vec![*theta],
            Family::Exponential { rate } => vec![*rate],
            Family::Pareto { shape } => vec![*shape],
            Family::Uniform { lower, upper } => vec![*lower, *upper],
            _ => Vec::new(),
        }
    }

    pub fn label(&self) -> String {
        match &self.family {
            Family::Transformed { base, map } => format!("{}({})", map.name(), base.label()),
            _ => {
                let p = self.params();
                if p.is_empty() {
                    self.family_name().to_string()
                } else {
                    let parts: Vec<String> = p.iter().map(|v| v.to_string()).collect();
                    format!("{}({})", self.family_name(), parts.join(","))
                }
            }
        }
    }

    /// The support interval (l_X, u_X); infinite ends are `±inf`.
    pub fn support(&self) -> (f64, f64) {
        match &self.family {
            Family::Power { .. } | Family::TriangularUp | Family::TriangularDown => (0.0, 1.0),
            Family::Exponential { .. } => (0.0, f64::INFINITY),
            Family::Pareto { .. } => (1.0, f64::INFINITY),
            Family::Uniform { lower, upper } => (*lower, *upper),
            Family::Tabulated(t) => t.support(),
            Family::Transformed { base, map } => {
                let (lo, hi) = base.support();
                (map.apply(lo), map.apply(hi))
            }
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.support().0 >= 0.0
    }

    fn outside(&self, x: f64) -> bool {
        let (lo, hi) = self.support();
        x < lo || x > hi
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x.is_nan() || self.outside(x) {
            return 0.0;
        }
        match &self.family {
            Family::Power { theta } => theta * x.powf(theta - 1.0),
            Family::Exponential { rate } => rate * (-rate * x).exp(),
            Family::Pareto { shape } => shape * x.powf(-shape - 1.0),
            Family::Uniform { lower, upper } => 1.0 / (upper - lower),
            Family::TriangularUp => 2.0 * x,
            Family::TriangularDown => 2.0 * (1.0 - x),
            Family::Tabulated(t) => t.pdf(x),
            Family::Transformed { base, map } => {
                let z = map.inverse(x);
                base.pdf(z) / map.derivative(z)
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        match &self.family {
            Family::Power { theta } => x.powf(*theta),
            Family::Exponential { rate } => -(-rate * x).exp_m1(),
            Family::Pareto { shape } => -(-shape * x.ln()).exp_m1(),
            Family::Uniform { lower, upper } => (x - lower) / (upper - lower),
            Family::TriangularUp => x * x,
            Family::TriangularDown => 1.0 - (1.0 - x) * (1.0 - x),
            Family::Tabulated(t) => t.cdf(x),
            Family::Transformed { base, map } => base.cdf(map.inverse(x)),
        }
    }

    /// Survival function F̄ = 1 − F, evaluated without cancellation where the
    /// family allows it.
    pub fn sf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            return 1.0;
        }
        if x >= hi {
            return 0.0;
        }
        match &self.family {
            Family::Power { theta } => -(theta * x.ln()).exp_m1(),
            Family::Exponential { rate } => (-rate * x).exp(),
            Family::Pareto { shape } => x.powf(-shape),
            Family::Uniform { lower, upper } => (upper - x) / (upper - lower),
            Family::TriangularUp => 1.0 - x * x,
            Family::TriangularDown => (1.0 - x) * (1.0 - x),
            Family::Tabulated(t) => 1.0 - t.cdf(x),
            Family::Transformed { base, map } => base.sf(map.inverse(x)),
        }
    }

    /// F⁻¹(u) for `0 < u < 1`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        check_unit(u)?;
        Ok(self.quantile_unchecked(u))
    }

    pub(crate) fn quantile_unchecked(&self, u: f64) -> f64 {
        match &self.family {
            Family::Power { theta } => u.powf(1.0 / theta),
            Family::Exponential { rate } => -(-u).ln_1p() / rate,
            Family::Pareto { shape } => (-(-u).ln_1p() / shape).exp(),
            Family::Uniform { lower, upper } => lower + (upper - lower) * u,
            Family::TriangularUp => u.sqrt(),
            Family::TriangularDown => 1.0 - (1.0 - u).sqrt(),
            Family::Tabulated(t) => t.quantile(u),
            Family::Transformed { base, map } => map.apply(base.quantile_unchecked(u)),
        }
    }

    /// Points in u-space where the quantile function is only piecewise smooth.
    pub fn u_breakpoints(&self) -> Vec<f64> {
        match &self.family {
            Family::Tabulated(t) => interior(t.knot_probabilities(), 0.0, 1.0),
            Family::Transformed { base, .. } => base.u_breakpoints(),
            _ => Vec::new(),
        }
    }

    /// Points in x-space where the density is only piecewise smooth.
    pub fn x_breakpoints(&self) -> Vec<f64> {
        match &self.family {
            Family::Tabulated(t) => {
                let (lo, hi) = t.support();
                interior(t.knots(), lo, hi)
            }
            Family::Transformed { base, map } => {
                base.x_breakpoints().iter().map(|&x| map.apply(x)).collect()
            }
            _ => Vec::new(),
        }
    }

    /// Symmetric grid of `size` points in (0, 1), geometrically refined toward
    /// both ends.
    pub fn unit_grid(size: usize) -> Vec<f64> {
        unit_grid(size)
    }
}

fn interior(v: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut out: Vec<f64> = v.iter().copied().filter(|&p| p > lo && p < hi).collect();
    out.dedup();
    out
}

fn check_unit(u: f64) -> Result<()> {
    if u > 0.0 && u < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("u must lie in (0, 1), got {u}")))
    }
}

/// Grid on (0, 1) with half the points log-spaced toward each endpoint
/// (down to 1e−9) and the rest uniform.
pub fn unit_grid(size: usize) -> Vec<f64> {
    let size = size.max(8);
    let tail = size / 4;
    let body = size - 2 * tail;
    let mut g = Vec::with_capacity(size);
    let (lo_exp, hi_exp) = (-9.0_f64, -2.0_f64);
    for k in 0..tail {
        let e = lo_exp + (hi_exp - lo_exp) * k as f64 / tail as f64;
        g.push(10f64.powf(e));
    }
    for k in 0..body {
        g.push(0.01 + 0.98 * (k as f64 + 0.5) / body as f64);
    }
    for k in (0..tail).rev() {
        let e = lo_exp + (hi_exp - lo_exp) * k as f64 / tail as f64;
        g.push(1.0 - 10f64.powf(e));
    }
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

// ---------------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------------

#[derive(Clone)]
pub enum WeightKind {
    /// w(x) = x^m.
    Power {
        m: f64,
    },
    Identity,
    OddCustom {
        name: String,
        func: RealFn,
    },
    /// Piecewise-linear interpolation of an (x, w) table; NaN off-table.
    Tabulated(Arc<Vec<(f64, f64)>>),
}

impl fmt::Debug for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightKind::Power { m } => write!(f, "Power {{ m: {m} }}"),
            WeightKind::Identity => write!(f, "Identity"),
            WeightKind::OddCustom { name, .. } => write!(f, "OddCustom({name})"),
            WeightKind::Tabulated(t) => write!(f, "Tabulated({} points)", t.len()),
        }
    }
}

/// A weight function with declared sign and monotonicity metadata.
///
/// The flags describe the weight on the positive half-line for the built-in
/// kinds; use [`WeightSpec::is_nonnegative_on`] to test a concrete support.
#[derive(Debug, Clone)]
pub struct WeightSpec {
    pub kind: WeightKind,
    pub is_nonnegative_on_support: bool,
    pub is_increasing: bool,
    pub is_odd: bool,
}

impl WeightSpec {
    pub fn power(m: f64) -> Result<Self> {
        let m = positive("weight exponent m", m)?;
        let odd_integer = m.fract() == 0.0 && (m as i64) % 2 == 1;
        Ok(WeightSpec {
            kind: WeightKind::Power { m },
            is_nonnegative_on_support: true,
            is_increasing: true,
            is_odd: odd_integer,
        })
    }

    pub fn identity() -> Self {
        WeightSpec {
            kind: WeightKind::Identity,
            is_nonnegative_on_support: true,
            is_increasing: true,
            is_odd: true,
        }
    }

    pub fn odd_custom(
        name: impl Into<String>,
        func: impl Fn(f64) -> f64 + Send + Sync + 'static,
        is_increasing: bool,
    ) -> Self {
        WeightSpec {
            kind: WeightKind::OddCustom {
                name: name.into(),
                func: Arc::new(func),
            },
            is_nonnegative_on_support: false,
            is_increasing,
            is_odd: true,
        }
    }

    pub fn tabulated(
        points: &[(f64, f64)],
        is_nonnegative_on_support: bool,
        is_increasing: bool,
    ) -> Result<Self> {
        if points.len() < 2 || points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::ParameterDomain(
                "tabulated weight needs ≥2 points with increasing x".into(),
            ));
        }
        Ok(WeightSpec {
            kind: WeightKind::Tabulated(Arc::new(points.to_vec())),
            is_nonnegative_on_support,
            is_increasing,
            is_odd: false,
        })
    }

    /// Exponent m when the weight is x^m (identity counts as m = 1).
    pub fn power_exponent(&self) -> Option<f64> {
        match self.kind {
            WeightKind::Power { m } => Some(m),
            WeightKind::Identity => Some(1.0),
            _ => None,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            WeightKind::Power { m } => {
                if m.fract() == 0.0 && m.abs() < i32::MAX as f64 {
                    x.powi(*m as i32)
                } else if x < 0.0 {
                    f64::NAN
                } else {
                    x.powf(*m)
                }
            }
            WeightKind::Identity => x,
            WeightKind::OddCustom { func, .. } => func(x),
            WeightKind::Tabulated(t) => {
                let k = t.partition_point(|p| p.0 <= x);
                if k == 0 || (k == t.len() && x > t[t.len() - 1].0) {
                    return f64::NAN;
                }
                if k == t.len() {
                    return t[t.len() - 1].1;
                }
                let (x0, y0) = t[k - 1];
                let (x1, y1) = t[k];
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        }
    }

    /// Grid test of w(−x) = −w(x).
    pub fn check_odd(&self, xs: &[f64]) -> bool {
        xs.iter().all(|&x| {
            let (a, b) = (self.eval(x), self.eval(-x));
            (a + b).abs() <= 1e-12 * a.abs().max(1.0)
        })
    }

    /// Grid test that w ≥ 0 on the support of `dist`.
    pub fn is_nonnegative_on(&self, dist: &DistributionSpec, grid: usize) -> bool {
        unit_grid(grid)
            .into_iter()
            .all(|u| self.eval(dist.quantile_unchecked(u)) >= 0.0)
    }

    pub fn label(&self) -> String {
        match &self.kind {
            WeightKind::Power { m } => format!("x^{m}"),
            WeightKind::Identity => "x".into(),
            WeightKind::OddCustom { name, .. } => name.clone(),
            WeightKind::Tabulated(_) => "tabulated".into(),
        }
    }
}

// ---------------------------------------------------------------------------
// Quantile-weighted density Λ
// ---------------------------------------------------------------------------

/// Λ(u) = w(F⁻¹(u))·f(F⁻¹(u)) on (0, 1).
#[derive(Debug, Clone)]
pub struct LambdaProfile {
    pub dist: DistributionSpec,
    pub weight: WeightSpec,
}

impl LambdaProfile {
    /// Rejects (family, weight) pairs whose GWE integrals diverge: power
    /// needs m + 2θ − 1 > 0 and Pareto needs 2α − m + 1 > 0 for w = x^m.
    pub fn new(dist: DistributionSpec, weight: WeightSpec) -> Result<Self> {
        check_feasible(&dist, &weight)?;
        Ok(LambdaProfile { dist, weight })
    }

    pub fn eval(&self, u: f64) -> Result<f64> {
        check_unit(u)?;
        let v = self.eval_unchecked(u);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation {
                abscissa: u,
                value: v,
            })
        }
    }

    /// Closed form for power, exponential and Pareto with w = x^m, generic
    /// composition otherwise.
    pub(crate) fn eval_unchecked(&self, u: f64) -> f64 {
        match (self.dist.family(), self.weight.power_exponent()) {
            (Family::Power { theta }, Some(m)) => theta * u.powf((m + theta - 1.0) / theta),
            (Family::Exponential { rate }, Some(m)) => {
                let tail = 1.0 - u;
                let l = -(-u).ln_1p();
                tail * l.powf(m) / rate.powf(m - 1.0)
            }
            (Family::Pareto { shape }, Some(m)) => {
                shape * ((shape - m + 1.0) / shape * (-u).ln_1p()).exp()
            }
            _ => self.eval_composed(u),
        }
    }

    /// Λ by composing the weight, pdf and quantile evaluators.
    pub fn eval_composed(&self, u: f64) -> f64 {
        let x = self.dist.quantile_unchecked(u);
        self.weight.eval(x) * self.dist.pdf(x)
    }
}

pub fn check_feasible(dist: &DistributionSpec, weight: &WeightSpec) -> Result<()> {
    match (dist.family(), weight.power_exponent()) {
        (Family::Power { theta }, Some(m)) if m + 2.0 * theta - 1.0 <= 0.0 => {
            Err(Error::ParameterDomain(format!(
                "power(θ={theta}) with w=x^{m}: need m + 2θ − 1 > 0 for a finite GWE"
            )))
        }
        (Family::Pareto { shape }, Some(m)) if 2.0 * shape - m + 1.0 <= 0.0 => {
            Err(Error::ParameterDomain(format!(
                "pareto(α={shape}) with w=x^{m}: need 2α − m + 1 > 0 for a finite GWE"
            )))
        }
        _ => Ok(()),
    }
}

// ---------------------------------------------------------------------------
// Order-statistic densities
// ---------------------------------------------------------------------------

/// Density of the i-th order statistic of n iid draws from `base`.
#[derive(Debug, Clone)]
pub struct OrderStatDensitySpec {
    pub i: u32,
    pub n: u32,
    pub base: DistributionSpec,
    ln_coef: f64,
}

impl OrderStatDensitySpec {
    pub fn new(i: u32, n: u32, base: DistributionSpec) -> Result<Self> {
        check_rank(i, n)?;
        let ln_coef =
            ln_factorial(n as u64) - ln_factorial(i as u64 - 1) - ln_factorial((n - i) as u64);
        Ok(OrderStatDensitySpec {
            i,
            n,
            base,
            ln_coef,
        })
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let f = self.base.pdf(x);
        if f == 0.0 {
            return 0.0;
        }
        let cdf = self.base.cdf(x);
        let sf = self.base.sf(x);
        self.ln_coef.exp() * cdf.powi(self.i as i32 - 1) * sf.powi((self.n - self.i) as i32) * f
    }

    /// P(X_{i:n} ≤ x) = I_{F(x)}(i, n − i + 1).
    pub fn cdf(&self, x: f64) -> f64 {
        let p = self.base.cdf(x);
        if p <= 0.0 {
            0.0
        } else if p >= 1.0 {
            1.0
        } else {
            beta_reg(self.i as f64, (self.n - self.i + 1) as f64, p)
        }
    }
}

fn check_rank(i: u32, n: u32) -> Result<()> {
    if n >= 1 && i >= 1 && i <= n {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "rank i={i} must satisfy 1 ≤ i ≤ n={n}"
        )))
    }
}

/// Density of the k-th order statistic of `total` uniforms, i.e. the
/// Beta(k, total − k + 1) density, with log-space coefficients.
pub fn beta_order_density(k: u32, total: u32, u: f64) -> Result<f64> {
    check_rank(k, total)?;
    check_unit(u)?;
    let ln_c =
        ln_factorial(total as u64) - ln_factorial(k as u64 - 1) - ln_factorial((total - k) as u64);
    let lu = if k > 1 { (k - 1) as f64 * u.ln() } else { 0.0 };
    let lv = if total > k {
        (total - k) as f64 * (-u).ln_1p()
    } else {
        0.0
    };
    Ok((ln_c + lu + lv).exp())
}

// ---------------------------------------------------------------------------
// Free-function evaluators
// ---------------------------------------------------------------------------

pub fn pdf_at(dist: &DistributionSpec, x: f64) -> f64 {
    dist.pdf(x)
}

pub fn quantile_at(dist: &DistributionSpec, u: f64) -> Result<f64> {
    dist.quantile(u)
}

pub fn lambda_at(profile: &LambdaProfile, u: f64) -> Result<f64> {
    profile.eval(u)
}

pub fn order_stat_pdf_at(spec: &OrderStatDensitySpec, x: f64) -> f64 {
    spec.pdf(x)
}

/// φ_{2i−1:2n−1}(u), the Beta(2i − 1, 2n − 2i + 1) density.
pub fn beta_phi_at(i: u32, n: u32, u: f64) -> Result<f64> {
    check_rank(i, n)?;
    beta_order_density(2 * i - 1, 2 * n - 1, u)
}

/// ψ_{2i−1:2n}(x): density of the (2i − 1)-th order statistic of 2n standard
/// exponentials.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // rejects NaN too
pub fn exp_order_stat_pdf_at(i: u32, n: u32, x: f64) -> Result<f64> {
    check_rank(i, n)?;
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("x must be ≥ 0, got {x}")));
    }
    let ln_c = ln_factorial(2 * n as u64)
        - ln_factorial(2 * i as u64 - 2)
        - ln_factorial((2 * n - 2 * i + 1) as u64);
    let head = (-(-x).exp_m1()).powi(2 * i as i32 - 2);
    let tail = (-((2 * n - 2 * i + 2) as f64) * x).exp();
    Ok(ln_c.exp() * head * tail)
}
