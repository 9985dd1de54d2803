//! C ABI for `erss-extropy`.
//!
//! Objects are exposed as opaque handles created by `erss_*_new`/`erss_dist_*`
//! constructors and released with the matching `*_free`. Every fallible
//! function returns an [`ErssStatus`]; on failure a message is available from
//! [`erss_last_error_message`] on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use erss_extropy::distributions::{DistributionSpec, WeightSpec};
use erss_extropy::extropy::{Engine, GweResult, Method, QConstants};
use erss_extropy::quadrature::Tolerance;
use erss_extropy::Error;

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErssStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidString = 2,
    ParameterDomain = 3,
    Domain = 4,
    Evaluation = 5,
    InsufficientData = 6,
    DegenerateRatio = 7,
    NotApplicable = 8,
    Panic = 99,
}

/// How a value was obtained.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErssMethod {
    ClosedForm = 0,
    QuantileQuadrature = 1,
    DensityQuadrature = 2,
    MonteCarlo = 3,
}

/// A GWE value with its error estimate.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErssResult {
    pub value: f64,
    pub error_estimate: f64,
    pub converged: bool,
    pub method: ErssMethod,
}

/// Opaque distribution handle.
pub struct ErssDistribution(DistributionSpec);

/// Opaque weight handle.
pub struct ErssWeight(WeightSpec);

/// Opaque engine handle holding the quadrature tolerances.
pub struct ErssEngine(Engine);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> ErssStatus {
    match e {
        Error::ParameterDomain(_) => ErssStatus::ParameterDomain,
        Error::Domain(_) => ErssStatus::Domain,
        Error::Evaluation { .. } => ErssStatus::Evaluation,
        Error::InsufficientData { .. } => ErssStatus::InsufficientData,
        Error::DegenerateRatio => ErssStatus::DegenerateRatio,
        Error::NotApplicable(_) => ErssStatus::NotApplicable,
    }
}

enum Fail {
    Null(&'static str),
    Utf8,
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> ErssStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            ErssStatus::Ok
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            ErssStatus::NullPointer
        }
        Ok(Err(Fail::Utf8)) => {
            set_error("string is not valid UTF-8".into());
            ErssStatus::InvalidString
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            ErssStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null(what));
    }
    out.write(value);
    Ok(())
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

fn to_result(r: GweResult) -> ErssResult {
    ErssResult {
        value: r.value,
        error_estimate: r.error_estimate,
        converged: r.converged,
        method: match r.method {
            Method::ClosedForm => ErssMethod::ClosedForm,
            Method::QuantileQuadrature => ErssMethod::QuantileQuadrature,
            Method::DensityQuadrature => ErssMethod::DensityQuadrature,
            Method::MonteCarlo => ErssMethod::MonteCarlo,
        },
    }
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length in bytes, excluding the
/// terminator; pass a null `buf` to query it.
///
/// # Safety
/// `buf` must be null or point to at least `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn erss_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Static NUL-terminated version string.
#[no_mangle]
pub extern "C" fn erss_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

unsafe fn make_dist(
    out: *mut *mut ErssDistribution,
    make: impl FnOnce() -> erss_extropy::Result<DistributionSpec>,
) -> ErssStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let d = make()?;
        out.write(boxed(ErssDistribution(d)));
        Ok(())
    })
}

/// Power distribution F(x) = x^θ on [0, 1].
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn erss_dist_power(
    theta: f64,
    out: *mut *mut ErssDistribution,
) -> ErssStatus {
    make_dist(out, || DistributionSpec::power(theta))
}

/// Exponential distribution with the given rate.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn erss_dist_exponential(
    rate: f64,
    out: *mut *mut ErssDistribution,
) -> ErssStatus {
    make_dist(out, || DistributionSpec::exponential(rate))
}

/// Pareto distribution F(x) = 1 − x^{−α} on [1, ∞).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn erss_dist_pareto(
    shape: f64,
    out: *mut *mut ErssDistribution,
) -> ErssStatus {
    make_dist(out, || DistributionSpec::pareto(shape))
}

/// Uniform distribution on [lower, upper].
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn erss_dist_uniform(
    lower: f64,
    upper: f64,
    out: *mut *mut ErssDistribution,
) -> ErssStatus {
    make_dist(out, || DistributionSpec::uniform(lower, upper))
}

/// Parses a distribution spec as accepted by the command line, e.g.
/// `"exponential:2"` or `"triangular_up@-0.5"`.
///
/// # Safety
/// `spec` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn erss_dist_parse(
    spec: *const c_char,
    out: *mut *mut ErssDistribution,
) -> ErssStatus {
    guard(|| {
        if spec.is_null() {
            return Err(Fail::Null("spec"));
        }
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let s = CStr::from_ptr(spec).to_str().map_err(|_| Fail::Utf8)?;
        let d = erss_extropy::cli::parse_dist(s)?;
        out.write(boxed(ErssDistribution(d)));
        Ok(())
    })
}

/// Releases a distribution handle. Null is ignored.
///
/// # Safety
/// `dist` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn erss_dist_free(dist: *mut ErssDistribution) {
    if !dist.is_null() {
        drop(Box::from_raw(dist));
    }
}

/// Density at `x`.
///
/// # Safety
/// `dist` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn erss_dist_pdf(
    dist: *const ErssDistribution,
    x: f64,
    out: *mut f64,
) -> ErssStatus {
    guard(|| write(out, deref(dist, "dist")?.0.pdf(x), "out"))
}

/// Distribution function at `x`.
///
/// # Safety
/// `dist` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn erss_dist_cdf(
    dist: *const ErssDistribution,
    x: f64,
    out: *mut f64,
) -> ErssStatus {
    guard(|| write(out, deref(dist, "dist")?.0.cdf(x), "out"))
}

/// Quantile at `u` in [0, 1].
///
/// # Safety
/// `dist` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn erss_dist_quantile(
    dist: *const ErssDistribution,
    u: f64,
    out: *mut f64,
) -> ErssStatus {
    guard(|| {
        let q = deref(dist, "dist")?.0.quantile(u)?;
        write(out, q, "out")
    })
}

/// Weight w(x) = x^m.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn erss_weight_power(m: f64, out: *mut *mut ErssWeight) -> ErssStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let w = WeightSpec::power(m)?;
        out.write(boxed(ErssWeight(w)));
        Ok(())
    })
}

/// Releases a weight handle. Null is ignored.
///
/// # Safety
/// `weight` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn erss_weight_free(weight: *mut ErssWeight) {
    if !weight.is_null() {
        drop(Box::from_raw(weight));
    }
}

/// Engine with the given absolute and relative quadrature tolerances.
/// Non-positive values select the defaults.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn erss_engine_new(
    abs_tol: f64,
    rel_tol: f64,
    out: *mut *mut ErssEngine,
) -> ErssStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let d = Tolerance::default();
        let pick = |v: f64, dflt: f64| if v > 0.0 { v } else { dflt };
        let tol = Tolerance::new(pick(abs_tol, d.abs_tol), pick(rel_tol, d.rel_tol));
        out.write(boxed(ErssEngine(Engine::new(tol))));
        Ok(())
    })
}

/// Releases an engine handle. Null is ignored.
///
/// # Safety
/// `engine` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn erss_engine_free(engine: *mut ErssEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

unsafe fn compute(
    engine: *const ErssEngine,
    dist: *const ErssDistribution,
    weight: *const ErssWeight,
    out: *mut ErssResult,
    f: impl FnOnce(&Engine, &DistributionSpec, &WeightSpec) -> erss_extropy::Result<GweResult>,
) -> ErssStatus {
    guard(|| {
        let e = deref(engine, "engine")?;
        let d = deref(dist, "dist")?;
        let w = deref(weight, "weight")?;
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let r = f(&e.0, &d.0, &w.0)?;
        out.write(to_result(r));
        Ok(())
    })
}

/// Weighted extropy J^w of a single observation.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn erss_weighted_extropy(
    engine: *const ErssEngine,
    dist: *const ErssDistribution,
    weight: *const ErssWeight,
    out: *mut ErssResult,
) -> ErssStatus {
    compute(engine, dist, weight, out, |e, d, w| {
        e.weighted_extropy(d, w)
    })
}

/// GWE of an SRS of size `n`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn erss_gwe_srs(
    engine: *const ErssEngine,
    dist: *const ErssDistribution,
    weight: *const ErssWeight,
    n: u32,
    out: *mut ErssResult,
) -> ErssStatus {
    compute(engine, dist, weight, out, |e, d, w| e.gwe_srs(d, w, n))
}

/// GWE of an ERSS of size `n` through Beta expectations of Λ.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn erss_gwe_erss_quantile(
    engine: *const ErssEngine,
    dist: *const ErssDistribution,
    weight: *const ErssWeight,
    n: u32,
    out: *mut ErssResult,
) -> ErssStatus {
    compute(engine, dist, weight, out, |e, d, w| {
        e.gwe_erss_quantile(d, w, n)
    })
}

/// GWE of an ERSS of size `n` from squared order-statistic densities.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn erss_gwe_erss_direct(
    engine: *const ErssEngine,
    dist: *const ErssDistribution,
    weight: *const ErssWeight,
    n: u32,
    out: *mut ErssResult,
) -> ErssStatus {
    compute(engine, dist, weight, out, |e, d, w| {
        e.gwe_erss_direct(d, w, n)
    })
}

/// Closed-form ERSS GWE for the power, exponential and Pareto families with a
/// power weight. Other inputs return `ERSS_STATUS_NOT_APPLICABLE`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn erss_gwe_erss_closed_form(
    engine: *const ErssEngine,
    dist: *const ErssDistribution,
    weight: *const ErssWeight,
    n: u32,
    out: *mut ErssResult,
) -> ErssStatus {
    compute(engine, dist, weight, out, |e, d, w| e.closed_form(d, w, n))
}

/// The ERSS constants Q₁ and Q₂ for size `n`. Either output may be null.
///
/// # Safety
/// Non-null outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn erss_q_constants(n: u32, q1: *mut f64, q2: *mut f64) -> ErssStatus {
    guard(|| {
        let q = QConstants::new(n)?;
        if !q1.is_null() {
            q1.write(q.q1());
        }
        if !q2.is_null() {
            q2.write(q.q2());
        }
        Ok(())
    })
}
