//! C ABI for the covlab library: opaque handles for radius distributions and
//! chain specs, status codes aligned with the CLI's exit codes, and a
//! thread-local last-error message. Strings returned through `char**` are
//! owned by the caller and must be released with [`covlab_string_free`];
//! pointers returned as `const char*` are borrowed and must not be freed.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use covlab::continuum::{critical_scale, vacancy_expectation_exact, PoissonBooleanSpec, ShapeKind};
use covlab::distributions::{ExtendedReal, RadiusDistribution};
use covlab::harness::config::parse_distribution;
use covlab::harness::ExperimentConfig;
use covlab::lattice::{uncovered_prob_formula, uncovered_prob_oracle, LatticeSpec};
use covlab::markov::{
    partial_fraction_e, recurrence_table, threshold_classify, CoverageClass, Initial,
    MarkovCoverageSpec,
};
use covlab::rng::split_stream;
use covlab::verdict::{gauss_ratio_test, Divergence};
use covlab::CovlabError;

/// Call outcome. `COVLAB_STATUS_INVALID` and `COVLAB_STATUS_RUNTIME` match
/// the CLI's exit codes for the same failure classes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovlabStatus {
    Ok = 0,
    /// A parameter or config failed validation; details via
    /// `covlab_last_error_message`.
    Invalid = 2,
    /// The operation itself failed (I/O, unsupported combination, internal
    /// panic).
    Runtime = 3,
    /// A required pointer argument was null.
    NullArg = 4,
}

/// Opaque radius distribution handle.
pub struct CovlabDist(RadiusDistribution);

/// Opaque two-state chain spec handle.
pub struct CovlabMarkov(MarkovCoverageSpec);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized: String = message.chars().map(|c| if c == '\0' { ' ' } else { c }).collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn fail(err: &CovlabError) -> CovlabStatus {
    set_error(&err.to_string());
    if err.is_validation() {
        CovlabStatus::Invalid
    } else {
        CovlabStatus::Runtime
    }
}

fn null_arg(name: &str) -> CovlabStatus {
    set_error(&format!("argument `{name}` is null"));
    CovlabStatus::NullArg
}

/// Run `body` with panics converted to `COVLAB_STATUS_RUNTIME` so unwinding
/// never crosses the C boundary.
fn guard(body: impl FnOnce() -> CovlabStatus) -> CovlabStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            CovlabStatus::Runtime
        }
    }
}

fn extended_to_double(v: ExtendedReal) -> f64 {
    v.finite().unwrap_or(f64::INFINITY)
}

unsafe fn read_utf8<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, CovlabStatus> {
    if ptr.is_null() {
        return Err(null_arg(name));
    }
    match unsafe { CStr::from_ptr(ptr) }.to_str() {
        Ok(s) => Ok(s),
        Err(_) => {
            set_error(&format!("argument `{name}` is not valid UTF-8"));
            Err(CovlabStatus::Invalid)
        }
    }
}

fn hand_out_string(s: String, out: *mut *mut c_char) -> CovlabStatus {
    let c = match CString::new(s) {
        Ok(c) => c,
        Err(_) => {
            set_error("output contained an interior NUL byte");
            return CovlabStatus::Runtime;
        }
    };
    unsafe { *out = c.into_raw() };
    CovlabStatus::Ok
}

/// Library version as a static NUL-terminated string; never freed.
#[no_mangle]
pub extern "C" fn covlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure on this thread. Borrowed; valid until
/// the next failing covlab call on the same thread. Never null.
#[no_mangle]
pub extern "C" fn covlab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Release a string obtained through a `char**` output parameter. Passing
/// null is a no-op.
///
/// # Safety
/// `s` must be a pointer previously returned by this library through a
/// `char**` output, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn covlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Parse a radius distribution from its text form — the same grammar the
/// config files use, e.g. `degenerate(1)`, `bounded-uniform(0,2)`,
/// `pareto-tail(2.0)`, `heavy(0.5)`, `discrete-pareto(2.0)`,
/// `discrete-table((1,0.4),(3,0.6))`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be a valid pointer.
/// On `COVLAB_STATUS_OK`, `*out` owns the handle until `covlab_dist_free`.
#[no_mangle]
pub unsafe extern "C" fn covlab_dist_parse(
    text: *const c_char,
    out: *mut *mut CovlabDist,
) -> CovlabStatus {
    guard(|| {
        if out.is_null() {
            return null_arg("out");
        }
        let text = match unsafe { read_utf8(text, "text") } {
            Ok(t) => t,
            Err(status) => return status,
        };
        match parse_distribution(text) {
            Ok(dist) => {
                unsafe { *out = Box::into_raw(Box::new(CovlabDist(dist))) };
                CovlabStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Release a distribution handle. Passing null is a no-op.
///
/// # Safety
/// `dist` must come from `covlab_dist_parse` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn covlab_dist_free(dist: *mut CovlabDist) {
    if !dist.is_null() {
        drop(unsafe { Box::from_raw(dist) });
    }
}

macro_rules! deref_or_null {
    ($ptr:ident) => {
        match unsafe { $ptr.as_ref() } {
            Some(r) => r,
            None => return null_arg(stringify!($ptr)),
        }
    };
}

/// Canonical text form of the distribution; caller frees via
/// `covlab_string_free`.
///
/// # Safety
/// `dist` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn covlab_dist_canonical(
    dist: *const CovlabDist,
    out: *mut *mut c_char,
) -> CovlabStatus {
    guard(|| {
        if out.is_null() {
            return null_arg("out");
        }
        let dist = deref_or_null!(dist);
        hand_out_string(dist.0.canonical(), out)
    })
}

/// Strict tail `P(rho > x)`.
///
/// # Safety
/// `dist` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn covlab_dist_tail(
    dist: *const CovlabDist,
    x: f64,
    out: *mut f64,
) -> CovlabStatus {
    guard(|| {
        if out.is_null() {
            return null_arg("out");
        }
        let dist = deref_or_null!(dist);
        unsafe { *out = dist.0.tail_probability(x) };
        CovlabStatus::Ok
    })
}

/// Weak tail `P(rho >= x)`.
///
/// # Safety
/// `dist` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn covlab_dist_prob_geq(
    dist: *const CovlabDist,
    x: f64,
    out: *mut f64,
) -> CovlabStatus {
    guard(|| {
        if out.is_null() {
            return null_arg("out");
        }
        let dist = deref_or_null!(dist);
        unsafe { *out = dist.0.prob_geq(x) };
        CovlabStatus::Ok
    })
}

/// Tail regime `liminf`/`limsup` of `x * P(rho > x)`; infinite limits are
/// reported as C `INFINITY`.
///
/// # Safety
/// `dist` must be a live handle; `liminf`/`limsup` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn covlab_dist_tail_regime(
    dist: *const CovlabDist,
    liminf: *mut f64,
    limsup: *mut f64,
) -> CovlabStatus {
    guard(|| {
        if liminf.is_null() {
            return null_arg("liminf");
        }
        if limsup.is_null() {
            return null_arg("limsup");
        }
        let dist = deref_or_null!(dist);
        let regime = dist.0.tail_regime();
        unsafe {
            *liminf = extended_to_double(regime.liminf);
            *limsup = extended_to_double(regime.limsup);
        }
        CovlabStatus::Ok
    })
}

/// `E[rho^d]`; infinite moments are reported as C `INFINITY`.
///
/// # Safety
/// `dist` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn covlab_dist_moment(
    dist: *const CovlabDist,
    d: u32,
    out: *mut f64,
) -> CovlabStatus {
    guard(|| {
        if out.is_null() {
            return null_arg("out");
        }
        let dist = deref_or_null!(dist);
        unsafe { *out = extended_to_double(dist.0.d_moment(d)) };
        CovlabStatus::Ok
    })
}

/// Fill `out[0..n]` with draws from the stream `(seed, stream_index)` —
/// deterministic and independent across distinct indices.
///
/// # Safety
/// `dist` must be a live handle; `out` must point to at least `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn covlab_dist_sample_n(
    dist: *const CovlabDist,
    seed: u64,
    stream_index: u64,
    n: usize,
    out: *mut f64,
) -> CovlabStatus {
    guard(|| {
        if out.is_null() {
            return null_arg("out");
        }
        let dist = deref_or_null!(dist);
        let mut stream = split_stream(seed, stream_index);
        for i in 0..n {
            unsafe { *out.add(i) = dist.0.sample(&mut stream) };
        }
        CovlabStatus::Ok
    })
}

/// Exact expected vacancy fraction of the Poisson cube model on the unit
/// window: `exp(-intensity * E[rho^dim])`.
///
/// # Safety
/// `rho` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn covlab_vacancy_exact(
    intensity: f64,
    dim: usize,
    rho: *const CovlabDist,
    out: *mut f64,
) -> CovlabStatus {
    guard(|| {
        if out.is_null() {
            return null_arg("out");
        }
        let rho = deref_or_null!(rho);
        let spec =
            match PoissonBooleanSpec::unit_window(intensity, dim, ShapeKind::Cube, rho.0.clone()) {
                Ok(spec) => spec,
                Err(e) => return fail(&e),
            };
        match vacancy_expectation_exact(&spec) {
            Ok(v) => {
                unsafe { *out = v };
                CovlabStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Critical intensity scale for balls of radius `r` (`r >= e`) at rate
/// `lambda` in dimension `d`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn covlab_critical_scale(
    r: f64,
    lambda: f64,
    d: usize,
    out: *mut f64,
) -> CovlabStatus {
    guard(|| {
        if out.is_null() {
            return null_arg("out");
        }
        match critical_scale(r, lambda, d) {
            Ok(v) => {
                unsafe { *out = v };
                CovlabStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

fn lattice_prob(
    p: f64,
    rho: *const CovlabDist,
    i: u64,
    j: u64,
    out: *mut f64,
    eval: impl Fn(&LatticeSpec, u64, u64) -> covlab::Result<f64>,
) -> CovlabStatus {
    if out.is_null() {
        return null_arg("out");
    }
    let rho = match unsafe { rho.as_ref() } {
        Some(r) => r,
        None => return null_arg("rho"),
    };
    let spec = match LatticeSpec::new(2, p, rho.0.clone()) {
        Ok(spec) => spec,
        Err(e) => return fail(&e),
    };
    match eval(&spec, i, j) {
        Ok(v) => {
            unsafe { *out = v };
            CovlabStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Exact probability that planar quadrant site `(i, j)` is uncovered, by
/// full enumeration.
///
/// # Safety
/// `rho` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn covlab_lattice_uncovered_oracle(
    p: f64,
    rho: *const CovlabDist,
    i: u64,
    j: u64,
    out: *mut f64,
) -> CovlabStatus {
    guard(|| lattice_prob(p, rho, i, j, out, |s, i, j| uncovered_prob_oracle(s, i, j)))
}

/// Same probability through the closed-form product.
///
/// # Safety
/// `rho` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn covlab_lattice_uncovered_formula(
    p: f64,
    rho: *const CovlabDist,
    i: u64,
    j: u64,
    out: *mut f64,
) -> CovlabStatus {
    guard(|| lattice_prob(p, rho, i, j, out, |s, i, j| uncovered_prob_formula(s, i, j)))
}

/// Ratio-test classification of a positive series from its consecutive
/// terms: `*class_out` is -1 (diverges), 0 (indeterminate), or +1
/// (converges); `*fitted_c` is the fitted exponent, NaN when unavailable.
///
/// # Safety
/// `terms` must point to `n_terms` doubles; `fitted_c` and `class_out` must
/// be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn covlab_gauss_ratio_test(
    terms: *const f64,
    n_terms: usize,
    m_start: u64,
    fitted_c: *mut f64,
    class_out: *mut c_int,
) -> CovlabStatus {
    guard(|| {
        if terms.is_null() {
            return null_arg("terms");
        }
        if fitted_c.is_null() {
            return null_arg("fitted_c");
        }
        if class_out.is_null() {
            return null_arg("class_out");
        }
        let slice = unsafe { std::slice::from_raw_parts(terms, n_terms) };
        let verdict = gauss_ratio_test(slice, m_start);
        unsafe {
            *fitted_c = verdict.fitted_c.unwrap_or(f64::NAN);
            *class_out = match verdict.status {
                Divergence::Diverges => -1,
                Divergence::Indeterminate => 0,
                Divergence::Converges => 1,
            };
        }
        CovlabStatus::Ok
    })
}

/// Build a chain spec handle. `initial` selects the start law: 0 stationary,
/// 1 start at state 0, 2 start at state 1.
///
/// # Safety
/// `rho` must be a live handle; `out` must be a valid pointer. On
/// `COVLAB_STATUS_OK`, `*out` owns the handle until `covlab_markov_free`.
#[no_mangle]
pub unsafe extern "C" fn covlab_markov_new(
    p00: f64,
    p01: f64,
    p10: f64,
    p11: f64,
    rho: *const CovlabDist,
    initial: c_int,
    out: *mut *mut CovlabMarkov,
) -> CovlabStatus {
    guard(|| {
        if out.is_null() {
            return null_arg("out");
        }
        let rho = deref_or_null!(rho);
        let initial = match initial {
            0 => Initial::Stationary,
            1 => Initial::StartAt0,
            2 => Initial::StartAt1,
            other => {
                set_error(&format!("initial must be 0, 1, or 2, got {other}"));
                return CovlabStatus::Invalid;
            }
        };
        match MarkovCoverageSpec::new(p00, p01, p10, p11, rho.0.clone(), initial) {
            Ok(spec) => {
                unsafe { *out = Box::into_raw(Box::new(CovlabMarkov(spec))) };
                CovlabStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Release a chain handle. Passing null is a no-op.
///
/// # Safety
/// `chain` must come from `covlab_markov_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn covlab_markov_free(chain: *mut CovlabMarkov) {
    if !chain.is_null() {
        drop(unsafe { Box::from_raw(chain) });
    }
}

/// Exact uncovered probabilities for target site `k >= 1`: from state 0,
/// from state 1, and from the spec's initial law.
///
/// # Safety
/// `chain` must be a live handle; `p0`, `p1`, `p_init` must be valid
/// pointers.
#[no_mangle]
pub unsafe extern "C" fn covlab_markov_uncovered_prob(
    chain: *const CovlabMarkov,
    k: u64,
    p0: *mut f64,
    p1: *mut f64,
    p_init: *mut f64,
) -> CovlabStatus {
    guard(|| {
        if p0.is_null() {
            return null_arg("p0");
        }
        if p1.is_null() {
            return null_arg("p1");
        }
        if p_init.is_null() {
            return null_arg("p_init");
        }
        let chain = deref_or_null!(chain);
        match recurrence_table(&chain.0, k) {
            Ok(table) => {
                let row = table.row(k);
                unsafe {
                    *p0 = row.p0;
                    *p1 = row.p1;
                    *p_init = row.p_init;
                }
                CovlabStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Almost-sure coverage classification: `*class_out` is +1 (covers), -1
/// (does not cover), or 0 (indeterminate); also reports the stationary open
/// fraction and the tail regime (infinite limits as C `INFINITY`).
///
/// # Safety
/// `chain` must be a live handle; the three out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn covlab_markov_classify(
    chain: *const CovlabMarkov,
    open_fraction: *mut f64,
    tail_liminf: *mut f64,
    tail_limsup: *mut f64,
    class_out: *mut c_int,
) -> CovlabStatus {
    guard(|| {
        if open_fraction.is_null() {
            return null_arg("open_fraction");
        }
        if tail_liminf.is_null() {
            return null_arg("tail_liminf");
        }
        if tail_limsup.is_null() {
            return null_arg("tail_limsup");
        }
        if class_out.is_null() {
            return null_arg("class_out");
        }
        let chain = deref_or_null!(chain);
        let verdict = threshold_classify(&chain.0);
        unsafe {
            *open_fraction = verdict.open_fraction;
            *tail_liminf = extended_to_double(verdict.tail_liminf);
            *tail_limsup = extended_to_double(verdict.tail_limsup);
            *class_out = match verdict.class {
                CoverageClass::CoversAlmostSurely => 1,
                CoverageClass::DoesNotCoverAlmostSurely => -1,
                CoverageClass::Indeterminate => 0,
            };
        }
        CovlabStatus::Ok
    })
}

/// Weight `E` of the `1/(1-s)` pole of the uncovered-probability generating
/// function under tail constant `c`; its sign decides the coverage
/// threshold.
///
/// # Safety
/// `chain` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn covlab_markov_pole_weight(
    chain: *const CovlabMarkov,
    c: f64,
    out: *mut f64,
) -> CovlabStatus {
    guard(|| {
        if out.is_null() {
            return null_arg("out");
        }
        let chain = deref_or_null!(chain);
        match partial_fraction_e(&chain.0, c) {
            Ok(v) => {
                unsafe { *out = v };
                CovlabStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Parse experiment config text (same grammar as the CLI's files), run it,
/// and hand back the JSON summary. The config's `out` path and `format` are
/// ignored — nothing is written to disk. Caller frees `*json_out` via
/// `covlab_string_free`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `json_out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn covlab_run_config(
    text: *const c_char,
    json_out: *mut *mut c_char,
) -> CovlabStatus {
    guard(|| {
        if json_out.is_null() {
            return null_arg("json_out");
        }
        let text = match unsafe { read_utf8(text, "text") } {
            Ok(t) => t,
            Err(status) => return status,
        };
        let config = match ExperimentConfig::parse_str(text) {
            Ok(c) => c,
            Err(e) => return fail(&e),
        };
        match config.execute() {
            Ok(output) => hand_out_string(output.to_json_string(), json_out),
            Err(e) => fail(&e),
        }
    })
}
