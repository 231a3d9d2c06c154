//! C ABI for the spectral-lab toolkit.
//!
//! Conventions:
//! - Opaque handles (`SlabMatrix`, `SlabPoint`) own heap objects; every
//!   constructor has a matching `_free`, and freeing NULL is a no-op.
//! - Every fallible call returns a `SlabStatus`; results travel through out
//!   pointers. `slab_last_error_message` returns a thread-local description
//!   of the most recent failure on the calling thread.
//! - Structured results (reports, certificates, discs) are returned as
//!   JSON strings in the toolkit's documented schemas; release them with
//!   `slab_string_free`.

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use spectral_lab::bounds::{disc_search_upper, sandwich_report};
use spectral_lab::config::RunConfig;
use spectral_lab::discontinuity::{
    discontinuity_certificate, example_5_1, example_5_2, green_vs_lempert_chain,
    verify_det_identity, PerturbationSpec,
};
use spectral_lab::error::Error;
use spectral_lab::gn_geometry::{ball_radius_in_gn, caratheodory_lb_g3, SigmaPoint};
use spectral_lab::matrix_core::{C64, CMatrix};

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

/// Status codes for every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    NonConvergence = 4,
    AmbiguousClustering = 5,
    Singular = 6,
    OutsideBall = 7,
    NoFeasibleDisc = 8,
    NotCyclic = 9,
    NotSingleEigenvalue = 10,
    ThetaViolated = 11,
    InconsistentSandwich = 12,
    Inconclusive = 13,
    DegenerateDenominator = 14,
    VerificationFailed = 15,
    Internal = 16,
}

/// Opaque dense complex matrix handle.
pub struct SlabMatrix(CMatrix);

/// Opaque symmetrized-coordinates point handle.
pub struct SlabPoint(SigmaPoint);

/// Plain-value run configuration; `degree = 0` means the 2n default.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SlabConfig {
    pub tol: f64,
    pub grid: usize,
    pub degree: usize,
    pub restarts: usize,
    pub seed: u64,
    pub margin: f64,
    pub directions: usize,
}

impl SlabConfig {
    fn to_run_config(self) -> RunConfig {
        RunConfig {
            tol: self.tol,
            grid: self.grid,
            degree: (self.degree > 0).then_some(self.degree),
            restarts: self.restarts,
            seed: self.seed,
            margin: self.margin,
            directions: self.directions,
        }
    }
}

/// The library defaults, handy for C callers.
#[no_mangle]
pub extern "C" fn slab_config_default() -> SlabConfig {
    let cfg = RunConfig::default();
    SlabConfig {
        tol: cfg.tol,
        grid: cfg.grid,
        degree: 0,
        restarts: cfg.restarts,
        seed: cfg.seed,
        margin: cfg.margin,
        directions: cfg.directions,
    }
}

fn set_error(msg: &str) {
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(msg.replace('\0', " ")).ok();
    });
}

fn status_of(err: &Error) -> SlabStatus {
    match err {
        Error::NonConvergence { .. } => SlabStatus::NonConvergence,
        Error::AmbiguousClustering(_) => SlabStatus::AmbiguousClustering,
        Error::Singular(_) => SlabStatus::Singular,
        Error::OutsideBall { .. } => SlabStatus::OutsideBall,
        Error::NoFeasibleDisc(_) => SlabStatus::NoFeasibleDisc,
        Error::NotCyclic(_) => SlabStatus::NotCyclic,
        Error::NotSingleEigenvalue(_) => SlabStatus::NotSingleEigenvalue,
        Error::ThetaViolated(_) => SlabStatus::ThetaViolated,
        Error::InconsistentSandwich { .. } => SlabStatus::InconsistentSandwich,
        Error::CertificateFailed(_) | Error::ChainInconclusive(_) => SlabStatus::Inconclusive,
        Error::DegenerateDenominator => SlabStatus::DegenerateDenominator,
        Error::InvalidInput(_) => SlabStatus::InvalidInput,
        Error::VerificationFailed { .. } => SlabStatus::VerificationFailed,
    }
}

fn fail(err: Error) -> SlabStatus {
    set_error(&err.to_string());
    status_of(&err)
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, SlabStatus> {
    if ptr.is_null() {
        set_error("null string pointer");
        return Err(SlabStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string is not valid UTF-8");
        SlabStatus::InvalidUtf8
    })
}

fn give_string(text: String, out: *mut *mut c_char) -> SlabStatus {
    match CString::new(text) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            SlabStatus::Ok
        }
        Err(_) => {
            set_error("result contained an interior NUL byte");
            SlabStatus::Internal
        }
    }
}

fn give_json<T: serde::Serialize>(value: &T, out: *mut *mut c_char) -> SlabStatus {
    match serde_json::to_string(value) {
        Ok(text) => give_string(text, out),
        Err(e) => {
            set_error(&format!("serialization failed: {e}"));
            SlabStatus::Internal
        }
    }
}

/// Thread-local message describing the most recent failure on this thread,
/// or NULL when no failure has been recorded. The pointer stays valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn slab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

// ---------------------------------------------------------------------------
// Handles
// ---------------------------------------------------------------------------

/// Parses a matrix from its JSON schema {"n", "re": [[...]], "im": [[...]]}.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn slab_matrix_from_json(
    json: *const c_char,
    out: *mut *mut SlabMatrix,
) -> SlabStatus {
    if out.is_null() {
        set_error("null out pointer");
        return SlabStatus::NullPointer;
    }
    let text = match read_str(json) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match serde_json::from_str::<CMatrix>(text) {
        Ok(m) => {
            *out = Box::into_raw(Box::new(SlabMatrix(m)));
            SlabStatus::Ok
        }
        Err(e) => {
            set_error(&format!("cannot parse matrix JSON: {e}"));
            SlabStatus::InvalidInput
        }
    }
}

/// # Safety
/// `m` must come from `slab_matrix_from_json` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn slab_matrix_free(m: *mut SlabMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Dimension of a matrix handle; 0 for NULL.
///
/// # Safety
/// `m` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn slab_matrix_dim(m: *const SlabMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.n())
}

/// Parses a point from its JSON schema {"n", "re": [...], "im": [...]}.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn slab_point_from_json(
    json: *const c_char,
    out: *mut *mut SlabPoint,
) -> SlabStatus {
    if out.is_null() {
        set_error("null out pointer");
        return SlabStatus::NullPointer;
    }
    let text = match read_str(json) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match serde_json::from_str::<SigmaPoint>(text) {
        Ok(p) => {
            *out = Box::into_raw(Box::new(SlabPoint(p)));
            SlabStatus::Ok
        }
        Err(e) => {
            set_error(&format!("cannot parse point JSON: {e}"));
            SlabStatus::InvalidInput
        }
    }
}

/// # Safety
/// `p` must come from `slab_point_from_json` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn slab_point_free(p: *mut SlabPoint) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Releases a string returned by any `_json` call.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn slab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Symmetric functions of the eigenvalues as point JSON.
///
/// # Safety
/// `a` must be a live handle, `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn slab_sigma_json(
    a: *const SlabMatrix,
    out_json: *mut *mut c_char,
) -> SlabStatus {
    let Some(a) = a.as_ref() else {
        set_error("null matrix handle");
        return SlabStatus::NullPointer;
    };
    if out_json.is_null() {
        set_error("null out pointer");
        return SlabStatus::NullPointer;
    }
    give_json(&spectral_lab::matrix_core::sigma(&a.0), out_json)
}

/// Cyclicity test: writes 1 or 0 to `out`.
///
/// # Safety
/// `a` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn slab_is_cyclic(
    a: *const SlabMatrix,
    tol: f64,
    out: *mut i32,
) -> SlabStatus {
    let Some(a) = a.as_ref() else {
        set_error("null matrix handle");
        return SlabStatus::NullPointer;
    };
    if out.is_null() {
        set_error("null out pointer");
        return SlabStatus::NullPointer;
    }
    match spectral_lab::matrix_core::is_cyclic(&a.0, tol) {
        Ok(c) => {
            *out = c as i32;
            SlabStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Spectral lower bound for the Lempert function at (a, b).
///
/// # Safety
/// `a` and `b` must be live handles, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn slab_bharali_lower(
    a: *const SlabMatrix,
    b: *const SlabMatrix,
    tol: f64,
    out: *mut f64,
) -> SlabStatus {
    let (Some(a), Some(b)) = (a.as_ref(), b.as_ref()) else {
        set_error("null matrix handle");
        return SlabStatus::NullPointer;
    };
    if out.is_null() {
        set_error("null out pointer");
        return SlabStatus::NullPointer;
    }
    match spectral_lab::bounds::bharali_lower(&a.0, &b.0, tol) {
        Ok(v) => {
            *out = v;
            SlabStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Caratheodory lower bound on the 3-dimensional symmetrized polydisc.
///
/// # Safety
/// `s` and `t` must be live handles, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn slab_caratheodory_lb_g3(
    s: *const SlabPoint,
    t: *const SlabPoint,
    grid: usize,
    out: *mut f64,
) -> SlabStatus {
    let (Some(s), Some(t)) = (s.as_ref(), t.as_ref()) else {
        set_error("null point handle");
        return SlabStatus::NullPointer;
    };
    if out.is_null() {
        set_error("null out pointer");
        return SlabStatus::NullPointer;
    }
    match caratheodory_lb_g3(&s.0, &t.0, grid) {
        Ok(v) => {
            *out = v;
            SlabStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Safe Euclidean inclusion radius of the symmetrized polydisc.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn slab_ball_radius(
    n: usize,
    directions: usize,
    seed: u64,
    out: *mut f64,
) -> SlabStatus {
    if out.is_null() {
        set_error("null out pointer");
        return SlabStatus::NullPointer;
    }
    if n == 0 || directions == 0 {
        set_error("n and directions must be positive");
        return SlabStatus::InvalidInput;
    }
    *out = ball_radius_in_gn(n, directions, seed);
    SlabStatus::Ok
}

/// Disc search through two points; returns {"alpha", "disc"} JSON.
///
/// # Safety
/// `s`, `t` must be live handles, `cfg` and `out_json` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn slab_disc_search_json(
    s: *const SlabPoint,
    t: *const SlabPoint,
    cfg: *const SlabConfig,
    out_json: *mut *mut c_char,
) -> SlabStatus {
    let (Some(s), Some(t), Some(cfg)) = (s.as_ref(), t.as_ref(), cfg.as_ref()) else {
        set_error("null handle or config");
        return SlabStatus::NullPointer;
    };
    if out_json.is_null() {
        set_error("null out pointer");
        return SlabStatus::NullPointer;
    }
    match disc_search_upper(&s.0, &t.0, &cfg.to_run_config()) {
        Ok((alpha, disc)) => {
            #[derive(serde::Serialize)]
            struct Out {
                alpha: f64,
                disc: spectral_lab::bounds::AnalyticDisc,
            }
            give_json(&Out { alpha, disc }, out_json)
        }
        Err(e) => fail(e),
    }
}

/// Full sandwich report for a pair of matrices, as JSON.
///
/// # Safety
/// `a`, `b` must be live handles, `cfg` and `out_json` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn slab_sandwich_report_json(
    a: *const SlabMatrix,
    b: *const SlabMatrix,
    cfg: *const SlabConfig,
    out_json: *mut *mut c_char,
) -> SlabStatus {
    let (Some(a), Some(b), Some(cfg)) = (a.as_ref(), b.as_ref(), cfg.as_ref()) else {
        set_error("null handle or config");
        return SlabStatus::NullPointer;
    };
    if out_json.is_null() {
        set_error("null out pointer");
        return SlabStatus::NullPointer;
    }
    match sandwich_report(&a.0, &b.0, &cfg.to_run_config()) {
        Ok(report) => give_json(&report, out_json),
        Err(e) => fail(e),
    }
}

/// Residual of the closed-form symmetric functions of the perturbed block.
/// `j` points at `j_len` superdiagonal positions (may be NULL when empty).
///
/// # Safety
/// `j` must reference `j_len` readable entries; out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn slab_det_identity(
    m: usize,
    j: *const usize,
    j_len: usize,
    delta: f64,
    out_residual: *mut f64,
    out_sign: *mut f64,
) -> SlabStatus {
    if out_residual.is_null() || out_sign.is_null() {
        set_error("null out pointer");
        return SlabStatus::NullPointer;
    }
    if j.is_null() && j_len > 0 {
        set_error("null J array with nonzero length");
        return SlabStatus::NullPointer;
    }
    let j_set: BTreeSet<usize> = (0..j_len).map(|k| *j.add(k)).collect();
    match PerturbationSpec::new(m, j_set, None, delta) {
        Ok(spec) => {
            let report = verify_det_identity(&spec);
            *out_residual = report.max_residual;
            *out_sign = report.observed_sign;
            SlabStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Discontinuity certificate as JSON; `Inconclusive` when the gap does not
/// close.
///
/// # Safety
/// Array arguments must reference the stated lengths; pointers valid.
#[no_mangle]
pub unsafe extern "C" fn slab_discontinuity_certificate_json(
    m: usize,
    j: *const usize,
    j_len: usize,
    delta: f64,
    j_list: *const u32,
    j_list_len: usize,
    auto_shrink: i32,
    cfg: *const SlabConfig,
    out_json: *mut *mut c_char,
) -> SlabStatus {
    let Some(cfg) = cfg.as_ref() else {
        set_error("null config");
        return SlabStatus::NullPointer;
    };
    if out_json.is_null() || (j.is_null() && j_len > 0) || (j_list.is_null() && j_list_len > 0) {
        set_error("null pointer argument");
        return SlabStatus::NullPointer;
    }
    let j_set: BTreeSet<usize> = (0..j_len).map(|k| *j.add(k)).collect();
    let js: Vec<u32> = (0..j_list_len).map(|k| *j_list.add(k)).collect();
    let spec = match PerturbationSpec::new(m, j_set, None, delta) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    match discontinuity_certificate(&spec, &js, &cfg.to_run_config(), auto_shrink != 0) {
        Ok(cert) => give_json(&cert, out_json),
        Err(e) => fail(e),
    }
}

/// First worked example as a certificate JSON.
///
/// # Safety
/// `cfg` and `out_json` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn slab_example51_json(
    eps: f64,
    cfg: *const SlabConfig,
    out_json: *mut *mut c_char,
) -> SlabStatus {
    let Some(cfg) = cfg.as_ref() else {
        set_error("null config");
        return SlabStatus::NullPointer;
    };
    if out_json.is_null() {
        set_error("null out pointer");
        return SlabStatus::NullPointer;
    }
    match example_5_1(eps, &cfg.to_run_config()) {
        Ok(cert) => give_json(&cert, out_json),
        Err(e) => fail(e),
    }
}

/// Second worked example as a bound-report JSON.
///
/// # Safety
/// `cfg` and `out_json` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn slab_example52_json(
    mu_re: f64,
    mu_im: f64,
    cfg: *const SlabConfig,
    out_json: *mut *mut c_char,
) -> SlabStatus {
    let Some(cfg) = cfg.as_ref() else {
        set_error("null config");
        return SlabStatus::NullPointer;
    };
    if out_json.is_null() {
        set_error("null out pointer");
        return SlabStatus::NullPointer;
    }
    match example_5_2(C64::new(mu_re, mu_im), &cfg.to_run_config()) {
        Ok(report) => give_json(&report, out_json),
        Err(e) => fail(e),
    }
}

/// Lempert-vs-Green chain report as JSON; `Inconclusive` when the gap is
/// below the margin.
///
/// # Safety
/// `a` must be a live handle, `cfg` and `out_json` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn slab_green_chain_json(
    a: *const SlabMatrix,
    mu_re: f64,
    mu_im: f64,
    alpha_re: f64,
    alpha_im: f64,
    cfg: *const SlabConfig,
    out_json: *mut *mut c_char,
) -> SlabStatus {
    let (Some(a), Some(cfg)) = (a.as_ref(), cfg.as_ref()) else {
        set_error("null handle or config");
        return SlabStatus::NullPointer;
    };
    if out_json.is_null() {
        set_error("null out pointer");
        return SlabStatus::NullPointer;
    }
    match green_vs_lempert_chain(
        &a.0,
        C64::new(mu_re, mu_im),
        C64::new(alpha_re, alpha_im),
        &cfg.to_run_config(),
    ) {
        Ok(chain) => give_json(&chain, out_json),
        Err(e) => fail(e),
    }
}
