//! C ABI over the esckd library.
//!
//! Conventions: ensembles travel as opaque handles created and released by
//! this library; analysis results are plain-old-data structs filled through
//! out-pointers; every fallible call returns an [`EsckdStatus`], and the
//! message for the most recent failure on the current thread is available
//! from [`esckd_last_error_message`]. Strings returned by this library must
//! be released with [`esckd_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fmt::Display;

use esckd::capacity::{channel_mutual_info, optimize_rotated_decoder, repudiation_capacity, DecoderSpec};
use esckd::error::Error;
use esckd::frames::{
    build_mub, build_simplex, frame_from_json, frame_to_json, measure_prepare_fidelity,
    solve_grassmann_frame, verify_frame, Ensemble, SolverConfig,
};
use esckd::mcsim::{simulate, SimConfig, SimParams, SimResult};
use esckd::mub::{mub_full_intercept_error, mub_threshold, MubParams};
use esckd::protocol::{
    asymptotic_rate, attack_summary, joint_distribution, key_rate_noiseless, rate_bounds,
    sift_rate_noiseless, threshold, EscCode, EscParams, JointMethod,
};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EsckdStatus {
    Ok = 0,
    /// A parameter was outside its domain or inconsistent with the handle.
    InvalidArgument = 1,
    /// An iterative routine failed to meet its tolerance.
    NumericalFailure = 2,
    /// A required pointer was null.
    NullPointer = 3,
    /// A string argument was not valid UTF-8.
    Utf8Error = 4,
}

/// Opaque signal ensemble: n unit vectors in a d-dimensional complex space.
pub struct EsckdEnsemble {
    inner: Ensemble,
}

/// Frame diagnostics; see the library documentation for definitions.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EsckdFrameReport {
    pub v1: f64,
    pub v2: f64,
    pub target_overlap: f64,
    pub max_equiangular_deviation: f64,
    pub max_tightness_deviation: f64,
}

/// Post-sift probabilities of the intercept/resend attack.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EsckdAttackSummary {
    pub p_sift: f64,
    pub p_ab: f64,
    pub p_ae: f64,
    pub p_question: f64,
}

/// One-way key-rate bounds in bits per sifted signal.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EsckdRateBounds {
    pub i_ab: f64,
    pub i_ae: f64,
    pub i_be: f64,
    pub i_e: f64,
    pub i_ab_given_e: f64,
}

/// Critical interception fraction and the equivalent noise rates.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EsckdThreshold {
    pub q_star: f64,
    pub p_e_star: f64,
    pub r_star: f64,
    /// True when the one-way bound stays positive at full interception.
    pub saturated: bool,
}

/// Unbiased-basis threshold and peak rate.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EsckdMubThreshold {
    pub p_e_star: f64,
    pub r_star: f64,
    pub rate_max: f64,
}

/// Empirical quadruple of a simulation run.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EsckdSimSummary {
    pub rounds_total: u64,
    pub rounds_sifted: u64,
    pub p_sift: f64,
    pub p_ab: f64,
    pub p_ae: f64,
    pub p_question: f64,
}

/// Decoder selection for [`esckd_channel_capacity`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EsckdDecoder {
    /// The ensemble's own measurement.
    Same = 0,
    /// Measurement of the conjugated ensemble.
    Conjugate = 1,
    /// Qubit antipodal preset.
    BlochInversion = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: EsckdStatus, message: impl Display) -> EsckdStatus {
    let text = CString::new(message.to_string()).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
    status
}

fn fail_with(err: Error) -> EsckdStatus {
    let status = match err {
        Error::NumericalFailure(_) => EsckdStatus::NumericalFailure,
        _ => EsckdStatus::InvalidArgument,
    };
    fail(status, err)
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn esckd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

unsafe fn write_out<T>(out: *mut T, value: T) -> EsckdStatus {
    if out.is_null() {
        return fail(EsckdStatus::NullPointer, "output pointer is null");
    }
    unsafe { out.write(value) };
    EsckdStatus::Ok
}

unsafe fn ensemble_ref<'a>(handle: *const EsckdEnsemble) -> Result<&'a Ensemble, EsckdStatus> {
    if handle.is_null() {
        return Err(fail(EsckdStatus::NullPointer, "ensemble handle is null"));
    }
    Ok(unsafe { &(*handle).inner })
}

fn boxed(ensemble: Ensemble) -> *mut EsckdEnsemble {
    Box::into_raw(Box::new(EsckdEnsemble { inner: ensemble }))
}

/// Builds the regular simplex of d+1 vectors in dimension d.
///
/// # Safety
/// `out` must be a valid pointer; the returned handle must be released with
/// [`esckd_ensemble_free`].
#[no_mangle]
pub unsafe extern "C" fn esckd_simplex_new(
    d: usize,
    out: *mut *mut EsckdEnsemble,
) -> EsckdStatus {
    match build_simplex(d) {
        Ok(e) => unsafe { write_out(out, boxed(e)) },
        Err(err) => fail_with(err),
    }
}

/// Searches numerically for an equiangular frame of n vectors in dimension
/// d. Fails with `NumericalFailure` when no restart reaches `tolerance`.
///
/// # Safety
/// `out` must be a valid pointer; the returned handle must be released with
/// [`esckd_ensemble_free`].
#[no_mangle]
pub unsafe extern "C" fn esckd_frame_solve(
    d: usize,
    n: usize,
    seed: u64,
    restarts: u32,
    max_iterations: u32,
    tolerance: f64,
    out: *mut *mut EsckdEnsemble,
) -> EsckdStatus {
    let mut cfg = SolverConfig::new(seed);
    cfg.restarts = restarts;
    cfg.max_iterations = max_iterations;
    cfg.success_tolerance = tolerance;
    match solve_grassmann_frame(d, n, &cfg) {
        Ok(outcome) if outcome.converged => unsafe { write_out(out, boxed(outcome.ensemble)) },
        Ok(outcome) => fail(
            EsckdStatus::NumericalFailure,
            format!(
                "search stalled: equiangular deviation {:.3e}, tightness deviation {:.3e}",
                outcome.report.max_equiangular_deviation, outcome.report.max_tightness_deviation
            ),
        ),
        Err(err) => fail_with(err),
    }
}

/// Builds k mutually unbiased bases in prime dimension d (k·d vectors).
///
/// # Safety
/// `out` must be a valid pointer; the returned handle must be released with
/// [`esckd_ensemble_free`].
#[no_mangle]
pub unsafe extern "C" fn esckd_mub_new(
    d: usize,
    k: usize,
    out: *mut *mut EsckdEnsemble,
) -> EsckdStatus {
    match build_mub(d, k) {
        Ok(e) => unsafe { write_out(out, boxed(e)) },
        Err(err) => fail_with(err),
    }
}

/// Parses the JSON frame format.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must be a valid
/// pointer; the returned handle must be released with
/// [`esckd_ensemble_free`].
#[no_mangle]
pub unsafe extern "C" fn esckd_frame_from_json(
    text: *const c_char,
    out: *mut *mut EsckdEnsemble,
) -> EsckdStatus {
    if text.is_null() {
        return fail(EsckdStatus::NullPointer, "input string is null");
    }
    let text = match unsafe { CStr::from_ptr(text) }.to_str() {
        Ok(t) => t,
        Err(e) => return fail(EsckdStatus::Utf8Error, e),
    };
    match frame_from_json(text) {
        Ok(e) => unsafe { write_out(out, boxed(e)) },
        Err(err) => fail_with(err),
    }
}

/// Serializes an ensemble to the JSON frame format (17 significant digits).
///
/// # Safety
/// `handle` must be a live ensemble handle; `out` must be a valid pointer.
/// The returned string must be released with [`esckd_string_free`].
#[no_mangle]
pub unsafe extern "C" fn esckd_frame_to_json(
    handle: *const EsckdEnsemble,
    out: *mut *mut c_char,
) -> EsckdStatus {
    let ensemble = match unsafe { ensemble_ref(handle) } {
        Ok(e) => e,
        Err(status) => return status,
    };
    let text = frame_to_json(ensemble);
    match CString::new(text) {
        Ok(c) => unsafe { write_out(out, c.into_raw()) },
        Err(e) => fail(EsckdStatus::InvalidArgument, e),
    }
}

/// Releases a string allocated by this library.
///
/// # Safety
/// `text` must have been returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn esckd_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(unsafe { CString::from_raw(text) });
    }
}

/// Releases an ensemble handle.
///
/// # Safety
/// `handle` must have been returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn esckd_ensemble_free(handle: *mut EsckdEnsemble) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Dimension d of the ensemble's space; 0 for a null handle.
///
/// # Safety
/// `handle` must be null or a live ensemble handle.
#[no_mangle]
pub unsafe extern "C" fn esckd_ensemble_dim(handle: *const EsckdEnsemble) -> usize {
    unsafe { ensemble_ref(handle) }.map_or(0, Ensemble::dim)
}

/// Number of vectors n; 0 for a null handle.
///
/// # Safety
/// `handle` must be null or a live ensemble handle.
#[no_mangle]
pub unsafe extern "C" fn esckd_ensemble_size(handle: *const EsckdEnsemble) -> usize {
    unsafe { ensemble_ref(handle) }.map_or(0, Ensemble::len)
}

/// Exact frame diagnostics by direct summation.
///
/// # Safety
/// `handle` must be a live ensemble handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esckd_frame_verify(
    handle: *const EsckdEnsemble,
    out: *mut EsckdFrameReport,
) -> EsckdStatus {
    let ensemble = match unsafe { ensemble_ref(handle) } {
        Ok(e) => e,
        Err(status) => return status,
    };
    let report = verify_frame(ensemble);
    unsafe {
        write_out(
            out,
            EsckdFrameReport {
                v1: report.v1,
                v2: report.v2,
                target_overlap: report.target_overlap,
                max_equiangular_deviation: report.max_equiangular_deviation,
                max_tightness_deviation: report.max_tightness_deviation,
            },
        )
    }
}

/// Average measure-and-prepare fidelity d·V₂/n² of a tight ensemble.
///
/// # Safety
/// `handle` must be a live ensemble handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esckd_measure_prepare_fidelity(
    handle: *const EsckdEnsemble,
    out: *mut f64,
) -> EsckdStatus {
    let ensemble = match unsafe { ensemble_ref(handle) } {
        Ok(e) => e,
        Err(status) => return status,
    };
    match measure_prepare_fidelity(ensemble) {
        Ok(f) => unsafe { write_out(out, f) },
        Err(err) => fail_with(err),
    }
}

/// Noiseless sift probability s/(n(n−1)).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esckd_sift_rate_noiseless(
    n: usize,
    d: usize,
    m: usize,
    out: *mut f64,
) -> EsckdStatus {
    match EscCode::new(n, d, m) {
        Ok(code) => unsafe { write_out(out, sift_rate_noiseless(&code)) },
        Err(err) => fail_with(err),
    }
}

/// Noiseless key rate in bits per sifted signal.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esckd_key_rate_noiseless(
    n: usize,
    d: usize,
    m: usize,
    out: *mut f64,
) -> EsckdStatus {
    match EscCode::new(n, d, m) {
        Ok(code) => unsafe { write_out(out, key_rate_noiseless(&code)) },
        Err(err) => fail_with(err),
    }
}

/// Closed-form post-sift probabilities at interception fraction q.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esckd_attack_summary(
    n: usize,
    d: usize,
    m: usize,
    q: f64,
    out: *mut EsckdAttackSummary,
) -> EsckdStatus {
    match EscParams::new(n, d, m, q) {
        Ok(params) => {
            let s = attack_summary(&params);
            unsafe {
                write_out(
                    out,
                    EsckdAttackSummary {
                        p_sift: s.p_sift,
                        p_ab: s.p_ab,
                        p_ae: s.p_ae,
                        p_question: s.p_question,
                    },
                )
            }
        }
        Err(err) => fail_with(err),
    }
}

/// Key-rate bounds from the exact post-sift joint distribution.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esckd_rate_bounds(
    n: usize,
    d: usize,
    m: usize,
    q: f64,
    out: *mut EsckdRateBounds,
) -> EsckdStatus {
    let params = match EscParams::new(n, d, m, q) {
        Ok(p) => p,
        Err(err) => return fail_with(err),
    };
    match joint_distribution(&params, JointMethod::ClosedSymmetry) {
        Ok(joint) => {
            let b = rate_bounds(&joint);
            unsafe {
                write_out(
                    out,
                    EsckdRateBounds {
                        i_ab: b.i_ab,
                        i_ae: b.i_ae,
                        i_be: b.i_be,
                        i_e: b.i_e,
                        i_ab_given_e: b.i_ab_given_e,
                    },
                )
            }
        }
        Err(err) => fail_with(err),
    }
}

/// Critical interception fraction and equivalent depolarizing rate.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esckd_threshold(
    n: usize,
    d: usize,
    m: usize,
    out: *mut EsckdThreshold,
) -> EsckdStatus {
    let code = match EscCode::new(n, d, m) {
        Ok(c) => c,
        Err(err) => return fail_with(err),
    };
    match threshold(&code) {
        Ok(t) => unsafe {
            write_out(
                out,
                EsckdThreshold {
                    q_star: t.q_star,
                    p_e_star: t.p_e_star,
                    r_star: t.r_star,
                    saturated: t.saturated,
                },
            )
        },
        Err(err) => fail_with(err),
    }
}

/// Large-d key rate per signal at n = alpha·d.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esckd_asymptotic_rate(d: usize, alpha: f64, out: *mut f64) -> EsckdStatus {
    match asymptotic_rate(d, alpha) {
        Ok(r) => unsafe { write_out(out, r) },
        Err(err) => fail_with(err),
    }
}

/// Unbiased-basis threshold and sift-weighted peak rate.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esckd_mub_threshold(
    d: usize,
    k: usize,
    out: *mut EsckdMubThreshold,
) -> EsckdStatus {
    match MubParams::new(d, k) {
        Ok(params) => {
            let t = mub_threshold(&params);
            unsafe {
                write_out(
                    out,
                    EsckdMubThreshold { p_e_star: t.p_e_star, r_star: t.r_star, rate_max: t.rate_max },
                )
            }
        }
        Err(err) => fail_with(err),
    }
}

/// Error probability of the unbiased-basis protocol at full interception.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esckd_mub_full_intercept_error(
    d: usize,
    k: usize,
    out: *mut f64,
) -> EsckdStatus {
    match MubParams::new(d, k) {
        Ok(params) => unsafe { write_out(out, mub_full_intercept_error(&params)) },
        Err(err) => fail_with(err),
    }
}

/// Mutual information of the ensemble against a fixed decoder.
///
/// # Safety
/// `handle` must be a live ensemble handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esckd_channel_capacity(
    handle: *const EsckdEnsemble,
    decoder: EsckdDecoder,
    out: *mut f64,
) -> EsckdStatus {
    let ensemble = match unsafe { ensemble_ref(handle) } {
        Ok(e) => e,
        Err(status) => return status,
    };
    let spec = match decoder {
        EsckdDecoder::Same => DecoderSpec::SameEnsemble,
        EsckdDecoder::Conjugate => DecoderSpec::Conjugate,
        EsckdDecoder::BlochInversion => DecoderSpec::BlochInversion,
    };
    match channel_mutual_info(ensemble, &spec) {
        Ok(c) => unsafe { write_out(out, c) },
        Err(err) => fail_with(err),
    }
}

/// Capacity of the subset-exclusion measurement with subsets of size b.
///
/// # Safety
/// `handle` must be a live ensemble handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esckd_repudiation_capacity(
    handle: *const EsckdEnsemble,
    b: usize,
    out: *mut f64,
) -> EsckdStatus {
    let ensemble = match unsafe { ensemble_ref(handle) } {
        Ok(e) => e,
        Err(status) => return status,
    };
    match repudiation_capacity(ensemble, b) {
        Ok(c) => unsafe { write_out(out, c) },
        Err(err) => fail_with(err),
    }
}

/// Maximizes capacity over unitarily rotated decoders. When `out_unitary` is
/// non-null it receives the d×d unitary row-major as interleaved re/im pairs
/// (2·d² doubles).
///
/// # Safety
/// `handle` must be a live ensemble handle; `out_capacity` must be valid;
/// `out_unitary` must be null or point to at least 2·d² doubles.
#[no_mangle]
pub unsafe extern "C" fn esckd_optimize_rotated_decoder(
    handle: *const EsckdEnsemble,
    seed: u64,
    restarts: u32,
    iterations: u32,
    out_capacity: *mut f64,
    out_unitary: *mut f64,
) -> EsckdStatus {
    let ensemble = match unsafe { ensemble_ref(handle) } {
        Ok(e) => e,
        Err(status) => return status,
    };
    match optimize_rotated_decoder(ensemble, seed, restarts, iterations) {
        Ok(res) => {
            if !out_unitary.is_null() {
                let d = res.unitary.dim();
                let m = res.unitary.matrix();
                let slice = unsafe { std::slice::from_raw_parts_mut(out_unitary, 2 * d * d) };
                for i in 0..d {
                    for j in 0..d {
                        slice[2 * (i * d + j)] = m[(i, j)].re;
                        slice[2 * (i * d + j) + 1] = m[(i, j)].im;
                    }
                }
            }
            unsafe { write_out(out_capacity, res.capacity) }
        }
        Err(err) => fail_with(err),
    }
}

fn sim_summary(res: &SimResult) -> EsckdSimSummary {
    EsckdSimSummary {
        rounds_total: res.rounds_total,
        rounds_sifted: res.rounds_sifted,
        p_sift: res.p_sift,
        p_ab: res.p_ab,
        p_ae: res.p_ae,
        p_question: res.p_question,
    }
}

/// Seeded simulation of the spherical-code protocol; the ensemble must have
/// n vectors in dimension d.
///
/// # Safety
/// `handle` must be a live ensemble handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esckd_simulate_esc(
    handle: *const EsckdEnsemble,
    n: usize,
    d: usize,
    m: usize,
    q: f64,
    rounds: u64,
    seed: u64,
    out: *mut EsckdSimSummary,
) -> EsckdStatus {
    let ensemble = match unsafe { ensemble_ref(handle) } {
        Ok(e) => e,
        Err(status) => return status,
    };
    let params = match EscParams::new(n, d, m, q) {
        Ok(p) => p,
        Err(err) => return fail_with(err),
    };
    let cfg = SimConfig::new(SimParams::Esc(params), rounds, seed);
    match simulate(&cfg, ensemble) {
        Ok(res) => unsafe { write_out(out, sim_summary(&res)) },
        Err(err) => fail_with(err),
    }
}

/// Seeded simulation of the unbiased-basis protocol; the ensemble must hold
/// k bases of dimension d (as built by [`esckd_mub_new`]).
///
/// # Safety
/// `handle` must be a live ensemble handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esckd_simulate_mub(
    handle: *const EsckdEnsemble,
    d: usize,
    k: usize,
    q: f64,
    rounds: u64,
    seed: u64,
    out: *mut EsckdSimSummary,
) -> EsckdStatus {
    let ensemble = match unsafe { ensemble_ref(handle) } {
        Ok(e) => e,
        Err(status) => return status,
    };
    let params = match MubParams::new(d, k) {
        Ok(p) => p,
        Err(err) => return fail_with(err),
    };
    let cfg = SimConfig::new(SimParams::Mub { params, q }, rounds, seed);
    match simulate(&cfg, ensemble) {
        Ok(res) => unsafe { write_out(out, sim_summary(&res)) },
        Err(err) => fail_with(err),
    }
}
