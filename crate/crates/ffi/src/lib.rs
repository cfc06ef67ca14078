//! C ABI for the transduction library.
//!
//! Conventions: every function returns a status code (`STC_OK` on
//! success); results come back through out-pointers. Channel parameters
//! live behind an opaque handle created with `stc_params_new` and
//! released with `stc_params_free`.

use std::os::raw::c_int;

use transduction::directed::{di_rate_estimate, DiInit, FeedbackPolicy};
use transduction::iid;
use transduction::markov;
use transduction::poisson;
use transduction::verify;
use transduction::{ChannelParams, Error, ReceptorState};

pub const STC_OK: c_int = 0;
pub const STC_ERR_INVALID_ARGUMENT: c_int = 1;
pub const STC_ERR_BUDGET: c_int = 2;
pub const STC_ERR_NULL_POINTER: c_int = 3;

/// Opaque handle around validated channel parameters.
pub struct StcParams {
    inner: ChannelParams,
}

fn status_of(e: &Error) -> c_int {
    match e {
        Error::EnumerationBudget { .. } => STC_ERR_BUDGET,
        _ => STC_ERR_INVALID_ARGUMENT,
    }
}

/// Creates a parameter handle; writes it to `out`. The handle must be
/// released with `stc_params_free`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stc_params_new(
    alpha_l: f64,
    alpha_h: f64,
    beta: f64,
    out: *mut *mut StcParams,
) -> c_int {
    if out.is_null() {
        return STC_ERR_NULL_POINTER;
    }
    match ChannelParams::new(alpha_l, alpha_h, beta) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(StcParams { inner }));
            STC_OK
        }
        Err(e) => status_of(&e),
    }
}

/// Releases a handle created by `stc_params_new`. Null is a no-op.
///
/// # Safety
/// `params` must be null or a pointer returned by `stc_params_new` that
/// has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn stc_params_free(params: *mut StcParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Binary entropy in bits.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stc_binary_entropy(p: f64, out: *mut f64) -> c_int {
    if out.is_null() {
        return STC_ERR_NULL_POINTER;
    }
    match markov::binary_entropy(p) {
        Ok(v) => {
            *out = v;
            STC_OK
        }
        Err(e) => status_of(&e),
    }
}

/// Closed-form iid mutual-information rate in bits per step.
///
/// # Safety
/// `params` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stc_iid_rate(
    params: *const StcParams,
    p_h: f64,
    out: *mut f64,
) -> c_int {
    if params.is_null() || out.is_null() {
        return STC_ERR_NULL_POINTER;
    }
    match iid::iid_rate(&(*params).inner, p_h) {
        Ok(v) => {
            *out = v;
            STC_OK
        }
        Err(e) => status_of(&e),
    }
}

/// Maximizes the iid rate; writes the capacity in bits per step and the
/// maximizing high-symbol probability.
///
/// # Safety
/// `params` must be a live handle; out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn stc_capacity(
    params: *const StcParams,
    tol: f64,
    out_value: *mut f64,
    out_argmax_p_h: *mut f64,
) -> c_int {
    if params.is_null() || out_value.is_null() || out_argmax_p_h.is_null() {
        return STC_ERR_NULL_POINTER;
    }
    match iid::maximize_iid(&(*params).inner, tol) {
        Ok(r) => {
            *out_value = r.value_bits_per_step;
            *out_argmax_p_h = r.argmax_p_h;
            STC_OK
        }
        Err(e) => status_of(&e),
    }
}

/// Per-symbol directed-information rate diagnostics for an iid input:
/// the Cesaro average and the final conditional term at horizon `n`.
///
/// # Safety
/// `params` must be a live handle; out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn stc_directed_info_iid(
    params: *const StcParams,
    p_l: f64,
    n: usize,
    out_cesaro_bits: *mut f64,
    out_final_term_bits: *mut f64,
) -> c_int {
    if params.is_null() || out_cesaro_bits.is_null() || out_final_term_bits.is_null() {
        return STC_ERR_NULL_POINTER;
    }
    let policy = FeedbackPolicy::Iid { p_l };
    match di_rate_estimate(
        &(*params).inner,
        &policy,
        DiInit::State(ReceptorState::U),
        n,
    ) {
        Ok(r) => {
            *out_cesaro_bits = r.cesaro_bits_per_step;
            *out_final_term_bits = r.final_term_bits;
            STC_OK
        }
        Err(e) => status_of(&e),
    }
}

/// Structural applicability check; writes 1 or 0.
///
/// # Safety
/// `params` must be a live handle; `out_applicable` must be valid.
#[no_mangle]
pub unsafe extern "C" fn stc_check_conditions(
    params: *const StcParams,
    out_applicable: *mut c_int,
) -> c_int {
    if params.is_null() || out_applicable.is_null() {
        return STC_ERR_NULL_POINTER;
    }
    let report = verify::check_conditions(&(*params).inner);
    *out_applicable = report.theorem1_applicable as c_int;
    STC_OK
}

/// Poisson-channel capacity in nats per unit time.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stc_kabanov_capacity(c: f64, out: *mut f64) -> c_int {
    if out.is_null() {
        return STC_ERR_NULL_POINTER;
    }
    match poisson::kabanov_capacity(c) {
        Ok(v) => {
            *out = v.nats_per_unit_time;
            STC_OK
        }
        Err(e) => status_of(&e),
    }
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn stc_version() -> *const std::os::raw::c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const _
}
